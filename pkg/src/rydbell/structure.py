"""Single-atom Rydberg structure.

Energies come from the Rydberg-Ritz quantum-defect expansion,

    E(n, l, j) = -h c Ry_M / (n - delta)^2,
    delta = delta0 + delta2 / (n - delta0)^2,

radial wavefunctions from Numerov integration of the radial equation on a
square-root-scaled grid (inward, from the classically forbidden outer region),
and dipole matrix elements from the product of a radial integral and the
standard Wigner 3-j/6-j angular reduction in the (l, s=1/2, j, m_j) basis.

Internals are in atomic units; the public API returns SI (J, C*m).  Only
fine structure is tracked: levels are labeled by (n, l, j, m_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .angular import lande_g, wigner_3j, wigner_6j
from .constants import (
    BOHR_MAGNETON,
    BOHR_RADIUS,
    E_CHARGE,
    FINE_STRUCTURE,
    H_PLANCK,
    RYDBERG_INF,
    SPEED_OF_LIGHT,
)
from .errors import ConfigurationError, NumericalError
from .species import FieldConfig, RydbergLevel, Species

__all__ = [
    "quantum_defect",
    "level_energy",
    "radial_wavefunction",
    "radial_matrix_element",
    "dipole_matrix_element",
    "zeeman_shift",
    "RadialWavefunction",
]

# Numerov step in sqrt(Bohr-radius) units; matches common practice for
# alkali Rydberg wavefunctions and passes the hydrogenic checks to <1e-4.
DEFAULT_STEP = 1e-3


def quantum_defect(species: Species, n: int, l: int, j: float) -> float:
    """Rydberg-Ritz quantum defect for the (l, j) series at principal number n."""
    d0, d2 = species.defect_coefficients(l, j)
    if d0 == 0.0 and d2 == 0.0:
        return 0.0
    return d0 + d2 / (n - d0) ** 2


def effective_n(species: Species, n: int, l: int, j: float) -> float:
    n_eff = n - quantum_defect(species, n, l, j)
    if n_eff <= 0:
        raise ConfigurationError(
            f"{species.name}: effective principal number n - delta = {n_eff} <= 0 "
            f"for n={n}, l={l}, j={j}"
        )
    return n_eff


def level_energy(level: RydbergLevel) -> float:
    """Level energy in J relative to the ionization threshold (negative)."""
    sp = level.species
    n_eff = effective_n(sp, level.n, level.l, level.j)
    return -H_PLANCK * SPEED_OF_LIGHT * sp.rydberg_constant / n_eff**2


def zeeman_shift(level: RydbergLevel, field: FieldConfig) -> float:
    """Linear Zeeman shift g_j mu_B m_j B in J (field along the quantization axis)."""
    return lande_g(level.l, level.j) * BOHR_MAGNETON * level.m_j * field.b_tesla


# --------------------------------------------------------------------------
# Radial problem (atomic units)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialWavefunction:
    """Sampled u(r) = r R(r) on an ascending radial grid (atomic units).

    Normalized so that  integral u(r)^2 dr = 1.  The underlying grid is
    uniform in x = sqrt(r) with step `step`, so two wavefunctions computed
    with the same step share grid points on their overlap.
    """

    r: np.ndarray
    u: np.ndarray
    step: float

    def overlap(self, other: "RadialWavefunction", power: int = 0) -> float:
        """integral u1 u2 r^power dr on the common grid."""
        if abs(self.step - other.step) > 1e-15:
            raise ValueError("wavefunctions sampled with different steps")
        # Align the uniform-in-sqrt(r) grids via their integer offsets.
        i1 = round(math.sqrt(self.r[0]) / self.step)
        i2 = round(math.sqrt(other.r[0]) / self.step)
        if i1 <= i2:
            a, b = self.u[i2 - i1:], other.u
            r = other.r
        else:
            a, b = self.u, other.u[i1 - i2:]
            r = self.r
        m = min(len(a), len(b))
        integrand = a[:m] * b[:m]
        if power:
            integrand = integrand * r[:m] ** power
        return float(np.trapezoid(integrand, r[:m]))


def _core_potential(species: Species, l: int, r: np.ndarray) -> np.ndarray:
    """Model core potential in a.u.; pure Coulomb for hydrogen-like species."""
    mp = species.model_potential
    if mp is None:
        return -1.0 / r
    t = mp.term_for(l)
    z_eff = (
        1.0
        + (mp.z - 1.0) * np.exp(-t.a1 * r)
        - r * (t.a3 + t.a4 * r) * np.exp(-t.a2 * r)
    )
    polarization = -mp.alpha_c / (2.0 * r**4) * (1.0 - np.exp(-((r / t.rc) ** 6)))
    return -z_eff / r + polarization


def _potential(species: Species, l: int, j: float, r: np.ndarray) -> np.ndarray:
    """Core potential plus spin-orbit term."""
    v = _core_potential(species, l, r)
    so = (j * (j + 1.0) - l * (l + 1.0) - 0.75) / 2.0
    return v + FINE_STRUCTURE**2 / (2.0 * r**3) * so


def _inner_cutoff(species: Species, l: int, energy: float, mu: float) -> float:
    """Inner integration cutoff: max(0.1 x classical turning point, alpha_c^(1/3)).

    For the production Rydberg states the core radius alpha_c^(1/3) dominates.
    The turning-point term only matters for hydrogen-like fixtures, where it is
    scaled down by 10x so that low-n states keep their norm to < 1e-6 (the
    forbidden-region tail below the turning point is not negligible at low n).
    """
    core = 1e-4
    if species.model_potential is not None:
        core = max(core, species.model_potential.alpha_c ** (1.0 / 3.0))
    # inner turning point of -1/r + l(l+1)/(2 mu r^2) at energy E (< 0)
    if l > 0:
        disc = 1.0 + 2.0 * energy * l * (l + 1.0) / mu
        if disc > 0.0:
            r_turn = (-1.0 + math.sqrt(disc)) / (2.0 * energy)
            core = max(core, 0.1 * r_turn)
    return core


@lru_cache(maxsize=512)
def _radial_cached(
    species: Species, n: int, l: int, j2: int, step: float
) -> RadialWavefunction:
    return _numerov_radial(species, n, l, j2 / 2.0, step)


def _numerov_radial(
    species: Species, n: int, l: int, j: float, step: float
) -> RadialWavefunction:
    """Inward Numerov integration of u'' = f(r) u on x = sqrt(r)."""
    n_eff = effective_n(species, n, l, j)
    mu = species.reduced_electron_mass
    energy = -mu / (2.0 * n_eff**2)  # Hartree

    r_outer = 2.0 * n * (n + 15.0)
    r_inner = _inner_cutoff(species, l, energy, mu)

    # snap both ends to multiples of the step so grids of different levels align
    k_in = max(2, math.ceil(math.sqrt(r_inner) / step))
    k_out = math.floor(math.sqrt(r_outer) / step)
    if k_out - k_in < 16:
        raise NumericalError(
            f"radial grid degenerate for n={n}, l={l}: [{r_inner}, {r_outer}]"
        )
    x = np.arange(k_in, k_out + 1, dtype=float) * step
    r = x * x

    f = 2.0 * mu * (_potential(species, l, j, r) - energy) + l * (l + 1.0) / r**2
    g = 4.0 * r * f + 0.75 / r  # w'' = g(x) w  for w = u / x^(1/2)
    h2 = step * step
    coeff = 1.0 - h2 * g / 12.0

    w = np.zeros_like(x)
    w[-1] = 1e-10
    w[-2] = 2e-10
    # Numerov recurrence, integrating inward
    for i in range(len(x) - 3, -1, -1):
        w[i] = ((12.0 - 10.0 * coeff[i + 1]) * w[i + 1] - coeff[i + 2] * w[i + 2]) / coeff[i]
        if abs(w[i]) > 1e250:  # rescale to avoid overflow deep in the core
            w /= 1e200

    u = w * np.sqrt(x)
    norm2 = float(np.trapezoid(u * u, r))
    if not np.isfinite(norm2) or norm2 <= 0.0:
        raise NumericalError(
            f"radial normalization failed for {species.name} n={n} l={l} j={j}"
        )
    u = u / math.sqrt(norm2)
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    return RadialWavefunction(r=r, u=u, step=step)


def radial_wavefunction(level: RydbergLevel, step: float = DEFAULT_STEP) -> RadialWavefunction:
    """Normalized radial function u(r) = r R(r) for the level (atomic units)."""
    return _radial_cached(level.species, level.n, level.l, round(2 * level.j), step)


def radial_matrix_element(
    a: RydbergLevel, b: RydbergLevel, step: float = DEFAULT_STEP
) -> float:
    """Radial integral <a| r |b> = integral u_a u_b r dr, in Bohr radii."""
    ua = radial_wavefunction(a, step)
    ub = radial_wavefunction(b, step)
    return ua.overlap(ub, power=1)


# --------------------------------------------------------------------------
# Dipole matrix elements
# --------------------------------------------------------------------------


def _reduced_l(a: RydbergLevel, b: RydbergLevel, step: float) -> float:
    """Symmetric reduced element <l_b || r || l_a> in a0 units."""
    radial = radial_matrix_element(a, b, step)
    return (
        (-1.0) ** b.l
        * math.sqrt((2.0 * b.l + 1.0) * (2.0 * a.l + 1.0))
        * wigner_3j(b.l, 1, a.l, 0, 0, 0)
        * radial
    )


def _reduced_j(a: RydbergLevel, b: RydbergLevel, step: float) -> float:
    """Symmetric reduced element <j_b || r || j_a> in a0 units (s = 1/2)."""
    s = 0.5
    return (
        (-1.0) ** round(b.l + s + a.j + 1.0)
        * math.sqrt((2.0 * b.j + 1.0) * (2.0 * a.j + 1.0))
        * wigner_6j(b.j, 1, a.j, a.l, s, b.l)
        * _reduced_l(a, b, step)
    )


def dipole_matrix_element(
    a: RydbergLevel, b: RydbergLevel, q: int, step: float = DEFAULT_STEP
) -> float:
    """Matrix element <b| d_q |a> of the spherical dipole component, in C*m.

    Selection rules (exact zeros): |l_a - l_b| = 1, |j_a - j_b| <= 1, and
    m_j(b) = m_j(a) + q.  Elements are real in this phase convention and
    satisfy <b|d_q|a> = (-1)^q <a|d_-q|b>.
    """
    if a.species is not b.species:
        raise ConfigurationError("dipole element requires levels of the same species")
    if q not in (-1, 0, 1):
        raise ValueError("spherical component q must be -1, 0 or +1")
    if abs(a.l - b.l) != 1:
        return 0.0
    if abs(a.j - b.j) > 1.001:
        return 0.0
    if round(2 * b.m_j) != round(2 * (a.m_j + q)):
        return 0.0
    three_j = wigner_3j(b.j, 1, a.j, -b.m_j, q, a.m_j)
    if three_j == 0.0:
        return 0.0
    val = (-1.0) ** round(b.j - b.m_j) * three_j * _reduced_j(a, b, step)
    return val * E_CHARGE * BOHR_RADIUS


def hydrogenic_species(name: str = "H", mass_u: float = 1.007825) -> Species:
    """Hydrogen-like test species: all defects zero, pure Coulomb core."""
    defects = {(l, j2): (0.0, 0.0) for l in range(12) for j2 in (2 * l - 1, 2 * l + 1) if j2 > 0}
    return Species(
        name=name,
        mass_u=mass_u,
        rydberg_constant=RYDBERG_INF,
        defect_table=defects,
        model_potential=None,
    )
