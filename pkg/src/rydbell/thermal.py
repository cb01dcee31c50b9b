"""Classical thermal motion of the trapped pair: offsets, averaging, Doppler.

The two atoms sit in separate harmonic traps; only the longitudinal (y)
relative coordinate is averaged over (the radial trap frequency is an order
of magnitude higher, making the radial spread negligible).  The relative
offset y = |y2 - y1| is Gaussian with

    sigma = sqrt(k_B T / (m_red omega_y^2)),
    m_red = m1 m2 / (m1 + m2),
    T = m_red (T1/m1 + T2/m2),

and averages of f(|y|) are evaluated under the signed Gaussian, which is the
same integral as under the folded density.

Doppler dephasing of the interval between the two Rydberg pi pulses uses the
two-photon wavevector |k| = 2 pi (1/lambda1 - 1/lambda2) and the stochastic
phase Phi = |k| v dt.  The temperature convention here is <v^2> = 2 k_B T / m
for the probed axis (release-and-recapture thermometry convention), giving

    <e^{i Phi}> = exp(-<Phi^2>/2) = exp(-k_B T |k|^2 dt^2 / m).

The Monte-Carlo cross-checks sample the same conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import K_BOLTZMANN
from .errors import ConfigurationError, DomainError

__all__ = [
    "TrapParams",
    "ThermalState",
    "OffsetDistribution",
    "ThermalAverage",
    "reduced_mass",
    "combined_temperature",
    "thermal_average",
    "doppler_dephasing_factor",
    "doppler_dephasing_mc",
    "sample_offset",
    "sample_velocity",
    "sample_doppler_velocity",
]


@dataclass(frozen=True)
class TrapParams:
    """Trap frequencies in rad/s (longitudinal along y, radial)."""

    omega_y: float
    omega_r: float

    def __post_init__(self):
        if self.omega_y <= 0 or self.omega_r <= 0:
            raise ConfigurationError("trap frequencies must be positive")


@dataclass(frozen=True)
class ThermalState:
    """Measured temperatures and masses of the two atoms."""

    t1: float  # K
    t2: float  # K
    m1: float  # kg
    m2: float  # kg

    def __post_init__(self):
        if self.t1 <= 0 or self.t2 <= 0:
            raise ConfigurationError("temperatures must be positive")
        if self.m1 <= 0 or self.m2 <= 0:
            raise ConfigurationError("masses must be positive")


def reduced_mass(m1: float, m2: float) -> float:
    """m1 m2 / (m1 + m2)."""
    if m1 <= 0 or m2 <= 0:
        raise DomainError("masses must be positive")
    return m1 * m2 / (m1 + m2)


def combined_temperature(thermal: ThermalState) -> float:
    """Average pair temperature: T / m_red = T1/m1 + T2/m2."""
    m_red = reduced_mass(thermal.m1, thermal.m2)
    return m_red * (thermal.t1 / thermal.m1 + thermal.t2 / thermal.m2)


@dataclass(frozen=True)
class OffsetDistribution:
    """Gaussian distribution of the signed relative offset y2 - y1."""

    sigma: float  # m
    m_red: float  # kg
    temperature: float  # K
    omega_y: float  # rad/s

    def __post_init__(self):
        expected = math.sqrt(K_BOLTZMANN * self.temperature / (self.m_red * self.omega_y**2))
        if abs(self.sigma - expected) > 1e-12 * expected:
            raise ConfigurationError(
                f"inconsistent offset distribution: sigma={self.sigma} but "
                f"sqrt(kT/(m w^2))={expected}"
            )

    @classmethod
    def from_experiment(cls, trap: TrapParams, thermal: ThermalState) -> "OffsetDistribution":
        m_red = reduced_mass(thermal.m1, thermal.m2)
        t = combined_temperature(thermal)
        sigma = math.sqrt(K_BOLTZMANN * t / (m_red * trap.omega_y**2))
        return cls(sigma=sigma, m_red=m_red, temperature=t, omega_y=trap.omega_y)


@dataclass(frozen=True)
class ThermalAverage:
    value: float
    standard_error: float | None
    method: str
    n: int


def thermal_average(
    f,
    dist: OffsetDistribution,
    method: str = "quadrature",
    n: int = 40,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> ThermalAverage:
    """Average f(|y|) over the Gaussian offset distribution.

    method="quadrature": Gauss-Hermite over the signed coordinate with n
    distinct non-negative evaluation nodes (n >= 8).  Because the integrand
    f(|y|) is even, the underlying 2n-point signed rule collapses onto the n
    positive nodes with doubled weights, so each basis evaluation counts.
    method="monte_carlo": n samples (n >= 1000) of the same Gaussian;
    returns the sample standard error as well.
    """
    if method == "quadrature":
        if n < 8:
            raise ConfigurationError("quadrature needs at least 8 nodes")
        nodes, weights = np.polynomial.hermite.hermgauss(2 * n)
        positive = nodes > 0.0
        ys = math.sqrt(2.0) * dist.sigma * nodes[positive]
        vals = np.array([f(y) for y in ys], dtype=float)
        value = float(np.sum(2.0 * weights[positive] * vals) / math.sqrt(math.pi))
        return ThermalAverage(value=value, standard_error=None, method=method, n=n)
    if method == "monte_carlo":
        if n < 1000:
            raise ConfigurationError("Monte Carlo needs at least 1000 samples")
        if rng is None:
            if seed is None:
                raise ConfigurationError("Monte Carlo requires a seed or rng")
            rng = np.random.default_rng(seed)
        ys = np.abs(sample_offset(dist, rng, n))
        vals = np.array([f(y) for y in ys], dtype=float)
        value = float(np.mean(vals))
        stderr = float(np.std(vals, ddof=1) / math.sqrt(n))
        return ThermalAverage(value=value, standard_error=stderr, method=method, n=n)
    raise ConfigurationError(f"unknown averaging method '{method}'")


# --------------------------------------------------------------------------
# Doppler dephasing
# --------------------------------------------------------------------------


def two_photon_wavevector(lambda1: float, lambda2: float) -> float:
    """|k| = 2 pi (1/lambda1 - 1/lambda2) for co-propagating beams."""
    if lambda1 <= 0 or lambda2 <= 0:
        raise DomainError("wavelengths must be positive")
    if lambda1 >= lambda2:
        raise DomainError("expected lambda1 < lambda2")
    return 2.0 * math.pi * (1.0 / lambda1 - 1.0 / lambda2)


def doppler_dephasing_factor(
    temperature: float, mass: float, dt: float, lambda1: float, lambda2: float
) -> float:
    """Shot-averaged phase factor <e^{i Phi}> = exp(-k_B T |k|^2 dt^2 / m)."""
    if temperature < 0 or mass <= 0 or dt < 0:
        raise DomainError("need T >= 0, m > 0, dt >= 0")
    k = two_photon_wavevector(lambda1, lambda2)
    return math.exp(-K_BOLTZMANN * temperature * k**2 * dt**2 / mass)


def doppler_dephasing_mc(
    temperature: float,
    mass: float,
    dt: float,
    lambda1: float,
    lambda2: float,
    n: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Monte-Carlo cross-check of the dephasing factor: mean of cos(Phi).

    Velocities are sampled along the two-photon axis with <v^2> = 2 k_B T / m,
    matching the analytic exponent.  Returns (mean, standard error).
    """
    k = two_photon_wavevector(lambda1, lambda2)
    v = sample_doppler_velocity(temperature, mass, rng, n)
    c = np.cos(k * v * dt)
    return float(np.mean(c)), float(np.std(c, ddof=1) / math.sqrt(n))


# --------------------------------------------------------------------------
# Sampling primitives (deterministic given the generator state)
# --------------------------------------------------------------------------


def sample_offset(dist: OffsetDistribution, rng: np.random.Generator, n: int | None = None):
    """Signed relative offset(s) y ~ N(0, sigma)."""
    return rng.normal(0.0, dist.sigma, size=n)


def sample_velocity(temperature: float, mass: float, rng: np.random.Generator, n: int | None = None):
    """1-D Maxwell-Boltzmann velocity component(s), sigma_v = sqrt(k_B T / m)."""
    if temperature < 0 or mass <= 0:
        raise DomainError("need T >= 0 and m > 0")
    sigma_v = math.sqrt(K_BOLTZMANN * temperature / mass)
    return rng.normal(0.0, sigma_v, size=n)


def sample_doppler_velocity(
    temperature: float, mass: float, rng: np.random.Generator, n: int | None = None
):
    """Velocity along the two-photon axis with <v^2> = 2 k_B T / m.

    This is the spread entering the dephasing exponent; see the module
    docstring for the temperature convention.
    """
    if temperature < 0 or mass <= 0:
        raise DomainError("need T >= 0 and m > 0")
    sigma_v = math.sqrt(2.0 * K_BOLTZMANN * temperature / mass)
    return rng.normal(0.0, sigma_v, size=n)
