"""Single-atom Rydberg structure: energies, wavefunctions, dipole elements.

Walks through the quantum-defect energies of the rubidium levels used by the
blockade calculation, shows a radial wavefunction from the Numerov
integration, and prints the dipole matrix elements that feed the two-atom
interaction.  Figures land in demos/out/.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from rydbell import FieldConfig, RydbergLevel, get_species
from rydbell.constants import E_CHARGE, BOHR_RADIUS, H_PLANCK
from rydbell.structure import (
    dipole_matrix_element,
    level_energy,
    quantum_defect,
    radial_wavefunction,
    zeeman_shift,
)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

rb87 = get_species("Rb87")

print("Quantum defects and energies of the levels in the interaction basis")
print(f"{'level':>10} {'defect':>10} {'E/h (GHz)':>12}")
for n, l, j in [(79, 2, 2.5), (80, 1, 1.5), (81, 1, 1.5), (78, 3, 3.5), (77, 3, 3.5)]:
    lvl = RydbergLevel(rb87, n, l, j, j)
    print(
        f"{n}{'spdf'[l]}{round(2 * j)}/2".rjust(10),
        f"{quantum_defect(rb87, n, l, j):10.5f}",
        f"{level_energy(lvl) / H_PLANCK / 1e9:12.3f}",
    )

# Zeeman splitting of the reference level at the experimental field
field = FieldConfig(3.0)
print("\nZeeman shifts of 79d5/2 sublevels at B = 3 G (MHz):")
for m2 in range(-5, 6, 2):
    lvl = RydbergLevel(rb87, 79, 2, 2.5, m2 / 2.0)
    print(f"  m_j = {m2 / 2.0:+.1f}: {zeeman_shift(lvl, field) / H_PLANCK / 1e6:+7.3f}")

# radial wavefunction of the 79d5/2 state
wf = radial_wavefunction(RydbergLevel(rb87, 79, 2, 2.5, 2.5))
fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(wf.r / 1e3, wf.u, lw=0.6)
ax.set_xlabel(r"$r$ ($10^3\,a_0$)")
ax.set_ylabel(r"$u(r) = r\,R(r)$ (a.u.)")
ax.set_title("Rb 79d5/2 radial wavefunction (Numerov, sqrt-scaled grid)")
fig.tight_layout()
fig.savefig(OUT / "radial_wavefunction.png", dpi=150)
print(f"\nwavefunction plot -> {OUT / 'radial_wavefunction.png'}")

# dipole matrix elements out of the reference state
ref = RydbergLevel(rb87, 79, 2, 2.5, 2.5)
print("\nDipole elements from 79d5/2 m=5/2 (units of e a0):")
for n, l, j in [(80, 1, 1.5), (81, 1, 1.5), (78, 3, 3.5), (77, 3, 3.5)]:
    for q in (-1, 0, 1):
        m_b = 2.5 + q
        if abs(m_b) > j:
            continue
        b = RydbergLevel(rb87, n, l, j, m_b)
        val = dipole_matrix_element(ref, b, q) / (E_CHARGE * BOHR_RADIUS)
        if val != 0.0:
            print(f"  -> {b.label():28s} q={q:+d}: {val:+9.1f}")
