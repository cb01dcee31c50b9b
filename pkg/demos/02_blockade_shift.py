"""Blockade shift versus trap offset: the heart of the two-atom calculation.

Builds the restricted interaction basis of the (79d5/2, 79d5/2),
(80p3/2, 78f) and (81p3/2, 77f) manifolds for distinguishable Rb87/Rb85
atoms, scans the double-excitation probability over the longitudinal offset
y, and converts it to the blockade shift.  Reproduces the characteristic
shapes: a several-hundred-MHz shift near zero offset, falling to a few MHz
beyond 10 um, with a visible magnetic-field dependence.
"""

import math
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rydbell import (
    FieldConfig,
    Geometry,
    blockade_scan,
    build_pair_basis,
    default_channels,
    get_species,
)
from rydbell.constants import H_PLANCK

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

OMEGA85 = 2.0 * math.pi * 0.6e6  # effective two-photon Rabi frequency
Z_SEP = 3.8e-6

basis = build_pair_basis(default_channels(), get_species("Rb87"), get_species("Rb85"))
print(f"pair basis: {basis.n_pair_states} doubly-excited states + bystander")

y_grid = np.linspace(0.0, 20e-6, 41)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
for b_gauss, style in [(3.0, "-"), (0.0, "--")]:
    rows = blockade_scan(
        basis, Geometry(0.0, Z_SEP), y_grid, FieldConfig(b_gauss), OMEGA85
    )
    de = np.array([r.delta_e for r in rows]) / H_PLANCK / 1e6
    p85 = np.array([r.p85 for r in rows])
    ax1.semilogy(y_grid * 1e6, de, style, label=f"B = {b_gauss:g} G")
    ax2.semilogy(y_grid * 1e6, p85, style, label=f"B = {b_gauss:g} G")
    print(
        f"B = {b_gauss:g} G: dE/h = {de[0]:7.1f} MHz at y=0, "
        f"{de[20]:5.2f} MHz at y=10 um"
    )

ax1.set_xlabel(r"offset $y$ ($\mu$m)")
ax1.set_ylabel(r"$\Delta E / h$ (MHz)")
ax1.set_title("blockade shift")
ax1.legend()
ax2.set_xlabel(r"offset $y$ ($\mu$m)")
ax2.set_ylabel(r"$\overline{P}_{85}$")
ax2.set_title("double-excitation probability")
ax2.legend()
fig.tight_layout()
fig.savefig(OUT / "blockade_shift.png", dpi=150)
print(f"figure -> {OUT / 'blockade_shift.png'}")

# the strong-blockade benchmark point: P85 ~ 1e-6 maps to dE/h ~ 600 MHz
from rydbell import blockade_shift

print(
    "\ninversion check: P85 = 1e-6 ->",
    f"dE/h = {blockade_shift(1e-6, OMEGA85) / H_PLANCK / 1e6:.0f} MHz",
)
