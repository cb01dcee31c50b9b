"""The blockade C-NOT gate: truth tables and the two-Hadamard phase scan.

The gate is three Rydberg pulses (pi on the control, 2 pi on the target, pi
on the control) sandwiched between two target pi/2 pulses.  A perfect
blockade turns the middle pulse into a conditional phase, so the composite
flips the target exactly when the control is in the upper state.  The scan
of the relative phase between the pi/2 pulses shows the two input branches
oscillating in antiphase.
"""

import math
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rydbell import DopplerSpec, ErrorModel, PulseTiming, cnot_truth_table
from rydbell.analysis import cnot_fidelity, ideal_cnot_table
from rydbell.gate import phase_scan

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

TWO_PI = 2 * math.pi
LABELS = ["dd", "du", "ud", "uu"]


def show_table(title, table):
    print(f"\n{title}")
    print("        " + "  ".join(f"{o:>6}" for o in LABELS) + "    loss")
    for i, row in enumerate(table.matrix):
        loss = table.loss[i] if table.loss is not None else 0.0
        print(f"  {LABELS[i]:>4}  " + "  ".join(f"{p:6.3f}" for p in row)
              + f"  {loss:6.3f}")


# ideal limit: exact permutation
ideal = cnot_truth_table(0.0, ErrorModel.ideal())
show_table("ideal error model (perfect blockade, unit efficiencies):", ideal)
print(f"fidelity vs ideal map: {cnot_fidelity(ideal, ideal_cnot_table()):.6f}")

# realistic error model: finite blockade, efficiencies, Doppler
em = ErrorModel(
    blockade_shift=6.626e-34 * 5e6,  # dE/h = 5 MHz, a thermally plausible value
    doppler=DopplerSpec(temperature=8e-6, dt=3.6e-6),
)
timing = PulseTiming(
    omega_ryd_87=TWO_PI * 0.659e6, omega_ryd_85=TWO_PI * 0.601e6, pi_pi_gap=3.6e-6
)
real = cnot_truth_table(0.0, em, timing)
show_table("experimental error model (dE/h = 5 MHz):", real)
print(f"fidelity vs ideal map: {cnot_fidelity(real, ideal_cnot_table()):.4f}")

# phase scan between the two pi/2 pulses
phases = np.linspace(0.0, TWO_PI, 61)
rows = phase_scan(phases, error_model=ErrorModel.ideal())
fig, ax = plt.subplots(figsize=(6.5, 4))
ax.plot(phases / math.pi, [r["p_target_flip_du"] for r in rows], label=r"input $du$")
ax.plot(phases / math.pi, [r["p_target_flip_uu"] for r in rows], label=r"input $uu$")
ax.set_xlabel(r"relative phase ($\pi$)")
ax.set_ylabel("target flip probability")
ax.set_title("antiphase oscillation of the two control branches")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "cnot_phase_scan.png", dpi=150)
print(f"\nfigure -> {OUT / 'cnot_phase_scan.png'}")
