"""Acceptance suite: one test per release criterion, each printing PASS/FAIL.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; tolerances are fixed here, not configurable.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from rydbell.analysis import (
    TimeSeries,
    entanglement_fidelity,
    fit_damped_sinusoid,
    fit_parity,
    ideal_cnot_table,
    max_entanglement_fidelity,
    phase_fidelity,
)
from rydbell.constants import ATOMIC_MASS, H_PLANCK, K_BOLTZMANN
from rydbell.gate import (
    CONTROL_ATOM,
    ErrorModel,
    PulseSpec,
    apply_pulse,
    basis_state,
    cnot_truth_table,
    effective_rabi,
    entangle_and_parity,
)
from rydbell.pair import (
    Geometry,
    blockade_shift,
    build_excitation_coupling,
    build_foerster_hamiltonian,
    dipole_dipole_element,
    double_excitation_from_blockade,
    spectral_average_probability,
    time_averaged_probability,
)
from rydbell.species import FieldConfig, RydbergLevel, get_species
from rydbell.structure import dipole_matrix_element
from rydbell.thermal import (
    OffsetDistribution,
    ThermalState,
    TrapParams,
    combined_temperature,
    doppler_dephasing_factor,
    doppler_dephasing_mc,
    reduced_mass,
    thermal_average,
)

M87 = 86.909180532 * ATOMIC_MASS
M85 = 84.911789738 * ATOMIC_MASS
OMEGA85 = 2.0 * math.pi * 0.6e6
TRAP = TrapParams(omega_y=2.0 * math.pi * 1390.0, omega_r=2.0 * math.pi * 16.9e3)
THERMAL = ThermalState(t1=8e-6, t2=9e-6, m1=M87, m2=M85)
REFERENCE_MEAN_P85 = 0.013


@contextmanager
def criterion(number, description):
    """Prints one PASS/FAIL line per criterion, bypassing pytest capture."""
    import sys

    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {number:>2}: FAIL - {description}", file=sys.__stdout__)
        raise
    print(f"\nACCEPTANCE {number:>2}: PASS - {description}", file=sys.__stdout__)


def test_criterion_1_doppler_factor():
    with criterion(1, "Doppler dephasing factor 0.78 +- 0.01, < 1 ms, MC within 3 SE"):
        t0 = time.perf_counter()
        for _ in range(100):
            factor = doppler_dephasing_factor(8e-6, M87, 3.6e-6, 480e-9, 780e-9)
        per_call = (time.perf_counter() - t0) / 100.0
        assert factor == pytest.approx(0.78, abs=0.01)
        assert per_call < 1e-3
        mc, err = doppler_dephasing_mc(
            8e-6, M87, 3.6e-6, 480e-9, 780e-9, 1_000_000, np.random.default_rng(1)
        )
        assert abs(mc - factor) < 3.0 * err


def test_criterion_2_fidelity_bounds():
    with criterion(2, "F_phase = 0.89 +- 0.005 and F_ent_max = 0.65 +- 0.01"):
        factor = doppler_dephasing_factor(8e-6, M87, 3.6e-6, 480e-9, 780e-9)
        assert phase_fidelity(factor) == pytest.approx(0.89, abs=0.005)
        assert max_entanglement_fidelity(0.73, factor) == pytest.approx(0.65, abs=0.01)


def test_criterion_3_bell_fidelity_formula():
    with criterion(3, "Bell fidelity (0.41, 0.44, 0.16) -> 0.585, entangled verdict"):
        f = entanglement_fidelity(0.41, 0.44, 0.16)
        assert f == pytest.approx(0.585, abs=1e-12)
        assert abs(f - 0.59) <= 0.03  # consistent with the reported estimate
        assert f > 0.5


def test_criterion_4_blockade_shift_inversion():
    with criterion(4, "P85 = 1e-6 at Omega/2pi = 0.6 MHz -> dE/h = 600 +- 6 MHz"):
        de = blockade_shift(1e-6, OMEGA85)
        assert de / H_PLANCK == pytest.approx(600e6, abs=6e6)
        for p in (1e-6, 1e-3, 0.2, 0.5, 0.99, 1.0):
            assert double_excitation_from_blockade(
                blockade_shift(p, OMEGA85), OMEGA85
            ) == pytest.approx(p, rel=1e-12)


def test_criterion_5_effective_rabi():
    with criterion(5, "effective Rabi 2pi*0.659 MHz, within 5% of measured 0.685 MHz"):
        om = effective_rabi(
            2 * math.pi * 226e6, 2 * math.pi * 28e6, 2 * math.pi * 4.8e9
        )
        assert om / (2 * math.pi) == pytest.approx(0.659e6, rel=1e-3)
        assert abs(om / (2 * math.pi) - 0.685e6) / 0.685e6 < 0.05


def test_criterion_6_thermal_geometry():
    with criterion(6, "relative-offset sigma = 4.6 +- 0.1 um from the trap numbers"):
        m_red = reduced_mass(M87, M85)
        t = combined_temperature(THERMAL)
        sigma = math.sqrt(K_BOLTZMANN * t / (m_red * TRAP.omega_y**2))
        assert sigma == pytest.approx(4.6e-6, abs=0.1e-6)
        # the tail beyond 10 um carries non-negligible weight: the atoms do
        # explore offsets y >~ 10 um at these temperatures
        from scipy.stats import norm

        assert 2.0 * (1.0 - norm.cdf(10e-6 / sigma)) > 0.01


def _mean_p85(default_basis, n_nodes=32, method="quadrature", seed=None):
    field = FieldConfig(3.0)
    w = build_excitation_coupling(default_basis, OMEGA85).matrix

    def p85(y):
        h = build_foerster_hamiltonian(default_basis, Geometry(y=y, z=3.8e-6), field)
        return spectral_average_probability(h.matrix + w, default_basis.bystander_index)

    dist = OffsetDistribution.from_experiment(TRAP, THERMAL)
    return thermal_average(p85, dist, method, n_nodes, seed=seed), p85, dist


def test_criterion_7_thermal_leak_properties(default_basis):
    with criterion(7, "thermal-average property suite (authoritative checks)"):
        field = FieldConfig(3.0)
        w = build_excitation_coupling(default_basis, OMEGA85).matrix

        def p85(y):
            h = build_foerster_hamiltonian(default_basis, Geometry(y=y, z=3.8e-6), field)
            return spectral_average_probability(
                h.matrix + w, default_basis.bystander_index
            )

        # monotone in temperature
        m_red = reduced_mass(M87, M85)
        values = []
        for t in np.linspace(0.5e-6, 40e-6, 10):
            sigma = math.sqrt(K_BOLTZMANN * t / (m_red * TRAP.omega_y**2))
            dist = OffsetDistribution(
                sigma=sigma, m_red=m_red, temperature=float(t), omega_y=TRAP.omega_y
            )
            values.append(thermal_average(p85, dist, "quadrature", 20).value)
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

        # quadrature vs Monte Carlo on the same integrand
        quad, p85_fn, dist = _mean_p85(default_basis, 32)
        from scipy.interpolate import PchipInterpolator

        y_nodes = np.linspace(0.0, 6.0 * dist.sigma, 140)
        surrogate = PchipInterpolator(y_nodes, [p85_fn(float(y)) for y in y_nodes])
        mc = thermal_average(
            lambda y: float(surrogate(min(y, y_nodes[-1]))),
            dist,
            "monte_carlo",
            100_000,
            seed=12,
        )
        assert abs(quad.value - mc.value) < 3.0 * mc.standard_error

        # finite-window time average agrees with the closed form
        h = build_foerster_hamiltonian(default_basis, Geometry(y=8e-6, z=3.8e-6), field)
        hw = h.matrix + w
        exact = spectral_average_probability(hw, default_basis.bystander_index)
        window = 100.0 * 2.0 * math.pi / OMEGA85
        windowed = time_averaged_probability(
            hw, window, 4001, default_basis.bystander_index
        )
        assert windowed == pytest.approx(exact, rel=0.02)


def test_criterion_7_thermal_leak_magnitude(default_basis):
    with criterion(7, "mean double-excitation leak within 2x of the 0.013 reference"):
        quad, p85_fn, dist = _mean_p85(default_basis, 32)
        mean_p85 = quad.value
        # diagnostic: the same pipeline under the peak-excitation convention
        # (the maximum over a Rabi period, i.e. the quantity the blockade
        # relation P = (hbar W)^2/((hbar W)^2 + dE^2) describes); the factor
        # ~2 between the conventions explains the residual gap (see README)
        field = FieldConfig(3.0)
        w = build_excitation_coupling(default_basis, OMEGA85).matrix
        t_grid = np.linspace(0.0, 2.0 * math.pi / OMEGA85, 200)

        def p85_peak(y):
            from rydbell.pair import double_excitation_probability

            h = build_foerster_hamiltonian(default_basis, Geometry(y=y, z=3.8e-6), field)
            return float(
                np.max(
                    double_excitation_probability(
                        h.matrix + w, t_grid, default_basis.bystander_index
                    )
                )
            )

        peak = thermal_average(p85_peak, dist, "quadrature", 32).value
        print(
            f"\n  mean P85 (time-average convention): {mean_p85:.4f}; "
            f"peak convention: {peak:.4f}; reference {REFERENCE_MEAN_P85}"
        )
        assert REFERENCE_MEAN_P85 / 2.0 <= mean_p85 <= REFERENCE_MEAN_P85 * 2.0


def test_criterion_8_ideal_protocol_algebra():
    with criterion(8, "ideal C-NOT permutation (1e-9), parity |C1| = 0.5 (1e-6), < 1 s"):
        t0 = time.perf_counter()
        ideal = ErrorModel.ideal()
        table = cnot_truth_table(0.0, ideal)
        assert np.allclose(table.matrix, ideal_cnot_table().matrix, atol=1e-9)
        phis = np.linspace(0.0, 2.0 * math.pi, 33)
        res = entangle_and_parity(phis, ideal)
        parity = np.array([r["parity"] for r in res.parity_rows])
        assert np.max(parity) == pytest.approx(1.0, abs=1e-9)
        fit = fit_parity(TimeSeries.parity(phis, parity))
        assert fit.params["c1_abs"] == pytest.approx(0.5, abs=1e-6)
        assert time.perf_counter() - t0 < 1.0


def test_criterion_9_property_suites(default_basis):
    with criterion(9, "hermiticity/unitarity, 1/R^3, selection rules, fit recovery"):
        t0 = time.perf_counter()
        rb87 = get_species("Rb87")
        # Hermiticity of H_F + W
        field = FieldConfig(3.0)
        h = build_foerster_hamiltonian(default_basis, Geometry(1e-6, 3.8e-6), field)
        hw = h.matrix + build_excitation_coupling(default_basis, OMEGA85).matrix
        assert np.max(np.abs(hw - hw.conj().T)) < 1e-12 * np.max(np.abs(hw))

        # unitarity drift over 100 pulses
        rng = np.random.default_rng(1)
        state = basis_state("upper", "upper")
        ideal = ErrorModel.ideal()
        for _ in range(100):
            kind = "raman" if rng.random() < 0.5 else "rydberg"
            pulse = PulseSpec(
                CONTROL_ATOM if rng.random() < 0.5 else "Rb85",
                kind,
                rng.uniform(0.0, 2.0 * math.pi),
                rng.uniform(0.0, 2.0 * math.pi),
                0.0,
                1e-6 if kind == "rydberg" else 0.0,
            )
            state = apply_pulse(state, pulse, ideal)
        assert abs(np.linalg.norm(state) - 1.0) < 1e-9

        # exact 1/R^3 scaling of a coupled pair element
        rr = default_basis.states[default_basis.rr_index]
        partner = next(
            s
            for s in default_basis.states
            if s.atom1.l == 1
            and abs(dipole_dipole_element(rr, s, Geometry(1.3e-6, 3.8e-6))) > 1e-40
        )
        g = Geometry(1.3e-6, 3.8e-6)
        v1 = dipole_dipole_element(rr, partner, g)
        v2 = dipole_dipole_element(rr, partner, g.scaled(2.0))
        assert v1 / v2 == pytest.approx(8.0, rel=1e-12)

        # selection rules are exact zeros
        a = RydbergLevel(rb87, 79, 2, 2.5, 2.5)
        assert dipole_matrix_element(a, RydbergLevel(rb87, 81, 2, 2.5, 2.5), 0) == 0.0
        assert dipole_matrix_element(a, RydbergLevel(rb87, 80, 1, 1.5, 1.5), 0) == 0.0

        # fit recovery on synthetic data from the reference fit parameters
        rng = np.random.default_rng(6)
        t = np.linspace(0.0, 10e-6, 120)
        y = 0.5 + 0.49 * np.exp(-t / 28e-6) * np.cos(2 * math.pi * 0.625e6 * t)
        fit = fit_damped_sinusoid(
            TimeSeries(t, np.clip(y + rng.normal(0, 0.02, t.size), -0.05, 1.05),
                       np.full(t.size, 0.02))
        )
        assert abs(fit.params["frequency"] - 0.625e6) < 2.0 * fit.stderr["frequency"]
        assert abs(fit.params["amplitude"] - 0.49) < 2.5 * fit.stderr["amplitude"]

        phi = np.linspace(0.0, 2 * math.pi, 40)
        yp = 2 * 0.02 - 2 * 0.16 * np.cos(2 * phi) + rng.normal(0, 0.03, phi.size)
        pfit = fit_parity(TimeSeries.parity(phi, yp, np.full(phi.size, 0.03)))
        assert abs(pfit.params["c1_abs"] - 0.16) < 2.0 * pfit.stderr["c1_abs"]
        assert abs(pfit.params["re_c2"] - 0.02) < 2.0 * pfit.stderr["re_c2"]

        assert time.perf_counter() - t0 < 300.0


def test_criterion_10_end_to_end_reproduction(tmp_path):
    with criterion(10, "blockade + thermal + entangle reproduction run, < 10 min"):
        from rydbell.cli import main, read_table

        t0 = time.perf_counter()
        out = tmp_path / "repro"
        config = "configs/reference.toml"
        for command in ("blockade", "thermal", "entangle"):
            assert main(["--config", config, "--out", str(out), command]) == 0
        elapsed = time.perf_counter() - t0
        assert elapsed < 600.0

        # blockade curve: shift decreases with offset
        rows = read_table(out / "blockade.csv")
        de = np.asarray(rows["deltaE_over_h_Hz"], dtype=float)
        assert de[0] > 50.0 * de[-1]
        assert np.all(np.diff(de) <= np.maximum(1e-3 * de[:-1], 1.0))

        # thermal curves: mean leak grows with temperature; field matters
        trows = read_table(out / "thermal.csv")
        b = np.asarray(trows["B_gauss"], dtype=float)
        t = np.asarray(trows["T_K"], dtype=float)
        p = np.asarray(trows["P85_mean"], dtype=float)
        for bval in (0.0, 3.0):
            sel = b == bval
            order = np.argsort(t[sel])
            assert np.all(np.diff(p[sel][order]) >= -1e-12)
        p0, p3 = p[b == 0.0], p[b == 3.0]
        assert np.max(np.abs(p0 - p3) / np.maximum(p3, 1e-12)) > 0.05

        # entanglement report sane and bounded
        report = json.loads((out / "fidelity_report.json").read_text())["report"]
        assert report["entangled"] is True
        assert report["f_ent"] <= report["f_max_bound"] + 0.01
        print(f"\n  end-to-end wall time: {elapsed:.1f} s")
