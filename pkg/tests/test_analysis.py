import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydbell.analysis import (
    FidelityReport,
    TimeSeries,
    TruthTable,
    bootstrap_fit,
    cnot_fidelity,
    entanglement_fidelity,
    fit_damped_sinusoid,
    fit_parity,
    ideal_cnot_table,
    max_entanglement_fidelity,
    parity_from_populations,
    phase_fidelity,
)
from rydbell.errors import ConfigurationError, DomainError

# measured fit parameters of the reference Rabi data, used as generators
RABI_PARAMS = {"p0": 0.5, "amplitude": 0.49, "frequency": 0.625e6,
               "t_center": 0.0, "decay_time": 28e-6}
PARITY_PARAMS = {"re_c2": 0.02, "c1_abs": 0.16, "xi": 0.0}


def damped_model(t, p):
    return p["p0"] + p["amplitude"] * np.exp(-t / p["decay_time"]) * np.cos(
        2.0 * math.pi * p["frequency"] * (t - p["t_center"])
    )


def parity_model(phi, p):
    return 2.0 * p["re_c2"] - 2.0 * p["c1_abs"] * np.cos(2.0 * phi + p["xi"])


# --------------------------------------------------------------------------
# Damped sinusoid
# --------------------------------------------------------------------------


def test_damped_sinusoid_recovery_within_2_sigma():
    """Joint 2-sigma recovery: Mahalanobis distance within the 95.45% ellipsoid."""
    from scipy.stats import chi2

    rng = np.random.default_rng(12)
    t = np.linspace(0.0, 10e-6, 120)
    y = damped_model(t, RABI_PARAMS) + rng.normal(0.0, 0.02, t.size)
    fit = fit_damped_sinusoid(TimeSeries(t, np.clip(y, -0.05, 1.05),
                                         np.full(t.size, 0.02)))
    assert fit.converged
    names = ["p0", "amplitude", "frequency", "t_center", "decay_time"]
    pulls = np.array(
        [(fit.params[n] - RABI_PARAMS[n]) / fit.stderr[n] for n in names]
    )
    # uncorrelated approximation of the joint test is conservative enough here
    assert float(pulls @ pulls) < chi2.ppf(0.9545, df=len(names))
    # and the headline parameters are individually close
    assert fit.params["frequency"] == pytest.approx(0.625e6, rel=0.01)
    assert fit.params["amplitude"] == pytest.approx(0.49, abs=0.03)


def test_damped_sinusoid_noiseless_exact():
    t = np.linspace(0.0, 8e-6, 80)
    y = damped_model(t, RABI_PARAMS)
    fit = fit_damped_sinusoid(TimeSeries(t, y))
    assert fit.residual_norm < 1e-10
    assert fit.params["frequency"] == pytest.approx(0.625e6, rel=1e-6)


def test_damped_sinusoid_flat_data_flagged():
    rng = np.random.default_rng(5)
    t = np.linspace(0.0, 8e-6, 60)
    y = 0.4 + rng.normal(0.0, 0.01, t.size)
    fit = fit_damped_sinusoid(TimeSeries(t, y, np.full(t.size, 0.01)))
    assert fit.params["amplitude"] < 0.03
    assert any("unidentifiable" in f for f in fit.flags)
    assert not fit.authoritative


def test_damped_sinusoid_needs_points():
    t = np.linspace(0.0, 1e-6, 5)
    with pytest.raises(ConfigurationError):
        fit_damped_sinusoid(TimeSeries(t, np.full(5, 0.5)))


def test_fit_consistency_error_shrinks_with_noise():
    t = np.linspace(0.0, 10e-6, 150)
    errors = []
    for sigma in (0.05, 0.02, 0.005):
        pulls = []
        for seed in range(6):
            rng = np.random.default_rng(seed)
            y = damped_model(t, RABI_PARAMS) + rng.normal(0.0, sigma, t.size)
            fit = fit_damped_sinusoid(TimeSeries(t, np.clip(y, -0.05, 1.05)))
            pulls.append(abs(fit.params["frequency"] - 0.625e6))
        errors.append(np.mean(pulls))
    assert errors[0] > errors[1] > errors[2]


# --------------------------------------------------------------------------
# Parity fit
# --------------------------------------------------------------------------


def test_parity_recovery_within_2_sigma():
    rng = np.random.default_rng(21)
    phi = np.linspace(0.0, 2.0 * math.pi, 40)
    y = parity_model(phi, PARITY_PARAMS) + rng.normal(0.0, 0.03, phi.size)
    fit = fit_parity(TimeSeries.parity(phi, y, np.full(phi.size, 0.03)))
    assert fit.converged
    for name, true in (("re_c2", 0.02), ("c1_abs", 0.16)):
        assert abs(fit.params[name] - true) / fit.stderr[name] < 2.0
    # xi wraps mod 2 pi
    xi = fit.params["xi"] % (2 * math.pi)
    xi = min(xi, 2 * math.pi - xi)
    assert xi / fit.stderr["xi"] < 3.0


def test_parity_ideal_bell():
    phi = np.linspace(0.0, 2.0 * math.pi, 60)
    fit = fit_parity(TimeSeries.parity(phi, np.cos(2.0 * phi)))
    assert fit.params["c1_abs"] == pytest.approx(0.5, abs=1e-9)
    assert fit.params["re_c2"] == pytest.approx(0.0, abs=1e-9)


def test_parity_constant_data_flagged():
    phi = np.linspace(0.0, 2.0 * math.pi, 30)
    rng = np.random.default_rng(3)
    fit = fit_parity(TimeSeries.parity(phi, 0.1 + rng.normal(0, 0.01, phi.size),
                                       np.full(phi.size, 0.01)))
    assert fit.params["c1_abs"] < 0.02
    assert any("unidentifiable" in f for f in fit.flags)


def test_parity_rejects_wrong_frequency_structure():
    """Frequency-1 data fit with the frequency-2 model: tiny |C1|, flagged."""
    phi = np.linspace(0.0, 2.0 * math.pi, 50)
    y = 0.7 * np.cos(phi)
    fit = fit_parity(TimeSeries.parity(phi, y))
    assert fit.params["c1_abs"] < 0.02
    assert any("poor fit" in f or "unidentifiable" in f for f in fit.flags)


def test_parity_span_requirement():
    phi = np.linspace(0.0, 2.0, 20)  # < pi span
    with pytest.raises(ConfigurationError):
        fit_parity(TimeSeries.parity(phi, np.cos(2 * phi)))


def test_bootstrap_spread_comparable_to_jacobian():
    rng = np.random.default_rng(8)
    phi = np.linspace(0.0, 2.0 * math.pi, 36)
    y = parity_model(phi, PARITY_PARAMS) + rng.normal(0.0, 0.03, phi.size)
    series = TimeSeries.parity(phi, y, np.full(phi.size, 0.03))
    fit = fit_parity(series)
    spread = bootstrap_fit(series, fit_parity, n_resamples=60, seed=4)
    assert spread["c1_abs"] == pytest.approx(fit.stderr["c1_abs"], rel=1.0)


# --------------------------------------------------------------------------
# Truth tables and fidelities
# --------------------------------------------------------------------------


def test_cnot_fidelity_ideal_is_one():
    ideal = ideal_cnot_table()
    assert cnot_fidelity(ideal, ideal) == 1.0


def test_cnot_fidelity_uniform_quarter():
    uniform = TruthTable(np.full((4, 4), 0.25))
    assert cnot_fidelity(uniform, ideal_cnot_table()) == pytest.approx(0.25)


def test_cnot_fidelity_constructed_073():
    m = ideal_cnot_table().matrix * 0.73
    measured = TruthTable(m + (1 - m.sum(axis=1, keepdims=True)) / 4 * 0)
    assert cnot_fidelity(TruthTable(m), ideal_cnot_table()) == pytest.approx(0.73)


def test_cnot_fidelity_permutation_invariance():
    rng = np.random.default_rng(2)
    m = rng.uniform(0.0, 0.25, (4, 4))
    ideal = ideal_cnot_table()
    perm = [2, 0, 3, 1]
    f1 = cnot_fidelity(TruthTable(m), ideal)
    f2 = cnot_fidelity(
        TruthTable(m[np.ix_(perm, perm)]), TruthTable(ideal.matrix[np.ix_(perm, perm)])
    )
    assert f1 == pytest.approx(f2, rel=1e-12)


def test_truth_table_validation():
    with pytest.raises(ConfigurationError):
        TruthTable(np.full((3, 4), 0.1))
    with pytest.raises(ConfigurationError):
        TruthTable(np.full((4, 4), 0.5))  # rows sum to 2


def test_time_series_excursion_flagging():
    x = np.linspace(0, 1, 12)
    clean = TimeSeries(x, np.full(12, 0.5))
    assert not clean.out_of_range
    excursive = TimeSeries(x, np.append(np.full(11, 0.5), 1.03))
    assert excursive.out_of_range
    with pytest.raises(ConfigurationError):
        TimeSeries(x, np.full(12, 1.1))  # beyond the tolerated band


def test_entanglement_fidelity_reference_values():
    f = entanglement_fidelity(0.41, 0.44, 0.16)
    assert f == pytest.approx(0.585, abs=1e-12)
    assert f > 0.5  # entangled verdict


def test_entanglement_fidelity_limits():
    assert entanglement_fidelity(0.5, 0.5, 0.5) == pytest.approx(1.0)
    assert entanglement_fidelity(0.25, 0.25, 0.0) == pytest.approx(0.25)


def test_entanglement_fidelity_domain():
    with pytest.raises(DomainError):
        entanglement_fidelity(1.2, 0.4, 0.1)
    with pytest.raises(DomainError):
        entanglement_fidelity(0.4, 0.4, 0.7)


@settings(max_examples=200, deadline=None)
@given(
    p1=st.floats(0, 1), p2=st.floats(0, 1), c=st.floats(0, 0.5),
    dp=st.floats(0, 0.2), dc=st.floats(0, 0.1),
)
def test_entanglement_fidelity_monotone(p1, p2, c, dp, dc):
    f = entanglement_fidelity(p1, p2, c)
    assert entanglement_fidelity(min(p1 + dp, 1.0), p2, c) >= f
    assert entanglement_fidelity(p1, min(p2 + dp, 1.0), c) >= f
    assert entanglement_fidelity(p1, p2, min(c + dc, 0.5)) >= f


def test_max_entanglement_fidelity_reference_numbers():
    assert phase_fidelity(0.78) == pytest.approx(0.89, abs=1e-12)
    assert max_entanglement_fidelity(0.73, 0.78) == pytest.approx(0.65, abs=0.005)
    assert max_entanglement_fidelity(0.73, 1.0) == pytest.approx(0.73)


def test_parity_from_populations():
    assert parity_from_populations(0.5, 0.5, 0.0, 0.0) == 1.0
    assert parity_from_populations(0.0, 0.0, 0.5, 0.5) == -1.0
    assert parity_from_populations(0.25, 0.25, 0.25, 0.25) == 0.0
    with pytest.raises(DomainError):
        parity_from_populations(1.5, 0.0, 0.0, 0.0)


def test_fidelity_report():
    report = FidelityReport.from_measurements(0.41, 0.44, 0.16, f_cnot=0.73,
                                              doppler_factor=0.78)
    assert report.entangled
    assert report.f_ent == pytest.approx(0.585)
    assert report.f_max_bound == pytest.approx(0.65, abs=0.005)
    d = report.as_dict()
    assert isinstance(d["entangled"], bool)
