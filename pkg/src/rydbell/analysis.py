"""Curve fitting and fidelity metrics.

Fit models:

* damped sinusoid   P(t)   = P0 + A exp(-t/t0) cos(2 pi f (t - tc))
* parity sinusoid   P(phi) = 2 Re(C2) - 2 |C1| cos(2 phi + xi)

Both are solved by damped least squares (scipy trust-region reflective)
with data-driven initialization; 1-sigma uncertainties come from the
Jacobian-based covariance at the optimum scaled by the residual variance,
with an optional bootstrap cross-check.

Fidelity metrics: truth-table fidelity Tr[|U_ideal|^T U_meas]/4, Bell-state
fidelity F = (P_uu + P_dd)/2 + |C| (entangled iff F > 1/2), and the
dephasing-limited bound F_max = F_gate (1 + <e^{i Phi}>)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import ConfigurationError, DomainError, NumericalError

__all__ = [
    "TimeSeries",
    "FitResult",
    "TruthTable",
    "FidelityReport",
    "fit_damped_sinusoid",
    "fit_parity",
    "bootstrap_fit",
    "cnot_fidelity",
    "entanglement_fidelity",
    "phase_fidelity",
    "max_entanglement_fidelity",
    "parity_from_populations",
    "ideal_cnot_table",
    "BASIS_LABELS",
]

#: Two-qubit basis ordering used for truth tables: control-major, lower first.
BASIS_LABELS = ("dd", "du", "ud", "uu")  # d = lower qubit state, u = upper


@dataclass(frozen=True)
class TimeSeries:
    """Measured values versus an abscissa (time or phase).

    Probability series (the default) must lie in [0, 1] up to a 0.05
    statistical-excursion allowance; parity series (`bounds=(-1.05, 1.05)`,
    see :meth:`parity`) may be negative.
    """

    x: np.ndarray
    y: np.ndarray
    stderr: np.ndarray | None = None
    bounds: tuple[float, float] = (-0.05, 1.05)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.shape != y.shape or x.ndim != 1:
            raise ConfigurationError("abscissa and values must be 1-d and equal length")
        if self.stderr is not None:
            se = np.asarray(self.stderr, dtype=float)
            object.__setattr__(self, "stderr", se)
            if se.shape != y.shape:
                raise ConfigurationError("stderr length mismatch")
            if np.any(se < 0):
                raise ConfigurationError("stderr must be non-negative")
        lo, hi = self.bounds
        if np.any(y < lo) or np.any(y > hi):
            raise ConfigurationError(f"values outside [{lo}, {hi}]")

    @classmethod
    def parity(cls, x, y, stderr=None) -> "TimeSeries":
        """Series for a parity signal, which ranges over [-1, 1]."""
        return cls(x, y, stderr, bounds=(-1.05, 1.05))

    @property
    def out_of_range(self) -> bool:
        """True when statistical excursions beyond the hard range are present."""
        lo, hi = self.bounds
        return bool(np.any(self.y < lo + 0.05) or np.any(self.y > hi - 0.05))


@dataclass
class FitResult:
    """Estimates with 1-sigma uncertainties and convergence diagnostics."""

    params: dict[str, float]
    stderr: dict[str, float]
    residual_norm: float
    converged: bool
    iterations: int
    flags: list[str] = field(default_factory=list)

    @property
    def authoritative(self) -> bool:
        return self.converged and "unidentifiable" not in " ".join(self.flags)

    def as_dict(self) -> dict:
        return {
            "params": self.params,
            "stderr": self.stderr,
            "residual_norm": self.residual_norm,
            "converged": self.converged,
            "iterations": self.iterations,
            "flags": self.flags,
        }


def _run_least_squares(residual, p0, bounds, x_scale=None):
    kwargs = {"xtol": 1e-8, "ftol": 1e-14, "gtol": 1e-14, "max_nfev": 200 * (len(p0) + 1)}
    if x_scale is not None:
        kwargs["x_scale"] = x_scale
    return least_squares(residual, p0, bounds=bounds, method="trf", **kwargs)


def _covariance(res, n_points: int) -> np.ndarray:
    dof = max(n_points - len(res.x), 1)
    s2 = 2.0 * res.cost / dof
    jtj = res.jac.T @ res.jac
    try:
        cov = np.linalg.inv(jtj) * s2
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(jtj) * s2
    return cov


def _weights(data: TimeSeries) -> np.ndarray:
    if data.stderr is None:
        return np.ones_like(data.y)
    floor = max(np.max(data.stderr) * 1e-3, 1e-12)
    return 1.0 / np.maximum(data.stderr, floor)


def _spectral_peak(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Dominant non-DC frequency and its phase from a discrete spectrum.

    Assumes a roughly uniform abscissa (adequate for initialization only).
    """
    n = len(x)
    dt = (x[-1] - x[0]) / max(n - 1, 1)
    if dt <= 0:
        return 0.0, 0.0
    spec = np.fft.rfft(y - np.mean(y))
    freqs = np.fft.rfftfreq(n, dt)
    if len(spec) < 2:
        return 0.0, 0.0
    k = 1 + int(np.argmax(np.abs(spec[1:])))
    phase = float(np.angle(spec[k]))
    # cos(2 pi f (t - tc)) has spectral phase -2 pi f (x0 - tc)
    f = float(freqs[k])
    tc = x[0] + phase / (2.0 * math.pi * f) if f > 0 else 0.0
    return f, tc


def fit_damped_sinusoid(data: TimeSeries) -> FitResult:
    """Fit P = P0 + A exp(-t/t0) cos(2 pi f (t - tc)).

    Requires >= 10 points spanning at least one period of the initialized
    frequency.  Degenerate (flat) data converges to A ~ 0 and is flagged
    with an unidentifiable frequency.
    """
    t, y = data.x, data.y
    if len(t) < 10:
        raise ConfigurationError("need at least 10 points for a 5-parameter fit")
    w = _weights(data)
    span = t[-1] - t[0]
    f0, tc0 = _spectral_peak(t, y)
    if f0 <= 0 or f0 * span < 1.0:
        f0 = max(1.0 / span, f0)
    p0_init = 0.5 * (np.max(y) + np.min(y))
    a_init = 0.5 * (np.max(y) - np.min(y))
    t0_init = span

    def residual(p):
        p0, a, f, tc, t0 = p
        model = p0 + a * np.exp(-t / t0) * np.cos(2.0 * math.pi * f * (t - tc))
        return (model - y) * w

    lower = [-np.inf, 0.0, 0.0, -np.inf, span * 1e-6]
    upper = [np.inf, np.inf, np.inf, np.inf, np.inf]
    scale = [1.0, 1.0, max(f0, 1.0 / span), max(span / 10.0, abs(tc0) + 1e-30), span]
    res = _run_least_squares(
        residual, [p0_init, max(a_init, 1e-12), f0, tc0, t0_init], (lower, upper), scale
    )
    cov = _covariance(res, len(t))
    names = ["p0", "amplitude", "frequency", "t_center", "decay_time"]
    params = dict(zip(names, map(float, res.x)))
    stderr = dict(zip(names, map(float, np.sqrt(np.maximum(np.diag(cov), 0.0)))))

    flags = []
    converged = bool(res.success)
    rms = math.sqrt(np.mean(((res.fun / w) ** 2)))
    noise = float(np.median(data.stderr)) if data.stderr is not None else None
    if params["amplitude"] < 2.0 * stderr["amplitude"]:
        flags.append("amplitude consistent with zero; frequency unidentifiable")
    if noise is not None and rms > 3.0 * max(noise, 1e-12):
        flags.append("poor fit: residuals exceed stated errors")
    elif noise is None and rms > 0.1:
        flags.append("poor fit: large residuals")
    if not converged:
        flags.append("did not converge; estimates non-authoritative")
    return FitResult(
        params=params,
        stderr=stderr,
        residual_norm=float(np.linalg.norm(res.fun / w)),
        converged=converged,
        iterations=int(res.nfev),
        flags=flags,
    )


def fit_parity(data: TimeSeries) -> FitResult:
    """Fit the parity signal P = 2 Re(C2) - 2 |C1| cos(2 phi + xi).

    The model is linear in (offset, cos 2phi, sin 2phi); the linear solution
    initializes a bounded refinement that reports |C1| >= 0 with the sign
    absorbed into xi.  Requires >= 8 points spanning at least pi.
    """
    phi, y = data.x, data.y
    if len(phi) < 8:
        raise ConfigurationError("need at least 8 points for the parity fit")
    if phi[-1] - phi[0] < math.pi - 1e-9:
        raise ConfigurationError("parity data must span at least pi of phase")
    w = _weights(data)

    # linear least squares in alpha + beta cos + gamma sin
    design = np.column_stack([np.ones_like(phi), np.cos(2 * phi), np.sin(2 * phi)])
    sol, *_ = np.linalg.lstsq(design * w[:, None], y * w, rcond=None)
    alpha, beta, gamma = sol
    c1_init = 0.5 * math.hypot(beta, gamma)
    xi_init = math.atan2(gamma, -beta)

    def residual(p):
        re_c2, c1, xi = p
        model = 2.0 * re_c2 - 2.0 * c1 * np.cos(2.0 * phi + xi)
        return (model - y) * w

    res = _run_least_squares(
        residual,
        [alpha / 2.0, max(c1_init, 1e-12), xi_init],
        ([-np.inf, 0.0, -2.0 * math.pi], [np.inf, np.inf, 2.0 * math.pi]),
    )
    cov = _covariance(res, len(phi))
    names = ["re_c2", "c1_abs", "xi"]
    params = dict(zip(names, map(float, res.x)))
    stderr = dict(zip(names, map(float, np.sqrt(np.maximum(np.diag(cov), 0.0)))))

    flags = []
    converged = bool(res.success)
    rms = math.sqrt(np.mean((res.fun / w) ** 2))
    noise = float(np.median(data.stderr)) if data.stderr is not None else None
    if params["c1_abs"] < 2.0 * stderr["c1_abs"]:
        flags.append("coherence amplitude consistent with zero; xi unidentifiable")
    if noise is not None and rms > 3.0 * max(noise, 1e-12):
        flags.append("poor fit: residuals exceed stated errors")
    elif noise is None and rms > 0.1:
        flags.append("poor fit: large residuals")
    if not converged:
        flags.append("did not converge; estimates non-authoritative")
    return FitResult(
        params=params,
        stderr=stderr,
        residual_norm=float(np.linalg.norm(res.fun / w)),
        converged=converged,
        iterations=int(res.nfev),
        flags=flags,
    )


def bootstrap_fit(
    data: TimeSeries, fitter, n_resamples: int = 200, seed: int = 0
) -> dict[str, float]:
    """Bootstrap (resample-with-replacement) spread of fit parameters.

    Cross-check for the Jacobian-based uncertainties; returns the standard
    deviation of each parameter across resamples.
    """
    rng = np.random.default_rng(seed)
    n = len(data.x)
    samples: dict[str, list[float]] = {}
    for _ in range(n_resamples):
        idx = np.sort(rng.integers(0, n, size=n))
        resampled = TimeSeries(
            data.x[idx],
            data.y[idx],
            None if data.stderr is None else data.stderr[idx],
            bounds=data.bounds,
        )
        try:
            result = fitter(resampled)
        except (ConfigurationError, NumericalError):
            continue
        for k, v in result.params.items():
            samples.setdefault(k, []).append(v)
    return {k: float(np.std(v, ddof=1)) for k, v in samples.items() if len(v) > 1}


# --------------------------------------------------------------------------
# Truth tables and fidelities
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TruthTable:
    """4x4 matrix of output probabilities per computational input.

    Rows are inputs, columns outputs, both ordered per BASIS_LABELS.
    An optional per-input loss column accounts for atoms lost before
    detection, so rows may sum to less than one.
    """

    matrix: np.ndarray
    loss: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.shape != (4, 4):
            raise ConfigurationError("truth table must be 4x4")
        if np.any(m < -1e-9) or np.any(m > 1.0 + 1e-9):
            raise ConfigurationError("truth-table entries must lie in [0, 1]")
        if self.loss is not None:
            lo = np.asarray(self.loss, dtype=float)
            object.__setattr__(self, "loss", lo)
            if lo.shape != (4,):
                raise ConfigurationError("loss column must have 4 entries")
        sums = m.sum(axis=1)
        if np.any(sums > 1.0 + 3e-2):
            raise ConfigurationError("truth-table row sums exceed 1 beyond tolerance")


def ideal_cnot_table(flip_on_upper: bool = True) -> TruthTable:
    """Ideal C-NOT permutation: target flips when the control is upper (or lower)."""
    m = np.zeros((4, 4))
    for i, (c, t) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        flip = c == 1 if flip_on_upper else c == 0
        t_out = 1 - t if flip else t
        m[i, 2 * c + t_out] = 1.0
    return TruthTable(matrix=m)


def cnot_fidelity(measured: TruthTable, ideal: TruthTable) -> float:
    """F = Tr[|U_ideal|^T U_measured] / 4."""
    return float(np.trace(np.abs(ideal.matrix).T @ measured.matrix) / 4.0)


def parity_from_populations(p_uu: float, p_dd: float, p_ud: float, p_du: float) -> float:
    """Parity P = P_uu + P_dd - P_ud - P_du."""
    for p in (p_uu, p_dd, p_ud, p_du):
        if not 0.0 <= p <= 1.0:
            raise DomainError("populations must lie in [0, 1]")
    return p_uu + p_dd - p_ud - p_du


def entanglement_fidelity(p_uu: float, p_dd: float, coherence: float) -> float:
    """Bell-state fidelity F = (P_uu + P_dd)/2 + |C|."""
    if not 0.0 <= p_uu <= 1.0 or not 0.0 <= p_dd <= 1.0:
        raise DomainError("populations must lie in [0, 1]")
    if not 0.0 <= coherence <= 0.5 + 1e-6:
        raise DomainError("coherence must lie in [0, 0.5]")
    return (p_uu + p_dd) / 2.0 + coherence


def phase_fidelity(doppler_factor: float) -> float:
    """Coherence-limited fidelity cap (1 + <e^{i Phi}>) / 2."""
    if not 0.0 <= doppler_factor <= 1.0:
        raise DomainError("dephasing factor must lie in [0, 1]")
    return (1.0 + doppler_factor) / 2.0


def max_entanglement_fidelity(f_cnot: float, doppler_factor: float) -> float:
    """Upper bound on the entangled-state fidelity: F_cnot (1 + <e^{i Phi}>)/2."""
    if not 0.0 <= f_cnot <= 1.0:
        raise DomainError("gate fidelity must lie in [0, 1]")
    return f_cnot * phase_fidelity(doppler_factor)


@dataclass(frozen=True)
class FidelityReport:
    """Derived entanglement figures of merit."""

    f_cnot: float | None
    p_uu: float
    p_dd: float
    coherence: float
    f_ent: float
    f_max_bound: float | None
    entangled: bool

    @classmethod
    def from_measurements(
        cls,
        p_uu: float,
        p_dd: float,
        coherence: float,
        f_cnot: float | None = None,
        doppler_factor: float | None = None,
    ) -> "FidelityReport":
        f_ent = float(entanglement_fidelity(p_uu, p_dd, coherence))
        bound = None
        if f_cnot is not None and doppler_factor is not None:
            bound = float(max_entanglement_fidelity(f_cnot, doppler_factor))
        return cls(
            f_cnot=None if f_cnot is None else float(f_cnot),
            p_uu=float(p_uu),
            p_dd=float(p_dd),
            coherence=float(coherence),
            f_ent=f_ent,
            f_max_bound=bound,
            entangled=bool(f_ent > 0.5),
        )

    def as_dict(self) -> dict:
        return {
            "f_cnot": self.f_cnot,
            "p_uu": self.p_uu,
            "p_dd": self.p_dd,
            "coherence": self.coherence,
            "f_ent": self.f_ent,
            "f_max_bound": self.f_max_bound,
            "entangled": self.entangled,
        }
