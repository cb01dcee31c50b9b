"""Two-atom few-level pulse-sequence simulator with an experimental error model.

State space: each atom carries three levels {lower qubit, upper qubit, Rydberg}
indexed 0, 1, 2; the pair state is a 9-component complex amplitude vector with
index 3 * i_control + i_target.  The control atom is Rb87, the target Rb85;
Raman pulses drive 0 <-> 1, Rydberg pulses drive 1 <-> 2.

Rotation convention (the single place that fixes all phases): a pulse of area
theta and phase phi acts on its (g, e) transition as

    U(theta, phi) = [[cos(theta/2),            i e^{-i phi} sin(theta/2)],
                     [i e^{+i phi} sin(theta/2), cos(theta/2)          ]]

in (g, e) ordering, i.e. U = exp(-i H t) for H = -(Omega/2)(e^{-i phi}|g><e|
+ h.c.) with theta = Omega t.  A resonant pi/2 pulse with phase 0 applied to
|e> therefore prepares (|e> + i |g>)/sqrt(2).  Detuned pulses use the exact
generalized-Rabi propagator of the same Hamiltonian plus -Delta |e><e|.

Error model:

* blockade: during a Rydberg pulse on one atom, any amplitude with the other
  atom in |r> sees the transition detuning increased by dE/hbar; dE = inf
  suppresses the drive exactly.
* Rydberg decay: amplitude damping exp(-t / (2 tau)) on |r> amplitudes for
  every timed element (dwell-time bookkeeping); the norm deficit is booked as
  trace loss at measurement.
* excitation efficiency: each Rydberg pulse succeeds with probability eta per
  species; a failed pulse leaves the state untouched.
* Doppler: one stochastic phase e^{i Phi} on control-|r> amplitudes per
  sequence, injected immediately before the second Rydberg pulse on the
  control atom.  Exact mode realizes the resulting phase-damping channel as
  the two-branch mixture {(1+f)/2: identity, (1-f)/2: pi flip}, which is
  exact for a single dephasing event; sampled mode draws a velocity per shot.
* Raman amplitude drift: per-shot relative area error, uniform in +-drift,
  applied to Raman pulses (exact mode integrates with Gauss-Legendre nodes).

Measurement: the optional pre-measurement Raman pi (applied to both atoms)
swaps the qubit labels so that blow-away survival probes the upper state.
Atoms in |r> at detection are lost with probability eta_det and recaptured
(classified by presence) otherwise.  Reported probabilities refer to the
gate-output basis with loss kept as a separate channel, so rows of a truth
table may sum to less than one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .analysis import TruthTable
from .constants import HBAR, K_BOLTZMANN
from .errors import ConfigurationError, DomainError
from .species import get_species
from .thermal import two_photon_wavevector

__all__ = [
    "CONTROL_ATOM",
    "TARGET_ATOM",
    "PulseSpec",
    "Wait",
    "Measure",
    "SequenceSpec",
    "DopplerSpec",
    "ErrorModel",
    "ShotOutcome",
    "ExactResult",
    "PulseTiming",
    "basis_state",
    "effective_rabi",
    "apply_pulse",
    "inject_doppler_phase",
    "run_sequence",
    "classify_shots",
    "cnot_sequence",
    "entangle_sequence",
    "cnot_truth_table",
    "phase_scan",
    "blockade_demo",
    "entangle_and_parity",
    "sequence_to_json",
    "sequence_from_json",
]

CONTROL_ATOM = "Rb87"
TARGET_ATOM = "Rb85"
_ATOM_SLOT = {CONTROL_ATOM: 0, TARGET_ATOM: 1}

LOWER, UPPER, RYDBERG = 0, 1, 2
_STATE_NAMES = ("lower", "upper")


@dataclass(frozen=True)
class PulseSpec:
    """One pulse: addressed atom, transition, area, phase, detuning, duration."""

    atom: str
    kind: str  # "raman" | "rydberg"
    area: float  # rad
    phase: float = 0.0  # rad
    detuning: float = 0.0  # rad/s
    duration: float = 0.0  # s; 0 = instantaneous ideal rotation

    def __post_init__(self):
        if self.atom not in _ATOM_SLOT:
            raise ConfigurationError(f"unknown atom '{self.atom}'")
        if self.kind not in ("raman", "rydberg"):
            raise ConfigurationError(f"unknown pulse kind '{self.kind}'")
        if self.area < 0 or self.duration < 0:
            raise ConfigurationError("pulse area and duration must be non-negative")


@dataclass(frozen=True)
class Wait:
    duration: float  # s

    def __post_init__(self):
        if self.duration < 0:
            raise ConfigurationError("wait duration must be non-negative")


@dataclass(frozen=True)
class Measure:
    pre_raman_pi: bool = False


@dataclass(frozen=True)
class SequenceSpec:
    """Ordered pulses and waits, terminated by a single measurement directive."""

    elements: tuple
    measure: Measure

    def __post_init__(self):
        for el in self.elements:
            if not isinstance(el, (PulseSpec, Wait)):
                raise ConfigurationError(f"invalid sequence element {el!r}")
        if not isinstance(self.measure, Measure):
            raise ConfigurationError("sequence must end with a measurement directive")


@dataclass(frozen=True)
class DopplerSpec:
    """Doppler dephasing of the control atom between its two Rydberg pulses."""

    temperature: float  # K
    dt: float  # s, configured pi-pi interval
    lambda1: float = 480e-9
    lambda2: float = 780e-9
    mass: float | None = None  # kg; defaults to the control atom's mass

    def atom_mass(self) -> float:
        return self.mass if self.mass is not None else get_species(CONTROL_ATOM).mass

    @property
    def mean_phase_factor(self) -> float:
        k = two_photon_wavevector(self.lambda1, self.lambda2)
        return math.exp(
            -K_BOLTZMANN * self.temperature * k**2 * self.dt**2 / self.atom_mass()
        )


@dataclass(frozen=True)
class ErrorModel:
    excitation_efficiency_87: float = 0.96
    excitation_efficiency_85: float = 0.96
    detection_efficiency: float = 0.90
    rydberg_lifetime: float = 180e-6  # s
    blockade_shift: float = math.inf  # J; inf = perfect blockade
    doppler: DopplerSpec | None = None
    raman_amplitude_drift: float = 0.0  # relative, uniform in +-drift

    def __post_init__(self):
        for eta in (
            self.excitation_efficiency_87,
            self.excitation_efficiency_85,
            self.detection_efficiency,
        ):
            if not 0.0 <= eta <= 1.0:
                raise ConfigurationError("efficiencies must lie in [0, 1]")
        if self.rydberg_lifetime <= 0:
            raise ConfigurationError("Rydberg lifetime must be positive")
        if self.raman_amplitude_drift < 0:
            raise ConfigurationError("drift must be non-negative")

    @classmethod
    def ideal(cls) -> "ErrorModel":
        return cls(
            excitation_efficiency_87=1.0,
            excitation_efficiency_85=1.0,
            detection_efficiency=1.0,
            rydberg_lifetime=math.inf,
            blockade_shift=math.inf,
            doppler=None,
            raman_amplitude_drift=0.0,
        )

    def excitation_efficiency(self, atom: str) -> float:
        return (
            self.excitation_efficiency_87
            if atom == CONTROL_ATOM
            else self.excitation_efficiency_85
        )


@dataclass(frozen=True)
class ShotOutcome:
    """Per-shot detection record: survival after blow-away, and true loss."""

    survived: tuple[bool, bool]
    trace_loss: bool


@dataclass(frozen=True)
class ExactResult:
    """Analytically propagated outcome probabilities.

    `class_probs` maps gate-output basis labels, e.g. ("upper", "lower"), to
    probabilities; `loss` is the probability that at least one atom was lost
    (Rydberg detection or decay).  `raw_populations` are the nine quantum
    populations just before detection (in the measured frame).
    """

    class_probs: dict[tuple[str, str], float]
    loss: float
    raw_populations: np.ndarray

    def probability(self, o1: str, o2: str) -> float:
        return self.class_probs[(o1, o2)]


def basis_state(control: int | str, target: int | str) -> np.ndarray:
    """Product basis state as a 9-component amplitude vector."""
    names = {"lower": LOWER, "upper": UPPER, "r": RYDBERG}
    i1 = names[control] if isinstance(control, str) else control
    i2 = names[target] if isinstance(target, str) else target
    psi = np.zeros(9, dtype=complex)
    psi[3 * i1 + i2] = 1.0
    return psi


def effective_rabi(omega_red: float, omega_blue: float, delta_int: float) -> float:
    """Two-photon effective Rabi frequency Omega_red Omega_blue / (2 Delta)."""
    if delta_int == 0:
        raise DomainError("intermediate-state detuning must be nonzero")
    return omega_red * omega_blue / (2.0 * delta_int)


# --------------------------------------------------------------------------
# Pulse application
# --------------------------------------------------------------------------


def _rotation(area: float, phase: float) -> np.ndarray:
    c, s = math.cos(area / 2.0), math.sin(area / 2.0)
    e = complex(math.cos(phase), math.sin(phase))
    return np.array([[c, 1j * s / e], [1j * s * e, c]])


def _propagator(omega: float, phase: float, delta: float, duration: float) -> np.ndarray:
    """exp(-i H t) for H = -(Omega/2)(e^{-i phi}|g><e| + h.c.) - Delta |e><e|."""
    e = complex(math.cos(phase), math.sin(phase))
    h = np.array([[0.0, -0.5 * omega / e], [-0.5 * omega * e, -delta]])
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * vals * duration)) @ vecs.conj().T


def _pulse_block(pulse: PulseSpec, extra_detuning: float) -> np.ndarray:
    """2x2 propagator on the driven transition for one sector."""
    if math.isinf(extra_detuning):
        return np.eye(2, dtype=complex)
    if pulse.duration == 0.0:
        if pulse.detuning != 0.0 or extra_detuning != 0.0:
            raise ConfigurationError(
                "detuned (or finitely blockaded) pulses need a finite duration"
            )
        return _rotation(pulse.area, pulse.phase)
    omega = pulse.area / pulse.duration
    return _propagator(
        omega, pulse.phase, pulse.detuning + extra_detuning, pulse.duration
    )


def _embed(
    block_for_other_level, slot: int, transition: tuple[int, int]
) -> np.ndarray:
    """Lift sector-dependent 2x2 blocks to the 9-dimensional pair space."""
    u = np.zeros((9, 9), dtype=complex)
    levels = list(transition)

    def index(own: int, other: int) -> int:
        return 3 * own + other if slot == 0 else 3 * other + own

    for other in range(3):
        b = block_for_other_level(other)
        for aa, la in enumerate(levels):
            for bb, lb in enumerate(levels):
                u[index(la, other), index(lb, other)] = b[aa, bb]
        spectator = next(lv for lv in range(3) if lv not in levels)
        u[index(spectator, other), index(spectator, other)] = 1.0
    return u


def pulse_unitary(
    pulse: PulseSpec, error_model: ErrorModel, area_scale: float = 1.0
) -> np.ndarray:
    """9x9 unitary of one pulse, including blockade detuning sectors."""
    slot = _ATOM_SLOT[pulse.atom]
    transition = (LOWER, UPPER) if pulse.kind == "raman" else (UPPER, RYDBERG)
    p = pulse if area_scale == 1.0 else replace(pulse, area=pulse.area * area_scale)

    def block(other_level: int) -> np.ndarray:
        extra = 0.0
        if pulse.kind == "rydberg" and other_level == RYDBERG:
            extra = (
                math.inf
                if math.isinf(error_model.blockade_shift)
                else error_model.blockade_shift / HBAR
            )
        return _pulse_block(p, extra)

    return _embed(block, slot, transition)


def apply_pulse(
    state: np.ndarray,
    pulse: PulseSpec,
    error_model: ErrorModel,
    area_scale: float = 1.0,
) -> np.ndarray:
    """Apply one pulse to a normalized 9-component state."""
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > 1e-6:
        raise ConfigurationError(f"state not normalized (norm = {norm})")
    return pulse_unitary(pulse, error_model, area_scale) @ state


def _decay_damping(state: np.ndarray, duration: float, lifetime: float) -> np.ndarray:
    if duration == 0.0 or math.isinf(lifetime):
        return state
    damp = math.exp(-duration / (2.0 * lifetime))
    out = state.copy()
    for i1 in range(3):
        for i2 in range(3):
            d = (damp if i1 == RYDBERG else 1.0) * (damp if i2 == RYDBERG else 1.0)
            if d != 1.0:
                out[3 * i1 + i2] *= d
    return out


def inject_doppler_phase(
    state: np.ndarray, velocity: float, dt: float, lambda1: float, lambda2: float
) -> np.ndarray:
    """Multiply every amplitude with the control atom in |r> by e^{i k v dt}."""
    if not math.isfinite(velocity):
        raise DomainError("sampled velocity must be finite")
    k = two_photon_wavevector(lambda1, lambda2)
    phase = complex(math.cos(k * velocity * dt), math.sin(k * velocity * dt))
    out = state.copy()
    out[3 * RYDBERG : 3 * RYDBERG + 3] *= phase
    return out


def _control_r_flip(state: np.ndarray) -> np.ndarray:
    out = state.copy()
    out[3 * RYDBERG : 3 * RYDBERG + 3] *= -1.0
    return out


# --------------------------------------------------------------------------
# Sequence engine
# --------------------------------------------------------------------------


def _doppler_injection_index(seq: SequenceSpec) -> int | None:
    """Element index of the second Rydberg pulse on the control atom."""
    hits = [
        i
        for i, el in enumerate(seq.elements)
        if isinstance(el, PulseSpec) and el.kind == "rydberg" and el.atom == CONTROL_ATOM
    ]
    return hits[1] if len(hits) >= 2 else None


def _measure_elements(seq: SequenceSpec) -> tuple:
    extra = ()
    if seq.measure.pre_raman_pi:
        extra = (
            PulseSpec(CONTROL_ATOM, "raman", math.pi),
            PulseSpec(TARGET_ATOM, "raman", math.pi),
        )
    return tuple(seq.elements) + extra


def _drift_nodes(drift: float, n: int = 15) -> list[tuple[float, float]]:
    """(weight, area_scale) nodes for the uniform drift average."""
    if drift == 0.0:
        return [(1.0, 1.0)]
    x, w = np.polynomial.legendre.leggauss(n)
    return [(wi / 2.0, 1.0 + drift * xi) for wi, xi in zip(w, x)]


def _evolve_branches(
    seq: SequenceSpec, initial: np.ndarray, error_model: ErrorModel
) -> list[tuple[float, np.ndarray]]:
    """All (weight, final state) branches of the exact error-model evolution."""
    elements = _measure_elements(seq)
    inject_at = _doppler_injection_index(seq)
    f = error_model.doppler.mean_phase_factor if error_model.doppler else 1.0

    results: list[tuple[float, np.ndarray]] = []
    for w_drift, scale in _drift_nodes(error_model.raman_amplitude_drift):
        branches = [(w_drift, initial.copy())]
        for i, el in enumerate(elements):
            if i == inject_at and error_model.doppler is not None:
                branches = [
                    item
                    for wgt, psi in branches
                    for item in (
                        ((1.0 + f) / 2.0 * wgt, psi),
                        ((1.0 - f) / 2.0 * wgt, _control_r_flip(psi)),
                    )
                ]
            if isinstance(el, Wait):
                branches = [
                    (wgt, _decay_damping(psi, el.duration, error_model.rydberg_lifetime))
                    for wgt, psi in branches
                ]
                continue
            area_scale = scale if el.kind == "raman" else 1.0
            u = pulse_unitary(el, error_model, area_scale)
            eta = error_model.excitation_efficiency(el.atom) if el.kind == "rydberg" else 1.0
            new_branches = []
            for wgt, psi in branches:
                evolved = _decay_damping(
                    u @ psi, el.duration, error_model.rydberg_lifetime
                )
                if eta >= 1.0:
                    new_branches.append((wgt, evolved))
                else:
                    new_branches.append((wgt * eta, evolved))
                    new_branches.append(
                        (
                            wgt * (1.0 - eta),
                            _decay_damping(psi, el.duration, error_model.rydberg_lifetime),
                        )
                    )
            branches = new_branches
        results.extend(branches)
    return results


def _classify_populations(
    populations: np.ndarray, deficit: float, pre_pi: bool, eta_det: float
) -> tuple[dict[tuple[str, str], float], float]:
    """Map the 9 quantum populations to gate-output classifications + loss.

    With the pre-measurement pi the measured lower level corresponds to the
    gate-output upper state (and vice versa); recaptured Rydberg atoms are
    classified with the presence (measured-lower) state.
    """

    def atom_outcomes(level: int) -> list[tuple[str | None, float]]:
        present = "upper" if pre_pi else "lower"
        absent = "lower" if pre_pi else "upper"
        if level == LOWER:
            return [(present, 1.0)]
        if level == UPPER:
            return [(absent, 1.0)]
        return [(None, eta_det), (present, 1.0 - eta_det)]  # None = lost

    probs = {(a, b): 0.0 for a in _STATE_NAMES for b in _STATE_NAMES}
    loss = deficit
    for i1 in range(3):
        for i2 in range(3):
            p = populations[3 * i1 + i2]
            if p == 0.0:
                continue
            for o1, w1 in atom_outcomes(i1):
                for o2, w2 in atom_outcomes(i2):
                    if o1 is None or o2 is None:
                        loss += p * w1 * w2
                    else:
                        probs[(o1, o2)] += p * w1 * w2
    return probs, loss


def run_sequence(
    seq: SequenceSpec,
    initial: np.ndarray,
    error_model: ErrorModel,
    mode: str = "exact",
    n_shots: int | None = None,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
):
    """Run a pulse sequence.

    mode="exact" returns an ExactResult with analytic outcome probabilities;
    mode="sampled" draws `n_shots` stochastic shots (deterministic for a
    fixed seed) and returns a list of ShotOutcome.
    """
    norm = float(np.linalg.norm(initial))
    if abs(norm - 1.0) > 1e-6:
        raise ConfigurationError(f"initial state not normalized (norm = {norm})")

    if mode == "exact":
        branches = _evolve_branches(seq, initial, error_model)
        agg = {(a, b): 0.0 for a in _STATE_NAMES for b in _STATE_NAMES}
        loss_total = 0.0
        raw = np.zeros(9)
        for wgt, psi in branches:
            pops = np.abs(psi) ** 2
            deficit = max(0.0, 1.0 - float(pops.sum()))
            probs, loss = _classify_populations(
                pops, deficit, seq.measure.pre_raman_pi, error_model.detection_efficiency
            )
            for k in agg:
                agg[k] += wgt * probs[k]
            loss_total += wgt * loss
            raw += wgt * pops
        return ExactResult(class_probs=agg, loss=loss_total, raw_populations=raw)

    if mode == "sampled":
        if n_shots is None or n_shots <= 0:
            raise ConfigurationError("sampled mode needs a positive n_shots")
        if rng is None:
            if seed is None:
                raise ConfigurationError("sampled mode requires a seed or rng")
            rng = np.random.default_rng(seed)
        return [_run_one_shot(seq, initial, error_model, rng) for _ in range(n_shots)]

    raise ConfigurationError(f"unknown mode '{mode}'")


def _run_one_shot(
    seq: SequenceSpec,
    initial: np.ndarray,
    error_model: ErrorModel,
    rng: np.random.Generator,
) -> ShotOutcome:
    elements = _measure_elements(seq)
    inject_at = _doppler_injection_index(seq)
    drift = error_model.raman_amplitude_drift
    scale = 1.0 + rng.uniform(-drift, drift) if drift > 0 else 1.0

    psi = initial.copy()
    for i, el in enumerate(elements):
        if i == inject_at and error_model.doppler is not None:
            d = error_model.doppler
            sigma_v = math.sqrt(2.0 * K_BOLTZMANN * d.temperature / d.atom_mass())
            v = rng.normal(0.0, sigma_v)
            psi = inject_doppler_phase(psi, v, d.dt, d.lambda1, d.lambda2)
        if isinstance(el, Wait):
            psi = _decay_damping(psi, el.duration, error_model.rydberg_lifetime)
            continue
        if el.kind == "rydberg" and rng.random() > error_model.excitation_efficiency(el.atom):
            psi = _decay_damping(psi, el.duration, error_model.rydberg_lifetime)
            continue
        area_scale = scale if el.kind == "raman" else 1.0
        psi = pulse_unitary(el, error_model, area_scale) @ psi
        psi = _decay_damping(psi, el.duration, error_model.rydberg_lifetime)

    pops = np.abs(psi) ** 2
    deficit = max(0.0, 1.0 - float(pops.sum()))
    outcome = rng.choice(10, p=np.append(pops, deficit) / (pops.sum() + deficit))
    if outcome == 9:  # decay loss
        return ShotOutcome(survived=(False, False), trace_loss=True)
    i1, i2 = divmod(int(outcome), 3)

    def detect(level: int) -> tuple[bool, bool]:
        """(survived, lost) for one atom."""
        if level == LOWER:
            return True, False
        if level == UPPER:
            return False, False
        if rng.random() < error_model.detection_efficiency:
            return False, True
        return True, False

    s1, l1 = detect(i1)
    s2, l2 = detect(i2)
    return ShotOutcome(survived=(s1, s2), trace_loss=l1 or l2)


def classify_shots(
    shots: list[ShotOutcome], pre_pi: bool
) -> tuple[dict[tuple[str, str], float], float]:
    """Empirical gate-output frequencies and loss fraction from sampled shots."""
    counts = {(a, b): 0 for a in _STATE_NAMES for b in _STATE_NAMES}
    loss = 0
    for shot in shots:
        if shot.trace_loss:
            loss += 1
            continue
        present = "upper" if pre_pi else "lower"
        absent = "lower" if pre_pi else "upper"
        o1 = present if shot.survived[0] else absent
        o2 = present if shot.survived[1] else absent
        counts[(o1, o2)] += 1
    n = len(shots)
    return {k: v / n for k, v in counts.items()}, loss / n


# --------------------------------------------------------------------------
# Canonical sequences
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PulseTiming:
    """Physical pulse parameters used to build the canonical sequences.

    Zero Rydberg Rabi frequencies give instantaneous pulses (ideal algebra).
    `pi_pi_gap` is the interval between the two control Rydberg pulses; the
    part not taken by the target 2-pi pulse is split into two waits.
    """

    omega_ryd_87: float = 0.0  # rad/s
    omega_ryd_85: float = 0.0  # rad/s
    raman_duration: float = 0.0  # s
    pi_pi_gap: float = 0.0  # s

    def ryd_pulse(self, atom: str, area: float, phase: float = 0.0) -> PulseSpec:
        omega = self.omega_ryd_87 if atom == CONTROL_ATOM else self.omega_ryd_85
        duration = area / omega if omega > 0 else 0.0
        return PulseSpec(atom, "rydberg", area, phase, 0.0, duration)

    def raman_pulse(self, atom: str, area: float, phase: float = 0.0) -> PulseSpec:
        return PulseSpec(atom, "raman", area, phase, 0.0, self.raman_duration)

    def gate_waits(self) -> tuple[Wait, Wait]:
        t85 = (
            2.0 * math.pi / self.omega_ryd_85 if self.omega_ryd_85 > 0 else 0.0
        )
        gap = max(0.0, (self.pi_pi_gap - t85) / 2.0)
        return Wait(gap), Wait(gap)


def cnot_sequence(
    relative_phase: float = 0.0,
    timing: PulseTiming = PulseTiming(),
    pre_raman_pi: bool = True,
) -> SequenceSpec:
    """H(target) - pi_r(control) - 2pi_r(target) - pi_r(control) - H(target, phase)."""
    w1, w2 = timing.gate_waits()
    elements = (
        timing.raman_pulse(TARGET_ATOM, math.pi / 2.0),
        timing.ryd_pulse(CONTROL_ATOM, math.pi),
        w1,
        timing.ryd_pulse(TARGET_ATOM, 2.0 * math.pi),
        w2,
        timing.ryd_pulse(CONTROL_ATOM, math.pi),
        timing.raman_pulse(TARGET_ATOM, math.pi / 2.0, relative_phase),
    )
    return SequenceSpec(elements=elements, measure=Measure(pre_raman_pi=pre_raman_pi))


def entangle_sequence(
    phi1: float | None,
    timing: PulseTiming = PulseTiming(),
    relative_phase: float = 0.0,
) -> SequenceSpec:
    """Preparation pi/2 on the control, C-NOT block, optional analysis pulses.

    With phi1 = None no analysis pulses are applied (Bell-population
    measurement); otherwise both atoms get pi/2 pulses with phase phi1.
    """
    w1, w2 = timing.gate_waits()
    elements = [
        timing.raman_pulse(CONTROL_ATOM, math.pi / 2.0),
        # C-NOT on the prepared superposition
        timing.raman_pulse(TARGET_ATOM, math.pi / 2.0),
        timing.ryd_pulse(CONTROL_ATOM, math.pi),
        w1,
        timing.ryd_pulse(TARGET_ATOM, 2.0 * math.pi),
        w2,
        timing.ryd_pulse(CONTROL_ATOM, math.pi),
        timing.raman_pulse(TARGET_ATOM, math.pi / 2.0, relative_phase),
    ]
    if phi1 is not None:
        elements.append(timing.raman_pulse(CONTROL_ATOM, math.pi / 2.0, phi1))
        elements.append(timing.raman_pulse(TARGET_ATOM, math.pi / 2.0, phi1))
    return SequenceSpec(elements=tuple(elements), measure=Measure(pre_raman_pi=True))


_INPUT_STATES = [("lower", "lower"), ("lower", "upper"), ("upper", "lower"), ("upper", "upper")]


def cnot_truth_table(
    relative_phase: float = 0.0,
    error_model: ErrorModel = ErrorModel(),
    timing: PulseTiming = PulseTiming(),
) -> TruthTable:
    """Exact-mode 4x4 output-probability matrix with a separate loss column."""
    seq = cnot_sequence(relative_phase, timing)
    matrix = np.zeros((4, 4))
    loss = np.zeros(4)
    for i, (c, t) in enumerate(_INPUT_STATES):
        result = run_sequence(seq, basis_state(c, t), error_model, mode="exact")
        for j, (oc, ot) in enumerate(_INPUT_STATES):
            matrix[i, j] = result.probability(oc, ot)
        loss[i] = result.loss
    return TruthTable(matrix=matrix, loss=loss)


def phase_scan(
    phases,
    inputs=(("lower", "upper"), ("upper", "upper")),
    error_model: ErrorModel = ErrorModel(),
    timing: PulseTiming = PulseTiming(),
) -> list[dict]:
    """Output probabilities versus the relative phase between the two pi/2 pulses."""
    rows = []
    for phase in phases:
        seq = cnot_sequence(float(phase), timing)
        row = {"relative_phase": float(phase)}
        for c, t in inputs:
            result = run_sequence(seq, basis_state(c, t), error_model, mode="exact")
            key = f"{'u' if c == 'upper' else 'd'}{'u' if t == 'upper' else 'd'}"
            row[f"p_target_flip_{key}"] = result.probability(c, "lower" if t == "upper" else "upper")
            row[f"p_target_same_{key}"] = result.probability(c, t)
        rows.append(row)
    return rows


@dataclass(frozen=True)
class BlockadeDemoResult:
    durations: np.ndarray
    excitation_signal: np.ndarray  # detected Rydberg-loss probability of the target
    peak_to_peak: float


def blockade_demo(
    t85_grid,
    with_control: bool,
    error_model: ErrorModel = ErrorModel(),
    omega85: float = 2.0 * math.pi * 0.6e6,
    omega87: float = 2.0 * math.pi * 0.659e6,
    wait_after_control: float = 0.3e-6,
    blockade_mixture: list[tuple[float, float]] | None = None,
) -> BlockadeDemoResult:
    """Rabi-quenching demonstration: pi(control) - wait - variable target pulse.

    Returns the detected excitation signal of the target atom (probability of
    target loss at detection) versus pulse duration.  With the control
    present, shots are post-selected on control loss, as the unblockaded
    events where the control failed to reach |r> would otherwise contaminate
    the signal.  `blockade_mixture` optionally supplies (weight, dE) pairs,
    e.g. from a thermal average over trap offsets; otherwise the error
    model's single blockade shift is used.

    The peak-to-peak amplitude is extracted with the damped-sinusoid fit.
    """
    from .analysis import TimeSeries, fit_damped_sinusoid

    t_grid = np.asarray(list(t85_grid), dtype=float)
    if t_grid.size == 0:
        raise ConfigurationError("duration grid must not be empty")
    mixture = blockade_mixture or [(1.0, error_model.blockade_shift)]

    signal = np.zeros_like(t_grid)
    for k, t in enumerate(t_grid):
        p_joint = 0.0  # P(target lost AND control lost) or P(target lost)
        p_sel = 0.0  # P(control lost); 1 when the control atom is absent
        for wgt, de in mixture:
            em = replace(error_model, blockade_shift=de)
            elements = []
            if with_control:
                duration87 = math.pi / omega87 if omega87 > 0 else 0.0
                elements.append(
                    PulseSpec(CONTROL_ATOM, "rydberg", math.pi, 0.0, 0.0, duration87)
                )
                elements.append(Wait(wait_after_control))
            elements.append(
                PulseSpec(TARGET_ATOM, "rydberg", omega85 * t, 0.0, 0.0, t)
            )
            seq = SequenceSpec(elements=tuple(elements), measure=Measure(False))
            result = run_sequence(seq, basis_state("upper", "upper"), em, mode="exact")
            pops = result.raw_populations
            eta = error_model.detection_efficiency
            deficit = max(0.0, 1.0 - pops.sum())
            # detection: an atom in |r> is lost with probability eta_det
            p_t_lost = eta * sum(pops[3 * i1 + RYDBERG] for i1 in range(3))
            if with_control:
                p_c_lost = eta * sum(pops[3 * RYDBERG + i2] for i2 in range(3))
                p_both = eta * eta * pops[3 * RYDBERG + RYDBERG]
                # decay loss is attributed to the control, which holds the
                # Rydberg dwell here; post-decay target dynamics unresolved
                p_joint += wgt * p_both
                p_sel += wgt * (p_c_lost + deficit)
            else:
                p_joint += wgt * (p_t_lost + deficit)
                p_sel += wgt * 1.0
        signal[k] = p_joint / p_sel if p_sel > 0 else 0.0

    ts = TimeSeries(t_grid, np.clip(signal, 0.0, 1.0))
    try:
        fit = fit_damped_sinusoid(ts)
        amplitude = 2.0 * fit.params["amplitude"]
    except (ConfigurationError, ValueError):
        amplitude = float(np.max(signal) - np.min(signal))
    return BlockadeDemoResult(
        durations=t_grid, excitation_signal=signal, peak_to_peak=amplitude
    )


@dataclass(frozen=True)
class EntangleResult:
    bell_populations: dict[tuple[str, str], float]
    bell_loss: float
    parity_rows: list[dict]


def entangle_and_parity(
    phi1_grid,
    error_model: ErrorModel = ErrorModel(),
    timing: PulseTiming = PulseTiming(),
) -> EntangleResult:
    """Bell-state populations plus the parity oscillation over phi1."""
    initial = basis_state("upper", "lower")
    bell = run_sequence(entangle_sequence(None, timing), initial, error_model, "exact")
    rows = []
    for phi in np.asarray(list(phi1_grid), dtype=float):
        res = run_sequence(
            entangle_sequence(float(phi), timing), initial, error_model, "exact"
        )
        p_uu = res.probability("upper", "upper")
        p_dd = res.probability("lower", "lower")
        p_ud = res.probability("upper", "lower")
        p_du = res.probability("lower", "upper")
        rows.append(
            {
                "phi1": float(phi),
                "p_uu": p_uu,
                "p_dd": p_dd,
                "p_ud": p_ud,
                "p_du": p_du,
                "parity": p_uu + p_dd - p_ud - p_du,
                "loss": res.loss,
            }
        )
    return EntangleResult(
        bell_populations=bell.class_probs, bell_loss=bell.loss, parity_rows=rows
    )


# --------------------------------------------------------------------------
# Sequence file format
# --------------------------------------------------------------------------


def sequence_to_json(seq: SequenceSpec) -> str:
    """Serialize to the documented JSON sequence schema."""
    elements = []
    for el in seq.elements:
        if isinstance(el, Wait):
            elements.append({"type": "wait", "duration_us": el.duration * 1e6})
        else:
            elements.append(
                {
                    "type": "pulse",
                    "atom": el.atom,
                    "kind": el.kind,
                    "area_over_pi": el.area / math.pi,
                    "phase_rad": el.phase,
                    "duration_us": el.duration * 1e6,
                    "detuning_rad_s": el.detuning,
                }
            )
    doc = {
        "elements": elements,
        "measure": {"pre_raman_pi": seq.measure.pre_raman_pi},
    }
    return json.dumps(doc, indent=2)


def sequence_from_json(text: str | Path) -> SequenceSpec:
    """Parse a sequence file (path or JSON text)."""
    if isinstance(text, Path):
        text = text.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid sequence JSON: {exc}") from exc
    elements = []
    for el in doc.get("elements", []):
        if el.get("type") == "wait":
            elements.append(Wait(duration=float(el["duration_us"]) * 1e-6))
        elif el.get("type") == "pulse":
            elements.append(
                PulseSpec(
                    atom=el["atom"],
                    kind=el["kind"],
                    area=float(el["area_over_pi"]) * math.pi,
                    phase=float(el.get("phase_rad", 0.0)),
                    detuning=float(el.get("detuning_rad_s", 0.0)),
                    duration=float(el.get("duration_us", 0.0)) * 1e-6,
                )
            )
        else:
            raise ConfigurationError(f"unknown sequence element {el!r}")
    measure = Measure(pre_raman_pi=bool(doc.get("measure", {}).get("pre_raman_pi", False)))
    return SequenceSpec(elements=tuple(elements), measure=measure)
