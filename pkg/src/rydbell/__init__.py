"""rydbell: heteronuclear Rydberg-blockade gate and Bell-state simulations.

A numpy/scipy library covering the full theoretical pipeline of a two-atom
(Rb87 + Rb85) Rydberg-blockade experiment: single-atom Rydberg structure,
restricted two-atom Forster Hamiltonians and blockade shifts, classical
thermal averaging with Doppler dephasing, few-level pulse-sequence gate
dynamics with an experimental error model, and the fitting / fidelity
analysis used to quantify the resulting entanglement.
"""

__version__ = "0.1.0"

from .analysis import (
    FidelityReport,
    FitResult,
    TimeSeries,
    TruthTable,
    cnot_fidelity,
    entanglement_fidelity,
    fit_damped_sinusoid,
    fit_parity,
    ideal_cnot_table,
    max_entanglement_fidelity,
    parity_from_populations,
    phase_fidelity,
)
from .errors import (
    ConfigurationError,
    DomainError,
    GeometryError,
    NumericalError,
    RydbellError,
)
from .gate import (
    DopplerSpec,
    ErrorModel,
    Measure,
    PulseSpec,
    PulseTiming,
    SequenceSpec,
    ShotOutcome,
    Wait,
    apply_pulse,
    basis_state,
    blockade_demo,
    cnot_sequence,
    cnot_truth_table,
    effective_rabi,
    entangle_and_parity,
    entangle_sequence,
    inject_doppler_phase,
    run_sequence,
    sequence_from_json,
    sequence_to_json,
)
from .pair import (
    FoersterChannel,
    Geometry,
    InteractionMatrix,
    PairBasis,
    PairState,
    blockade_scan,
    blockade_shift,
    build_excitation_coupling,
    build_foerster_hamiltonian,
    build_pair_basis,
    default_channels,
    dipole_dipole_element,
    double_excitation_probability,
    full_fine_structure_channels,
    spectral_average_probability,
    time_averaged_probability,
)
from .species import FieldConfig, RydbergLevel, Species, get_species, load_species_file
from .structure import (
    dipole_matrix_element,
    level_energy,
    quantum_defect,
    radial_matrix_element,
    radial_wavefunction,
    zeeman_shift,
)
from .thermal import (
    OffsetDistribution,
    ThermalState,
    TrapParams,
    combined_temperature,
    doppler_dephasing_factor,
    doppler_dephasing_mc,
    reduced_mass,
    sample_offset,
    sample_velocity,
    thermal_average,
)
