"""Design and verification toolkit for photon-ion SWAP gates in
single-sided cavities."""

from .params import (
    MHZ,
    KHZ,
    MU_B_OVER_HBAR,
    SPEED_OF_LIGHT,
    CavityParams,
    ConfigError,
    DriveSettings,
    EffectiveDetunings,
    GateOutcome,
    JointQubitState,
    LambdaSystem,
    SingularConfigError,
    SteadyStateAmplitudes,
)
from .model import (
    AggregateOutcome,
    SamplerSpec,
    average_gate_outcome,
    birefringence_effective_m,
    complex_cooperativity,
    effective_detunings,
    gate_outcome,
    gate_probabilities,
    sample_qubit_pairs,
    steady_state_amplitudes,
)
from .oracle import (
    NonFiniteAmplitudeError,
    OracleReport,
    StepSizeError,
    Trajectory,
    conservation_check,
    dump_trajectory,
    integrate_amplitudes,
    time_domain_probabilities,
)
from .optimize import (
    DetuningBranches,
    LandmarkParameters,
    OptimizationBounds,
    OptimizationResult,
    SweepPoint,
    eta_max,
    fidelity_gain_estimate,
    intrinsic_cooperativity,
    landmark_parameters,
    optimal_coupling,
    optimize_asymmetric,
    resonant_cooperativity,
    sweep_coupling,
    symmetric_optimal_detunings,
)
from .ions import (
    CavityGeometry,
    IonPreset,
    MirrorSpec,
    PresetBundle,
    available_presets,
    cavity_from_mirrors,
    gate_time_estimate,
    lande_factor,
    larmor_frequency,
    postselected_efficiency,
    preset,
)

__version__ = "0.1.0"
