"""Chirped-drive quantum nonlinear oscillator simulator.

Two-photon (1:2 subharmonic) ladder climbing, its classical autoresonance
limit, the isomorphism onto the rescaled fundamental resonance, Wigner
phase-space snapshots, and the phase-locking threshold map.
"""
from .model import (
    ChirpSchedule,
    CouplingMatrix,
    CouplingOrder,
    DimensionlessParams,
    EnergyLadder,
    PhysicalParams,
    ResonanceMode,
    anharmonicity,
    build_coupling,
    build_ladder,
    chirp_schedule,
    dimensionless,
    drive_amplitude,
    drive_phase,
    effective_drive,
    effective_twin,
)
from .propagator import (
    IntegratorConfig,
    Picture,
    StateVector,
    Trajectory,
    initial_state,
    propagate,
    rhs,
    step,
)
from .observables import (
    TrajectorySeries,
    capture_probability,
    ladder_step_times,
    series_from_trajectory,
    smooth,
)
from .wigner import (
    PhaseSpaceGrid,
    WignerField,
    default_grid,
    direct_wigner_oracle,
    hermite_function,
    wigner_from_state,
)
from .threshold import (
    IsomorphismResult,
    Regime,
    ThresholdPoint,
    bisect_threshold,
    column_alpha,
    isomorphism_check,
    realize_params,
    theory_threshold,
    threshold_map,
)
from .classical import (
    ClassicalState,
    ClassicalTrace,
    classical_capture,
    classical_rhs,
    classical_threshold,
)
from .errors import (
    BasisTruncationError,
    BracketError,
    ChirpClimbError,
    ConfigError,
    GridCoverageError,
    NormDriftError,
    NumericalGuardError,
)

__version__ = "0.1.0"
