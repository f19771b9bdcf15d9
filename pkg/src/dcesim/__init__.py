"""Dynamical Casimir effect simulator.

Floquet analysis of time-modulated cavity modes, Gaussian-state evolution
of linear and ring cavities coupled to a thermal bath, and the long-time
closed forms for photon number and entanglement.
"""

__version__ = "0.1.0"

from .asymptotics import (
    AsymptoticParams,
    ClassicalSeed,
    DiscreteDrive,
    OccurrenceTime,
    PhotonCount,
    SinusoidalDrive,
    asymptotic_log_negativity,
    asymptotic_photons,
    classical_yield,
    f_factors,
    f_plus_limit,
    lossless_log_negativity,
    occurrence_time,
)
from .config import ConfigError, ExperimentConfig, load_config, loads_config, parse_config
from .dynamics import (
    LINEAR,
    RING,
    BathSpec,
    ClosedFormPropagator,
    DFSBlocks,
    EvolutionTrace,
    UncertaintyViolation,
    closed_form_propagator,
    dfs_decompose,
    drift_matrices,
    evolve_linear,
    evolve_ring,
    snapshot_times,
)
from .floquet import (
    HillFlow,
    IntegrationError,
    MonodromyResult,
    StabilityMap,
    lyapunov,
    monodromy,
    segment_matrix,
    stability_map,
    twostep_discriminant,
)
from .gaussian import (
    MIXING,
    ORIGINAL,
    PRIMED,
    VACUUM_VARIANCE,
    GaussianState,
    StateValidationError,
    ThermalSpec,
    log_negativity,
    nbar_from_temperature,
    partial_transpose,
    photon_number,
    symplectic_eigenvalues,
    symplectic_form,
    thermal_state,
)
from .modulation import (
    CoefficientSample,
    Jump,
    SinusoidalModulation,
    TwoStepModulation,
    coefficients_at,
    mathieu_parameters,
)
