"""Adaptive molecular-communication receivers with tunable ligand receptors.

Analytic bit-error-probability models for non-adaptive, receptor-tuning
and receptor-expression receivers across time-varying channel scenarios
(scaling, shift, enzymatic degradation, intersymbol interference,
stochastic background interference), cross-validated by a seeded Monte
Carlo link simulator.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateStats,
    DomainError,
    InvalidBracket,
    LengthMismatch,
    NonConvergence,
    ParseError,
    ValidationError,
)
from .numerics import (
    LognormalSpec,
    QuadratureConfig,
    DEFAULT_QUADRATURE,
    erfc,
    lognormal_expectation,
    minimize_scalar,
)
from .channel import (
    ChannelParams,
    cir,
    cir_enzyme,
    isi_estimate,
    isi_tap_gains,
    isi_term,
    peak_time,
    received_concentration,
)
from .receptor import (
    BindingStats,
    MixtureConfig,
    ReceptorConfig,
    bind_prob,
    binding_moments,
    binding_stats,
    binding_stats_with_interference,
    mixture_bind_prob,
    occupancy,
)
from .detection import DecisionModel, GAMMA_DEGENERACY, bep, decide, decision_model, optimal_threshold
from .adaptation import (
    KdOptimum,
    ReceiverArchitecture,
    kd_opt_baseline,
    kd_opt_interference_mean,
    kd_opt_isi,
    kd_opt_scaled,
    kd_opt_shift,
    optimize_kd_new_rear,
    optimize_kd_rtar_full_stats,
)
from .scenarios import (
    ARCHITECTURES,
    DEFAULT_GRIDS,
    ReceiverSetup,
    ResponseCurve,
    ScenarioSpec,
    SweepRow,
    export_response_curve,
    run_enzyme_sweep,
    run_interference_sweep,
    run_isi_sweep,
    run_ratio_sweep,
    run_scaling_sweep,
    run_shift_sweep,
    run_sweep,
)
from .oracle import (
    BepEstimate,
    IsiChannelSpec,
    OracleConfig,
    PRNG_ID,
    SimPoint,
    simulate_bep,
    split_seed,
)
from .validation import VALIDATION_MATRIX, ValidationPoint, ValidationResult, run_validation
