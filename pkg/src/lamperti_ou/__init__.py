"""Lamperti processes, their OU-type transforms and generalized OU processes
driven by Levy processes, with oracles and verification experiments for the
stationary and Darling-Kac regimes."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateModel,
    DomainRestricted,
    ExponentOverflow,
    InvalidTarget,
    LampertiError,
    NoConvergence,
    OutOfRange,
    RejectsModel,
    TableTooLarge,
    Unavailable,
    WrongFamily,
)
from .models import (
    Family,
    JumpLaw,
    LevyModel,
    MeanClass,
    laplace_exponent,
    model_from_config,
    model_to_config,
    sample_increment,
    sample_increments,
    sample_positive_stable,
    validate,
)
from .oracles import (
    INFINITE,
    Normalizers,
    NuFunctional,
    mean_inverse_hat_I,
    ml_moment,
    ml_sample,
    moment_oracle,
    nu_integral,
)
from .paths import (
    ExpFunctional,
    GridPath,
    SkeletonPath,
    StationaryScene,
    A_functional,
    T_change,
    build_scene,
    exp_functional,
    export_path_csv,
    extend_path,
    make_scene,
    sample_hat_I,
    sample_log_hat_I,
    simulate_grid,
    simulate_path,
    simulate_skeleton,
    tau,
)
from .processes import (
    ProcessKind,
    ProcessRealization,
    SupportCase,
    SupportInterval,
    eval_U,
    eval_U_stationary,
    eval_V,
    eval_X,
    eval_X_selfsimilar,
    patie_identity_check,
    support_interval,
)
from .rng import stream
from .scan import GOUTrack, Integrand, scan_segments, simulate_track, track_from_path
from .stats import ExperimentReport, SampleSummary, ks_two_sample
