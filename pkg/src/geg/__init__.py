"""Generalized exponentiated gradient updates built on the Euler (a,b)-logarithm,
with an online portfolio selection toolkit on top."""

from .deform import (
    DeformKind,
    DeformParams,
    bregman_divergence,
    bregman_generator,
    deformed_exp,
    deformed_exp_series,
    deformed_log,
    generalized_multiply,
    trace_form_entropy,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DataError,
    DegenerateStepError,
    DomainError,
    GEGError,
    StepError,
)
from .mirror import (
    CenteringVariant,
    LearningRate,
    ProjectionKind,
    center_gradient,
    geg_step_normalized,
    gegu_step,
    md_step_generic,
    project_l1_normalize,
    project_simplex_euclidean,
)
from .olps import (
    BacktestResult,
    PriceSeries,
    SparsifyRule,
    StrategyConfig,
    backtest,
    geg_olps_step,
    olps_gradient,
    preprocess,
    price_relatives,
    run_baselines,
    sparsify,
    tsallis_log_loss,
)
from .search import (
    HyperSpace,
    Interval,
    SplitScheme,
    default_space,
    grid_search,
    random_search,
    walk_forward_splits,
)

__version__ = "0.1.0"
