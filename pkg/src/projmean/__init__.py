"""Projected sample means on rate-controlled planar curves.

Build a curve from a rate function, project points onto it, and verify
the limit laws of projected sample means by seeded simulation.
"""

from .asymptotics import (
    LimitLaw,
    exp_limit_masses,
    log_limit_cdf,
    phi,
    poly_limit_cdf,
    theorem1_limit,
)
from .curve import (
    Curve,
    PlanarPoint,
    circle_curve,
    curve_from_rate,
    kink_curve,
    simple_curve_from_rate,
)
from .diagnostics import (
    CircleExpansionRow,
    MedialProbe,
    RatioTrace,
    check_a1,
    check_a1_prime,
    circle_g_expansion,
    probe_medial_axis,
)
from .errors import DomainError, ProjmeanError
from .montecarlo import (
    EmpiricalSummary,
    ExperimentConfig,
    ExperimentResult,
    SourceDistribution,
    check_corollary_i,
    check_g_scale,
    check_sticky,
    check_theorem1,
    draw_sample_mean,
    empirical_prob_leq,
    ks_distance,
    run_experiment,
)
from .projection import (
    ProjectionResult,
    Projector,
    loss,
    loss_derivative,
    project,
    project_grid_oracle,
)
from .rate_functions import (
    RateFunction,
    ValidationReport,
    make_custom,
    make_exp,
    make_log,
    make_poly,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ProjmeanError",
    "DomainError",
    "RateFunction",
    "ValidationReport",
    "make_poly",
    "make_log",
    "make_exp",
    "make_custom",
    "validate",
    "Curve",
    "PlanarPoint",
    "curve_from_rate",
    "simple_curve_from_rate",
    "circle_curve",
    "kink_curve",
    "ProjectionResult",
    "Projector",
    "loss",
    "loss_derivative",
    "project",
    "project_grid_oracle",
    "phi",
    "theorem1_limit",
    "poly_limit_cdf",
    "log_limit_cdf",
    "exp_limit_masses",
    "LimitLaw",
    "SourceDistribution",
    "ExperimentConfig",
    "ExperimentResult",
    "EmpiricalSummary",
    "draw_sample_mean",
    "run_experiment",
    "empirical_prob_leq",
    "ks_distance",
    "check_theorem1",
    "check_corollary_i",
    "check_sticky",
    "check_g_scale",
    "RatioTrace",
    "MedialProbe",
    "CircleExpansionRow",
    "check_a1",
    "check_a1_prime",
    "probe_medial_axis",
    "circle_g_expansion",
]
