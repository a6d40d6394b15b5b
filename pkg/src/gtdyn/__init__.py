"""Interlacing particle dynamics on Gelfand-Tsetlin patterns, their
reflection-map representation, and diffusive comparison with reflected
interlacing Brownian motions."""

from .driving import (
    DrivingPath,
    SeedSpec,
    bernoulli_driver,
    ingest_path,
    lazy_walk_driver,
    poisson_driver,
    serialize_path,
)
from .dynamics import DynamicsState, Trajectory, UpdateRecord, apply_event, run_dynamics
from .patterns import (
    ContinuousPattern,
    DiscretePattern,
    packed_pattern,
    validate_continuous,
    validate_discrete,
)
from .rescale import ScalingPreset, convergence_pipeline, preset_scaling, rescale_trajectory
from .skorokhod import (
    PiecewisePath,
    TimeDependentInterval,
    check_prop6,
    discrete_sk_map,
    gamma_reflect,
)
from .stats import empirical_ks, gue_corners_sample, moment_summary
from .warren import brownian_grid, continuum_sk_map, warren_sample

__version__ = "0.1.0"
