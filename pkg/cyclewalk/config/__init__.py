"""
Configuration Package for cyclewalk

This package contains default parameters, tolerances and their validators.
"""

from .defaults import (
    FORMAT_VERSION,
    DEFAULT_SEED,
    SEED_ENV_VAR,
    DEFAULT_MAX_DIM,
    SUPPORTED_POINT_DIMS,
    METRICS,
    TORUS_PERIODS,
    REAL_ZERO_TOL,
    ZERO_EIGENVALUE_RTOL,
    DENSE_EIGEN_MAX_DIM,
    EIGEN_RESIDUAL_TOL,
    ODE_LOCAL_TOL,
    HARMONIC_LSQ_MAX_DIM,
    SNF_OPERATION_BUDGET,
    DEFAULT_WALK_PARAMS,
    DEFAULT_ANNEAL_PARAMS,
    DEFAULT_HEAT_PARAMS,
    DEFAULT_SCALING_PARAMS,
    resolve_seed,
    zero_eigenvalue_threshold,
    validate_walk_params,
    validate_anneal_params,
    validate_heat_params,
    validate_scaling_params,
)

__all__ = [
    'FORMAT_VERSION',
    'DEFAULT_SEED',
    'SEED_ENV_VAR',
    'DEFAULT_MAX_DIM',
    'SUPPORTED_POINT_DIMS',
    'METRICS',
    'TORUS_PERIODS',
    'REAL_ZERO_TOL',
    'ZERO_EIGENVALUE_RTOL',
    'DENSE_EIGEN_MAX_DIM',
    'EIGEN_RESIDUAL_TOL',
    'ODE_LOCAL_TOL',
    'HARMONIC_LSQ_MAX_DIM',
    'SNF_OPERATION_BUDGET',
    'DEFAULT_WALK_PARAMS',
    'DEFAULT_ANNEAL_PARAMS',
    'DEFAULT_HEAT_PARAMS',
    'DEFAULT_SCALING_PARAMS',
    'resolve_seed',
    'zero_eigenvalue_threshold',
    'validate_walk_params',
    'validate_anneal_params',
    'validate_heat_params',
    'validate_scaling_params',
]
