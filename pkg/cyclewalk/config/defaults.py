"""
Default Parameters and Numerical Tolerances

This module holds every tunable constant of the library: numerical
tolerances, torus geometry, and the default parameter sets of the walk,
annealing, heat-flow and scaling pipelines together with their validators.
"""

import math
import os
from typing import Optional

# Output schema version written into every JSON document
FORMAT_VERSION = 1

# Seed resolution
DEFAULT_SEED = 0
SEED_ENV_VAR = "CYCLEWALK_SEED"

# Complex construction
DEFAULT_MAX_DIM = 3
SUPPORTED_POINT_DIMS = (2, 3)
METRICS = ("euclidean", "torus")

# Flat torus [0,2] x [0,sqrt(3)] with opposite sides identified
TORUS_PERIODS = (2.0, math.sqrt(3.0))

# Numerical tolerances
REAL_ZERO_TOL = 1e-12               # |x| <= tol * (1 + ||sigma||) counts as zero
ZERO_EIGENVALUE_RTOL = 1e-9         # lambda < rtol * max(1, lambda_max) counts as zero
DENSE_EIGEN_MAX_DIM = 2000          # dense eigh below, iterative solver above
EIGEN_RESIDUAL_TOL = 1e-8           # ||Lv - lambda v|| <= tol * ||v||
ODE_LOCAL_TOL = 1e-9                # adaptive integrator local error
HARMONIC_LSQ_MAX_DIM = 2000         # dense least squares below, lsqr above

# Smith normal form: elementary operations allowed before giving up
SNF_OPERATION_BUDGET = 50_000_000

DEFAULT_WALK_PARAMS = {
    "seed": DEFAULT_SEED,
    "horizon": 1.0,          # model time units; None = unlimited
    "max_jumps": None,       # None = unlimited
    "record_mode": "full",   # "full" | "summary"
    "n_trajectories": 1,
    "threads": 1,
}

DEFAULT_ANNEAL_PARAMS = {
    "t0": None,              # None = energy of the seed
    "alpha": 0.999,
    "t_min": 1e-3,
    "max_steps": 200_000,
    "cutoff": 0.5,
}

DEFAULT_HEAT_PARAMS = {
    "method": None,          # None = eigen below DENSE_EIGEN_MAX_DIM, rk4 above
    "operator": "up",        # "up" (L_k^up) | "full" (L_k)
    "n_steps": 20,
}

DEFAULT_SCALING_PARAMS = {
    "n_list": [4, 8],
    "horizon": 0.05,
    "forms": ["cos_mode"],
    "cycles": ["sigma1"],    # "sigma1" (horizontal) | "sigma2" (diagonal)
    "n_trajectories": 2,
    "trace_points": 5,
    "max_jumps": 200_000,
    "seed": DEFAULT_SEED,
    "threads": 1,
}


def resolve_seed(seed: Optional[int] = None) -> int:
    """Explicit seed, else CYCLEWALK_SEED, else DEFAULT_SEED"""
    if seed is not None:
        return int(seed)
    env_value = os.environ.get(SEED_ENV_VAR)
    if env_value:
        try:
            return int(env_value)
        except ValueError:
            raise ValueError(f"{SEED_ENV_VAR} は整数である必要があります: {env_value!r}")
    return DEFAULT_SEED


def zero_eigenvalue_threshold(lambda_max: float) -> float:
    """Threshold under which an eigenvalue counts as zero"""
    return ZERO_EIGENVALUE_RTOL * max(1.0, float(lambda_max))


def validate_walk_params(params: dict) -> dict:
    """Validate and fill missing walk parameters with defaults"""
    validated_params = DEFAULT_WALK_PARAMS.copy()
    validated_params.update(params)

    if validated_params["horizon"] is None and validated_params["max_jumps"] is None:
        raise ValueError("horizon と max_jumps の少なくとも一方を指定する必要があります")
    if validated_params["horizon"] is not None and validated_params["horizon"] < 0:
        raise ValueError("horizon は0以上である必要があります")
    if validated_params["max_jumps"] is not None and validated_params["max_jumps"] < 0:
        raise ValueError("max_jumps は0以上である必要があります")
    if validated_params["record_mode"] not in ("full", "summary"):
        raise ValueError(f"record_mode は full / summary のいずれかです: {validated_params['record_mode']}")
    if validated_params["n_trajectories"] < 1:
        raise ValueError("n_trajectories は1以上である必要があります")
    if validated_params["threads"] < 1:
        raise ValueError("threads は1以上である必要があります")
    validated_params["seed"] = resolve_seed(validated_params["seed"])

    return validated_params


def validate_anneal_params(params: dict) -> dict:
    """Validate and fill missing annealing parameters with defaults"""
    validated_params = DEFAULT_ANNEAL_PARAMS.copy()
    validated_params.update(params)

    if validated_params["t0"] is not None and validated_params["t0"] <= 0:
        raise ValueError("初期温度 t0 は正の値である必要があります")
    if not 0 < validated_params["alpha"] < 1:
        raise ValueError("冷却率 alpha は0-1の範囲（両端を除く）である必要があります")
    if validated_params["t_min"] <= 0:
        raise ValueError("停止温度 t_min は正の値である必要があります")
    if validated_params["max_steps"] < 0:
        raise ValueError("max_steps は0以上である必要があります")
    if not 0 <= validated_params["cutoff"] <= 1:
        raise ValueError("cutoff は0-1の範囲である必要があります")

    return validated_params


def validate_heat_params(params: dict) -> dict:
    """Validate and fill missing heat-flow parameters with defaults"""
    validated_params = DEFAULT_HEAT_PARAMS.copy()
    validated_params.update({k: v for k, v in params.items() if v is not None})

    if validated_params["method"] not in (None, "eigen", "rk4"):
        raise ValueError(f"method は eigen / rk4 のいずれかです: {validated_params['method']}")
    if validated_params["operator"] not in ("up", "full"):
        raise ValueError(f"operator は up / full のいずれかです: {validated_params['operator']}")
    if validated_params["n_steps"] < 1:
        raise ValueError("n_steps は1以上である必要があります")

    return validated_params


def validate_scaling_params(params: dict) -> dict:
    """Validate and fill missing scaling-experiment parameters with defaults"""
    validated_params = DEFAULT_SCALING_PARAMS.copy()
    validated_params.update({k: v for k, v in params.items() if v is not None})

    n_list = [int(n) for n in validated_params["n_list"]]
    if not n_list:
        raise ValueError("n_list が空です")
    if any(n < 4 or n % 2 for n in n_list):
        raise ValueError(f"n は4以上の偶数である必要があります: {n_list}")
    validated_params["n_list"] = sorted(set(n_list))
    if validated_params["horizon"] <= 0:
        raise ValueError("horizon は正の値である必要があります")
    if validated_params["n_trajectories"] < 1:
        raise ValueError("n_trajectories は1以上である必要があります")
    if validated_params["trace_points"] < 1:
        raise ValueError("trace_points は1以上である必要があります")
    unknown = [c for c in validated_params["cycles"] if c not in ("sigma1", "sigma2")]
    if unknown or not validated_params["cycles"]:
        raise ValueError(f"cycles は sigma1 / sigma2 から選びます: {validated_params['cycles']}")
    if validated_params["threads"] < 1:
        raise ValueError("threads は1以上である必要があります")
    validated_params["seed"] = resolve_seed(validated_params["seed"])

    return validated_params
