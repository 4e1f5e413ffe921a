"""
Core Package for cyclewalk

This package contains complex construction, chain algebra, Laplacians and
homology, the cycle-valued walk, heat flow, torus diagnostics and hole
localization.
"""

from .exceptions import (
    CycleWalkError,
    ComplexError,
    NoHolesError,
    InputFormatError,
    SolverError,
    ResourceLimitError,
    AbsorbedError,
    InterruptedException,
)
from .complex import (
    SimplicialComplex,
    PointCloud,
    validate_closure,
    build_rips,
    build_cech,
    build_torus_triangulation,
    build_perforated_torus,
)
from .chains import Chain, boundary, coboundary, inner, pairing, weight, kernel, is_cycle, theta
from .spectral import (
    boundary_matrix,
    up_laplacian,
    down_laplacian,
    full_laplacian,
    adjacency_form,
    spectrum,
    betti,
    betti_numbers,
    homology_generators,
    hodge_decomposition,
    harmonic_projection,
)
from .walk import WalkConfig, Trajectory, enumerate_transitions, simulate, simulate_many, replay
from .heat_flow import HeatFlow
from .forms import OneForm, builtin_form, pair
from .flat_norm import flat_norm
from .torus_lab import rescaled_generator, lambda_min_up, qv_estimator, triangle_identity_checks
from .hole_finder import AnnealSchedule, anneal, localize
from .scaling_experiment import ScalingExperiment, ScalingReport, run_scaling_experiment

__all__ = [
    'CycleWalkError',
    'ComplexError',
    'NoHolesError',
    'InputFormatError',
    'SolverError',
    'ResourceLimitError',
    'AbsorbedError',
    'InterruptedException',
    'SimplicialComplex',
    'PointCloud',
    'validate_closure',
    'build_rips',
    'build_cech',
    'build_torus_triangulation',
    'build_perforated_torus',
    'Chain',
    'boundary',
    'coboundary',
    'inner',
    'pairing',
    'weight',
    'kernel',
    'is_cycle',
    'theta',
    'boundary_matrix',
    'up_laplacian',
    'down_laplacian',
    'full_laplacian',
    'adjacency_form',
    'spectrum',
    'betti',
    'betti_numbers',
    'homology_generators',
    'hodge_decomposition',
    'harmonic_projection',
    'WalkConfig',
    'Trajectory',
    'enumerate_transitions',
    'simulate',
    'simulate_many',
    'replay',
    'HeatFlow',
    'OneForm',
    'builtin_form',
    'pair',
    'flat_norm',
    'rescaled_generator',
    'lambda_min_up',
    'qv_estimator',
    'triangle_identity_checks',
    'AnnealSchedule',
    'anneal',
    'localize',
    'ScalingExperiment',
    'ScalingReport',
    'run_scaling_experiment',
]
