"""Worst-case optimal Fourier multipliers for extrapolating in frequency.

Numerical library only; the experiment driver lives in ``config``, ``pipeline``
and ``cli`` and is imported explicitly.
"""

from .domain import Annulus, Ball, Cube, FrequencyDomain, SectorPair, contains, dilate, measure
from .errors import ExtrapolationError
from .extrapolation import (
    GridField,
    extrapolate_field,
    extrapolate_sectors,
    gp_iterate,
    optimal_filter,
    reconstruct_space,
    sample_field,
)
from .family import (
    DiscreteInterpolant,
    FunctionFamily,
    IndicatorBoxTransform,
    SincPower,
    eval_family,
    eval_family_dilated,
    make_integer_translates,
    make_scalings,
    make_translates,
)
from .gram import gram_matrix, worst_case_objective
from .hermitian import HermitianMatrix, eigendecompose
from .multiplier import SigmaMultiplier, eval_multiplier, trace_multiplier
from .multiresolution import (
    apply_boundary_window,
    cascade,
    periodization_Phi,
    periodize_mask,
    rescale_mask,
    wavelet_hat,
    wavelet_mask,
)
from .quadrature import NodeSchedule, monte_carlo_rule, tensor_rule
from .solver import SolverConfig, solve, validate_params
from .spectral import SpectralSet, project_spectral

__all__ = [
    "Annulus",
    "Ball",
    "Cube",
    "DiscreteInterpolant",
    "ExtrapolationError",
    "FrequencyDomain",
    "FunctionFamily",
    "GridField",
    "HermitianMatrix",
    "IndicatorBoxTransform",
    "NodeSchedule",
    "SectorPair",
    "SigmaMultiplier",
    "SincPower",
    "SolverConfig",
    "SpectralSet",
    "apply_boundary_window",
    "cascade",
    "contains",
    "dilate",
    "eigendecompose",
    "eval_family",
    "eval_family_dilated",
    "eval_multiplier",
    "extrapolate_field",
    "extrapolate_sectors",
    "gp_iterate",
    "gram_matrix",
    "make_integer_translates",
    "make_scalings",
    "make_translates",
    "measure",
    "monte_carlo_rule",
    "optimal_filter",
    "periodization_Phi",
    "periodize_mask",
    "project_spectral",
    "reconstruct_space",
    "rescale_mask",
    "sample_field",
    "solve",
    "tensor_rule",
    "trace_multiplier",
    "validate_params",
    "wavelet_hat",
    "wavelet_mask",
]
