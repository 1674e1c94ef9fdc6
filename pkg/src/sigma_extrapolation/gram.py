"""Coordinate Gram matrix G(m) and the objectives built on it.

G(m) = 1/2 sum_i w_i r(xi_i) r(xi_i)*  with  r(xi) = f(alpha xi) - m(xi) f(xi),
so that the approximation error of a member with coordinates c is c* G c.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError, NonFiniteValueError
from .family import FunctionFamily
from .hermitian import HermitianMatrix, frobenius_inner
from .multiplier import SigmaMultiplier
from .quadrature import QuadratureRule
from .spectral import SpectralSet, support_function

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GramResult:
    G: HermitianMatrix
    rule_id: str
    floor_events: int = 0


def gram_from_samples(
    samples: np.ndarray,
    dilated: np.ndarray,
    multiplier_values: np.ndarray,
    weights: np.ndarray,
    nodes: np.ndarray | None = None,
) -> HermitianMatrix:
    """Assemble G from family samples f(xi), f(alpha xi) of shape (P, n)."""
    residual = dilated - multiplier_values[:, None] * samples
    finite = np.all(np.isfinite(residual), axis=1)
    if not np.all(finite):
        bad = int(np.flatnonzero(~finite)[0])
        node = None if nodes is None else nodes[bad].tolist()
        raise NonFiniteValueError("residual f(alpha xi) - m(xi) f(xi) is not finite", node=node)
    accumulated = 0.5 * (residual.T * weights) @ residual.conj()
    return HermitianMatrix.symmetrized(accumulated)


def gram_matrix(
    family: FunctionFamily,
    alpha: float,
    m: SigmaMultiplier | Callable[[np.ndarray], np.ndarray],
    rule: QuadratureRule,
) -> GramResult:
    """G(m) on the nodes of ``rule``; ``m`` is any vectorized pointwise multiplier."""
    samples = family.evaluate(rule.nodes)
    dilated = family.evaluate(alpha * rule.nodes)
    floor_events = 0
    if isinstance(m, SigmaMultiplier):
        sample = m.evaluate_with_floor_count(rule.nodes)
        values, floor_events = sample.values, sample.floor_events
    else:
        values = np.asarray(m(rule.nodes), dtype=complex).reshape(-1)
    g = gram_from_samples(samples, dilated, values, rule.weights, rule.nodes)
    return GramResult(g, rule.rule_id, floor_events)


def approximation_error(c, g: HermitianMatrix) -> float:
    """c* G c, clipped at 0 for rounding-level negatives."""
    c = np.asarray(c, dtype=complex).reshape(-1)
    if c.shape[0] != g.n:
        raise DimensionMismatchError(f"coordinates have length {c.shape[0]}, G is {g.n}x{g.n}")
    value = g.quadratic_form(c)
    if value < 0:
        if value < -1e-10:
            logger.warning("Approximation error %.3e is negative beyond rounding", value)
        return 0.0
    return value


def worst_case_objective(w: SpectralSet, g: HermitianMatrix, delta: float) -> float:
    """sigma_W(G) + delta * trace(G)."""
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    return support_function(w, g) + delta * g.trace


def average_case_objective(covariance: HermitianMatrix, g: HermitianMatrix) -> float:
    """<C, G>_F, the expected error for coordinates with covariance C."""
    return frobenius_inner(covariance, g)


def gram_rank(
    family: FunctionFamily, alpha: float, rule: QuadratureRule, rtol: float = 1e-10
) -> int:
    """Numerical rank of G(0); equals n for a linearly independent family."""
    g = gram_matrix(family, alpha, lambda nodes: np.zeros(nodes.shape[0]), rule).G
    values = np.abs(g.eigenvalues())
    if values.max() == 0:
        return 0
    rank = int(np.count_nonzero(values > rtol * values.max()))
    if rank < family.n:
        logger.warning("Gram rank %d < n = %d: family looks linearly dependent", rank, family.n)
    return rank
