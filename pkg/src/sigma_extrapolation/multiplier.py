"""Sigma-multipliers.

For a positive semidefinite Sigma and shift delta >= 0, with v = f(xi), w = f(alpha xi)
and M = delta I + Sigma::

    m(xi) = (v* M w) / (v* M v)      if v* M v > floor
    m(xi) = 0                        otherwise (a floor event)

Sigma = I gives the trace multiplier; a single member gives m_f = f(alpha .)/f.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .domain import FrequencyDomain, as_points
from .errors import DimensionMismatchError, InvalidDomainError, NotHermitianError
from .family import FunctionFamily, tensor_grid
from .hermitian import HermitianMatrix

logger = logging.getLogger(__name__)

RELATIVE_FLOOR = 1e-14
# floor used when none is set; catches roundoff zeros
ABSOLUTE_FLOOR = 1e-30
FLOOR_GRID_RESOLUTION = 65
PSD_TOLERANCE = 1e-10


@dataclass(frozen=True)
class MultiplierSample:
    values: np.ndarray
    floor_events: int


def sigma_quotient(
    samples: np.ndarray,
    dilated: np.ndarray,
    weight: np.ndarray,
    floor: float | None,
) -> MultiplierSample:
    """Quotient (v* M w)/(v* M v) row by row for precomputed family samples (P, n).

    Rows with v* M v <= floor are set to 0. ``floor=None`` uses ``ABSOLUTE_FLOOR``; a row
    never depends on the other rows of the batch.
    """
    numerator = np.einsum("pi,ij,pj->p", samples.conj(), weight, dilated)
    denominator = np.real(np.einsum("pi,ij,pj->p", samples.conj(), weight, samples))
    if floor is None:
        floor = ABSOLUTE_FLOOR
    keep = denominator > floor
    values = np.zeros(samples.shape[0], dtype=complex)
    values[keep] = numerator[keep] / denominator[keep]
    events = int(np.count_nonzero(~keep))
    if events:
        logger.debug("%d of %d denominators floored at %.3e", events, keep.size, floor)
    return MultiplierSample(values, events)


def grid_floor(samples: np.ndarray, weight: np.ndarray) -> float:
    """1e-14 times the largest v* M v over precomputed samples (P, n)."""
    power = np.real(np.einsum("pi,ij,pj->p", samples.conj(), weight, samples))
    return RELATIVE_FLOOR * float(power.max()) if power.size else 0.0


@dataclass(frozen=True)
class SigmaMultiplier:
    family: FunctionFamily
    alpha: float
    sigma: HermitianMatrix
    delta: float = 0.0
    denominator_floor: float | None = None

    def __post_init__(self):
        if not self.alpha > 1:
            raise InvalidDomainError(f"alpha must exceed 1, got {self.alpha}")
        if self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if self.sigma.n != self.family.n:
            raise DimensionMismatchError(
                f"Sigma is {self.sigma.n}x{self.sigma.n} but the family has {self.family.n} members"
            )
        lam_min = self.sigma.min_eigenvalue()
        if lam_min < -PSD_TOLERANCE * max(self.sigma.frobenius_norm, 1.0):
            raise NotHermitianError(f"Sigma is not positive semidefinite (lambda_min={lam_min:.3e})")

    @property
    def weight(self) -> np.ndarray:
        """M = delta I + Sigma."""
        return self.delta * np.eye(self.family.n) + self.sigma.data

    def with_probe_floor(
        self, domain: FrequencyDomain, resolution: int = FLOOR_GRID_RESOLUTION
    ) -> SigmaMultiplier:
        """Copy whose floor is 1e-14 times the largest v* M v on a tensor grid of ``domain``."""
        samples = self.family.evaluate(tensor_grid(domain, resolution))
        return replace(self, denominator_floor=grid_floor(samples, self.weight))

    def evaluate_with_floor_count(self, points) -> MultiplierSample:
        pts = as_points(points, self.family.dimension)
        if pts.shape[0] == 0:
            return MultiplierSample(np.zeros(0, dtype=complex), 0)
        samples = self.family.evaluate(pts)
        dilated = self.family.evaluate(self.alpha * pts)
        return sigma_quotient(samples, dilated, self.weight, self.denominator_floor)

    def __call__(self, points) -> np.ndarray:
        return self.evaluate_with_floor_count(points).values


# -- Module-level operations ------------------------------------------------


def eval_multiplier(mult: SigmaMultiplier, xi) -> complex:
    xi = np.asarray(xi, dtype=float).reshape(1, -1)
    return complex(mult(xi)[0])


def eval_on_nodes(mult: SigmaMultiplier, nodes) -> np.ndarray:
    """Multiplier values at each node, order preserved."""
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size == 0:
        return np.zeros(0, dtype=complex)
    return mult(nodes.reshape(-1, mult.family.dimension))


def trace_multiplier(family: FunctionFamily, alpha: float, xi) -> np.ndarray | complex:
    """Sigma = I, delta = 0; scalar for a single point, array for a (P, d) node set."""
    mult = SigmaMultiplier(family, alpha, HermitianMatrix.identity(family.n))
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 2 or (family.dimension == 1 and xi.ndim == 1 and xi.size > 1):
        return mult(xi.reshape(-1, family.dimension))
    return eval_multiplier(mult, xi)


def average_case_multiplier(
    family: FunctionFamily, alpha: float, covariance: HermitianMatrix, delta: float = 0.0
) -> SigmaMultiplier:
    """Optimal multiplier on average over centered coordinates with this covariance."""
    return SigmaMultiplier(family, alpha, covariance, delta)


def single_function_multiplier(family: FunctionFamily, alpha: float, index: int = 0) -> SigmaMultiplier:
    """m_f = f(alpha xi) / f(xi) for one member, with the same flooring rule."""
    e = np.zeros(family.n)
    e[index] = 1.0
    return SigmaMultiplier(family, alpha, HermitianMatrix.outer(e))
