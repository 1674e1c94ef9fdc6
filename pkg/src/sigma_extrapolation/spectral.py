"""Spectral sets W and projections onto them.

A unitarily invariant set W is described by the set D_W of admissible eigenvalue
vectors. Projecting a Hermitian matrix diagonalizes it, projects the eigenvalues
onto D_W and reassembles with the same eigenvectors. For the orthosymmetric kinds
(nuclear and operator balls) the eigenvalue projection keeps signs, so positive
semidefinite input stays positive semidefinite.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, ExtrapolationError
from .hermitian import HermitianMatrix, eigendecompose


class SetKind(str, Enum):
    NUCLEAR_BALL = "nuclear_ball"
    OPERATOR_BALL = "operator_ball"
    TRACE_CAP = "trace_cap"


@dataclass(frozen=True)
class SpectralSet:
    """W = {X Hermitian : eigenvalues(X) in D_W}; ``radius`` is r or the cap Delta."""

    kind: SetKind
    radius: float
    n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SetKind(self.kind))
        if not self.radius > 0:
            raise ExtrapolationError(f"{self.kind.value} radius must be positive, got {self.radius}")

    @classmethod
    def nuclear_ball(cls, radius: float, n: int | None = None) -> SpectralSet:
        return cls(SetKind.NUCLEAR_BALL, radius, n)

    @classmethod
    def operator_ball(cls, radius: float, n: int | None = None) -> SpectralSet:
        return cls(SetKind.OPERATOR_BALL, radius, n)

    @classmethod
    def trace_cap(cls, cap: float, n: int | None = None) -> SpectralSet:
        return cls(SetKind.TRACE_CAP, cap, n)

    def check_size(self, n: int) -> None:
        if self.n is not None and self.n != n:
            raise DimensionMismatchError(f"spectral set is for n={self.n}, matrix has n={n}")


def _simplex_threshold(a: np.ndarray, total: float) -> float:
    """theta with sum(max(a - theta, 0)) = total, for a >= 0 with sum(a) > total."""
    u = np.sort(a)[::-1]
    cumulative = np.cumsum(u) - total
    index = np.arange(1, u.size + 1)
    rho = np.flatnonzero(u - cumulative / index > 0)[-1]
    return float(cumulative[rho] / (rho + 1))


def project_l1_ball(v, r: float) -> np.ndarray:
    """Euclidean projection onto {d : sum |d_i| <= r} by sorted soft thresholding."""
    v = np.asarray(v, dtype=float)
    if not r > 0:
        raise ExtrapolationError(f"radius must be positive, got {r}")
    magnitude = np.abs(v)
    if magnitude.sum() <= r:
        return v.copy()
    theta = _simplex_threshold(magnitude, r)
    return np.sign(v) * np.maximum(magnitude - theta, 0.0)


def project_box(v, r: float) -> np.ndarray:
    """Clip every coordinate to [-r, r]."""
    if not r > 0:
        raise ExtrapolationError(f"radius must be positive, got {r}")
    return np.clip(np.asarray(v, dtype=float), -r, r)


def project_capped_simplex(v, cap: float) -> np.ndarray:
    """Projection onto {d : d >= 0, sum d <= cap}."""
    if not cap > 0:
        raise ExtrapolationError(f"cap must be positive, got {cap}")
    clipped = np.maximum(np.asarray(v, dtype=float), 0.0)
    if clipped.sum() <= cap:
        return clipped
    theta = _simplex_threshold(clipped, cap)
    return np.maximum(clipped - theta, 0.0)


def project_eigenvalues(w: SpectralSet, values: np.ndarray) -> np.ndarray:
    if w.kind is SetKind.NUCLEAR_BALL:
        return project_l1_ball(values, w.radius)
    if w.kind is SetKind.OPERATOR_BALL:
        return project_box(values, w.radius)
    return project_capped_simplex(values, w.radius)


def project_spectral(w: SpectralSet, x: HermitianMatrix) -> HermitianMatrix:
    """proj_W(X) = U diag(proj_{D_W}(lambda)) U*."""
    w.check_size(x.n)
    decomposition = eigendecompose(x)
    return decomposition.reconstruct(project_eigenvalues(w, decomposition.values))


def support_function(w: SpectralSet, g: HermitianMatrix) -> float:
    """sigma_W(G) = sup over X in W of <X, G>_F, from the eigenvalues of G."""
    w.check_size(g.n)
    values = g.eigenvalues()
    if w.kind is SetKind.NUCLEAR_BALL:
        return w.radius * float(np.max(np.abs(values)))
    if w.kind is SetKind.OPERATOR_BALL:
        return w.radius * float(np.sum(np.abs(values)))
    return w.radius * max(0.0, float(values[0]))


def max_trace(w: SpectralSet, n: int) -> float:
    """sup {trace X : X in W} for n x n matrices."""
    if w.kind is SetKind.OPERATOR_BALL:
        return n * w.radius
    return w.radius


def in_set(w: SpectralSet, x: HermitianMatrix, tol: float = 1e-10) -> bool:
    values = x.eigenvalues()
    if w.kind is SetKind.NUCLEAR_BALL:
        return float(np.sum(np.abs(values))) <= w.radius * (1 + tol) + tol
    if w.kind is SetKind.OPERATOR_BALL:
        return float(np.max(np.abs(values))) <= w.radius * (1 + tol) + tol
    return values[-1] >= -tol and float(values.sum()) <= w.radius * (1 + tol) + tol
