"""Dense Hermitian matrices: the value type behind Sigma and G(m)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    EigenDecompositionError,
    NonFiniteValueError,
    NotHermitianError,
)

SYMMETRY_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Complex n x n matrix, symmetrized as (A + A*)/2 on construction."""

    data: np.ndarray

    def __post_init__(self):
        a = np.array(self.data, dtype=complex, ndmin=2)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise NonFiniteValueError("matrix has non-finite entries")
        asymmetry = float(np.max(np.abs(a - a.conj().T)))
        scale = float(np.linalg.norm(a))
        if asymmetry > SYMMETRY_TOLERANCE * scale:
            raise NotHermitianError(
                f"asymmetry {asymmetry:.3e} exceeds {SYMMETRY_TOLERANCE} x ||A||_F = {scale:.3e}"
            )
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @classmethod
    def symmetrized(cls, a) -> HermitianMatrix:
        """Hermitian part (A + A*)/2 of an assembled matrix, without the asymmetry check."""
        a = np.asarray(a, dtype=complex)
        return cls(0.5 * (a + a.conj().T))

    @classmethod
    def identity(cls, n: int) -> HermitianMatrix:
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def zeros(cls, n: int) -> HermitianMatrix:
        return cls(np.zeros((n, n), dtype=complex))

    @classmethod
    def diagonal(cls, values) -> HermitianMatrix:
        return cls(np.diag(np.asarray(values, dtype=float)).astype(complex))

    @classmethod
    def outer(cls, v) -> HermitianMatrix:
        v = np.asarray(v, dtype=complex).reshape(-1)
        return cls(np.outer(v, v.conj()))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.data))

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    def eigenvalues(self) -> np.ndarray:
        """Real eigenvalues in descending order."""
        return eigendecompose(self).values

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[-1])

    def combine(self, a: float, other: HermitianMatrix, b: float) -> HermitianMatrix:
        """a * self + b * other."""
        _check_same_size(self, other)
        return HermitianMatrix(a * self.data + b * other.data)

    def __sub__(self, other: HermitianMatrix) -> HermitianMatrix:
        return self.combine(1.0, other, -1.0)

    def __add__(self, other: HermitianMatrix) -> HermitianMatrix:
        return self.combine(1.0, other, 1.0)

    def __mul__(self, c: float) -> HermitianMatrix:
        return HermitianMatrix(float(c) * self.data)

    __rmul__ = __mul__

    def quadratic_form(self, c) -> float:
        c = np.asarray(c, dtype=complex).reshape(-1)
        if c.shape[0] != self.n:
            raise DimensionMismatchError(f"vector has length {c.shape[0]}, matrix is {self.n}x{self.n}")
        return float(np.real(c.conj() @ self.data @ c))


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    vectors: np.ndarray
    values: np.ndarray

    def reconstruct(self, values: np.ndarray | None = None) -> HermitianMatrix:
        lam = self.values if values is None else np.asarray(values, dtype=float)
        u = self.vectors
        return HermitianMatrix.symmetrized((u * lam) @ u.conj().T)


def _check_same_size(a: HermitianMatrix, b: HermitianMatrix) -> None:
    if a.n != b.n:
        raise DimensionMismatchError(f"matrix sizes differ: {a.n} vs {b.n}")


def eigendecompose(a: HermitianMatrix) -> EigenDecomposition:
    """Eigenpairs with eigenvalues sorted descending."""
    try:
        values, vectors = scipy.linalg.eigh(a.data)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise EigenDecompositionError(f"Hermitian eigensolver failed: {exc}") from exc
    order = np.argsort(values, kind="stable")[::-1]
    return EigenDecomposition(vectors=vectors[:, order], values=values[order])


def frobenius_inner(a: HermitianMatrix, b: HermitianMatrix) -> float:
    """Re trace(A* B)."""
    _check_same_size(a, b)
    return float(np.real(np.vdot(a.data, b.data)))
