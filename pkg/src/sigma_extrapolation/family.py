"""Finite families of Fourier transforms of compactly supported functions.

Every member has the form ``f(xi) = exp(-2*pi*i xi.x0) * g(s * xi)`` where ``x0`` is a
modulation (spatial translate), ``s`` an argument scale and ``g`` one of the kernels:

* ``SincPower``              -- prod_k sinc(xi_k)**p, sinc(x) = sin(pi x)/(pi x)
* ``IndicatorBoxTransform``  -- transform of the unit box [0,1]^d moved by ``shift``
* ``DiscreteInterpolant``    -- phi_hat(xi) * sum_q a(q) exp(-2*pi*i dx q.xi) with the
  box-indicator kernel phi_hat(xi) = dx**d prod_k exp(-pi*i dx xi_k) sinc(dx xi_k)

Translating adds to ``x0``; scaling the argument multiplies both ``s`` and ``x0``.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .domain import FrequencyDomain, as_points
from .errors import DimensionMismatchError, InvalidDomainError, InvalidFamilyError

logger = logging.getLogger(__name__)

TWO_PI_I = 2j * np.pi


def _vector(values, name: str) -> tuple[float, ...]:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or not np.all(np.isfinite(arr)):
        raise InvalidFamilyError(f"{name} must be a finite vector, got {values!r}")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True, eq=False)
class MemberSpec(ABC):
    """One family member; ``modulation`` fixes the dimension."""

    modulation: tuple[float, ...]
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "modulation", _vector(self.modulation, "modulation"))
        if not self.scale > 0:
            raise InvalidFamilyError(f"scale must be positive, got {self.scale}")

    @property
    def dimension(self) -> int:
        return len(self.modulation)

    @abstractmethod
    def _kernel(self, points: np.ndarray) -> np.ndarray:
        """Kernel g at the rows of ``points``; returns complex (P,)."""

    @abstractmethod
    def key(self) -> tuple:
        """Hashable identity used for duplicate detection."""

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, self.dimension)
        phase = np.exp(-TWO_PI_I * (pts @ np.asarray(self.modulation)))
        return phase * self._kernel(self.scale * pts)

    def translated(self, offset) -> MemberSpec:
        offset = np.asarray(_vector(offset, "offset"))
        if offset.shape[0] != self.dimension:
            raise DimensionMismatchError(
                f"offset has dimension {offset.shape[0]}, member has {self.dimension}"
            )
        return replace(self, modulation=tuple(np.asarray(self.modulation) + offset))

    def scaled(self, factor: float) -> MemberSpec:
        """Member evaluated at ``factor * xi``."""
        if not factor > 0:
            raise InvalidFamilyError(f"scaling factor must be positive, got {factor}")
        return replace(
            self,
            modulation=tuple(factor * np.asarray(self.modulation)),
            scale=self.scale * factor,
        )

    def _base_key(self) -> tuple:
        return (type(self).__name__, self.modulation, self.scale)


@dataclass(frozen=True, eq=False)
class SincPower(MemberSpec):
    power: int = 2

    def __post_init__(self):
        super().__post_init__()
        if self.power < 1:
            raise InvalidFamilyError(f"sinc power must be >= 1, got {self.power}")

    def _kernel(self, points):
        return np.prod(np.sinc(points) ** self.power, axis=1).astype(complex)

    def key(self):
        return self._base_key() + (self.power,)


@dataclass(frozen=True, eq=False)
class IndicatorBoxTransform(MemberSpec):
    shift: tuple[float, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        shift = self.shift if len(self.shift) else (0.0,) * self.dimension
        object.__setattr__(self, "shift", _vector(shift, "shift"))
        if len(self.shift) != self.dimension:
            raise DimensionMismatchError(
                f"shift has dimension {len(self.shift)}, member has {self.dimension}"
            )

    def _kernel(self, points):
        centre = np.asarray(self.shift) + 0.5
        phase = np.exp(-TWO_PI_I * (points @ centre))
        return phase * np.prod(np.sinc(points), axis=1)

    def key(self):
        return self._base_key() + (self.shift,)


def box_kernel(points: np.ndarray, dx: float) -> np.ndarray:
    """Transform of the indicator of [0, dx]^d."""
    d = points.shape[1]
    phase = np.exp(-1j * np.pi * dx * points.sum(axis=1))
    return dx**d * phase * np.prod(np.sinc(dx * points), axis=1)


@dataclass(frozen=True, eq=False)
class DiscreteInterpolant(MemberSpec):
    """Pixel data on {0..N-1}^d interpolated with box indicators of width dx."""

    coefficients: np.ndarray = field(default_factory=lambda: np.ones(1))
    dx: float = 1.0

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=complex)
        modulation = self.modulation if len(self.modulation) else (0.0,) * coeffs.ndim
        object.__setattr__(self, "modulation", modulation)
        super().__post_init__()
        if coeffs.ndim != self.dimension:
            raise DimensionMismatchError(
                f"coefficient grid has {coeffs.ndim} axes, member dimension is {self.dimension}"
            )
        if coeffs.size == 0 or not np.all(np.isfinite(coeffs)):
            raise InvalidFamilyError("coefficient grid must be nonempty and finite")
        if not self.dx > 0:
            raise InvalidFamilyError(f"dx must be positive, got {self.dx}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_image(cls, image: np.ndarray, dx: float | None = None) -> DiscreteInterpolant:
        image = np.asarray(image)
        return cls(
            modulation=(0.0,) * image.ndim,
            coefficients=image,
            dx=dx if dx is not None else 1.0 / image.shape[0],
        )

    def _exponentials(self, points: np.ndarray, axis: int) -> np.ndarray:
        q = np.arange(self.coefficients.shape[axis])
        return np.exp(-TWO_PI_I * self.dx * np.outer(points[:, axis], q))

    def _sum(self, points: np.ndarray, stack: np.ndarray) -> np.ndarray:
        """Trigonometric sums for a stack of coefficient grids; returns (P, K)."""
        # contract axis 0 with BLAS, remaining axes pointwise
        out = np.tensordot(self._exponentials(points, 0), stack, axes=(1, 1))
        for axis in range(1, self.dimension):
            out = np.einsum("pkj...,pj->pk...", out, self._exponentials(points, axis))
        return out

    def _kernel(self, points):
        stack = self.coefficients[np.newaxis]
        return box_kernel(points, self.dx) * self._sum(points, stack)[:, 0]

    def key(self):
        return self._base_key() + (
            self.dx,
            self.coefficients.shape,
            self.coefficients.tobytes(),
        )


@dataclass(frozen=True)
class FunctionFamily:
    """Ordered, duplicate-free collection of members sharing one dimension."""

    members: tuple[MemberSpec, ...]

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise InvalidFamilyError("a function family needs at least one member")
        dims = {m.dimension for m in members}
        if len(dims) != 1:
            raise InvalidFamilyError(f"members disagree on dimension: {sorted(dims)}")
        keys = [m.key() for m in members]
        if len(set(keys)) != len(keys):
            raise InvalidFamilyError("family members must be pairwise distinct")

    @property
    def n(self) -> int:
        return len(self.members)

    @property
    def dimension(self) -> int:
        return self.members[0].dimension

    def evaluate(self, points) -> np.ndarray:
        """Member values at the rows of ``points``; complex (P, n)."""
        pts = as_points(points, self.dimension)
        out = np.empty((pts.shape[0], self.n), dtype=complex)
        batched = self._interpolant_batch()
        if batched is not None:
            spec, stack = batched
            out[:] = box_kernel(pts, spec.dx)[:, None] * spec._sum(pts, stack)
            return out
        for k, member in enumerate(self.members):
            out[:, k] = member.evaluate(pts)
        return out

    def _interpolant_batch(self):
        """Stacked coefficients when every member is an unmodulated interpolant on one grid."""
        first = self.members[0]
        if not isinstance(first, DiscreteInterpolant):
            return None
        for m in self.members:
            if (
                not isinstance(m, DiscreteInterpolant)
                or m.dx != first.dx
                or m.scale != 1.0
                or any(m.modulation)
                or m.coefficients.shape != first.coefficients.shape
            ):
                return None
        return first, np.stack([m.coefficients for m in self.members])


# -- Module-level operations ------------------------------------------------


def eval_family(family: FunctionFamily, xi) -> np.ndarray:
    """Vector (f_1(xi), ..., f_n(xi))."""
    xi = np.asarray(xi, dtype=float).reshape(1, -1)
    return family.evaluate(xi)[0]


def eval_family_dilated(family: FunctionFamily, alpha: float, xi) -> np.ndarray:
    """Vector f(alpha * xi)."""
    if not alpha > 1:
        raise InvalidDomainError(f"dilation factor must exceed 1, got {alpha}")
    return eval_family(family, alpha * np.asarray(xi, dtype=float))


def make_translates(base: MemberSpec, offsets: Sequence = ()) -> FunctionFamily:
    """Family {base, exp(-2 pi i xi.x_1) base(xi), ...}: base first, then one member per offset."""
    return FunctionFamily((base,) + tuple(base.translated(x) for x in offsets))


def make_scalings(base: MemberSpec, alpha: float, count: int) -> FunctionFamily:
    """Family {base(alpha**-k xi) : k = 0..count-1}."""
    if not alpha > 1:
        raise InvalidDomainError(f"scaling factor must exceed 1, got {alpha}")
    if count < 1:
        raise InvalidFamilyError(f"count must be >= 1, got {count}")
    return FunctionFamily(tuple(base.scaled(alpha ** (-k)) for k in range(count)))


def make_integer_translates(
    base: MemberSpec, support: Sequence[int], phase_scale: float = -1.0
) -> FunctionFamily:
    """Family {exp(2 pi i phase_scale * xi k) base(xi) : k in support} (d = 1).

    ``phase_scale=-1`` gives ordinary translates by k, ``+1`` reversed phases and
    ``-2`` translates by 2k.
    """
    if base.dimension != 1:
        raise DimensionMismatchError("integer translates are defined for d = 1")
    return FunctionFamily(tuple(base.translated([-phase_scale * k]) for k in support))


def tensor_grid(domain: FrequencyDomain, resolution: int) -> np.ndarray:
    """Endpoint-inclusive grid over the bounding box, restricted to the domain."""
    lo, hi = domain.bounding_box()
    axes = [np.linspace(a, b, resolution) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    return points[domain.contains_many(points)]


def min_abs_sq_on_domain(
    family: FunctionFamily, domain: FrequencyDomain, grid_resolution: int
) -> float:
    """Smallest ||f(xi)||^2 over a grid in the domain; 0 flags a common zero."""
    if grid_resolution < 2:
        raise InvalidDomainError(f"grid_resolution must be >= 2, got {grid_resolution}")
    points = tensor_grid(domain, grid_resolution)
    if points.shape[0] == 0:
        raise InvalidDomainError("probe grid has no points inside the domain")
    power = np.sum(np.abs(family.evaluate(points)) ** 2, axis=1)
    smallest = float(power.min())
    if smallest < 1e-12 * float(power.max()):
        logger.warning(
            "Family nearly vanishes at %s (||f||^2 = %.3e)",
            points[int(power.argmin())],
            smallest,
        )
    return smallest
