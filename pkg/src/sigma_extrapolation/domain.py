"""Frequency domains: the low-frequency set and its dilations.

Shapes are closed sets symmetric under xi -> -xi. Membership is vectorized over
point arrays of shape ``(P, d)``; the scalar helpers wrap it for single points.

Example::

    omega0 = Annulus(dimension=2, r_min=0.5, r_max=2.0)
    omega0.contains([1.0, 0.0])          # True
    dilate(omega0, 4.0)                   # Annulus(r_min=2.0, r_max=8.0)
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.special import gamma

from .errors import DimensionMismatchError, InvalidDomainError


class Shape(str, Enum):
    """Tag used in experiment files (``shape = "annulus"``)."""

    CUBE = "cube"
    BALL = "ball"
    ANNULUS = "annulus"
    SECTOR_PAIR = "sector_pair"


def as_points(points, dimension: int) -> np.ndarray:
    """Coerce ``points`` to a float array of shape (P, dimension)."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if dimension > 1 or arr.size == 1 else arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] != dimension:
        raise DimensionMismatchError(
            f"expected points of dimension {dimension}, got array of shape {np.shape(points)}"
        )
    return arr


class FrequencyDomain(ABC):
    """Compact frequency set with membership, dilation and bounding box."""

    dimension: int
    shape: Shape

    def _validate_dimension(self) -> None:
        if self.dimension < 1:
            raise InvalidDomainError(f"dimension must be positive, got {self.dimension}")

    @abstractmethod
    def contains_many(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask over the rows of a (P, d) array."""

    @abstractmethod
    def scaled(self, alpha: float) -> FrequencyDomain:
        """The set {alpha * xi : xi in self}."""

    @abstractmethod
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned box (lo, hi) containing the domain."""

    @abstractmethod
    def measure(self) -> float:
        """Lebesgue measure of the domain."""

    def contains(self, xi) -> bool:
        xi = np.asarray(xi, dtype=float).reshape(-1)
        if xi.shape[0] != self.dimension:
            raise DimensionMismatchError(
                f"point has dimension {xi.shape[0]}, domain has {self.dimension}"
            )
        return bool(self.contains_many(xi.reshape(1, -1))[0])

    def box_volume(self) -> float:
        lo, hi = self.bounding_box()
        return float(np.prod(hi - lo))


@dataclass(frozen=True)
class Cube(FrequencyDomain):
    dimension: int
    half_width: float

    shape = Shape.CUBE

    def __post_init__(self):
        self._validate_dimension()
        if not self.half_width > 0:
            raise InvalidDomainError(f"half_width must be positive, got {self.half_width}")

    def contains_many(self, points):
        pts = as_points(points, self.dimension)
        return np.all(np.abs(pts) <= self.half_width, axis=1)

    def scaled(self, alpha):
        return replace(self, half_width=self.half_width * alpha)

    def bounding_box(self):
        hw = np.full(self.dimension, self.half_width)
        return -hw, hw

    def measure(self):
        return (2.0 * self.half_width) ** self.dimension


def _unit_ball_volume(dimension: int) -> float:
    return math.pi ** (dimension / 2) / float(gamma(dimension / 2 + 1))


@dataclass(frozen=True)
class Ball(FrequencyDomain):
    dimension: int
    radius: float

    shape = Shape.BALL

    def __post_init__(self):
        self._validate_dimension()
        if not self.radius > 0:
            raise InvalidDomainError(f"radius must be positive, got {self.radius}")

    def contains_many(self, points):
        pts = as_points(points, self.dimension)
        return np.linalg.norm(pts, axis=1) <= self.radius

    def scaled(self, alpha):
        return replace(self, radius=self.radius * alpha)

    def bounding_box(self):
        r = np.full(self.dimension, self.radius)
        return -r, r

    def measure(self):
        return _unit_ball_volume(self.dimension) * self.radius**self.dimension


@dataclass(frozen=True)
class Annulus(FrequencyDomain):
    dimension: int
    r_min: float
    r_max: float

    shape = Shape.ANNULUS

    def __post_init__(self):
        self._validate_dimension()
        if not 0 <= self.r_min < self.r_max:
            raise InvalidDomainError(
                f"annulus needs 0 <= r_min < r_max, got ({self.r_min}, {self.r_max})"
            )

    def contains_many(self, points):
        radii = np.linalg.norm(as_points(points, self.dimension), axis=1)
        return (radii >= self.r_min) & (radii <= self.r_max)

    def scaled(self, alpha):
        return replace(self, r_min=self.r_min * alpha, r_max=self.r_max * alpha)

    def bounding_box(self):
        r = np.full(self.dimension, self.r_max)
        return -r, r

    def measure(self):
        unit = _unit_ball_volume(self.dimension)
        return unit * (self.r_max**self.dimension - self.r_min**self.dimension)


@dataclass(frozen=True)
class SectorPair(FrequencyDomain):
    """Double cone around ``axis`` (and its mirror) cut to a radial shell."""

    dimension: int
    axis: tuple[float, ...]
    cos_half_angle: float
    r_min: float
    r_max: float

    shape = Shape.SECTOR_PAIR

    def __post_init__(self):
        self._validate_dimension()
        axis = np.asarray(self.axis, dtype=float)
        if axis.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"axis has {axis.size} entries, domain dimension is {self.dimension}"
            )
        norm = np.linalg.norm(axis)
        if norm == 0:
            raise InvalidDomainError("sector axis must be nonzero")
        object.__setattr__(self, "axis", tuple(float(a) for a in axis / norm))
        if not 0 < self.cos_half_angle < 1:
            raise InvalidDomainError(
                f"cos_half_angle must lie in (0, 1), got {self.cos_half_angle}"
            )
        if not 0 <= self.r_min < self.r_max:
            raise InvalidDomainError(
                f"sector pair needs 0 <= r_min < r_max, got ({self.r_min}, {self.r_max})"
            )

    def contains_many(self, points):
        pts = as_points(points, self.dimension)
        radii = np.linalg.norm(pts, axis=1)
        along = np.abs(pts @ np.asarray(self.axis))
        return (radii >= self.r_min) & (radii <= self.r_max) & (along >= self.cos_half_angle * radii)

    def scaled(self, alpha):
        return replace(self, r_min=self.r_min * alpha, r_max=self.r_max * alpha)

    def bounding_box(self):
        r = np.full(self.dimension, self.r_max)
        return -r, r

    def measure(self):
        if self.dimension != 2:
            raise InvalidDomainError("analytic sector measure is only available for d = 2")
        half_angle = math.acos(self.cos_half_angle)
        return 2.0 * half_angle * (self.r_max**2 - self.r_min**2)


# -- Module-level operations ------------------------------------------------


def contains(domain: FrequencyDomain, xi) -> bool:
    return domain.contains(xi)


def contains_many(domain: FrequencyDomain, points) -> np.ndarray:
    return domain.contains_many(points)


def dilate(domain: FrequencyDomain, alpha: float) -> FrequencyDomain:
    """Return alpha * domain; alpha must exceed 1."""
    if not alpha > 1:
        raise InvalidDomainError(f"dilation factor must exceed 1, got {alpha}")
    return domain.scaled(alpha)


def bounding_box(domain: FrequencyDomain) -> tuple[np.ndarray, np.ndarray]:
    return domain.bounding_box()


def measure(domain: FrequencyDomain) -> float:
    return domain.measure()
