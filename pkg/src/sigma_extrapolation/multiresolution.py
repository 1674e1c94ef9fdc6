"""Refinable functions and wavelets from multipliers.

A 1-periodic mask m_1 defines the scaling function through the cascade product
phi_hat(xi) = prod_{j>=1} m_1(xi / 2^j), truncated after J factors. From phi_hat we
build its periodization Phi(xi) = sum_k |phi_hat(xi + k)|^2, the wavelet mask
g(xi) = conj(m(xi + 1/2)) Phi(xi + 1/2) exp(-2 pi i xi) and the wavelet
psi_hat(xi) = g(xi/2) phi_hat(xi/2).

Multipliers are usually made into masks by a boundary window
w_N(xi) = prod_k ((1 + exp(2 pi i xi_k)) / 2)^N, which forces zeros at half-integer
frequencies, optionally followed by a rescaling 2^p so that the mask is 1 at 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domain import as_points
from .errors import CascadeError, CoverageError, DimensionMismatchError
from .extrapolation import GridField, interpolate_on_grid

logger = logging.getLogger(__name__)

PointwiseMap = Callable[[np.ndarray], np.ndarray]

DEFAULT_PRODUCTS = 128
DEFAULT_TERMS = 257
DEFAULT_WINDOW = 8.0
DEFAULT_GRID_POINTS = 2**13


def wrap(points: np.ndarray) -> np.ndarray:
    """Representative of each coordinate in [-1/2, 1/2)."""
    shifted = points + 0.5
    return shifted - np.floor(shifted) - 0.5


def sample_grid(resolution: int, dimension: int = 1) -> np.ndarray:
    """Uniform nodes -1/2 + i/resolution of [-1/2, 1/2)^d, row-major (P, d)."""
    axis = -0.5 + np.arange(resolution) / resolution
    mesh = np.meshgrid(*([axis] * dimension), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True, eq=False)
class PeriodicMask:
    """1-periodic map given by samples on [-1/2, 1/2)^d and optionally an exact callable."""

    samples: np.ndarray
    exact: PointwiseMap | None = None

    @property
    def dimension(self) -> int:
        return self.samples.ndim

    @property
    def resolution(self) -> int:
        return self.samples.shape[0]

    def __call__(self, points) -> np.ndarray:
        pts = wrap(as_points(points, self.dimension))
        if self.exact is not None:
            return np.asarray(self.exact(pts), dtype=complex).reshape(-1)
        index = ((pts + 0.5) * self.resolution).T
        return interpolate_on_grid(self.samples, index, mode="grid-wrap")


def periodize_mask(m: PointwiseMap, resolution: int, dimension: int = 1, exact: bool = True) -> PeriodicMask:
    """Periodic extension eval(xi) = m(frac(xi + 1/2) - 1/2)."""
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    nodes = sample_grid(resolution, dimension)
    samples = np.asarray(m(nodes), dtype=complex).reshape((resolution,) * dimension)
    return PeriodicMask(samples, m if exact else None)


def apply_boundary_window(m: PointwiseMap, n: int) -> PointwiseMap:
    """xi -> w_N(xi) m(xi)."""
    if n < 0:
        raise ValueError(f"window order must be >= 0, got {n}")

    def windowed(points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        values = np.asarray(m(pts), dtype=complex).reshape(-1)
        if n == 0:
            return values
        pts = pts.reshape(values.shape[0], -1)
        window = np.prod(((1.0 + np.exp(2j * np.pi * pts)) / 2.0) ** n, axis=1)
        return window * values

    return windowed


def rescale_mask(m: PointwiseMap, p: int) -> PointwiseMap:
    """xi -> 2^p m(xi)."""
    factor = 2.0**p

    def rescaled(points: np.ndarray) -> np.ndarray:
        return factor * np.asarray(m(points), dtype=complex)

    return rescaled


@dataclass(frozen=True, eq=False)
class CascadeResult:
    grid: GridField
    mask: PeriodicMask
    products: int
    zero_set_hits: int
    increments: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def increment(self) -> float:
        """sup |phi_J - phi_{J-1}| over the grid window."""
        return float(self.increments[-1]) if self.increments.size else 0.0

    def evaluate(self, points) -> np.ndarray:
        """Partial product with ``products`` factors at arbitrary frequencies."""
        pts = as_points(points, self.mask.dimension)
        product = np.ones(pts.shape[0], dtype=complex)
        for j in range(1, self.products + 1):
            product *= self.mask(pts / 2.0**j)
        return product


def cascade(
    mask: PeriodicMask,
    products: int = DEFAULT_PRODUCTS,
    out_grid: GridField | None = None,
) -> CascadeResult:
    """phi_hat_J = prod_{j=1..J} m_1(2^-j xi) on the nodes of ``out_grid``."""
    if products < 1:
        raise ValueError(f"number of products must be >= 1, got {products}")
    if out_grid is None:
        out_grid = cascade_grid(dimension=mask.dimension)
    at_zero = complex(mask(np.zeros((1, mask.dimension)))[0])
    if abs(at_zero - 1.0) > 1e-8:
        logger.warning("Mask is not normalized: m(0) = %s", at_zero)

    nodes = out_grid.nodes()
    product = np.ones(nodes.shape[0], dtype=complex)
    increments = np.empty(products)
    zero_hits = 0
    for j in range(1, products + 1):
        factor = mask(nodes / 2.0**j)
        finite = np.isfinite(factor)
        if not np.all(finite):
            bad = int(np.flatnonzero(~finite)[0])
            raise CascadeError(f"non-finite mask factor at xi={nodes[bad].tolist()}, j={j}")
        zero_hits += int(np.count_nonzero(factor == 0))
        updated = product * factor
        increments[j - 1] = float(np.max(np.abs(updated - product)))
        product = updated
    if zero_hits:
        logger.info("Cascade hit %d exactly-zero (floored) mask factors", zero_hits)
    logger.debug("Cascade J=%d final increment %.3e", products, increments[-1])
    result = CascadeResult(out_grid, mask, products, zero_hits, increments)
    return CascadeResult(
        out_grid.with_values(product, source=result.evaluate), mask, products, zero_hits, increments
    )


def cascade_grid(
    window: float = DEFAULT_WINDOW, points: int = DEFAULT_GRID_POINTS, dimension: int = 1
) -> GridField:
    """Node-centered grid over [-W, W]^d with about ``points`` nodes per axis."""
    spacing = 2.0 * window / points
    return GridField.centered([window] * dimension, spacing)


def periodization_Phi(
    phi_hat: CascadeResult,
    terms: int = DEFAULT_TERMS,
    resolution: int = 1024,
    exact: bool = True,
) -> PeriodicMask:
    """Phi(xi) = sum_{|k| <= (K-1)/2} |phi_hat(xi + k)|^2 sampled on [-1/2, 1/2)."""
    if terms < 1 or terms % 2 == 0:
        raise ValueError(f"number of terms must be odd, got {terms}")
    if phi_hat.mask.dimension != 1:
        raise DimensionMismatchError("periodization is implemented for d = 1")
    half = (terms - 1) // 2
    base = sample_grid(resolution)[:, 0]
    shifted = (base[:, None] + np.arange(-half, half + 1)[None, :]).reshape(-1, 1)
    if exact:
        values = phi_hat.evaluate(shifted)
    else:
        lo, hi = np.array([-0.5 - half]), np.array([0.5 + half])
        if not phi_hat.grid.covers(lo, hi):
            raise CoverageError(
                f"phi_hat grid does not cover shifts |k| <= {half}; widen it or use exact=True"
            )
        values = GridField(phi_hat.grid.values, phi_hat.grid.spacing, phi_hat.grid.origin).sample(
            shifted
        )
    total = np.sum(np.abs(values.reshape(resolution, terms)) ** 2, axis=1)
    return PeriodicMask(total.astype(complex))


def wavelet_mask(m: PeriodicMask, phi_periodization: PeriodicMask) -> PeriodicMask:
    """g(xi) = conj(m(xi + 1/2)) Phi(xi + 1/2) exp(-2 pi i xi)."""
    if m.dimension != 1 or phi_periodization.dimension != 1:
        raise DimensionMismatchError("wavelet masks are defined for d = 1")

    def g(points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 1)
        half = pts + 0.5
        return np.conj(m(half)) * phi_periodization(half).real * np.exp(-2j * np.pi * pts[:, 0])

    return periodize_mask(g, phi_periodization.resolution)


def wavelet_hat(g: PeriodicMask, phi_hat: CascadeResult, out_grid: GridField | None = None) -> GridField:
    """psi_hat(xi) = g(xi/2) phi_hat(xi/2) on ``out_grid`` (default the cascade grid)."""
    grid = out_grid if out_grid is not None else phi_hat.grid

    def psi_hat(points: np.ndarray) -> np.ndarray:
        half = as_points(points, g.dimension) / 2.0
        return g(half) * phi_hat.evaluate(half)

    return grid.with_values(psi_hat(grid.nodes()), source=psi_hat)


# -- Diagnostics --------------------------------------------------------------


def refinement_defect(phi_hat: CascadeResult, mask: PointwiseMap, points) -> float:
    """sup |phi_hat(2 xi) - m(xi) phi_hat(xi)| over ``points``."""
    pts = as_points(points, phi_hat.mask.dimension)
    lhs = phi_hat.evaluate(2.0 * pts)
    rhs = np.asarray(mask(pts)).reshape(-1) * phi_hat.evaluate(pts)
    return float(np.max(np.abs(lhs - rhs)))


def decay_slope(phi_hat: CascadeResult, lo: float = 4.0, hi: float = 64.0) -> float:
    """Log-log slope of the dyadic-bin maxima of |phi_hat| over lo <= |xi| <= hi (d = 1)."""
    if phi_hat.grid.dimension != 1:
        raise DimensionMismatchError("decay slope is measured for d = 1")
    xi = np.abs(phi_hat.grid.nodes()[:, 0])
    magnitude = np.abs(phi_hat.grid.values.ravel())
    if xi.max() < hi * (1 - 1e-9):
        raise CoverageError(f"cascade grid reaches |xi| = {xi.max()}, need {hi}")
    edges = [lo]
    while edges[-1] < hi:
        edges.append(min(2 * edges[-1], hi))
    peak_at, peak = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        in_bin = (xi >= a) & (xi <= b)
        if not np.any(in_bin) or magnitude[in_bin].max() == 0:
            continue
        best = np.flatnonzero(in_bin)[np.argmax(magnitude[in_bin])]
        peak_at.append(xi[best])
        peak.append(magnitude[best])
    if len(peak) < 2:
        raise CoverageError("not enough nonzero bins to fit a decay slope")
    slope, _ = np.polyfit(np.log(peak_at), np.log(peak), 1)
    return float(slope)


def holder_probe(mask: PointwiseMap, exponent: float = 1.0, dimension: int = 1) -> float:
    """Advisory estimate of sup |m(xi) - m(0)| / |xi|^exponent for small xi along axis 0."""
    radii = np.logspace(-6, -1, 11)
    points = np.zeros((radii.size, dimension))
    points[:, 0] = radii
    origin = complex(np.asarray(mask(np.zeros((1, dimension)))).reshape(-1)[0])
    ratios = np.abs(np.asarray(mask(points)).reshape(-1) - origin) / radii**exponent
    estimate = float(ratios.max())
    logger.info("Mask continuity probe: sup |m(xi) - m(0)| / |xi|^%s ~ %.3e", exponent, estimate)
    return estimate
