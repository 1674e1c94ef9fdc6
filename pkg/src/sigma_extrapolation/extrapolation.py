"""Frequency grids, multiplier extrapolation, spatial synthesis and the GP baseline.

A ``GridField`` holds complex samples on a node-centered frequency grid
``xi_j = origin + j * spacing``. Fields sampled from a known transform keep that
transform as ``source`` so later steps can evaluate it exactly instead of
interpolating.

Extrapolation by a multiplier m from the low set Omega0 to alpha * Omega0::

    out(xi) = low(xi)                      xi in keep (default Omega0)
            = m(xi/alpha) low(xi/alpha)    xi in alpha*Omega0 outside keep
            = 0                            elsewhere
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .domain import FrequencyDomain, as_points, dilate
from .errors import CoverageError, DimensionMismatchError, NonFiniteValueError

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]
GRID_TOLERANCE = 1e-9


def interpolate_on_grid(
    values: np.ndarray, coordinates: np.ndarray, mode: str = "nearest"
) -> np.ndarray:
    """Multilinear interpolation of complex ``values`` at index-space coordinates (d, P)."""
    real = ndimage.map_coordinates(values.real, coordinates, order=1, mode=mode)
    imag = ndimage.map_coordinates(values.imag, coordinates, order=1, mode=mode)
    return real + 1j * imag


@dataclass(frozen=True, eq=False)
class GridField:
    values: np.ndarray
    spacing: tuple[float, ...]
    origin: tuple[float, ...]
    source: Evaluator | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        spacing = tuple(float(h) for h in np.atleast_1d(self.spacing))
        origin = tuple(float(o) for o in np.atleast_1d(self.origin))
        if values.ndim != len(spacing) or len(origin) != len(spacing):
            raise DimensionMismatchError(
                f"grid of shape {values.shape} needs {values.ndim} spacings and origins, "
                f"got {len(spacing)} and {len(origin)}"
            )
        if min(values.shape) < 1 or min(spacing) <= 0:
            raise DimensionMismatchError("grid shape entries and spacings must be positive")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def centered(cls, half_widths: Sequence[float], spacing: Sequence[float] | float) -> GridField:
        """Zero field on a symmetric grid with a node at 0 covering [-hw, hw] per axis."""
        half_widths = np.atleast_1d(np.asarray(half_widths, dtype=float))
        spacing = np.broadcast_to(np.asarray(spacing, dtype=float), half_widths.shape)
        half_counts = [math.ceil(hw / h - GRID_TOLERANCE) for hw, h in zip(half_widths, spacing)]
        shape = tuple(2 * c + 1 for c in half_counts)
        origin = tuple(-c * h for c, h in zip(half_counts, spacing))
        return cls(np.zeros(shape, dtype=complex), tuple(spacing), origin)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def dimension(self) -> int:
        return self.values.ndim

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self) -> list[np.ndarray]:
        return [o + h * np.arange(n) for o, h, n in zip(self.origin, self.spacing, self.shape)]

    def nodes(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def upper(self) -> np.ndarray:
        return np.asarray(self.origin) + np.asarray(self.spacing) * (np.asarray(self.shape) - 1)

    def with_values(self, values: np.ndarray, source: Evaluator | None = None) -> GridField:
        return replace(self, values=np.asarray(values).reshape(self.shape), source=source)

    def same_grid(self, other: GridField) -> bool:
        return (
            self.shape == other.shape
            and np.allclose(self.spacing, other.spacing, rtol=1e-12, atol=0)
            and np.allclose(self.origin, other.origin, rtol=0, atol=1e-12 * max(self.spacing))
        )

    def covers(self, lo: np.ndarray, hi: np.ndarray) -> bool:
        slack = GRID_TOLERANCE * np.asarray(self.spacing)
        return bool(np.all(np.asarray(self.origin) <= lo + slack) and np.all(self.upper() >= hi - slack))

    def sample(self, points) -> np.ndarray:
        """Exact source values if known, else multilinear interpolation (0 off the grid)."""
        pts = as_points(points, self.dimension)
        if self.source is not None:
            return np.asarray(self.source(pts), dtype=complex).reshape(-1)
        index = (pts - np.asarray(self.origin)) / np.asarray(self.spacing)
        upper = np.asarray(self.shape) - 1
        inside = np.all((index >= -GRID_TOLERANCE) & (index <= upper + GRID_TOLERANCE), axis=1)
        out = np.zeros(pts.shape[0], dtype=complex)
        if np.any(inside):
            coords = np.clip(index[inside], 0, upper).T
            out[inside] = interpolate_on_grid(self.values, coords)
        return out

    def __add__(self, other: GridField) -> GridField:
        if not self.same_grid(other):
            raise DimensionMismatchError("fields live on different grids")
        source = None
        if self.source is not None and other.source is not None:
            a, b = self.source, other.source
            source = lambda pts: a(pts) + b(pts)  # noqa: E731
        return self.with_values(self.values + other.values, source)

    def __mul__(self, c: complex) -> GridField:
        source = None
        if self.source is not None:
            a = self.source
            source = lambda pts: c * a(pts)  # noqa: E731
        return self.with_values(c * self.values, source)

    __rmul__ = __mul__


def frequency_grid(domain: FrequencyDomain, spacing: Sequence[float] | float) -> GridField:
    """Empty node-centered grid over the bounding box of ``domain``."""
    lo, hi = domain.bounding_box()
    return GridField.centered(np.maximum(np.abs(lo), np.abs(hi)), spacing)


def sample_field(
    evaluator: Evaluator,
    domain: FrequencyDomain,
    spacing: Sequence[float] | float,
    grid: GridField | None = None,
) -> GridField:
    """Sample ``evaluator`` on a grid, zero outside ``domain``; keeps the exact source."""
    grid = grid if grid is not None else frequency_grid(domain, spacing)

    def restricted(points: np.ndarray) -> np.ndarray:
        values = np.asarray(evaluator(points), dtype=complex).reshape(-1)
        return np.where(domain.contains_many(points), values, 0.0)

    return grid.with_values(restricted(grid.nodes()), source=restricted)


def _extrapolate(
    pieces: Sequence[tuple[Evaluator, FrequencyDomain]],
    low: GridField,
    alpha: float,
    keep: FrequencyDomain,
    target: GridField | None,
) -> GridField:
    dilated = [dilate(omega0, alpha) for _, omega0 in pieces]
    lo = np.min([d.bounding_box()[0] for d in dilated], axis=0)
    hi = np.max([d.bounding_box()[1] for d in dilated], axis=0)
    if target is None:
        target = GridField.centered(np.maximum(np.abs(lo), np.abs(hi)), low.spacing)
    elif not target.covers(lo, hi):
        raise CoverageError(
            f"target grid [{target.origin}, {tuple(target.upper())}] does not cover "
            f"alpha * Omega0 = [{tuple(lo)}, {tuple(hi)}]"
        )

    nodes = target.nodes()
    out = np.zeros(nodes.shape[0], dtype=complex)
    kept = keep.contains_many(nodes)
    out[kept] = low.sample(nodes[kept])
    remaining = ~kept
    for (multiplier, _), region in zip(pieces, dilated):
        hit = remaining & region.contains_many(nodes)
        if np.any(hit):
            pre = nodes[hit] / alpha
            out[hit] = np.asarray(multiplier(pre)).reshape(-1) * low.sample(pre)
        remaining &= ~hit
    if not np.all(np.isfinite(out)):
        bad = int(np.flatnonzero(~np.isfinite(out))[0])
        raise NonFiniteValueError("extrapolated value is not finite", node=nodes[bad].tolist())
    logger.debug(
        "Extrapolated %d nodes (%d kept, %d filled)",
        nodes.shape[0],
        int(kept.sum()),
        int((~kept & ~remaining).sum()),
    )
    return target.with_values(out)


def extrapolate_field(
    m: Evaluator,
    low: GridField,
    alpha: float,
    omega0: FrequencyDomain,
    keep: FrequencyDomain | None = None,
    target: GridField | None = None,
) -> GridField:
    """Known data on ``keep`` (default Omega0), m(xi/alpha) low(xi/alpha) on the rest of alpha Omega0."""
    return _extrapolate([(m, omega0)], low, alpha, keep if keep is not None else omega0, target)


def extrapolate_sectors(
    parts: Sequence[tuple[Evaluator, FrequencyDomain]],
    low: GridField,
    alpha: float,
    keep: FrequencyDomain,
    target: GridField | None = None,
) -> GridField:
    """Several multipliers over a hard partition; the first part containing a node wins."""
    if not parts:
        raise ValueError("need at least one (multiplier, domain) part")
    return _extrapolate(parts, low, alpha, keep, target)


def extrapolation_error(pred: GridField, truth: GridField, region: FrequencyDomain) -> float:
    """Relative L2 error over grid nodes in ``region`` (absolute when truth vanishes there)."""
    if not pred.same_grid(truth):
        raise DimensionMismatchError("prediction and truth live on different grids")
    inside = region.contains_many(truth.nodes())
    diff = np.linalg.norm((pred.values.ravel() - truth.values.ravel())[inside])
    norm = np.linalg.norm(truth.values.ravel()[inside])
    return float(diff if norm == 0 else diff / norm)


# -- Spatial synthesis -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpatialImage:
    values: np.ndarray
    axes: tuple[np.ndarray, ...]

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def imaginary_residue(self) -> float:
        """max |Im u| / max |u|."""
        scale = float(np.max(np.abs(self.values)))
        return 0.0 if scale == 0 else float(np.max(np.abs(self.values.imag))) / scale


def reconstruct_space(
    field: GridField,
    out_shape: Sequence[int],
    window: tuple[Sequence[float], Sequence[float]] | None = None,
) -> SpatialImage:
    """u(x) = sum_xi field(xi) exp(2 pi i xi.x) cell_volume on a regular spatial grid.

    The grid has ``out_shape`` samples per axis starting at the window's lower
    corner (default the unit cube [0, 1)^d).
    """
    out_shape = tuple(int(s) for s in np.atleast_1d(out_shape))
    if len(out_shape) != field.dimension:
        raise DimensionMismatchError(f"out_shape {out_shape} does not match d={field.dimension}")
    if not np.all(np.isfinite(field.values)):
        raise NonFiniteValueError("field has non-finite samples")
    lo, hi = window if window is not None else ((0.0,) * field.dimension, (1.0,) * field.dimension)
    coords = tuple(
        np.linspace(a, b, n, endpoint=False) for a, b, n in zip(np.atleast_1d(lo), np.atleast_1d(hi), out_shape)
    )
    result = field.values
    for axis, (x, xi) in enumerate(zip(coords, field.axes())):
        kernel = np.exp(2j * np.pi * np.outer(x, xi))
        result = np.moveaxis(np.tensordot(kernel, result, axes=(1, axis)), 0, axis)
    return SpatialImage(result * field.cell_volume, coords)


def optimal_filter(
    m: Evaluator,
    omega0: FrequencyDomain,
    alpha: float,
    spacing: Sequence[float] | float,
    out_shape: Sequence[int],
    window: tuple[Sequence[float], Sequence[float]] | None = None,
) -> SpatialImage:
    """Spatial filter eta: inverse transform of m on Omega0 minus Omega0/alpha."""
    grid = frequency_grid(omega0, spacing)
    nodes = grid.nodes()
    band = omega0.contains_many(nodes) & ~omega0.contains_many(alpha * nodes)
    values = np.zeros(nodes.shape[0], dtype=complex)
    if np.any(band):
        values[band] = np.asarray(m(nodes[band])).reshape(-1)
    return reconstruct_space(grid.with_values(values), out_shape, window)


# -- Gerchberg-Papoulis baseline --------------------------------------------


class PeriodicSynthesis:
    """Exact DFT pair between a full frequency grid and its periodic spatial samples.

    With M nodes of spacing h per axis the spatial samples are x_n = n / (M h),
    reported in centered form (n >= M/2 taken as negative).
    """

    def __init__(self, grid: GridField):
        steps = np.asarray(grid.origin) / np.asarray(grid.spacing)
        if not np.allclose(steps, np.round(steps), atol=1e-6):
            raise CoverageError("grid origin must be an integer multiple of its spacing")
        self.grid = grid
        self.dx = tuple(1.0 / (n * h) for n, h in zip(grid.shape, grid.spacing))
        self.coordinates = tuple(
            np.where(np.arange(n) < n / 2, np.arange(n), np.arange(n) - n) * dx
            for n, dx in zip(grid.shape, self.dx)
        )
        phase = np.ones(grid.shape, dtype=complex)
        for axis, (origin, n, dx) in enumerate(zip(grid.origin, grid.shape, self.dx)):
            factor = np.exp(2j * np.pi * origin * np.arange(n) * dx)
            phase = phase * factor.reshape([-1 if a == axis else 1 for a in range(grid.dimension)])
        self._phase = phase

    def synthesize(self, values: np.ndarray) -> np.ndarray:
        scale = float(np.prod(np.asarray(self.grid.shape) * np.asarray(self.grid.spacing)))
        return scale * self._phase * np.fft.ifftn(values)

    def analyze(self, samples: np.ndarray) -> np.ndarray:
        return float(np.prod(self.dx)) * np.fft.fftn(samples * self._phase.conj())

    def box_mask(self, lo: Sequence[float], hi: Sequence[float]) -> np.ndarray:
        mask = np.ones(self.grid.shape, dtype=bool)
        for axis, (x, a, b) in enumerate(zip(self.coordinates, np.atleast_1d(lo), np.atleast_1d(hi))):
            inside = (x >= a - GRID_TOLERANCE) & (x <= b + GRID_TOLERANCE)
            mask &= inside.reshape([-1 if k == axis else 1 for k in range(self.grid.dimension)])
        return mask


def gp_iterate(
    data: GridField,
    omega0: FrequencyDomain,
    support: tuple[Sequence[float], Sequence[float]],
    steps: int,
    callback: Callable[[int, float], None] | None = None,
) -> GridField:
    """Gerchberg-Papoulis iteration on the full grid of ``data``.

    Each step overwrites the values on Omega0 with the data, then synthesizes,
    zeros everything outside the spatial box ``support`` and analyzes back.
    ``callback(k, residual)`` receives ||chi_Omega0 (v_k - data)|| after step k.
    """
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    pair = PeriodicSynthesis(data)
    known = omega0.contains_many(data.nodes()).reshape(data.shape)
    truth = np.where(known, data.values, 0.0)
    inside = pair.box_mask(*support)
    v = truth.copy()
    for k in range(1, steps + 1):
        v = np.where(known, truth, v)
        u = pair.synthesize(v)
        u[~inside] = 0.0
        v = pair.analyze(u)
        if callback is not None:
            callback(k, float(np.linalg.norm((v - truth)[known])))
    logger.debug("GP finished after %d steps", steps)
    return data.with_values(v)
