"""Grayscale rasters: binary PGM (P5) and optional PNG through Pillow."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Annotated

import numpy as np
from pydantic import Field

logger = logging.getLogger(__name__)


def to_gray(values: np.ndarray, maxval: int = 255) -> np.ndarray:
    """Affine map of a real image onto 0..maxval (constant images map to 0)."""
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("image has non-finite pixels")
    lo, hi = float(values.min()), float(values.max())
    scaled = np.zeros_like(values) if hi == lo else (values - lo) / (hi - lo)
    dtype = np.uint8 if maxval <= 255 else np.uint16
    return np.round(scaled * maxval).astype(dtype)


def write_pgm(
    path: Annotated[Path, Field(description="Output .pgm file")],
    image: Annotated[np.ndarray, Field(description="Real 2-D array, row-major")],
    maxval: Annotated[int, Field(description="255 or 65535")] = 255,
) -> Path:
    if maxval not in (255, 65535):
        raise ValueError(f"maxval must be 255 or 65535, got {maxval}")
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError(f"PGM needs a 2-D image, got shape {image.shape}")
    gray = to_gray(image, maxval)
    rows, cols = gray.shape
    body = gray.astype(">u2").tobytes() if maxval > 255 else gray.tobytes()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(f"P5\n{cols} {rows}\n{maxval}\n".encode("ascii") + body)
    logger.info("Wrote %s", path)
    return path


def read_pgm(path: Path) -> np.ndarray:
    """Pixels of a P5 file as written by ``write_pgm``."""
    data = Path(path).read_bytes()
    magic, dims, maxval, body = data.split(b"\n", 3)
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    cols, rows = (int(v) for v in dims.split())
    dtype = ">u2" if int(maxval) > 255 else np.uint8
    return np.frombuffer(body, dtype=dtype).reshape(rows, cols)


def write_png(path: Path, image: np.ndarray) -> Path | None:
    """8-bit PNG through Pillow; returns None when Pillow is not installed."""
    try:
        from PIL import Image
    except ImportError:
        logger.warning("Pillow is not installed; skipping %s", path)
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(to_gray(image, 255)).save(path)
    logger.info("Wrote %s", path)
    return path


def render_line_plot(values: np.ndarray, height: int = 256) -> np.ndarray:
    """Rasterize a 1-D curve into a (height, len(values)) image, curve bright on dark."""
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.size == 0:
        raise ValueError("nothing to plot")
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo if hi > lo else 1.0
    rows = np.round((hi - values) / span * (height - 1)).astype(int)
    canvas = np.zeros((height, values.size))
    canvas[rows, np.arange(values.size)] = 1.0
    # connect consecutive samples so steep sections stay visible
    for col in range(1, values.size):
        a, b = sorted((rows[col - 1], rows[col]))
        canvas[a : b + 1, col] = 1.0
    return canvas
