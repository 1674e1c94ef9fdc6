"""IDX ubyte ingestion (the MNIST container format).

Layout, all integers big-endian::

    [offset] [type]          [value]
    0000     32 bit integer  0x00000803 images / 0x00000801 labels
    0004     32 bit integer  number of items
    0008     32 bit integer  rows          (images only)
    0012     32 bit integer  columns       (images only)
    ....     unsigned byte   pixels / labels

Files may be gzip-compressed (``.gz``).
"""

from __future__ import annotations

import gzip
import logging
import struct
from pathlib import Path
from typing import Annotated

import numpy as np
from pydantic import Field, validate_call

from src.sigma_extrapolation.errors import IdxFormatError

logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def _read_bytes(path: Path) -> bytes:
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as fh:
            return fh.read()
    return path.read_bytes()


def _header(data: bytes, fmt: str, expected_magic: int, path: Path) -> tuple[int, ...]:
    size = struct.calcsize(fmt)
    if len(data) < size:
        raise IdxFormatError(f"{path}: header truncated ({len(data)} of {size} bytes)", offset=len(data))
    fields = struct.unpack_from(fmt, data, 0)
    if fields[0] != expected_magic:
        raise IdxFormatError(
            f"{path}: bad magic 0x{fields[0]:08x}, expected 0x{expected_magic:08x}", offset=0
        )
    return fields


def read_idx_images(
    path: Annotated[Path, Field(description="IDX3 image file, optionally gzip-compressed")],
) -> np.ndarray:
    """All images as uint8 array (count, rows, cols)."""
    path = Path(path)
    data = _read_bytes(path)
    _, count, rows, cols = _header(data, ">IIII", IMAGE_MAGIC, path)
    start = struct.calcsize(">IIII")
    needed = start + count * rows * cols
    if len(data) < needed:
        raise IdxFormatError(
            f"{path}: truncated pixel data ({len(data)} of {needed} bytes)", offset=len(data)
        )
    return np.frombuffer(data, dtype=np.uint8, count=count * rows * cols, offset=start).reshape(
        count, rows, cols
    )


def read_idx_labels(
    path: Annotated[Path, Field(description="IDX1 label file, optionally gzip-compressed")],
) -> np.ndarray:
    """All labels as uint8 array (count,)."""
    path = Path(path)
    data = _read_bytes(path)
    _, count = _header(data, ">II", LABEL_MAGIC, path)
    start = struct.calcsize(">II")
    if len(data) < start + count:
        raise IdxFormatError(
            f"{path}: truncated label data ({len(data)} of {start + count} bytes)", offset=len(data)
        )
    return np.frombuffer(data, dtype=np.uint8, count=count, offset=start)


@validate_call
def load_idx_images(
    path: Annotated[Path, Field(description="IDX3 image file")],
    label_path: Annotated[Path, Field(description="IDX1 label file matching the images")],
    digit: Annotated[int, Field(ge=0, le=9, description="Label to select")],
    count: Annotated[int, Field(ge=1, description="Number of matching images to return")],
    skip: Annotated[int, Field(ge=0, description="Matching images to skip first")] = 0,
) -> list[np.ndarray]:
    """First ``count`` images labelled ``digit`` as float grids in [0, 1], row-major."""
    images = read_idx_images(path)
    labels = read_idx_labels(label_path)
    if labels.shape[0] != images.shape[0]:
        raise IdxFormatError(
            f"{label_path}: {labels.shape[0]} labels for {images.shape[0]} images", offset=4
        )
    matches = np.flatnonzero(labels == digit)[skip : skip + count]
    if matches.size < count:
        raise IdxFormatError(
            f"only {matches.size} images with label {digit} after skipping {skip}, need {count}",
            offset=8,
        )
    logger.info("Loaded %d images of digit %d from %s", count, digit, path)
    return [images[i].astype(float) / 255.0 for i in matches]


def write_idx(
    path: Annotated[Path, Field(description="Output file")],
    array: Annotated[np.ndarray, Field(description="uint8 images (count, rows, cols) or labels (count,)")],
) -> Path:
    """Write an IDX1/IDX3 ubyte file; used to build fixtures."""
    array = np.asarray(array, dtype=np.uint8)
    path = Path(path)
    if array.ndim == 3:
        header = struct.pack(">IIII", IMAGE_MAGIC, *array.shape)
    elif array.ndim == 1:
        header = struct.pack(">II", LABEL_MAGIC, array.shape[0])
    else:
        raise ValueError(f"expected 1 or 3 axes, got shape {array.shape}")
    payload = header + array.tobytes()
    if path.suffix == ".gz":
        with gzip.open(path, "wb") as fh:
            fh.write(payload)
    else:
        path.write_bytes(payload)
    return path
