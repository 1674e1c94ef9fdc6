"""File formats for experiment inputs and outputs.

- IDX ubyte image/label ingestion
- CSV tables with unit-annotated headers
- PGM (P5) rasters, optional PNG through Pillow
- sha256 manifest and partial-stage marking
"""

from .idx import load_idx_images, read_idx_images, read_idx_labels, write_idx
from .images import read_pgm, render_line_plot, write_pgm, write_png
from .manifest import ArtifactStore, file_sha256, read_manifest
from .tables import read_matrix, read_table, write_matrix, write_records, write_series, write_table

__all__ = [
    "ArtifactStore",
    "file_sha256",
    "load_idx_images",
    "read_idx_images",
    "read_idx_labels",
    "read_manifest",
    "read_matrix",
    "read_pgm",
    "read_table",
    "render_line_plot",
    "write_idx",
    "write_matrix",
    "write_pgm",
    "write_png",
    "write_records",
    "write_series",
    "write_table",
]
