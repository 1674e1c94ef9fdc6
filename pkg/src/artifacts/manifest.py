"""Artifact bookkeeping: output directory, content hashes, partial-stage marking."""

from __future__ import annotations

import hashlib
import logging
from pathlib import Path

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.sha256"
PARTIAL_SUFFIX = ".partial"


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class ArtifactStore:
    """Files written under one output directory, in write order."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.files: list[Path] = []

    def path(self, name: str) -> Path:
        return self.directory / name

    def record(self, path: Path | None) -> Path | None:
        if path is not None and path not in self.files:
            self.files.append(Path(path))
        return path

    def mark_partial(self, since: int) -> list[Path]:
        """Rename files recorded after index ``since`` to ``<name>.partial``."""
        renamed = []
        for i in range(since, len(self.files)):
            path = self.files[i]
            if path.exists():
                target = path.with_name(path.name + PARTIAL_SUFFIX)
                path.replace(target)
                self.files[i] = target
                renamed.append(target)
        if renamed:
            logger.warning("Kept %d partial artifacts with suffix %s", len(renamed), PARTIAL_SUFFIX)
        return renamed

    def write_manifest(self) -> Path:
        """One ``"<sha256>  <relative path>"`` line per artifact, sorted by path."""
        lines = [
            f"{file_sha256(p)}  {p.relative_to(self.directory).as_posix()}"
            for p in sorted(self.files, key=lambda p: p.relative_to(self.directory).as_posix())
            if p.exists()
        ]
        manifest = self.directory / MANIFEST_NAME
        manifest.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        logger.info("Wrote manifest with %d entries to %s", len(lines), manifest)
        return manifest


def read_manifest(path: Path) -> dict[str, str]:
    """Relative path -> hash."""
    entries = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        digest, name = line.split("  ", 1)
        entries[name] = digest
    return entries
