"""Loading and serving pre-trained word vectors from text-format files.

Supports the two dominant text layouts for published embeddings:

* ``plain``    -- one record per line: token, then whitespace-separated floats.
* ``headered`` -- first line is ``<count> <dim>``, remaining lines as plain.

Values are always parsed as 64-bit floats; downstream averaging is
accumulation-sensitive, so file precision is widened on load.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

VECTOR_FORMATS = ("plain", "headered")


class VectorFileError(Exception):
    """Raised when an embedding file violates the expected format."""


@dataclass(frozen=True)
class LoadReport:
    """Summary of one load_vectors call."""

    source_id: str
    token_count: int
    dim: int
    duplicates_skipped: int


class WordVectorTable:
    """Immutable token -> vector map.

    Safe for concurrent reads: the underlying dict is never mutated after
    construction and every stored array is marked read-only.
    """

    def __init__(self, entries: dict[str, np.ndarray], dim: int, source_id: str,
                 load_report: LoadReport | None = None):
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        for token, vec in entries.items():
            if vec.shape != (dim,):
                raise ValueError(
                    f"vector for token {token!r} has length {vec.shape[0]}, expected {dim}")
            vec.flags.writeable = False
        self._entries = dict(entries)
        self.dim = dim
        self.source_id = source_id
        self.load_report = load_report

    def lookup(self, token: str) -> np.ndarray | None:
        """Return the vector for ``token`` or None. Case-sensitive, never raises."""
        return self._entries.get(token)

    def __contains__(self, token: str) -> bool:
        return token in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def tokens(self):
        return self._entries.keys()


def lookup(table: WordVectorTable, token: str) -> np.ndarray | None:
    """Functional alias for :meth:`WordVectorTable.lookup`."""
    return table.lookup(token)


def _parse_record(line: str, lineno: int, dim: int | None) -> tuple[str, np.ndarray]:
    parts = line.rstrip("\n").split()
    if len(parts) < 2:
        raise VectorFileError(f"line {lineno}: expected a token and at least one value")
    token = parts[0]
    try:
        values = np.array([float(x) for x in parts[1:]], dtype=np.float64)
    except ValueError as exc:
        raise VectorFileError(f"line {lineno}: non-numeric vector value ({exc})") from exc
    if dim is not None and values.shape[0] != dim:
        raise VectorFileError(
            f"line {lineno}: vector length {values.shape[0]} does not match "
            f"dimension {dim} inferred from the first record")
    return token, values


def load_vectors(path: str | Path, format: str = "plain") -> WordVectorTable:
    """Load a text-format embedding file into a :class:`WordVectorTable`.

    ``dim`` is inferred from the first data line; every later record must
    conform. Duplicate tokens keep the first occurrence (published files
    occasionally contain duplicates and determinism matters). A headered
    count/dim mismatch is tolerated with a warning; actual records win.
    """
    if format not in VECTOR_FORMATS:
        raise ValueError(f"unknown vector format {format!r}, expected one of {VECTOR_FORMATS}")
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"embedding file not found: {path}")

    entries: dict[str, np.ndarray] = {}
    duplicates = 0
    dim: int | None = None
    declared: tuple[int, int] | None = None

    with path.open("r", encoding="utf-8", errors="replace") as fh:
        first_data_lineno = 1
        if format == "headered":
            header = fh.readline()
            parts = header.split()
            if len(parts) != 2:
                raise VectorFileError(
                    f"line 1: headered format expects 'count dim', got {header.strip()!r}")
            try:
                declared = (int(parts[0]), int(parts[1]))
            except ValueError as exc:
                raise VectorFileError(f"line 1: non-integer header ({exc})") from exc
            first_data_lineno = 2

        for offset, line in enumerate(fh):
            if not line.strip():
                continue
            lineno = first_data_lineno + offset
            token, values = _parse_record(line, lineno, dim)
            if dim is None:
                dim = values.shape[0]
            if token in entries:
                duplicates += 1
                continue
            entries[token] = values

    if dim is None or not entries:
        raise VectorFileError(f"{path}: no vector records found")

    if declared is not None and declared != (len(entries) + duplicates, dim):
        logger.warning(
            "header of %s declares %d records of dim %d but file contains %d of dim %d; "
            "using actual records", path, declared[0], declared[1],
            len(entries) + duplicates, dim)

    report = LoadReport(source_id=str(path), token_count=len(entries), dim=dim,
                        duplicates_skipped=duplicates)
    logger.info("loaded %d vectors (dim=%d, duplicates_skipped=%d) from %s",
                report.token_count, report.dim, report.duplicates_skipped, path)
    return WordVectorTable(entries, dim=dim, source_id=str(path), load_report=report)
