"""Ratio-file ingestion and delimited output writers.

Input is tab-separated with a header naming at least chromosome, start, end,
ratio (extra columns ignored).  Rows with missing or non-finite ratios are
dropped before segmentation, mirroring the removal of unmappable regions.
Output tables are tab-separated with a comment-prefixed metadata header and
fixed field formatting so identical runs produce identical bytes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

logger = logging.getLogger(__name__)

_MISSING = {"", "na", "nan", "null", "none", "."}


@dataclass(frozen=True)
class RatioRecord:
    chromosome: str
    window_start: int
    window_end: int
    ratio: float


@dataclass(frozen=True)
class SegmentRecord:
    chromosome: str
    start_window_index: int
    end_window_index: int
    start_bp: int
    end_bp: int
    mean_ratio: float
    n_windows: int
    call: str


def classify_call(mean_ratio: float, baseline: float = 1.0, theta: float = 0.1) -> str:
    if mean_ratio - baseline > theta:
        return "gain"
    if baseline - mean_ratio > theta:
        return "loss"
    return "neutral"


def read_ratio_file(path) -> tuple[dict[str, list[RatioRecord]], int]:
    """Parse, validate, group by chromosome.  Returns (groups, dropped).

    Chromosome groups keep input order; records within a chromosome are
    sorted by window start (with a warning if the file was unsorted).
    """
    groups: dict[str, list[RatioRecord]] = {}
    dropped = 0
    with open(path) as fh:
        header = fh.readline()
        if not header.strip():
            logger.warning("input file %s is empty", path)
            return {}, 0
        cols = [c.strip().lower() for c in header.rstrip("\n").split("\t")]
        try:
            idx = {name: cols.index(name) for name in ("chromosome", "start", "end", "ratio")}
        except ValueError:
            raise InputError(
                f"{path}: header must name columns chromosome, start, end, ratio"
            ) from None
        need = max(idx.values()) + 1
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) < need:
                raise InputError(f"{path}:{lineno}: expected at least {need} columns")
            raw_ratio = fields[idx["ratio"]].strip()
            if raw_ratio.lower() in _MISSING:
                dropped += 1
                continue
            try:
                start = int(fields[idx["start"]])
                end = int(fields[idx["end"]])
                ratio = float(raw_ratio)
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
            if not math.isfinite(ratio):
                dropped += 1
                continue
            if start >= end:
                raise InputError(f"{path}:{lineno}: window start must be < end")
            chrom = fields[idx["chromosome"]].strip()
            groups.setdefault(chrom, []).append(
                RatioRecord(chromosome=chrom, window_start=start, window_end=end, ratio=ratio)
            )
    for chrom, records in groups.items():
        starts = [r.window_start for r in records]
        if any(starts[i] >= starts[i + 1] for i in range(len(starts) - 1)):
            logger.warning("chromosome %s was unsorted; sorting by window start", chrom)
            records.sort(key=lambda r: r.window_start)
    return groups, dropped


def format_ratio(x: float) -> str:
    """Fixed 6-decimal formatting for raw ratio fields."""
    return f"{x:.6f}"


def format_exact(x: float) -> str:
    """Shortest decimal string that round-trips the float exactly."""
    return np.format_float_positional(x, unique=True, trim="0")


def write_table(
    path,
    metadata: Sequence[tuple[str, object]],
    columns: Sequence[str],
    rows: Iterable[Sequence[str]],
) -> None:
    """Write metadata header lines ('# key=value'), a column header, and
    pre-formatted rows, all tab-separated."""
    with open(path, "w") as fh:
        for key, value in metadata:
            fh.write(f"# {key}={value}\n")
        fh.write("\t".join(columns) + "\n")
        for row in rows:
            fh.write("\t".join(str(f) for f in row) + "\n")


def read_table(path) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Read back a table written by write_table."""
    metadata: dict[str, str] = {}
    columns: list[str] = []
    rows: list[list[str]] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# "):
                key, _, value = line[2:].partition("=")
                metadata[key] = value
            elif not columns:
                columns = line.split("\t")
            elif line:
                rows.append(line.split("\t"))
    return metadata, columns, rows
