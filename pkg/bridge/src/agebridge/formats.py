"""The engine's interchange formats, reimplemented file-side.

The bridge deliberately does not import the engine, so the pieces of its
contract that matter on disk live here: header rows, age-bin tokens, the
evenly-spaced frame index formula, and atomic file writes. Every writer
emits \\n newlines and UTF-8 so outputs are byte-stable across platforms.
"""

from __future__ import annotations

import csv
import io
import os
from pathlib import Path

from .errors import InvalidDataError

MANIFEST_HEADER = ["frame_id", "video_id", "source", "label", "estimated_age", "age_group"]
DESCRIPTOR_PREFIX = ["frame_id", "d"]
DESCRIPTOR_SUFFIX = ["yaw_deg", "pitch_deg", "brightness", "expression"]
PAIRS_HEADER = ["reference", "generated"]
SWAP_PLAN_HEADER = ["source_id", "target_id", "cosine", "attr_score", "combined"]
RESULTS_HEADER = ["source_id", "target_id", "status", "reason"]

SOURCES = ("utkface", "celebdf", "faceforensicspp", "synthetic")
LABELS = ("real", "fake")

# age bins: upper-exclusive edges 10/19/36/51, age 10 lands in 10-18
_AGE_BINS = [(10, "0-10"), (19, "10-18"), (36, "19-35"), (51, "36-50")]


def age_group_token(age: int) -> str:
    if age < 0:
        raise InvalidDataError(f"estimated age must be >= 0, got {age}")
    for upper, token in _AGE_BINS:
        if age < upper:
            return token
    return "51+"


def select_frame_indices(total_frames: int, k: int) -> list[int]:
    """Indices of k evenly spaced frames: round(i*(n-1)/(k-1)) half-up in
    integer arithmetic; every frame once when the clip is shorter than k."""
    if total_frames < 1:
        raise InvalidDataError(f"total_frames must be >= 1, got {total_frames}")
    if k < 1:
        raise InvalidDataError(f"k must be >= 1, got {k}")
    if total_frames <= k:
        return list(range(total_frames))
    if k == 1:
        return [0]
    span = total_frames - 1
    den = k - 1
    return [(2 * i * span + den) // (2 * den) for i in range(k)]


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write via a sibling temp file and rename, so failures leave nothing
    behind and readers never see a partial file."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    try:
        tmp.write_bytes(data)
        os.replace(tmp, path)
    finally:
        tmp.unlink(missing_ok=True)


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_manifest(rows: list[list[str]], path: str | Path) -> None:
    atomic_write_text(path, _csv_text(MANIFEST_HEADER, rows))


def write_descriptors(dim: int, rows: list[list[str]], path: str | Path) -> None:
    header = DESCRIPTOR_PREFIX + [f"v{i + 1}" for i in range(dim)] + DESCRIPTOR_SUFFIX
    atomic_write_text(path, _csv_text(header, rows))


def write_pairs(rows: list[list[str]], path: str | Path) -> None:
    atomic_write_text(path, _csv_text(PAIRS_HEADER, rows))


def write_results(rows: list[list[str]], path: str | Path) -> None:
    atomic_write_text(path, _csv_text(RESULTS_HEADER, rows))


def load_swap_plan(path: str | Path) -> list[tuple[str, str]]:
    """Read (source_id, target_id) pairs from an engine swap plan."""
    p = Path(path)
    with open(p, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SWAP_PLAN_HEADER:
            raise InvalidDataError(f"{p}: expected header {SWAP_PLAN_HEADER}, got {header}")
        entries = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(SWAP_PLAN_HEADER):
                raise InvalidDataError(f"{p} row {line_no}: expected {len(SWAP_PLAN_HEADER)} fields")
            if not row[0] or not row[1]:
                raise InvalidDataError(f"{p} row {line_no}: empty id")
            entries.append((row[0], row[1]))
    return entries
