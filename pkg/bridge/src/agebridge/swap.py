"""Swap plan execution: one generated frame per plan entry plus the pair
list the engine's quality gate consumes."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .annotate import _require_stub_or
from .errors import MissingInputError, UsageError
from .formats import atomic_write_bytes, load_swap_plan, write_pairs, write_results

REAL_SWAP_BACKEND = "simswap"

MISSING_SOURCE = "missing_source_media"
MISSING_TARGET = "missing_target_media"


@dataclass(frozen=True)
class SwapOutcome:
    ok: list[tuple[str, str]]
    failed: list[tuple[str, str, str]]  # (source_id, target_id, reason)
    pairs_path: Path
    results_path: Path


def _media_path(media_dir: Path, media_id: str) -> Path:
    return media_dir / f"{media_id}.png"


def _run_entry(entry: tuple[str, str], media_dir: Path, gen_dir: Path) -> str | None:
    """Execute one swap; returns a failure reason or None on success.

    The stub swapper copies the target frame byte for byte, which gives the
    quality gate a valid, maximally similar pair. Per-entry failures never
    abort the run; they are reported in the results file.
    """
    source_id, target_id = entry
    source = _media_path(media_dir, source_id)
    target = _media_path(media_dir, target_id)
    if not source.is_file():
        return MISSING_SOURCE
    if not target.is_file():
        return MISSING_TARGET
    atomic_write_bytes(gen_dir / f"{source_id}__{target_id}.png", target.read_bytes())
    return None


def execute_swaps(
    plan_path: str | Path,
    media_dir: str | Path,
    out_dir: str | Path,
    backend: str = "stub",
    workers: int = 1,
) -> SwapOutcome:
    """Run every plan entry and write generated frames, pairs.csv, and
    results.csv under out_dir. Successes plus failures always add up to the
    plan size; pair paths are relative to out_dir so the pairs file works
    from its own directory."""
    _require_stub_or(backend, REAL_SWAP_BACKEND)
    if workers < 1:
        raise UsageError(f"workers must be >= 1, got {workers}")
    media_dir = Path(media_dir)
    if not media_dir.is_dir():
        raise MissingInputError(f"media directory not found: {media_dir}")
    entries = load_swap_plan(plan_path)

    out_dir = Path(out_dir)
    gen_dir = out_dir / "generated"
    gen_dir.mkdir(parents=True, exist_ok=True)

    def run(entry: tuple[str, str]) -> str | None:
        return _run_entry(entry, media_dir, gen_dir)

    if workers == 1:
        reasons = [run(e) for e in entries]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reasons = list(pool.map(run, entries))

    ok: list[tuple[str, str]] = []
    failed: list[tuple[str, str, str]] = []
    pair_rows = []
    result_rows = []
    for (source_id, target_id), reason in zip(entries, reasons):
        if reason is None:
            ok.append((source_id, target_id))
            reference = os.path.relpath(_media_path(media_dir, target_id), out_dir)
            pair_rows.append([reference, f"generated/{source_id}__{target_id}.png"])
            result_rows.append([source_id, target_id, "ok", ""])
        else:
            failed.append((source_id, target_id, reason))
            result_rows.append([source_id, target_id, "failed", reason])

    pairs_path = out_dir / "pairs.csv"
    results_path = out_dir / "results.csv"
    write_pairs(pair_rows, pairs_path)
    write_results(result_rows, results_path)
    return SwapOutcome(ok, failed, pairs_path, results_path)
