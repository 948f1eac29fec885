"""Source-to-target pairing by embedding similarity and facial attributes.

Each candidate source face is scored against every target with a weighted
combination of embedding cosine similarity and attribute compatibility
(yaw, pitch, brightness, expression). The best target wins; pairs that
fail the similarity or combined-score thresholds are rejected with a
reason, which is how generation shortfalls arise downstream.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from fairage.errors import ValidationError

ANGLE_RANGE = 180.0  # yaw/pitch live in [-90, 90], so spans normalize by 180


@dataclass(eq=False)
class FaceDescriptor:
    """Embedding vector plus the attributes used for match compatibility."""

    embedding: np.ndarray
    yaw_deg: float
    pitch_deg: float
    brightness: float
    expression: float

    def __post_init__(self):
        self.embedding = np.asarray(self.embedding, dtype=np.float64)
        if self.embedding.ndim != 1 or self.embedding.size == 0:
            raise ValidationError("embedding must be a non-empty 1-D vector")
        if not np.all(np.isfinite(self.embedding)):
            raise ValidationError("embedding has non-finite components")
        if not np.any(self.embedding):
            raise ValidationError("embedding must be non-zero")
        for name, value, lo, hi in (
            ("yaw_deg", self.yaw_deg, -90.0, 90.0),
            ("pitch_deg", self.pitch_deg, -90.0, 90.0),
            ("brightness", self.brightness, 0.0, 1.0),
            ("expression", self.expression, 0.0, 1.0),
        ):
            if not np.isfinite(value) or not lo <= value <= hi:
                raise ValidationError(f"{name}={value} outside [{lo}, {hi}]")


@dataclass(frozen=True)
class MatchConfig:
    w_sim: float = 0.7
    w_attr: float = 0.3
    min_cosine: float = 0.2
    min_combined: float = 0.5
    one_to_one: bool = False

    def __post_init__(self):
        if self.w_sim < 0 or self.w_attr < 0:
            raise ValidationError("match weights must be non-negative")
        if abs(self.w_sim + self.w_attr - 1.0) > 1e-12:
            raise ValidationError("match weights must sum to 1")
        if not -1.0 <= self.min_cosine <= 1.0:
            raise ValidationError(f"min_cosine {self.min_cosine} outside [-1, 1]")
        if not 0.0 <= self.min_combined <= 1.0:
            raise ValidationError(f"min_combined {self.min_combined} outside [0, 1]")


@dataclass(frozen=True)
class MatchEntry:
    source_id: str
    target_id: str
    cosine: float
    attr_score: float
    combined: float


@dataclass
class SwapPlan:
    entries: list[MatchEntry] = field(default_factory=list)
    rejected: list[tuple[str, str]] = field(default_factory=list)  # (source_id, reason)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Inner product of a and b divided by the product of their norms."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValidationError("cosine similarity undefined for a zero vector")
    value = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(-1.0, value))


def attribute_compatibility(a: FaceDescriptor, b: FaceDescriptor) -> float:
    """One minus the mean normalized absolute attribute difference, in [0, 1]."""
    diffs = (
        abs(a.yaw_deg - b.yaw_deg) / ANGLE_RANGE,
        abs(a.pitch_deg - b.pitch_deg) / ANGLE_RANGE,
        abs(a.brightness - b.brightness),
        abs(a.expression - b.expression),
    )
    return 1.0 - sum(diffs) / 4.0


def combined_score(a: FaceDescriptor, b: FaceDescriptor, cfg: MatchConfig) -> tuple[float, float, float]:
    cos = cosine_similarity(a.embedding, b.embedding)
    attr = attribute_compatibility(a, b)
    return cos, attr, cfg.w_sim * cos + cfg.w_attr * attr


def best_matches(
    sources: Mapping[str, FaceDescriptor],
    targets: Mapping[str, FaceDescriptor],
    cfg: MatchConfig = MatchConfig(),
) -> SwapPlan:
    """Pick the best-scoring target for every source and apply the thresholds.

    Ties on the combined score go to the lexicographically smaller target id,
    which makes the selection invariant to target ordering. With one_to_one
    enabled, sources are processed in input order and each chosen target is
    removed from the pool.
    """
    if not targets:
        raise ValidationError("target set must be non-empty")
    plan = SwapPlan()
    available = dict(sorted(targets.items()))
    for source_id, source in sources.items():
        if not available:
            plan.rejected.append((source_id, "no_available_target"))
            continue
        best = None
        for target_id, target in available.items():
            cos, attr, score = combined_score(source, target, cfg)
            if best is None or score > best[3]:
                best = (target_id, cos, attr, score)
        target_id, cos, attr, score = best
        if cos < cfg.min_cosine:
            plan.rejected.append((source_id, "cosine_below_threshold"))
        elif score < cfg.min_combined:
            plan.rejected.append((source_id, "combined_below_threshold"))
        else:
            plan.entries.append(MatchEntry(source_id, target_id, cos, attr, score))
            if cfg.one_to_one:
                del available[target_id]
    plan.entries.sort(key=lambda e: (-e.combined, e.source_id))
    return plan


PLAN_HEADER = ["source_id", "target_id", "cosine", "attr_score", "combined"]
REJECT_HEADER = ["source_id", "reason"]


def write_swap_plan(plan: SwapPlan, path: str | Path, rejected_path: str | Path | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PLAN_HEADER)
        for e in plan.entries:
            writer.writerow([e.source_id, e.target_id, repr(e.cosine), repr(e.attr_score), repr(e.combined)])
    if rejected_path is not None:
        with open(rejected_path, "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(REJECT_HEADER)
            for source_id, reason in plan.rejected:
                writer.writerow([source_id, reason])


def load_swap_plan(path: str | Path) -> list[MatchEntry]:
    entries = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PLAN_HEADER:
            raise ValidationError(f"{path}: bad swap plan header {header}")
        for i, row in enumerate(reader, start=2):
            if len(row) != len(PLAN_HEADER):
                raise ValidationError(f"{path} row {i}: expected {len(PLAN_HEADER)} fields")
            try:
                cos, attr, combined = float(row[2]), float(row[3]), float(row[4])
            except ValueError:
                raise ValidationError(f"{path} row {i}: unparseable score") from None
            entries.append(MatchEntry(row[0], row[1], cos, attr, combined))
    return entries
