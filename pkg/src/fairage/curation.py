"""Distribution analysis, undersample-to-mean balancing, top-up and
augmentation planning, and stratified splitting.

All sampling draws from named per-stratum streams derived from one top-level
seed, so strata are independent and runs are reproducible bit for bit.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

from fairage.core import AGE_GROUPS, AgeGroup, CurationConfig, DEFAULT_CONFIG, FrameRecord, Label, SourceDataset
from fairage.errors import MissingInputError, ValidationError
from fairage.ingest import Manifest
from fairage.rng import stream

# Sources that participate in the per-label mean and in undersampling.
# UTKFace is a top-up pool only and Synthetic appears after generation.
COMBINED_SOURCES = (SourceDataset.CELEB_DF, SourceDataset.FACE_FORENSICS)


@dataclass(frozen=True)
class DistributionTable:
    """Exact record counts keyed by (label, age group, source)."""

    counts: dict[tuple[Label, AgeGroup, SourceDataset], int]

    def count(self, label: Label, group: AgeGroup, source: SourceDataset) -> int:
        return self.counts.get((label, group, source), 0)

    def combined(self, label: Label, group: AgeGroup) -> int:
        return sum(self.count(label, group, s) for s in COMBINED_SOURCES)

    def row_total(self, label: Label, group: AgeGroup) -> int:
        return sum(n for (lab, grp, _), n in self.counts.items() if lab is label and grp is group)

    def label_total(self, label: Label) -> int:
        return sum(n for (lab, _, _), n in self.counts.items() if lab is label)

    def total(self) -> int:
        return sum(self.counts.values())


def _records(manifest) -> tuple[FrameRecord, ...]:
    if isinstance(manifest, Manifest):
        return manifest.records
    return tuple(manifest)


def analyze_distribution(manifest) -> DistributionTable:
    counts: dict[tuple[Label, AgeGroup, SourceDataset], int] = {}
    for r in _records(manifest):
        key = (r.label, r.age_group, r.source)
        counts[key] = counts.get(key, 0) + 1
    return DistributionTable(counts)


def compute_mean_targets(dist: DistributionTable) -> dict[Label, int | None]:
    """Per-label target: floor of the mean combined Celeb-DF+FaceForensics++
    count over age groups whose combined count is nonzero.

    A label with no nonzero group has no defined target and maps to None.
    """
    targets: dict[Label, int | None] = {}
    for label in Label:
        cells = [dist.combined(label, g) for g in AGE_GROUPS]
        nonzero = [c for c in cells if c > 0]
        targets[label] = math.floor(sum(nonzero) / len(nonzero)) if nonzero else None
    return targets


def undersample(
    manifest,
    targets: dict[Label, int | None],
    seed: int,
) -> tuple[tuple[FrameRecord, ...], tuple[str, ...]]:
    """Reduce each over-target (label, group) cell to its target.

    Sampling is uniform without replacement over the combined Celeb-DF +
    FaceForensics++ pool of the cell; other sources are untouched. Returns
    (kept records in input order, removed frame_ids in input order).
    """
    records = _records(manifest)
    pools: dict[tuple[Label, AgeGroup], list[int]] = {}
    for idx, r in enumerate(records):
        if r.source in COMBINED_SOURCES:
            pools.setdefault((r.label, r.age_group), []).append(idx)

    removed: set[int] = set()
    for (label, group), pool in pools.items():
        target = targets.get(label)
        if target is None or len(pool) <= target:
            continue
        rng = stream(seed, f"curation.undersample/{label.value}/{group.value}")
        keep_local = set(rng.sample_indices(len(pool), target))
        removed.update(pool[i] for i in range(len(pool)) if i not in keep_local)

    kept = tuple(r for i, r in enumerate(records) if i not in removed)
    removed_ids = tuple(records[i].frame_id for i in sorted(removed))
    return kept, removed_ids


class Action(enum.Enum):
    KEEP = "keep"
    UNDERSAMPLE = "undersample"
    TOPUP_REAL = "topup_real"
    SYNTHESIZE = "synthesize"


@dataclass(frozen=True)
class PlanEntry:
    """One balancing decision for a (label, age group) cell.

    ``amount`` is the action's operand: records to remove for UNDERSAMPLE,
    records to add for TOPUP_REAL, frames to generate for SYNTHESIZE, and 0
    for KEEP. ``shortfall`` counts requested top-up records the pool could
    not supply.
    """

    label: Label
    age_group: AgeGroup
    current: int
    target: int
    action: Action
    amount: int
    shortfall: int = 0

    def __post_init__(self):
        if self.target < 0 or self.amount < 0 or self.shortfall < 0:
            raise ValidationError("plan quantities must be non-negative")
        if self.action is Action.UNDERSAMPLE and self.current <= self.target:
            raise ValidationError("undersample requires current > target")
        if self.action is Action.TOPUP_REAL and self.label is not Label.REAL:
            raise ValidationError("top-up applies to real records only")
        if self.action is Action.SYNTHESIZE and self.label is not Label.FAKE:
            raise ValidationError("synthesis applies to fake records only")


def plan_undersample(dist: DistributionTable, targets: dict[Label, int | None]) -> list[PlanEntry]:
    entries = []
    for label in Label:
        target = targets.get(label)
        for group in AGE_GROUPS:
            current = dist.combined(label, group)
            if target is not None and current > target:
                entries.append(PlanEntry(label, group, current, target, Action.UNDERSAMPLE, current - target))
            else:
                entries.append(PlanEntry(label, group, current, target if target is not None else current, Action.KEEP, 0))
    return entries


def plan_real_topup(dist_after: DistributionTable, target_real: int) -> list[PlanEntry]:
    """Per real group, plan TopUpReal(max(0, target - combined count)) drawn
    from the UTKFace pool; requests beyond the pool are capped and the gap
    reported as shortfall."""
    entries = []
    for group in AGE_GROUPS:
        current = dist_after.combined(Label.REAL, group)
        need = max(0, target_real - current)
        pool = dist_after.count(Label.REAL, group, SourceDataset.UTK_FACE)
        add = min(need, pool)
        entries.append(
            PlanEntry(Label.REAL, group, current, target_real, Action.TOPUP_REAL, add, shortfall=need - add)
        )
    return entries


def plan_augmentation(dist_after: DistributionTable, target_fake: int) -> list[PlanEntry]:
    """Per fake group, plan Synthesize(max(0, target - current count))."""
    entries = []
    for group in AGE_GROUPS:
        current = dist_after.row_total(Label.FAKE, group)
        need = max(0, target_fake - current)
        entries.append(PlanEntry(Label.FAKE, group, current, target_fake, Action.SYNTHESIZE, need))
    return entries


PLAN_FILE_HEADER = ["label", "age_group", "current", "target", "action", "amount", "shortfall"]


def write_plan(entries: list[PlanEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PLAN_FILE_HEADER)
        for e in entries:
            writer.writerow(
                [e.label.value, e.age_group.value, str(e.current), str(e.target),
                 e.action.value, str(e.amount), str(e.shortfall)]
            )


def load_plan(path: str | Path) -> list[PlanEntry]:
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(f"input file not found: {p}")
    entries = []
    with open(p, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PLAN_FILE_HEADER:
            raise ValidationError(f"{p}: expected header {PLAN_FILE_HEADER}, got {header}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(PLAN_FILE_HEADER):
                raise ValidationError(f"{p} row {line_no}: expected {len(PLAN_FILE_HEADER)} fields")
            try:
                entries.append(
                    PlanEntry(
                        Label.from_token(row[0]), AgeGroup.from_token(row[1]),
                        int(row[2]), int(row[3]), Action(row[4]), int(row[5]), int(row[6]),
                    )
                )
            except (ValueError, ValidationError) as exc:
                raise ValidationError(f"{p} row {line_no}: {exc}") from None
    return entries


def select_topup(
    manifest,
    topup_entries: list[PlanEntry],
    seed: int,
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Choose which UTKFace real records fill each group's top-up quota.

    Returns (selected frame_ids, dropped frame_ids), both in input order.
    UTKFace records not selected for any quota are dropped: the pool exists
    to fill gaps, not to enter the dataset wholesale.
    """
    records = _records(manifest)
    quota = {e.age_group: e.amount for e in topup_entries}
    pools: dict[AgeGroup, list[int]] = {}
    for idx, r in enumerate(records):
        if r.source is SourceDataset.UTK_FACE and r.label is Label.REAL:
            pools.setdefault(r.age_group, []).append(idx)

    selected: set[int] = set()
    dropped: set[int] = set()
    for group, pool in pools.items():
        want = min(quota.get(group, 0), len(pool))
        if want == len(pool):
            chosen = set(range(len(pool)))
        elif want == 0:
            chosen = set()
        else:
            rng = stream(seed, f"curation.topup/{group.value}")
            chosen = set(rng.sample_indices(len(pool), want))
        for i, idx in enumerate(pool):
            (selected if i in chosen else dropped).add(idx)

    sel_ids = tuple(records[i].frame_id for i in sorted(selected))
    drop_ids = tuple(records[i].frame_id for i in sorted(dropped))
    return sel_ids, drop_ids


@dataclass(frozen=True)
class BalanceResult:
    """Everything the balancing stage decides, before any media generation."""

    targets: dict[Label, int | None]
    undersample_entries: list[PlanEntry]
    topup_entries: list[PlanEntry]
    augmentation_entries: list[PlanEntry]
    kept: tuple[FrameRecord, ...]
    removed_ids: tuple[str, ...]


def run_balancing(manifest, seed: int) -> BalanceResult:
    """Full balancing chain: analyze, undersample, top up, plan synthesis.

    ``kept`` holds the balanced manifest records (Celeb/FaceForensics cells
    reduced to target, UTKFace reduced to its top-up quotas); synthesis is a
    plan only, executed elsewhere.
    """
    records = _records(manifest)
    dist = analyze_distribution(records)
    targets = compute_mean_targets(dist)

    after_under, removed_under = undersample(records, targets, seed)
    dist_after = analyze_distribution(after_under)

    target_real = targets[Label.REAL]
    topup_entries = plan_real_topup(dist_after, target_real) if target_real is not None else []
    selected_utk, dropped_utk = select_topup(after_under, topup_entries, seed)

    dropped = set(dropped_utk)
    kept = tuple(r for r in after_under if r.frame_id not in dropped)

    target_fake = targets[Label.FAKE]
    dist_final = analyze_distribution(kept)
    aug_entries = plan_augmentation(dist_final, target_fake) if target_fake is not None else []

    under_entries = plan_undersample(dist, targets)
    removed_ids = tuple(removed_under) + tuple(dropped_utk)
    return BalanceResult(targets, under_entries, topup_entries, aug_entries, kept, removed_ids)


def stratified_split(
    manifest,
    ratio: float,
    seed: int,
) -> tuple[tuple[FrameRecord, ...], tuple[FrameRecord, ...]]:
    """Split records into (train, test) preserving (label, age group) strata.

    Per stratum of size n the train share is floor(ratio*n + 0.5), so a
    singleton stratum lands in train. Output order follows input order.
    """
    if not 0.0 < ratio < 1.0:
        raise ValidationError(f"split ratio must be in (0,1), got {ratio}")
    records = _records(manifest)
    strata: dict[tuple[Label, AgeGroup], list[int]] = {}
    for idx, r in enumerate(records):
        strata.setdefault((r.label, r.age_group), []).append(idx)

    train_idx: set[int] = set()
    for (label, group), members in strata.items():
        n = len(members)
        n_train = math.floor(ratio * n + 0.5)
        if n == 1:
            n_train = 1
        rng = stream(seed, f"curation.split/{label.value}/{group.value}")
        chosen = rng.sample_indices(n, n_train) if 0 < n_train < n else list(range(n_train))
        train_idx.update(members[i] for i in chosen)

    train = tuple(r for i, r in enumerate(records) if i in train_idx)
    test = tuple(r for i, r in enumerate(records) if i not in train_idx)
    return train, test
