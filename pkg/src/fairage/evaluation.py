"""ROC-based metrics (AUC, normalized pAUC, EER) computed overall, per age
group, and per (model, train set, test set) context, plus the fairness gap
across age strata.

Fake is the positive class throughout and higher scores mean more fake.
Ties follow the midpoint convention: tied scores collapse into one ROC step
and tied (positive, negative) pairs count half in AUC.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from fairage.core import AGE_GROUPS, AgeGroup, Label
from fairage.errors import MissingInputError, SingleClassError, ValidationError
from fairage.ingest import ScoreRecord


@dataclass(frozen=True)
class EvalConfig:
    max_fpr: float = 0.1
    pauc_normalized: bool = True

    def __post_init__(self):
        if not 0.0 < self.max_fpr <= 1.0:
            raise ValidationError(f"max_fpr must be in (0,1], got {self.max_fpr}")


DEFAULT_EVAL = EvalConfig()


def _as_arrays(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if s.ndim != 1 or y.shape != s.shape:
        raise ValidationError("scores and labels must be 1-D and the same length")
    if s.size == 0:
        raise SingleClassError("no scores")
    if not np.all(np.isfinite(s)):
        raise ValidationError("scores must be finite")
    if not np.all((y == 0) | (y == 1)):
        raise ValidationError("labels must be 0 or 1")
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == y.size:
        raise SingleClassError("both classes are required")
    return s, y


def roc_curve(scores, labels) -> list[tuple[float, float]]:
    """(fpr, tpr) vertices from a threshold sweep over distinct score
    values, descending; starts at (0,0) and ends at (1,1)."""
    s, y = _as_arrays(scores, labels)
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]

    points = [(0.0, 0.0)]
    tp = 0
    fp = 0
    i = 0
    n = s.size
    while i < n:
        j = i
        while j < n and s_sorted[j] == s_sorted[i]:
            j += 1
        block = y_sorted[i:j]
        tp += int(block.sum())
        fp += int(block.size - block.sum())
        points.append((fp / n_neg, tp / n_pos))
        i = j
    return points


def auc(scores, labels) -> float:
    """Mann-Whitney statistic: the fraction of (positive, negative) pairs
    ranked correctly, ties counted half. Equals the trapezoidal ROC area."""
    s, y = _as_arrays(scores, labels)
    order = np.argsort(s, kind="stable")
    s_sorted = s[order]
    ranks = np.empty(s.size, dtype=np.float64)
    i = 0
    while i < s.size:
        j = i
        while j < s.size and s_sorted[j] == s_sorted[i]:
            j += 1
        # midrank for the tie block, 1-based
        ranks[i:j] = 0.5 * (i + 1 + j)
        i = j
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    rank_sum = float(ranks[y[order] == 1].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def pauc(scores, labels, cfg: EvalConfig = DEFAULT_EVAL) -> float:
    """Trapezoidal ROC area over fpr in [0, max_fpr], the cutoff handled by
    linear interpolation; divided by max_fpr when normalization is on."""
    points = roc_curve(scores, labels)
    area = 0.0
    for (x1, y1), (x2, y2) in zip(points, points[1:]):
        if x2 <= cfg.max_fpr:
            area += (x2 - x1) * (y1 + y2) / 2.0
            continue
        if x1 < cfg.max_fpr:
            yc = y1 + (y2 - y1) * (cfg.max_fpr - x1) / (x2 - x1)
            area += (cfg.max_fpr - x1) * (y1 + yc) / 2.0
        break
    return area / cfg.max_fpr if cfg.pauc_normalized else area


def eer(scores, labels) -> float:
    """Common error rate where fpr equals fnr on the piecewise-linear ROC.

    g(x, y) = x + y - 1 is strictly increasing along the curve, so the
    crossing with the fpr == 1 - tpr line is unique.
    """
    points = roc_curve(scores, labels)
    for (x1, y1), (x2, y2) in zip(points, points[1:]):
        g2 = x2 + y2 - 1.0
        if g2 < 0.0:
            continue
        g1 = x1 + y1 - 1.0
        if g1 >= 0.0:
            return x1
        t = (1.0 - x1 - y1) / ((x2 - x1) + (y2 - y1))
        return x1 + t * (x2 - x1)
    return 1.0


@dataclass(frozen=True)
class MetricCell:
    """One table cell: metric values (None when a class is missing) plus the
    class counts behind them."""

    auc: float | None
    pauc: float | None
    eer: float | None
    n_pos: int
    n_neg: int

    @property
    def absent(self) -> bool:
        return self.n_pos == 0 or self.n_neg == 0

    def value(self, metric: str) -> float | None:
        if metric not in ("auc", "pauc", "eer"):
            raise ValidationError(f"unknown metric {metric!r}")
        return getattr(self, metric)


CellKey = tuple[str, str, str, AgeGroup | None]


@dataclass(frozen=True)
class MetricReport:
    """Cells keyed by (model_id, train_set, test_set, age_group); the age
    group None is the overall row of that context."""

    cells: dict[CellKey, MetricCell]

    def contexts(self) -> list[tuple[str, str, str]]:
        seen: list[tuple[str, str, str]] = []
        for model, train, test, _ in self.cells:
            ctx = (model, train, test)
            if ctx not in seen:
                seen.append(ctx)
        return seen

    def cell(self, model: str, train: str, test: str, group: AgeGroup | None = None) -> MetricCell | None:
        return self.cells.get((model, train, test, group))


def _make_cell(records: list[ScoreRecord], cfg: EvalConfig) -> MetricCell:
    scores = [r.score for r in records]
    labels = [1 if r.label is Label.FAKE else 0 for r in records]
    n_pos = sum(labels)
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        return MetricCell(None, None, None, n_pos, n_neg)
    return MetricCell(auc(scores, labels), pauc(scores, labels, cfg), eer(scores, labels), n_pos, n_neg)


def evaluate(records: list[ScoreRecord], cfg: EvalConfig = DEFAULT_EVAL) -> MetricReport:
    """Build a MetricReport from score records: per (model, train, test)
    context one overall cell plus one cell per age group present.

    Records without an age group count toward the overall cell only.
    """
    by_context: dict[tuple[str, str, str], list[ScoreRecord]] = {}
    for r in records:
        by_context.setdefault((r.model_id, r.train_set, r.test_set), []).append(r)

    cells: dict[CellKey, MetricCell] = {}
    for (model, train, test), ctx_records in by_context.items():
        cells[(model, train, test, None)] = _make_cell(ctx_records, cfg)
        for group in AGE_GROUPS:
            stratum = [r for r in ctx_records if r.age_group is group]
            if stratum:
                cells[(model, train, test, group)] = _make_cell(stratum, cfg)
    return MetricReport(cells)


def fairness_gap(
    report: MetricReport,
    metric: str = "auc",
    context: tuple[str, str, str] | None = None,
) -> float | None:
    """Max minus min of a metric across the age-group cells of one context;
    None when fewer than two strata carry the metric."""
    if context is None:
        contexts = report.contexts()
        if len(contexts) != 1:
            raise ValidationError("report has multiple contexts; pass one explicitly")
        context = contexts[0]
    model, train, test = context
    values = []
    for group in AGE_GROUPS:
        cell = report.cell(model, train, test, group)
        if cell is None:
            continue
        v = cell.value(metric)
        if v is not None:
            values.append(v)
    if len(values) < 2:
        return None
    return max(values) - min(values)


METRIC_HEADER = ["model", "train", "test", "group", "auc", "pauc", "eer", "n_pos", "n_neg"]
OVERALL_TOKEN = "overall"
ABSENT_TOKEN = "none"


def _ordered_keys(report: MetricReport) -> list[CellKey]:
    keys: list[CellKey] = []
    for ctx in report.contexts():
        model, train, test = ctx
        if (model, train, test, None) in report.cells:
            keys.append((model, train, test, None))
        for group in AGE_GROUPS:
            if (model, train, test, group) in report.cells:
                keys.append((model, train, test, group))
    return keys


def write_metric_report(report: MetricReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRIC_HEADER)
        for model, train, test, group in _ordered_keys(report):
            cell = report.cells[(model, train, test, group)]
            writer.writerow(
                [model, train, test,
                 OVERALL_TOKEN if group is None else group.value,
                 ABSENT_TOKEN if cell.auc is None else repr(cell.auc),
                 ABSENT_TOKEN if cell.pauc is None else repr(cell.pauc),
                 ABSENT_TOKEN if cell.eer is None else repr(cell.eer),
                 str(cell.n_pos), str(cell.n_neg)]
            )


def load_metric_report(path: str | Path) -> MetricReport:
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(f"input file not found: {p}")
    cells: dict[CellKey, MetricCell] = {}
    with open(p, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != METRIC_HEADER:
            raise ValidationError(f"{p}: expected header {METRIC_HEADER}, got {header}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(METRIC_HEADER):
                raise ValidationError(f"{p} row {line_no}: expected {len(METRIC_HEADER)} fields")
            model, train, test, group_tok = row[:4]
            group = None if group_tok == OVERALL_TOKEN else AgeGroup.from_token(group_tok)
            values: list[float | None] = []
            for tok in row[4:7]:
                if tok == ABSENT_TOKEN:
                    values.append(None)
                    continue
                try:
                    v = float(tok)
                except ValueError:
                    raise ValidationError(f"{p} row {line_no}: unparseable metric {tok!r}") from None
                if not math.isfinite(v):
                    raise ValidationError(f"{p} row {line_no}: non-finite metric {tok!r}")
                values.append(v)
            try:
                n_pos = int(row[7])
                n_neg = int(row[8])
            except ValueError:
                raise ValidationError(f"{p} row {line_no}: unparseable counts") from None
            key = (model, train, test, group)
            if key in cells:
                raise ValidationError(f"{p} row {line_no}: duplicate cell {key}")
            cells[key] = MetricCell(values[0], values[1], values[2], n_pos, n_neg)
    return MetricReport(cells)
