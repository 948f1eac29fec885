"""Rendering: aligned text tables, delimiter-separated summaries, and
self-contained SVG charts. Everything here is a pure function of its input,
so identical inputs give byte-identical artifacts.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from fairage.core import AGE_GROUPS, AgeGroup, Label, SourceDataset
from fairage.curation import DistributionTable, PlanEntry
from fairage.errors import ValidationError
from fairage.evaluation import MetricReport


def format_metric(x: float | None) -> str:
    """Four decimal places, round half up; None renders as "None"."""
    if x is None:
        return "None"
    q = Decimal(repr(float(x))).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP)
    return str(q)


def format_count(n: int) -> str:
    return str(int(n))


@dataclass(frozen=True)
class TableSpec:
    title: str
    headers: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    align: tuple[str, ...]

    def __post_init__(self):
        if len(self.align) != len(self.headers):
            raise ValidationError("alignment hints must match header arity")
        if any(a not in ("l", "r") for a in self.align):
            raise ValidationError("alignment hints must be 'l' or 'r'")
        for row in self.rows:
            if len(row) != len(self.headers):
                raise ValidationError(
                    f"row arity {len(row)} does not match header arity {len(self.headers)}"
                )


def render_text(spec: TableSpec) -> str:
    widths = [len(h) for h in spec.headers]
    for row in spec.rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def fmt_row(cells) -> str:
        parts = []
        for cell, width, align in zip(cells, widths, spec.align):
            parts.append(cell.rjust(width) if align == "r" else cell.ljust(width))
        return " | ".join(parts).rstrip()

    lines = [spec.title, ""]
    lines.append(fmt_row(spec.headers))
    lines.append("-+-".join("-" * w for w in widths))
    lines.extend(fmt_row(row) for row in spec.rows)
    return "\n".join(lines) + "\n"


def write_text_table(spec: TableSpec, path: str | Path) -> None:
    Path(path).write_text(render_text(spec), encoding="utf-8", newline="\n")


# Source columns in the order the distribution tables use.
DISTRIBUTION_SOURCES = (SourceDataset.UTK_FACE, SourceDataset.CELEB_DF, SourceDataset.FACE_FORENSICS)


def _distribution_sources(dist: DistributionTable) -> tuple[SourceDataset, ...]:
    synth = sum(
        n for (_, _, src), n in dist.counts.items() if src is SourceDataset.SYNTHETIC
    )
    if synth > 0:
        return DISTRIBUTION_SOURCES + (SourceDataset.SYNTHETIC,)
    return DISTRIBUTION_SOURCES


def render_distribution(dist: DistributionTable) -> TableSpec:
    """Counts by label and age group with one column per source dataset;
    fake rows first, zero-total rows omitted."""
    sources = _distribution_sources(dist)
    headers = ("Label & Age Group",) + tuple(s.display_name for s in sources)
    rows = []
    for label in (Label.FAKE, Label.REAL):
        for group in AGE_GROUPS:
            cells = [dist.count(label, group, s) for s in sources]
            if sum(cells) == 0:
                continue
            rows.append((f"{label.value} ({group.value})",) + tuple(format_count(c) for c in cells))
    return TableSpec(
        title="Label and age group distribution by source dataset",
        headers=headers,
        rows=tuple(rows),
        align=("l",) + ("r",) * len(sources),
    )


def write_distribution_csv(dist: DistributionTable, path: str | Path) -> None:
    sources = _distribution_sources(dist)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", "age_group"] + [s.display_name for s in sources])
        for label in (Label.FAKE, Label.REAL):
            for group in AGE_GROUPS:
                cells = [dist.count(label, group, s) for s in sources]
                if sum(cells) == 0:
                    continue
                writer.writerow([label.value, group.value] + [str(c) for c in cells])


def render_balance_plan(entries: list[PlanEntry], title: str) -> TableSpec:
    rows = tuple(
        (e.label.value, e.age_group.value, format_count(e.current), format_count(e.target),
         e.action.value, format_count(e.amount), format_count(e.shortfall))
        for e in entries
    )
    return TableSpec(
        title=title,
        headers=("Label", "Age Group", "Current", "Target", "Action", "Amount", "Shortfall"),
        rows=rows,
        align=("l", "l", "r", "r", "l", "r", "r"),
    )


_METRIC_ROWS = ("AUC", "PAUC", "EER")
_METRIC_ATTRS = {"AUC": "auc", "PAUC": "pauc", "EER": "eer"}


def render_metrics(report: MetricReport) -> list[TableSpec]:
    """One table per train set: rows are (age group, metric) pairs starting
    with the overall block, columns are model-under-test-set pairs. Cells
    without data render as "None"."""
    contexts = report.contexts()
    trains: list[str] = []
    for _, train, _ in contexts:
        if train not in trains:
            trains.append(train)

    specs = []
    for train in trains:
        ctx = [(m, tr, te) for (m, tr, te) in contexts if tr == train]
        tests: list[str] = []
        models: list[str] = []
        for model, _, test in ctx:
            if test not in tests:
                tests.append(test)
            if model not in models:
                models.append(model)

        columns = [(test, model) for test in tests for model in models]
        groups: list[AgeGroup | None] = [None]
        for group in AGE_GROUPS:
            if any((m, train, te, group) in report.cells for (m, _, te) in ctx):
                groups.append(group)

        rows = []
        for group in groups:
            group_label = "Overall" if group is None else group.value
            for metric in _METRIC_ROWS:
                cells = []
                for test, model in columns:
                    cell = report.cells.get((model, train, test, group))
                    value = None if cell is None else cell.value(_METRIC_ATTRS[metric])
                    cells.append(format_metric(value))
                rows.append((group_label, metric) + tuple(cells))

        specs.append(
            TableSpec(
                title=f"Evaluation metrics for models trained on {train}",
                headers=("Age Group", "Metric") + tuple(f"{m} [{t}]" for t, m in columns),
                rows=tuple(rows),
                align=("l", "l") + ("r",) * len(columns),
            )
        )
    return specs


@dataclass(frozen=True)
class ChartSpec:
    kind: str
    title: str
    series: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if self.kind not in ("pie", "bar"):
            raise ValidationError(f"chart kind must be 'pie' or 'bar', got {self.kind!r}")
        if not self.series:
            raise ValidationError("chart series is empty")
        for name, value in self.series:
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"series value for {name!r} must be finite and non-negative")
        if self.kind == "pie" and sum(v for _, v in self.series) <= 0:
            raise ValidationError("pie series must sum to a positive total")


_PALETTE = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7")


def pie_slice_angles(series) -> list[tuple[float, float]]:
    """(start, extent) in degrees per slice, clockwise from 12 o'clock;
    extents are exactly proportional to the values."""
    total = float(sum(v for _, v in series))
    if total <= 0:
        raise ValidationError("pie series must sum to a positive total")
    out = []
    start = 0.0
    for _, value in series:
        extent = 360.0 * float(value) / total
        out.append((start, extent))
        start += extent
    return out


def _pie_point(cx: float, cy: float, r: float, angle_deg: float) -> tuple[float, float]:
    # 0 deg points up; angles grow clockwise
    rad = math.radians(angle_deg - 90.0)
    return cx + r * math.cos(rad), cy + r * math.sin(rad)


def _svg_escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_chart(spec: ChartSpec) -> str:
    width, height = 640, 400
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:g}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{_svg_escape(spec.title)}</text>',
    ]
    if spec.kind == "pie":
        parts.extend(_render_pie(spec))
    else:
        parts.extend(_render_bar(spec))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _render_pie(spec: ChartSpec) -> list[str]:
    cx, cy, r = 200.0, 212.0, 150.0
    parts = []
    angles = pie_slice_angles(spec.series)
    for i, ((name, value), (start, extent)) in enumerate(zip(spec.series, angles)):
        color = _PALETTE[i % len(_PALETTE)]
        if extent <= 0.0:
            pass
        elif extent >= 360.0:
            parts.append(f'<circle cx="{cx:g}" cy="{cy:g}" r="{r:g}" fill="{color}"/>')
        else:
            x1, y1 = _pie_point(cx, cy, r, start)
            x2, y2 = _pie_point(cx, cy, r, start + extent)
            large = 1 if extent > 180.0 else 0
            parts.append(
                f'<path d="M {cx:g} {cy:g} L {x1!r} {y1!r} '
                f'A {r:g} {r:g} 0 {large} 1 {x2!r} {y2!r} Z" fill="{color}"/>'
            )
        ly = 64 + i * 24
        parts.append(f'<rect x="400" y="{ly - 12}" width="14" height="14" fill="{color}"/>')
        parts.append(
            f'<text x="422" y="{ly}" font-family="sans-serif" font-size="13">'
            f"{_svg_escape(name)}: {value:g}</text>"
        )
    return parts


def _render_bar(spec: ChartSpec) -> list[str]:
    left, bottom, top = 60.0, 360.0, 48.0
    plot_w, plot_h = 540.0, bottom - top
    peak = max(v for _, v in spec.series)
    scale = plot_h / peak if peak > 0 else 0.0
    n = len(spec.series)
    slot = plot_w / n
    bar_w = slot * 0.6
    parts = [
        f'<line x1="{left:g}" y1="{bottom:g}" x2="{left + plot_w:g}" y2="{bottom:g}" stroke="#333333"/>',
        f'<line x1="{left:g}" y1="{bottom:g}" x2="{left:g}" y2="{top:g}" stroke="#333333"/>',
    ]
    for i, (name, value) in enumerate(spec.series):
        color = _PALETTE[i % len(_PALETTE)]
        h = value * scale
        x = left + i * slot + (slot - bar_w) / 2.0
        y = bottom - h
        parts.append(
            f'<rect x="{x!r}" y="{y!r}" width="{bar_w!r}" height="{h!r}" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{x + bar_w / 2.0!r}" y="{y - 6.0!r}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{value:g}</text>'
        )
        parts.append(
            f'<text x="{x + bar_w / 2.0!r}" y="{bottom + 18.0:g}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_svg_escape(name)}</text>'
        )
    return parts


def write_chart(spec: ChartSpec, path: str | Path) -> None:
    Path(path).write_text(render_chart(spec), encoding="utf-8", newline="\n")
