import xml.etree.ElementTree as ET

import pytest

from fairage.core import AgeGroup, Label, SourceDataset
from fairage.curation import analyze_distribution
from fairage.errors import ValidationError
from fairage.evaluation import MetricCell, MetricReport
from fairage.reporting import (
    ChartSpec,
    TableSpec,
    format_count,
    format_metric,
    pie_slice_angles,
    render_chart,
    render_distribution,
    render_metrics,
    render_text,
    write_chart,
    write_text_table,
)

from conftest import make_manifest

G = AgeGroup


# ---------------------------------------------------------------- formatting


@pytest.mark.parametrize(
    "value,want",
    [
        (None, "None"),
        (0.0, "0.0000"),
        (1.0, "1.0000"),
        (0.99995, "1.0000"),  # half rounds up
        (0.99994, "0.9999"),
        (0.00005, "0.0001"),
        (0.12344999, "0.1234"),
        (0.87654321, "0.8765"),
    ],
)
def test_format_metric(value, want):
    assert format_metric(value) == want


def test_format_count():
    assert format_count(25351) == "25351"


# ---------------------------------------------------------------- text tables


def test_table_spec_validates_arity_and_alignment():
    with pytest.raises(ValidationError, match="alignment"):
        TableSpec("t", ("a", "b"), (), ("l",))
    with pytest.raises(ValidationError, match="'l' or 'r'"):
        TableSpec("t", ("a",), (), ("c",))
    with pytest.raises(ValidationError, match="arity"):
        TableSpec("t", ("a", "b"), (("1",),), ("l", "r"))


def test_render_text_alignment_golden():
    spec = TableSpec(
        title="Demo",
        headers=("Name", "N"),
        rows=(("alpha", "7"), ("b", "1234")),
        align=("l", "r"),
    )
    want = (
        "Demo\n"
        "\n"
        "Name  |    N\n"
        "------+-----\n"
        "alpha |    7\n"
        "b     | 1234\n"
    )
    assert render_text(spec) == want


def test_write_text_table_round_trip(tmp_path):
    spec = TableSpec("T", ("A",), (("x",),), ("l",))
    p = tmp_path / "t.txt"
    write_text_table(spec, p)
    assert p.read_text() == render_text(spec)


# ---------------------------------------------------------------- distribution


def test_render_distribution_rows_and_columns():
    counts = {
        (Label.FAKE, G.G19_35, SourceDataset.CELEB_DF): 3,
        (Label.REAL, G.G0_10, SourceDataset.UTK_FACE): 5,
        (Label.REAL, G.G19_35, SourceDataset.FACE_FORENSICS): 2,
    }
    dist = analyze_distribution(make_manifest(counts))
    spec = render_distribution(dist)
    assert spec.headers == ("Label & Age Group", "UTKFace", "Celeb", "FaceForensics++")
    # fake rows come first, zero rows are dropped
    assert [r[0] for r in spec.rows] == ["fake (19-35)", "real (0-10)", "real (19-35)"]
    assert spec.rows[0][1:] == ("0", "3", "0")
    assert spec.rows[1][1:] == ("5", "0", "0")


def test_render_distribution_synthetic_column_appears_only_when_present():
    base = {(Label.REAL, G.G0_10, SourceDataset.UTK_FACE): 2}
    spec = render_distribution(analyze_distribution(make_manifest(base)))
    assert "Synthetic" not in spec.headers
    with_syn = dict(base)
    with_syn[(Label.FAKE, G.G0_10, SourceDataset.SYNTHETIC)] = 4
    spec2 = render_distribution(analyze_distribution(make_manifest(with_syn)))
    assert spec2.headers[-1] == "Synthetic"
    fake_row = [r for r in spec2.rows if r[0].startswith("fake")][0]
    assert fake_row[-1] == "4"


# ---------------------------------------------------------------- metric grid


def grid_report():
    cells = {
        ("m1", "tr", "teA", None): MetricCell(0.9983, 0.9821, 0.0123, 50, 50),
        ("m1", "tr", "teA", G.G19_35): MetricCell(0.91, 0.82, 0.11, 20, 20),
        ("m1", "tr", "teA", G.G36_50): MetricCell(None, None, None, 5, 0),
        ("m2", "tr", "teA", None): MetricCell(0.7, 0.6, 0.3, 50, 50),
        ("m1", "other", "teB", None): MetricCell(0.5, 0.5, 0.5, 4, 4),
    }
    return MetricReport(cells)


def test_render_metrics_one_table_per_train_set():
    specs = render_metrics(grid_report())
    assert [s.title for s in specs] == [
        "Evaluation metrics for models trained on tr",
        "Evaluation metrics for models trained on other",
    ]


def test_render_metrics_cell_placement_and_none():
    spec = render_metrics(grid_report())[0]
    assert spec.headers == ("Age Group", "Metric", "m1 [teA]", "m2 [teA]")
    rows = {(r[0], r[1]): r[2:] for r in spec.rows}
    assert rows[("Overall", "AUC")] == ("0.9983", "0.7000")
    assert rows[("Overall", "PAUC")] == ("0.9821", "0.6000")
    assert rows[("Overall", "EER")] == ("0.0123", "0.3000")
    assert rows[("19-35", "AUC")] == ("0.9100", "None")
    # stratum present but single-class: None metrics
    assert rows[("36-50", "AUC")] == ("None", "None")
    # age groups with no cells at all are omitted entirely
    assert ("0-10", "AUC") not in rows


def test_render_metrics_overall_block_first():
    spec = render_metrics(grid_report())[0]
    assert [r[0] for r in spec.rows[:3]] == ["Overall"] * 3
    assert [r[1] for r in spec.rows[:3]] == ["AUC", "PAUC", "EER"]


# ---------------------------------------------------------------- charts


def test_pie_slice_angles_proportional():
    angles = pie_slice_angles([("a", 1.0), ("b", 1.0)])
    assert angles == [(0.0, 180.0), (180.0, 180.0)]
    angles = pie_slice_angles([("a", 1.0), ("b", 1.0), ("c", 2.0)])
    assert angles == [(0.0, 90.0), (90.0, 90.0), (180.0, 180.0)]


def test_pie_slice_angles_zero_value_slice():
    angles = pie_slice_angles([("a", 0.0), ("b", 3.0)])
    assert angles[0] == (0.0, 0.0)
    assert angles[1] == (0.0, 360.0)


def test_chart_spec_validation():
    with pytest.raises(ValidationError, match="kind"):
        ChartSpec("scatter", "t", (("a", 1.0),))
    with pytest.raises(ValidationError, match="empty"):
        ChartSpec("pie", "t", ())
    with pytest.raises(ValidationError, match="non-negative"):
        ChartSpec("bar", "t", (("a", -1.0),))
    with pytest.raises(ValidationError, match="positive total"):
        ChartSpec("pie", "t", (("a", 0.0),))


def test_pie_svg_well_formed_with_slice_per_entry():
    spec = ChartSpec("pie", "Ages", (("kids", 2.0), ("adults", 6.0)))
    svg = render_chart(spec)
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    ns = "{http://www.w3.org/2000/svg}"
    paths = root.findall(f"{ns}path")
    assert len(paths) == 2
    texts = [t.text for t in root.findall(f"{ns}text")]
    assert "kids: 2" in texts and "adults: 6" in texts


def test_pie_single_slice_renders_full_circle():
    svg = render_chart(ChartSpec("pie", "All", (("only", 5.0),)))
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f"{ns}circle")) == 1
    assert len(root.findall(f"{ns}path")) == 0


def test_bar_svg_heights_proportional():
    spec = ChartSpec("bar", "Counts", (("a", 1.0), ("b", 3.0)))
    root = ET.fromstring(render_chart(spec))
    ns = "{http://www.w3.org/2000/svg}"
    bars = [r for r in root.findall(f"{ns}rect") if r.get("x") is not None]
    heights = [float(r.get("height")) for r in bars]
    assert len(heights) == 2
    assert heights[1] == pytest.approx(3.0 * heights[0])
    # tallest bar spans the full plot height
    assert heights[1] == pytest.approx(360.0 - 48.0)


def test_chart_deterministic_and_file_identical(tmp_path):
    spec = ChartSpec("pie", "T", (("x", 1.0), ("y", 2.0)))
    assert render_chart(spec) == render_chart(spec)
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    write_chart(spec, p1)
    write_chart(spec, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_chart_title_escaped():
    svg = render_chart(ChartSpec("bar", "a < b & c", (("x", 1.0),)))
    assert "a &lt; b &amp; c" in svg
    ET.fromstring(svg)
