"""Acceptance: stub-mode bridge output interoperates with the engine.

These tests import the engine (fairage) as the verification oracle; the
bridge itself never does. Network access is blocked for the duration, so a
pass also demonstrates that stub mode needs no downloads.
"""

import socket
from pathlib import Path

import pytest

from agebridge.cli import EXIT_OK, main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

fairage_ingest = pytest.importorskip("fairage.ingest", reason="engine not installed")
from fairage import quality as fairage_quality  # noqa: E402

FACES_DIR = str(FIXTURES / "faces")


@pytest.fixture(autouse=True)
def no_network(monkeypatch):
    def refuse(*args, **kwargs):
        raise AssertionError("stub mode must not touch the network")

    monkeypatch.setattr(socket, "socket", refuse)
    monkeypatch.setattr(socket, "create_connection", refuse)


def test_stub_annotate_passes_engine_strict_loader(tmp_path):
    out = tmp_path / "manifest.csv"
    code = main([
        "annotate", "--images", FACES_DIR, "--out", str(out),
        "--source", "utkface", "--label", "real",
    ])
    assert code == EXIT_OK
    manifest = fairage_ingest.load_manifest(out)
    assert len(manifest.records) == 3
    for record in manifest.records:
        assert record.source.value == "utkface"
        assert record.label.value == "real"


def test_stub_describe_passes_engine_strict_loader(tmp_path):
    out = tmp_path / "descriptors.csv"
    code = main(["describe", "--images", FACES_DIR, "--out", str(out)])
    assert code == EXIT_OK
    descriptors = fairage_ingest.load_descriptors(out)
    assert len(descriptors) == 3
    assert all(d.embedding.shape == (8,) for d in descriptors.values())


def test_stub_swap_pairs_pass_engine_loader_and_accounting_holds(tmp_path):
    plan = tmp_path / "plan.csv"
    plan.write_text(
        "source_id,target_id,cosine,attr_score,combined\n"
        "s1,t1,0.82,0.7,0.784\n"
        "s2,t2,0.64,0.9,0.718\n"
        "s2,ghost,0.5,0.5,0.5\n",
        encoding="utf-8",
    )
    out_dir = tmp_path / "out"
    code = main([
        "swap", "--plan", str(plan),
        "--media-dir", str(FIXTURES / "swap" / "media"),
        "--out-dir", str(out_dir),
    ])
    assert code == EXIT_OK

    pairs = fairage_quality.load_pairs(out_dir / "pairs.csv")
    assert len(pairs) == 2

    import csv

    with open(out_dir / "results.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))[1:]
    ok = sum(1 for r in rows if r[2] == "ok")
    failed = sum(1 for r in rows if r[2] == "failed")
    assert ok + failed == 3  # success + failure accounting equals plan size
    assert (ok, failed) == (2, 1)

    # the stub copies the target, so the engine's quality gate sees perfect pairs
    metrics = fairage_quality.evaluate_pairs(pairs, base_dir=out_dir)
    report = fairage_quality.gate(metrics)
    assert len(report.accepted) == 2
    assert all(abs(m.ssim - 1.0) < 1e-9 for m in report.pairs)


def test_extracted_frames_are_engine_compatible_rasters(tmp_path):
    frames_dir = tmp_path / "frames"
    code = main([
        "extract-frames", "--clip", str(FIXTURES / "clips" / "clip10.y4m"),
        "--out-dir", str(frames_dir), "--count", "4",
    ])
    assert code == EXIT_OK
    written = sorted(frames_dir.glob("*.png"))
    assert [p.name for p in written] == [
        "clip10_f000000.png", "clip10_f000003.png", "clip10_f000006.png", "clip10_f000009.png",
    ]
    image = fairage_ingest.load_image(written[0])
    assert (image.width, image.height) == (16, 16)
