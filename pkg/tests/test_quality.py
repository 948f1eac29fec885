import math

import numpy as np
import pytest

from fairage import _kernels_py
from fairage.errors import MissingInputError, ValidationError
from fairage.ingest import RasterImage
from fairage.quality import (
    DEFAULT_QUALITY,
    PSNR_CAP_DB,
    PairMetrics,
    QualityConfig,
    evaluate_pairs,
    gate,
    gaussian_window,
    load_pairs,
    load_quality_metrics,
    psnr,
    ssim,
    to_intensity,
    write_quality_report,
)


def gray(arr):
    return RasterImage.from_array(np.asarray(arr, dtype=np.uint8))


def rand_gray(rng, h, w):
    return gray(rng.integers(0, 256, size=(h, w), dtype=np.uint8))


# ---------------------------------------------------------------- config


def test_config_stability_constants_follow_formula():
    cfg = DEFAULT_QUALITY
    assert cfg.c1 == (cfg.k1 * cfg.dynamic_range) ** 2
    assert cfg.c2 == (cfg.k2 * cfg.dynamic_range) ** 2
    assert abs(cfg.c1 - 6.5025) < 1e-12
    assert abs(cfg.c2 - 58.5225) < 1e-12


@pytest.mark.parametrize(
    "kwargs",
    [
        {"k1": 0.0},
        {"k2": -0.03},
        {"window_size": 0},
        {"window_size": 10},
        {"sigma": 0.0},
        {"dynamic_range": -255.0},
    ],
)
def test_config_rejects_bad_values(kwargs):
    with pytest.raises(ValidationError):
        QualityConfig(**kwargs)


# ---------------------------------------------------------------- window


def test_gaussian_window_normalized_symmetric_peaked():
    g = gaussian_window(11, 1.5)
    assert g.shape == (11,)
    assert g.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.array_equal(g, g[::-1])
    assert np.argmax(g) == 5
    # adjacent-to-center ratio is exp(-1/(2 sigma^2)) regardless of normalization
    assert g[6] / g[5] == pytest.approx(math.exp(-1.0 / (2.0 * 1.5 * 1.5)), rel=1e-12)


def test_gaussian_window_size_one_is_unit():
    assert np.array_equal(gaussian_window(1, 1.5), np.array([1.0]))


@pytest.mark.parametrize("size", [0, -3, 4])
def test_gaussian_window_rejects_bad_size(size):
    with pytest.raises(ValidationError):
        gaussian_window(size, 1.5)


# ---------------------------------------------------------------- intensity


def test_to_intensity_grayscale_passthrough():
    arr = np.arange(12, dtype=np.uint8).reshape(3, 4)
    out = to_intensity(gray(arr))
    assert out.dtype == np.float64
    assert np.array_equal(out, arr.astype(np.float64))


def test_to_intensity_rgb_luma():
    arr = np.zeros((2, 2, 3), dtype=np.uint8)
    arr[0, 0] = (255, 0, 0)
    arr[0, 1] = (0, 255, 0)
    arr[1, 0] = (0, 0, 255)
    arr[1, 1] = (10, 20, 30)
    out = to_intensity(RasterImage.from_array(arr))
    assert out[0, 0] == pytest.approx(0.299 * 255)
    assert out[0, 1] == pytest.approx(0.587 * 255)
    assert out[1, 0] == pytest.approx(0.114 * 255)
    assert out[1, 1] == pytest.approx(0.299 * 10 + 0.587 * 20 + 0.114 * 30)


# ---------------------------------------------------------------- ssim


def naive_ssim(x, y, cfg):
    """Direct per-window loop, no separability tricks."""
    g = gaussian_window(cfg.window_size, cfg.sigma)
    w2 = np.outer(g, g)
    k = cfg.window_size
    h, w = x.shape
    vals = []
    for i in range(h - k + 1):
        for j in range(w - k + 1):
            px = x[i : i + k, j : j + k]
            py = y[i : i + k, j : j + k]
            mu_x = float((w2 * px).sum())
            mu_y = float((w2 * py).sum())
            var_x = float((w2 * px * px).sum()) - mu_x * mu_x
            var_y = float((w2 * py * py).sum()) - mu_y * mu_y
            cov = float((w2 * px * py).sum()) - mu_x * mu_y
            num = (2 * mu_x * mu_y + cfg.c1) * (2 * cov + cfg.c2)
            den = (mu_x**2 + mu_y**2 + cfg.c1) * (var_x + var_y + cfg.c2)
            vals.append(num / den)
    return sum(vals) / len(vals)


def test_ssim_identity_is_one():
    rng = np.random.default_rng(7)
    img = rand_gray(rng, 16, 16)
    assert ssim(img, img) == pytest.approx(1.0, abs=1e-12)


def test_ssim_matches_naive_window_oracle():
    rng = np.random.default_rng(11)
    a = rng.integers(0, 256, size=(32, 32), dtype=np.uint8)
    b = np.clip(a.astype(int) + rng.integers(-25, 26, size=(32, 32)), 0, 255).astype(np.uint8)
    got = ssim(gray(a), gray(b))
    want = naive_ssim(a.astype(np.float64), b.astype(np.float64), DEFAULT_QUALITY)
    assert got == pytest.approx(want, abs=1e-9)


def test_ssim_flat_images_closed_form():
    p, q = 40.0, 44.0
    a = gray(np.full((24, 24), int(p), dtype=np.uint8))
    b = gray(np.full((24, 24), int(q), dtype=np.uint8))
    cfg = DEFAULT_QUALITY
    want = (2 * p * q + cfg.c1) / (p * p + q * q + cfg.c1)
    assert ssim(a, b) == pytest.approx(want, abs=1e-6)


def test_ssim_small_image_uses_single_global_window():
    rng = np.random.default_rng(3)
    xa = rng.integers(0, 256, size=(8, 8), dtype=np.uint8)
    xb = rng.integers(0, 256, size=(8, 8), dtype=np.uint8)
    x = xa.astype(np.float64)
    y = xb.astype(np.float64)
    cfg = DEFAULT_QUALITY
    mu_x, mu_y = x.mean(), y.mean()
    var_x = (x * x).mean() - mu_x**2
    var_y = (y * y).mean() - mu_y**2
    cov = (x * y).mean() - mu_x * mu_y
    want = ((2 * mu_x * mu_y + cfg.c1) * (2 * cov + cfg.c2)) / (
        (mu_x**2 + mu_y**2 + cfg.c1) * (var_x + var_y + cfg.c2)
    )
    assert ssim(gray(xa), gray(xb)) == pytest.approx(want, abs=1e-12)


def test_ssim_rgb_uses_luma_plane():
    rng = np.random.default_rng(5)
    rgb = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
    img = RasterImage.from_array(rgb)
    plane = to_intensity(img)
    got = ssim(img, img)
    assert got == pytest.approx(1.0, abs=1e-12)
    # sanity: intensity plane really is the luma mix, not a single channel
    assert not np.array_equal(plane, rgb[:, :, 0].astype(np.float64))


def test_ssim_rejects_size_mismatch():
    a = gray(np.zeros((4, 4), dtype=np.uint8))
    b = gray(np.zeros((4, 5), dtype=np.uint8))
    with pytest.raises(ValidationError, match="mismatch"):
        ssim(a, b)


def test_kernel_backends_agree():
    try:
        from fairage import _kernels
    except ImportError:
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(13)
    g = gaussian_window(11, 1.5)
    for _ in range(5):
        x = rng.uniform(0, 255, size=(20, 26))
        y = rng.uniform(0, 255, size=(20, 26))
        a = _kernels.ssim_mean_map(x, y, g, DEFAULT_QUALITY.c1, DEFAULT_QUALITY.c2)
        b = _kernels_py.ssim_mean_map(x, y, g, DEFAULT_QUALITY.c1, DEFAULT_QUALITY.c2)
        assert a == pytest.approx(b, abs=1e-9)


def test_python_kernel_rejects_undersized_input():
    g = gaussian_window(11, 1.5)
    x = np.zeros((5, 5))
    with pytest.raises(ValueError):
        _kernels_py.ssim_mean_map(x, x, g, 1.0, 1.0)


# ---------------------------------------------------------------- psnr


def test_psnr_identical_images_cap():
    img = gray(np.arange(16, dtype=np.uint8).reshape(4, 4))
    assert psnr(img, img) == PSNR_CAP_DB


def test_psnr_known_mse_exact():
    a = np.zeros((2, 2), dtype=np.uint8)
    b = a.copy()
    b[0, 0] = 51
    # MSE = 51^2/4 = 650.25, 255^2/650.25 = 100 exactly -> 20 dB
    assert psnr(gray(a), gray(b)) == 20.0


def test_psnr_black_vs_white_is_zero():
    a = gray(np.zeros((4, 4), dtype=np.uint8))
    b = gray(np.full((4, 4), 255, dtype=np.uint8))
    assert psnr(a, b) == 0.0


def test_psnr_monotone_decreasing_in_mse():
    rng = np.random.default_rng(17)
    base = rng.integers(0, 200, size=(8, 8), dtype=np.uint8)
    prev = math.inf
    for step in range(1, 9):
        noisy = np.clip(base.astype(int) + step * 6, 0, 255).astype(np.uint8)
        val = psnr(gray(base), gray(noisy))
        assert val < prev
        prev = val


def test_psnr_rejects_channel_mismatch():
    a = gray(np.zeros((4, 4), dtype=np.uint8))
    b = RasterImage.from_array(np.zeros((4, 4, 3), dtype=np.uint8))
    with pytest.raises(ValidationError, match="channel"):
        psnr(a, b)


# ---------------------------------------------------------------- gating


def pm(pid, s, p):
    return PairMetrics(pid, f"{pid}_ref", f"{pid}_gen", s, p)


def test_pass_boundary_is_inclusive():
    cfg = DEFAULT_QUALITY
    assert pm("a", cfg.min_ssim, cfg.min_psnr_db).passes(cfg)
    assert not pm("b", math.nextafter(cfg.min_ssim, -1.0), cfg.min_psnr_db).passes(cfg)
    assert not pm("c", cfg.min_ssim, math.nextafter(cfg.min_psnr_db, 0.0)).passes(cfg)


def test_gate_partitions_and_averages_over_all_pairs():
    cfg = DEFAULT_QUALITY
    ms = [pm("a", 0.9, 30.0), pm("b", 0.1, 30.0), pm("c", 0.9, 5.0)]
    rep = gate(ms, cfg)
    assert rep.accepted == ("a",)
    assert rep.rejected == ("b", "c")
    assert rep.mean_ssim == pytest.approx((0.9 + 0.1 + 0.9) / 3)
    assert rep.mean_psnr_db == pytest.approx((30.0 + 30.0 + 5.0) / 3)


def test_gate_empty_input_has_none_aggregates():
    rep = gate([])
    assert rep.pairs == ()
    assert rep.mean_ssim is None and rep.mean_psnr_db is None


# ---------------------------------------------------------------- file IO


def test_load_pairs_round_trip_and_errors(tmp_path):
    p = tmp_path / "pairs.csv"
    p.write_text("reference,generated\nr1.pgm,g1.pgm\nr2.pgm,g2.pgm\n")
    assert load_pairs(p) == [("r1.pgm", "g1.pgm"), ("r2.pgm", "g2.pgm")]

    with pytest.raises(MissingInputError):
        load_pairs(tmp_path / "absent.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("reference,generated\nonly_one_field\n")
    with pytest.raises(ValidationError, match="row 2"):
        load_pairs(bad)
    wrong = tmp_path / "wrong.csv"
    wrong.write_text("a,b\nx,y\n")
    with pytest.raises(ValidationError, match="header"):
        load_pairs(wrong)


def test_evaluate_pairs_resolves_against_base_dir(tmp_path):
    from fairage.ingest import write_image

    rng = np.random.default_rng(23)
    a = rng.integers(0, 256, size=(12, 12), dtype=np.uint8)
    sub = tmp_path / "imgs"
    sub.mkdir()
    write_image(RasterImage.from_array(a), sub / "ref.pgm")
    write_image(RasterImage.from_array(a), sub / "gen.pgm")
    out = evaluate_pairs([("ref.pgm", "gen.pgm")], base_dir=sub)
    assert len(out) == 1
    m = out[0]
    # stored paths stay as given, not resolved
    assert (m.reference, m.generated, m.pair_id) == ("ref.pgm", "gen.pgm", "gen.pgm")
    assert m.ssim == pytest.approx(1.0, abs=1e-12)
    assert m.psnr_db == PSNR_CAP_DB


def test_quality_report_round_trip(tmp_path):
    cfg = DEFAULT_QUALITY
    ms = [pm("g1.pgm", 0.875, 31.25), pm("g2.pgm", 0.0625, 8.5)]
    rep = gate(ms, cfg)
    metrics_path = tmp_path / "metrics.csv"
    summary_path = tmp_path / "summary.csv"
    write_quality_report(rep, cfg, metrics_path, summary_path)

    again = load_quality_metrics(metrics_path)
    assert again == ms

    lines = summary_path.read_text().splitlines()
    assert lines[0] == "key,value"
    got = dict(line.split(",") for line in lines[1:])
    assert got["pairs"] == "2"
    assert got["accepted"] == "1"
    assert got["rejected"] == "1"
    assert got["mean_ssim"] == "0.4688"
    assert got["mean_psnr_db"] == "19.8750"


def test_load_quality_metrics_rejects_bad_rows(tmp_path):
    header = "pair_id,reference,generated,ssim,psnr_db,passed\n"
    p = tmp_path / "m.csv"
    p.write_text(header + "a,r,g,not_a_float,10.0,1\n")
    with pytest.raises(ValidationError, match="row 2"):
        load_quality_metrics(p)
    p.write_text(header + "a,r,g,nan,10.0,1\n")
    with pytest.raises(ValidationError, match="non-finite"):
        load_quality_metrics(p)
