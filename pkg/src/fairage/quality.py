"""SSIM/PSNR computation and pass/fail gating of generated frames.

The SSIM window statistics run on a compiled kernel when the extension built;
otherwise a NumPy fallback with identical semantics is used. Set the
environment variable FAIRAGE_FORCE_PY_KERNELS=1 to force the fallback.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from fairage.errors import MissingInputError, ValidationError
from fairage.ingest import RasterImage, load_image


def _select_backend():
    forced = os.environ.get("FAIRAGE_FORCE_PY_KERNELS", "")
    if forced and forced != "0":
        from fairage import _kernels_py
        return _kernels_py
    try:
        from fairage import _kernels
        return _kernels
    except ImportError:
        from fairage import _kernels_py
        return _kernels_py


_kernel_mod = _select_backend()
KERNEL_BACKEND: str = _kernel_mod.BACKEND

# ITU-R 601 luma weights for the RGB -> intensity conversion.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)
PSNR_CAP_DB = 99.0


@dataclass(frozen=True)
class QualityConfig:
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0
    window_size: int = 11
    sigma: float = 1.5
    min_ssim: float = 0.2
    min_psnr_db: float = 10.0

    def __post_init__(self):
        if self.k1 <= 0.0 or self.k2 <= 0.0:
            raise ValidationError("K1 and K2 must be positive")
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise ValidationError(f"window size must be odd and positive, got {self.window_size}")
        if self.sigma <= 0.0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}")
        if self.dynamic_range <= 0.0:
            raise ValidationError(f"dynamic range must be positive, got {self.dynamic_range}")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


DEFAULT_QUALITY = QualityConfig()


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """1-D Gaussian window normalized to sum 1; its outer product with
    itself is the 2-D SSIM window."""
    if size < 1 or size % 2 == 0:
        raise ValidationError(f"window size must be odd and positive, got {size}")
    half = size // 2
    xs = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    return g / g.sum()


def to_intensity(image: RasterImage) -> np.ndarray:
    """Float64 intensity plane: the single channel as-is for grayscale,
    the ITU-R 601 luma combination for RGB."""
    arr = image.to_array().astype(np.float64)
    if image.channels == 1:
        return arr[:, :, 0]
    return arr[:, :, 0] * LUMA_WEIGHTS[0] + arr[:, :, 1] * LUMA_WEIGHTS[1] + arr[:, :, 2] * LUMA_WEIGHTS[2]


def _check_same_shape(a: RasterImage, b: RasterImage) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise ValidationError(
            f"image size mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def ssim(a: RasterImage, b: RasterImage, cfg: QualityConfig = DEFAULT_QUALITY) -> float:
    """Mean structural similarity over valid window positions.

    Images smaller than the window fall back to a single uniform window
    spanning the whole image.
    """
    _check_same_shape(a, b)
    x = to_intensity(a)
    y = to_intensity(b)
    if x.shape[0] < cfg.window_size or x.shape[1] < cfg.window_size:
        return _ssim_global(x, y, cfg.c1, cfg.c2)
    window = gaussian_window(cfg.window_size, cfg.sigma)
    return float(_kernel_mod.ssim_mean_map(x, y, window, cfg.c1, cfg.c2))


def _ssim_global(x: np.ndarray, y: np.ndarray, c1: float, c2: float) -> float:
    mu_x = float(x.mean())
    mu_y = float(y.mean())
    var_x = float((x * x).mean()) - mu_x * mu_x
    var_y = float((y * y).mean()) - mu_y * mu_y
    cov = float((x * y).mean()) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return num / den


def psnr(a: RasterImage, b: RasterImage, cfg: QualityConfig = DEFAULT_QUALITY) -> float:
    """Peak signal-to-noise ratio in dB over all channels jointly; identical
    images saturate at PSNR_CAP_DB."""
    _check_same_shape(a, b)
    if a.channels != b.channels:
        raise ValidationError(f"channel mismatch: {a.channels} vs {b.channels}")
    xa = a.to_array().astype(np.float64)
    xb = b.to_array().astype(np.float64)
    diff = xa - xb
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_CAP_DB
    return 10.0 * math.log10((cfg.dynamic_range * cfg.dynamic_range) / mse)


@dataclass(frozen=True)
class PairMetrics:
    """Quality metrics for one (reference, generated) frame pair."""

    pair_id: str
    reference: str
    generated: str
    ssim: float
    psnr_db: float

    def passes(self, cfg: QualityConfig) -> bool:
        return self.ssim >= cfg.min_ssim and self.psnr_db >= cfg.min_psnr_db


@dataclass(frozen=True)
class QualityReport:
    pairs: tuple[PairMetrics, ...]
    accepted: tuple[str, ...]
    rejected: tuple[str, ...]
    mean_ssim: float | None
    mean_psnr_db: float | None


def gate(metrics: list[PairMetrics], cfg: QualityConfig = DEFAULT_QUALITY) -> QualityReport:
    """Split pairs into accepted and rejected by the thresholds; aggregates
    are plain means over all pairs, None when there are no pairs."""
    accepted = tuple(m.pair_id for m in metrics if m.passes(cfg))
    rejected = tuple(m.pair_id for m in metrics if not m.passes(cfg))
    if metrics:
        mean_ssim = sum(m.ssim for m in metrics) / len(metrics)
        mean_psnr = sum(m.psnr_db for m in metrics) / len(metrics)
    else:
        mean_ssim = None
        mean_psnr = None
    return QualityReport(tuple(metrics), accepted, rejected, mean_ssim, mean_psnr)


PAIRS_HEADER = ["reference", "generated"]
METRICS_HEADER = ["pair_id", "reference", "generated", "ssim", "psnr_db", "passed"]


def load_pairs(path: str | Path) -> list[tuple[str, str]]:
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(f"input file not found: {p}")
    pairs = []
    with open(p, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PAIRS_HEADER:
            raise ValidationError(f"{p}: expected header {PAIRS_HEADER}, got {header}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != 2 or not row[0] or not row[1]:
                raise ValidationError(f"{p} row {line_no}: expected reference,generated paths")
            pairs.append((row[0], row[1]))
    return pairs


def evaluate_pairs(
    pairs: list[tuple[str, str]],
    cfg: QualityConfig = DEFAULT_QUALITY,
    base_dir: str | Path | None = None,
) -> list[PairMetrics]:
    """Compute SSIM/PSNR for each (reference, generated) path pair.

    Relative paths are resolved against base_dir, but the metrics keep the
    paths exactly as given so emitted reports stay location-independent.
    """
    base = Path(base_dir) if base_dir is not None else None
    out = []
    for ref, gen in pairs:
        ref_path = Path(ref)
        gen_path = Path(gen)
        if base is not None:
            if not ref_path.is_absolute():
                ref_path = base / ref_path
            if not gen_path.is_absolute():
                gen_path = base / gen_path
        a = load_image(ref_path)
        b = load_image(gen_path)
        out.append(PairMetrics(gen, ref, gen, ssim(a, b, cfg), psnr(a, b, cfg)))
    return out


def write_quality_report(
    report: QualityReport,
    cfg: QualityConfig,
    metrics_path: str | Path,
    summary_path: str | Path | None = None,
) -> None:
    with open(metrics_path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        for m in report.pairs:
            writer.writerow(
                [m.pair_id, m.reference, m.generated,
                 repr(m.ssim), repr(m.psnr_db), "1" if m.passes(cfg) else "0"]
            )
    if summary_path is None:
        return
    from fairage.reporting import format_metric

    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["key", "value"])
        writer.writerow(["pairs", str(len(report.pairs))])
        writer.writerow(["accepted", str(len(report.accepted))])
        writer.writerow(["rejected", str(len(report.rejected))])
        writer.writerow(["mean_ssim", format_metric(report.mean_ssim)])
        writer.writerow(["mean_psnr_db", format_metric(report.mean_psnr_db)])


def load_quality_metrics(path: str | Path) -> list[PairMetrics]:
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(f"input file not found: {p}")
    out = []
    with open(p, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != METRICS_HEADER:
            raise ValidationError(f"{p}: expected header {METRICS_HEADER}, got {header}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(METRICS_HEADER):
                raise ValidationError(f"{p} row {line_no}: expected {len(METRICS_HEADER)} fields")
            try:
                ssim_v = float(row[3])
                psnr_v = float(row[4])
            except ValueError:
                raise ValidationError(f"{p} row {line_no}: unparseable metric") from None
            if not (math.isfinite(ssim_v) and math.isfinite(psnr_v)):
                raise ValidationError(f"{p} row {line_no}: non-finite metric")
            out.append(PairMetrics(row[0], row[1], row[2], ssim_v, psnr_v))
    return out
