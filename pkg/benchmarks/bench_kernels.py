"""Benchmark the compiled SSIM window kernel against the NumPy fallback.

Runs both backends on the same random image pairs, checks they agree to
within 1e-9, and prints a timing table. Usage:

    python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from fairage import _kernels_py
from fairage.quality import DEFAULT_QUALITY, gaussian_window

try:
    from fairage import _kernels
except ImportError:
    _kernels = None

SIZES = [(64, 64), (128, 128), (256, 256), (512, 512), (720, 1280)]
AGREEMENT_TOL = 1e-9


def _time(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats per size (best-of)")
    args = parser.parse_args()

    if _kernels is None:
        print("compiled kernel not built; showing fallback timings only", file=sys.stderr)

    cfg = DEFAULT_QUALITY
    window = gaussian_window(cfg.window_size, cfg.sigma)
    rng = np.random.default_rng(42)

    header = f"{'size':>10} | {'python':>10} | {'compiled':>10} | {'speedup':>7} | agreement"
    print(header)
    print("-" * len(header))
    worst = 0.0
    for h, w in SIZES:
        x = rng.integers(0, 256, size=(h, w)).astype(np.float64)
        y = np.clip(x + rng.normal(scale=12.0, size=(h, w)), 0, 255)
        kernel_args = (x, y, window, cfg.c1, cfg.c2)

        size = f"{h}x{w}"
        t_py = _time(_kernels_py.ssim_mean_map, kernel_args, args.repeats)
        if _kernels is None:
            print(f"{size:>10} | {t_py * 1e3:>8.2f}ms | {'-':>10} | {'-':>7} |")
            continue

        t_c = _time(_kernels.ssim_mean_map, kernel_args, args.repeats)
        v_py = _kernels_py.ssim_mean_map(*kernel_args)
        v_c = _kernels.ssim_mean_map(*kernel_args)
        diff = abs(v_py - v_c)
        worst = max(worst, diff)
        status = "ok" if diff <= AGREEMENT_TOL else f"DIVERGED ({diff:.3e})"
        print(
            f"{size:>10} | {t_py * 1e3:>8.2f}ms | {t_c * 1e3:>8.2f}ms"
            f" | {t_py / t_c:>6.2f}x | {status}"
        )

    if _kernels is not None:
        print(f"\nworst |python - compiled| = {worst:.3e} (tolerance {AGREEMENT_TOL:.0e})")
        if worst > AGREEMENT_TOL:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
