"""Pure NumPy SSIM kernel, used when the compiled extension is unavailable.

The windowed means are computed with a separable valid-mode correlation,
which is exact for the Gaussian window (an outer product of its 1-D form).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def ssim_mean_map(
    x: np.ndarray,
    y: np.ndarray,
    window: np.ndarray,
    c1: float,
    c2: float,
) -> float:
    """Mean of the SSIM map over all valid positions of the 1-D window's
    separable 2-D extension. Inputs must already be 2-D float intensity
    arrays at least as large as the window."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    g = np.ascontiguousarray(window, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
    if x.shape[0] < g.size or x.shape[1] < g.size:
        raise ValueError("image smaller than window")

    mu_x = _sep_valid(x, g)
    mu_y = _sep_valid(y, g)
    m_xx = _sep_valid(x * x, g)
    m_yy = _sep_valid(y * y, g)
    m_xy = _sep_valid(x * y, g)

    var_x = m_xx - mu_x * mu_x
    var_y = m_yy - mu_y * mu_y
    cov = m_xy - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def _sep_valid(a: np.ndarray, g: np.ndarray) -> np.ndarray:
    k = g.size
    h, w = a.shape
    rows = np.zeros((h, w - k + 1), dtype=np.float64)
    for j in range(k):
        rows += g[j] * a[:, j : j + w - k + 1]
    out = np.zeros((h - k + 1, w - k + 1), dtype=np.float64)
    for i in range(k):
        out += g[i] * rows[i : i + h - k + 1, :]
    return out
