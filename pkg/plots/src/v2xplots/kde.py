"""Gaussian kernel density over histogram bins, Scott's-rule bandwidth.

The analysis pipeline exports histograms rather than raw samples, so the
violin outline is a weighted KDE over bin centers (bin-center resampling).
"""

from __future__ import annotations

import numpy as np

# Never let the kernel collapse below half a histogram bin.
MIN_BANDWIDTH_DB = 0.5


def scott_bandwidth(centers: np.ndarray, weights: np.ndarray) -> float:
    n = weights.sum()
    mean = np.average(centers, weights=weights)
    var = np.average((centers - mean) ** 2, weights=weights)
    return max(float(np.sqrt(var)) * float(n) ** (-1 / 5), MIN_BANDWIDTH_DB)


def histogram_kde(
    bin_left: np.ndarray, counts: np.ndarray, bin_width: float, grid_points: int = 240
) -> tuple[np.ndarray, np.ndarray]:
    """Density curve (grid, density) reconstructed from one histogram."""
    mask = counts > 0
    if not mask.any():
        raise ValueError("histogram has no occupied bins")
    centers = bin_left[mask] + 0.5 * bin_width
    weights = counts[mask].astype(float)
    bw = scott_bandwidth(centers, weights)
    lo = centers.min() - 3.5 * bw
    hi = centers.max() + 3.5 * bw
    grid = np.linspace(lo, hi, grid_points)
    z = (grid[:, None] - centers[None, :]) / bw
    kernels = np.exp(-0.5 * z**2) / (bw * np.sqrt(2.0 * np.pi))
    density = kernels @ (weights / weights.sum())
    return grid, density
