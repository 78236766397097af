"""Change-point extraction and piecewise-constant reconstruction.

The fitted signal is rebuilt from per-segment sample means of the raw data,
not by inverting the transform: after unconnected thresholding an inverse
transform would no longer reproduce segment means.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import ContractError
from .thresholding import SurvivorSet, ThresholdConfig, threshold
from .transform import DetailCoefficient, MergeTree, Series, forward_transform


@dataclass(frozen=True)
class Segmentation:
    """Sorted change-points, segment means, and the fitted signal.

    A change-point at index b (1-based) means the level changes between
    window b and b+1.  Segment j covers windows bounds[j]+1 .. bounds[j+1].
    """

    change_points: tuple[int, ...]
    segment_bounds: tuple[int, ...]
    segment_means: np.ndarray
    fitted: np.ndarray
    sigma_used: Optional[float] = None
    lambda_used: Optional[float] = None
    n_stage1: Optional[int] = None
    n_kept: Optional[int] = None
    sigma_was_zero: bool = False

    @property
    def n_segments(self) -> int:
        return len(self.segment_means)


def extract_change_points(kept: Iterable[DetailCoefficient]) -> list[int]:
    """Sorted, deduplicated breakpoints of the surviving coefficients."""
    return sorted({d.b for d in kept})


def fit_segments(series: Series, change_points: Iterable[int]) -> Segmentation:
    """Fit per-segment sample means over half-open segments (b_j, b_{j+1}]."""
    n = series.n
    cps = list(change_points)
    if any(not 0 < b < n for b in cps):
        raise ContractError(f"change-points must lie strictly inside (0, {n})")
    if any(cps[i] >= cps[i + 1] for i in range(len(cps) - 1)):
        raise ContractError("change-points must be strictly increasing")

    bounds = [0, *cps, n]
    means = np.empty(len(bounds) - 1, dtype=float)
    fitted = np.empty(n, dtype=float)
    for j in range(len(bounds) - 1):
        lo, hi = bounds[j], bounds[j + 1]
        means[j] = series.values[lo:hi].mean()
        fitted[lo:hi] = means[j]
    return Segmentation(
        change_points=tuple(cps),
        segment_bounds=tuple(bounds),
        segment_means=means,
        fitted=fitted,
    )


def segment_tree(
    series: Series, tree: MergeTree, cfg: Optional[ThresholdConfig] = None
) -> Segmentation:
    """Threshold an existing merge tree and reconstruct.  Lets callers reuse
    one transform across several threshold configurations."""
    cfg = cfg or ThresholdConfig()
    surv = threshold(tree, cfg, series)
    return segment_from_survivors(series, surv)


def segment_from_survivors(series: Series, surv: SurvivorSet) -> Segmentation:
    cps = extract_change_points(surv.kept)
    seg = fit_segments(series, cps)
    return Segmentation(
        change_points=seg.change_points,
        segment_bounds=seg.segment_bounds,
        segment_means=seg.segment_means,
        fitted=seg.fitted,
        sigma_used=surv.sigma_used,
        lambda_used=surv.lambda_used,
        n_stage1=len(surv.stage1_kept),
        n_kept=len(surv.kept),
        sigma_was_zero=surv.sigma_was_zero,
    )


def segment(
    series: Series, cfg: Optional[ThresholdConfig] = None, rho: float = 0.01
) -> Segmentation:
    """Full pipeline: transform, two-stage threshold, reconstruct."""
    cfg = cfg or ThresholdConfig()
    tree = forward_transform(series, rho)
    return segment_tree(series, tree, cfg)
