"""Two-stage thresholding of a merge tree.

Stage 1 (connected) keeps a detail coefficient iff some coefficient in its
descendant closure exceeds the threshold in magnitude, which preserves the
unary-binary tree.  Stage 2 (unconnected) drops survivors whose left or right
arm is shorter than ``c_star`` windows, suppressing single-point spikes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractError
from .transform import DetailCoefficient, MergeTree, Series

MAD_SCALE = 1.4826  # Gaussian-consistent MAD factor


@dataclass(frozen=True)
class ThresholdConfig:
    """Thresholding parameters.

    ``lam`` / ``sigma`` of None mean "resolve automatically": sigma from the
    MAD estimator, lambda from the universal-threshold formula.
    """

    lam: Optional[float] = None
    sigma: Optional[float] = None
    c_star: int = 2
    lambda_constant: float = 1.01

    def __post_init__(self):
        if self.c_star < 1:
            raise ContractError(f"c_star must be >= 1, got {self.c_star}")
        if self.lam is not None and self.lam < 0:
            raise ContractError("lambda must be >= 0")
        if self.sigma is not None and self.sigma < 0:
            raise ContractError("sigma must be >= 0")

    def label(self) -> str:
        return f"cstar={self.c_star}"


@dataclass(frozen=True)
class SurvivorSet:
    """Coefficients surviving each thresholding stage, plus diagnostics."""

    kept: frozenset[DetailCoefficient]
    stage1_kept: frozenset[DetailCoefficient]
    sigma_used: float
    lambda_used: float
    sigma_was_zero: bool = False


def estimate_sigma(series: Series) -> float:
    """Noise level from the MAD of finest-scale balanced Haar coefficients.

    w_i = (y_{i+1} - y_i) / sqrt(2); returns 1.4826 * median|w - median(w)|.
    """
    if series.n < 2:
        raise ContractError("sigma estimation needs at least 2 points")
    w = np.diff(series.values) / math.sqrt(2.0)
    return float(MAD_SCALE * np.median(np.abs(w - np.median(w))))


def default_lambda(sigma: float, n: int, inflation_constant: float = 1.01) -> float:
    """Universal threshold sigma * sqrt(2 * (1 + 0.01) * ln(n))."""
    if n < 2:
        raise ContractError("default_lambda needs n >= 2")
    if sigma < 0:
        raise ContractError("sigma must be >= 0")
    return sigma * math.sqrt(2.0 * inflation_constant * math.log(n))


def connected_threshold(tree: MergeTree, lam: float) -> frozenset[DetailCoefficient]:
    """Keep every detail whose descendant closure (self included) contains a
    coefficient with |value| strictly greater than ``lam``.

    The result is upward-closed: a kept coefficient's ancestors are kept.
    """
    if lam < 0:
        raise ContractError("lambda must be >= 0")
    subtree_max = tree.subtree_max_abs()
    return frozenset(
        d for d, m in zip(tree.details, subtree_max) if m > lam
    )


def unconnected_threshold(
    stage1: frozenset[DetailCoefficient], c_star: int
) -> frozenset[DetailCoefficient]:
    """Drop survivors with either arm shorter than ``c_star`` windows.

    With c_star = 1 this is the identity, so the pipeline reduces to plain
    connected thresholding.
    """
    if c_star < 1:
        raise ContractError(f"c_star must be >= 1, got {c_star}")
    return frozenset(
        d for d in stage1 if d.left_arm >= c_star and d.right_arm >= c_star
    )


def threshold(
    tree: MergeTree,
    cfg: ThresholdConfig,
    series: Optional[Series] = None,
) -> SurvivorSet:
    """Resolve sigma/lambda and apply both thresholding stages.

    ``series`` is only required when sigma must be estimated.  A zero sigma
    estimate (constant or noiseless data) yields lambda = 0 and sets the
    ``sigma_was_zero`` flag rather than inventing a floor.
    """
    sigma_used = 0.0
    sigma_zero = False
    if cfg.lam is not None:
        lam = cfg.lam
        if cfg.sigma is not None:
            sigma_used = cfg.sigma
    else:
        if not tree.details:
            return SurvivorSet(
                kept=frozenset(), stage1_kept=frozenset(),
                sigma_used=0.0, lambda_used=0.0,
            )
        if cfg.sigma is not None:
            sigma_used = cfg.sigma
        else:
            if series is None:
                raise ContractError("series required to estimate sigma")
            sigma_used = estimate_sigma(series)
        if sigma_used == 0.0:
            sigma_zero = True
            lam = 0.0
        else:
            lam = default_lambda(sigma_used, tree.n, cfg.lambda_constant)

    stage1 = connected_threshold(tree, lam)
    kept = unconnected_threshold(stage1, cfg.c_star)
    return SurvivorSet(
        kept=kept,
        stage1_kept=stage1,
        sigma_used=sigma_used,
        lambda_used=lam,
        sigma_was_zero=sigma_zero,
    )
