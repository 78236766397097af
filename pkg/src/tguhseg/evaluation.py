"""Scoring of estimated change-points and replicate-level benchmarking.

Matching follows a closest-first rule: candidate (truth, estimate) pairs
within the tolerance window are accepted in order of increasing distance,
ties broken by earlier truth then earlier estimate, each point matched at
most once.  FPR uses (n - 1) - |truth| candidate negatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ContractError
from .reconstruction import extract_change_points, fit_segments
from .simulate import (
    PiecewiseSignal,
    SimulationScenario,
    generate_replicate,
    with_sigma,
)
from .thresholding import (
    ThresholdConfig,
    default_lambda,
    estimate_sigma,
    threshold,
)
from .transform import forward_transform

DEFAULT_ROC_SWEEP = tuple(np.geomspace(0.1, 3.0, 30))
PARTIAL_AUC_FP_CUTOFF = 20


@dataclass(frozen=True)
class MatchResult:
    tp: int
    fp: int
    fn: int
    matched_pairs: tuple[tuple[int, int], ...]
    tpr: float
    fpr: float


def match_change_points(
    truth: Sequence[int],
    estimated: Sequence[int],
    window: int = 2,
    n: Optional[int] = None,
) -> MatchResult:
    """Match estimates to true change-points within +/- window.

    ``n`` (series length) is needed for the FPR denominator; without it FPR
    is reported as NaN.
    """
    truth = sorted(set(truth))
    estimated = sorted(set(estimated))
    candidates = sorted(
        (abs(t - e), t, e)
        for t in truth
        for e in estimated
        if abs(t - e) <= window
    )
    matched_t: set[int] = set()
    matched_e: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for _, t, e in candidates:
        if t in matched_t or e in matched_e:
            continue
        matched_t.add(t)
        matched_e.add(e)
        pairs.append((t, e))

    tp = len(pairs)
    fp = len(estimated) - tp
    fn = len(truth) - tp
    tpr = tp / len(truth) if truth else 1.0
    if n is None:
        fpr = float("nan")
    else:
        negatives = (n - 1) - len(truth)
        fpr = fp / negatives if negatives > 0 else 0.0
    return MatchResult(tp=tp, fp=fp, fn=fn, matched_pairs=tuple(pairs), tpr=tpr, fpr=fpr)


def short_segment_tpr(
    truth_signal: PiecewiseSignal,
    match: MatchResult,
    theta: float = 0.1,
    short_range: tuple[int, int] = (6, 10),
) -> Optional[float]:
    """TPR restricted to change-points bounding short segments.

    Returns None when the truth contains no short segments.
    """
    short = truth_signal.short_boundaries(theta=theta, short_range=short_range)
    if not short:
        return None
    matched = {t for t, _ in match.matched_pairs}
    return len(short & matched) / len(short)


def mse(fitted: np.ndarray, truth: np.ndarray) -> float:
    fitted = np.asarray(fitted, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if fitted.shape != truth.shape:
        raise ContractError("fitted and truth must have equal length")
    return float(np.mean((fitted - truth) ** 2))


@dataclass
class EvalReport:
    """Aggregated metrics plus the per-replicate values behind them.

    ``rows`` holds one dict per (sigma, config) with keys sigma, config,
    atpr, afpr, atprsh (may be None), amse.  ``replicate_metrics`` maps
    (sigma, config) to per-metric arrays across replicates.
    """

    rows: list[dict]
    replicate_metrics: dict[tuple[float, str], dict[str, np.ndarray]]
    metadata: dict = field(default_factory=dict)

    def metric(self, sigma: float, config: str, name: str):
        for row in self.rows:
            if row["sigma"] == sigma and row["config"] == config:
                return row[name]
        raise KeyError((sigma, config, name))


def run_scenario(
    scenario: SimulationScenario,
    configs: Sequence[ThresholdConfig],
    rho: float = 0.01,
    window: int = 2,
    theta: float = 0.1,
) -> EvalReport:
    """Generate, segment, and score every replicate for every sigma/config.

    The forward transform is shared across configs within a replicate.
    Fully deterministic given the scenario's base seed.
    """
    labels = [cfg.label() for cfg in configs]
    if len(set(labels)) != len(labels):
        raise ContractError("threshold configs must have distinct labels")

    signal = scenario.signal
    truth_values = signal.values()
    truth_cps = signal.change_points(theta)
    has_short = bool(
        signal.short_boundaries(theta=theta, short_range=scenario.short_segment_range)
    )
    n = truth_values.size

    rows = []
    per_rep: dict[tuple[float, str], dict[str, np.ndarray]] = {}
    for si, sigma in enumerate(scenario.sigma_grid):
        sc = with_sigma(scenario, sigma, si)
        acc = {lab: {"tpr": [], "fpr": [], "tprsh": [], "mse": []} for lab in labels}
        for r in range(1, sc.replicates + 1):
            rep = generate_replicate(sc, r, theta=theta)
            tree = forward_transform(rep.series, rho)
            for cfg, lab in zip(configs, labels):
                surv = threshold(tree, cfg, rep.series)
                cps = extract_change_points(surv.kept)
                seg = fit_segments(rep.series, cps)
                m = match_change_points(truth_cps, cps, window=window, n=n)
                acc[lab]["tpr"].append(m.tpr)
                acc[lab]["fpr"].append(m.fpr)
                if has_short:
                    acc[lab]["tprsh"].append(
                        short_segment_tpr(
                            signal, m, theta=theta,
                            short_range=sc.short_segment_range,
                        )
                    )
                acc[lab]["mse"].append(mse(seg.fitted, rep.truth))
        for lab in labels:
            arrays = {k: np.asarray(v, dtype=float) for k, v in acc[lab].items() if v}
            per_rep[(sigma, lab)] = arrays
            rows.append({
                "sigma": sigma,
                "config": lab,
                "atpr": float(arrays["tpr"].mean()),
                "afpr": float(arrays["fpr"].mean()),
                "atprsh": float(arrays["tprsh"].mean()) if "tprsh" in arrays else None,
                "amse": float(arrays["mse"].mean()),
            })

    meta = {
        "replicates": scenario.replicates,
        "base_seed": scenario.base_seed,
        "noise": scenario.noise.kind,
        "alpha": scenario.noise.contamination_prob,
        "inflation": scenario.noise.inflation,
        "sigma_grid": list(scenario.sigma_grid),
        "rho": rho,
        "match_window": window,
        "theta": theta,
        "configs": labels,
        "rng": "numpy PCG64, SeedSequence([base_seed, sigma_index, replicate])",
    }
    return EvalReport(rows=rows, replicate_metrics=per_rep, metadata=meta)


@dataclass(frozen=True)
class RocPoint:
    scale: float
    mean_fpr: float
    mean_tpr: float
    mean_fp: float


@dataclass
class RocResult:
    points: tuple[RocPoint, ...]
    auc: float
    partial_auc: float
    metadata: dict = field(default_factory=dict)


def _trapezoid_auc(points: Sequence[tuple[float, float]]) -> float:
    """Trapezoidal area with endpoint extension to (0,0) and (1,1)."""
    pts = sorted(points)
    pts = [(0.0, 0.0), *pts, (1.0, 1.0)]
    fpr = np.array([p[0] for p in pts])
    tpr = np.array([p[1] for p in pts])
    return float(np.trapezoid(tpr, fpr))


def _partial_auc(points: Sequence[RocPoint], fp_cutoff: float) -> float:
    """AUC over the low-false-positive region, normalized by its FPR span.

    With a degenerate span (all early-retrieval points at one FPR) the mean
    TPR of the region is returned, so a perfect detector scores 1.
    """
    region = sorted(
        ((p.mean_fpr, p.mean_tpr) for p in points if p.mean_fp < fp_cutoff)
    )
    if not region:
        return 0.0
    fpr = np.array([p[0] for p in region])
    tpr = np.array([p[1] for p in region])
    span = float(fpr[-1] - fpr[0])
    if span <= 0.0:
        return float(tpr.mean())
    return float(np.trapezoid(tpr, fpr) / span)


def roc_curve(
    scenario: SimulationScenario,
    cfg: ThresholdConfig,
    sweep: Sequence[float] = DEFAULT_ROC_SWEEP,
    rho: float = 0.01,
    window: int = 2,
    theta: float = 0.1,
) -> RocResult:
    """Sweep a multiplicative factor on the default threshold and record the
    mean TPR/FPR per factor.  Uses the scenario's single noise sigma."""
    sweep = [float(s) for s in sweep]
    if not sweep or any(s <= 0 for s in sweep):
        raise ContractError("sweep grid must be non-empty and positive")

    signal = scenario.signal
    truth_cps = signal.change_points(theta)
    n = signal.n
    sums = {s: {"tpr": 0.0, "fpr": 0.0, "fp": 0.0} for s in sweep}
    for r in range(1, scenario.replicates + 1):
        rep = generate_replicate(scenario, r, theta=theta)
        tree = forward_transform(rep.series, rho)
        sigma_hat = cfg.sigma if cfg.sigma is not None else estimate_sigma(rep.series)
        lam0 = (
            default_lambda(sigma_hat, n, cfg.lambda_constant)
            if sigma_hat > 0
            else 0.0
        )
        subtree_max = tree.subtree_max_abs()
        arm_ok = np.array(
            [d.left_arm >= cfg.c_star and d.right_arm >= cfg.c_star for d in tree.details]
        )
        breakpoints = np.array([d.b for d in tree.details])
        for s in sweep:
            lam = s * lam0
            kept_mask = (subtree_max > lam) & arm_ok
            cps = sorted(set(breakpoints[kept_mask].tolist()))
            m = match_change_points(truth_cps, cps, window=window, n=n)
            sums[s]["tpr"] += m.tpr
            sums[s]["fpr"] += m.fpr
            sums[s]["fp"] += m.fp

    nr = scenario.replicates
    points = tuple(
        RocPoint(
            scale=s,
            mean_fpr=sums[s]["fpr"] / nr,
            mean_tpr=sums[s]["tpr"] / nr,
            mean_fp=sums[s]["fp"] / nr,
        )
        for s in sweep
    )
    auc = _trapezoid_auc([(p.mean_fpr, p.mean_tpr) for p in points])
    pauc = _partial_auc(points, PARTIAL_AUC_FP_CUTOFF)
    meta = {
        "sigma": scenario.noise.sigma,
        "config": cfg.label(),
        "sweep": sweep,
        "replicates": nr,
        "fp_cutoff": PARTIAL_AUC_FP_CUTOFF,
    }
    return RocResult(points=points, auc=auc, partial_auc=pauc, metadata=meta)
