"""Unit tests for change-point scoring and the benchmark harness."""

import itertools

import numpy as np
import pytest

from tguhseg import (
    ContractError,
    NoiseModel,
    SimulationScenario,
    ThresholdConfig,
    builtin_signal,
    match_change_points,
    mse,
    roc_curve,
    run_scenario,
    short_segment_tpr,
)
from tguhseg.evaluation import _trapezoid_auc
from tguhseg.simulate import PiecewiseSignal


def oracle_match_pairs(truth, estimated, window):
    """Exhaustive search: among all maximal matchings of within-window pairs,
    pick the one whose sorted (distance, truth, estimate) key sequence is
    lexicographically smallest."""
    candidates = [
        (abs(t - e), t, e)
        for t in truth
        for e in estimated
        if abs(t - e) <= window
    ]

    def compatible(matching, pair):
        return all(p[1] != pair[1] and p[2] != pair[2] for p in matching)

    matchings = [[]]
    for r in range(1, len(candidates) + 1):
        for combo in itertools.combinations(candidates, r):
            ok = all(
                a[1] != b[1] and a[2] != b[2]
                for a, b in itertools.combinations(combo, 2)
            )
            if ok:
                matchings.append(list(combo))
    maximal = [
        m for m in matchings
        if not any(compatible(m, c) for c in candidates if c not in m)
    ]
    best = min(maximal, key=lambda m: sorted(m))
    return {(t, e) for _, t, e in best}


class TestMatchChangePoints:
    def test_equidistant_tie(self):
        m = match_change_points([10, 50], [9, 11, 60], window=2, n=100)
        assert (m.tp, m.fp, m.fn) == (1, 2, 1)
        assert m.matched_pairs == ((10, 9),)  # earlier-index estimate wins

    def test_perfect_detection(self):
        m = match_change_points([5, 10], [5, 10], window=2, n=50)
        assert (m.tp, m.fp, m.fn) == (2, 0, 0)
        assert m.tpr == 1.0 and m.fpr == 0.0

    def test_empty_estimate(self):
        m = match_change_points([30], [], window=2, n=60)
        assert (m.tp, m.fp, m.fn) == (0, 0, 1)

    def test_fpr_denominator(self):
        # negatives = (n - 1) - |truth|
        m = match_change_points([10], [40], window=2, n=21)
        assert m.fpr == pytest.approx(1 / 19)

    def test_conservation(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            truth = sorted(rng.choice(30, size=rng.integers(0, 5), replace=False) + 1)
            est = sorted(rng.choice(30, size=rng.integers(0, 5), replace=False) + 1)
            m = match_change_points(truth, est, window=2, n=31)
            assert m.tp + m.fp == len(set(est))
            assert m.tp + m.fn == len(set(truth))

    def test_shift_invariance(self):
        truth, est = [10, 20], [9, 22, 25]
        a = match_change_points(truth, est, window=2, n=100)
        b = match_change_points([t + 7 for t in truth], [e + 7 for e in est],
                                window=2, n=100)
        assert (a.tp, a.fp, a.fn) == (b.tp, b.fp, b.fn)

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            truth = sorted(set(rng.integers(1, 31, size=rng.integers(1, 6)).tolist()))
            est = sorted(set(rng.integers(1, 31, size=rng.integers(1, 6)).tolist()))
            m = match_change_points(truth, est, window=2, n=31)
            assert set(m.matched_pairs) == oracle_match_pairs(truth, est, 2)


class TestShortSegmentTpr:
    def test_all_matched(self):
        sig = builtin_signal("F3")
        m = match_change_points([147, 153], [147, 153], window=2, n=300)
        assert short_segment_tpr(sig, m) == 1.0

    def test_half_matched(self):
        sig = builtin_signal("F3")
        m = match_change_points([147, 153], [147], window=2, n=300)
        assert short_segment_tpr(sig, m) == 0.5

    def test_none_matched(self):
        sig = builtin_signal("F1")
        m = match_change_points(list(sig.change_points()), [], window=2, n=sig.n)
        assert short_segment_tpr(sig, m) == 0.0

    def test_no_short_segments(self):
        sig = PiecewiseSignal(lengths=(50, 50), levels=(0.0, 1.0))
        m = match_change_points([50], [50], window=2, n=100)
        assert short_segment_tpr(sig, m) is None


class TestMse:
    def test_identical(self):
        assert mse(np.ones(5), np.ones(5)) == 0.0

    def test_constant_offset(self):
        assert mse(np.ones(8) + 0.1, np.ones(8)) == pytest.approx(0.01)

    def test_single_miss(self):
        assert mse([0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 1.0]) == pytest.approx(0.25)

    def test_length_mismatch(self):
        with pytest.raises(ContractError):
            mse(np.ones(3), np.ones(4))


def _f3_scenario(**kw):
    defaults = dict(
        signal=builtin_signal("F3"),
        noise=NoiseModel(kind="gaussian", sigma=0.1),
        replicates=10,
        base_seed=321,
        sigma_grid=(0.1,),
    )
    defaults.update(kw)
    return SimulationScenario(**defaults)


class TestRunScenario:
    def test_noiseless_exact(self):
        sc = _f3_scenario(noise=NoiseModel(kind="gaussian", sigma=0.0),
                          sigma_grid=(0.0,), replicates=3)
        rep = run_scenario(sc, [ThresholdConfig(lam=0.2, c_star=2)])
        (row,) = rep.rows
        assert row["atpr"] == 1.0
        assert row["afpr"] == 0.0
        assert row["amse"] == 0.0
        assert row["atprsh"] == 1.0

    def test_deterministic(self):
        sc = _f3_scenario(replicates=5)
        cfgs = [ThresholdConfig(c_star=2)]
        a = run_scenario(sc, cfgs)
        b = run_scenario(sc, cfgs)
        assert a.rows == b.rows

    def test_row_schema(self):
        sc = _f3_scenario(replicates=3, sigma_grid=(0.1, 0.2))
        rep = run_scenario(sc, [ThresholdConfig(c_star=1), ThresholdConfig(c_star=2)])
        assert len(rep.rows) == 4
        assert {row["config"] for row in rep.rows} == {"cstar=1", "cstar=2"}
        for row in rep.rows:
            assert 0.0 <= row["atpr"] <= 1.0
            assert 0.0 <= row["afpr"] <= 1.0
            assert row["amse"] >= 0.0

    def test_replicate_metrics_exposed(self):
        sc = _f3_scenario(replicates=4)
        rep = run_scenario(sc, [ThresholdConfig(c_star=2)])
        arrays = rep.replicate_metrics[(0.1, "cstar=2")]
        assert arrays["tpr"].shape == (4,)
        assert np.mean(arrays["tpr"]) == rep.rows[0]["atpr"]


class TestRocCurve:
    def test_huge_scale_kills_everything(self):
        sc = _f3_scenario(replicates=3)
        res = roc_curve(sc, ThresholdConfig(c_star=2), sweep=[1000.0])
        (point,) = res.points
        assert point.mean_tpr == 0.0
        assert point.mean_fpr == 0.0

    def test_tiny_scale_keeps_much(self):
        sc = _f3_scenario(replicates=3)
        res = roc_curve(sc, ThresholdConfig(c_star=1), sweep=[1e-6])
        (point,) = res.points
        assert point.mean_tpr >= 0.9
        assert point.mean_fp > 10

    def test_noiseless_perfect_auc(self):
        sc = _f3_scenario(noise=NoiseModel(kind="gaussian", sigma=0.0), replicates=2)
        res = roc_curve(sc, ThresholdConfig(sigma=0.1, c_star=2))
        assert res.auc == pytest.approx(1.0, abs=1e-9)
        assert res.partial_auc == pytest.approx(1.0, abs=1e-9)

    def test_matches_threshold_pipeline(self):
        # the vectorized sweep path must agree with the plain pipeline
        from tguhseg import (
            extract_change_points,
            forward_transform,
            generate_replicate,
            threshold,
        )
        from tguhseg.thresholding import default_lambda, estimate_sigma

        sc = _f3_scenario(replicates=1)
        rep = generate_replicate(sc, 1)
        tree = forward_transform(rep.series, 0.01)
        sigma_hat = estimate_sigma(rep.series)
        for scale in (0.5, 1.0, 2.0):
            lam = scale * default_lambda(sigma_hat, rep.series.n)
            surv = threshold(tree, ThresholdConfig(lam=lam, c_star=2), rep.series)
            res = roc_curve(sc, ThresholdConfig(c_star=2), sweep=[scale])
            m = match_change_points(
                rep.change_points, extract_change_points(surv.kept),
                window=2, n=rep.series.n,
            )
            assert res.points[0].mean_tpr == m.tpr
            assert res.points[0].mean_fp == m.fp

    def test_sweep_validation(self):
        sc = _f3_scenario(replicates=1)
        with pytest.raises(ContractError):
            roc_curve(sc, ThresholdConfig(), sweep=[])
        with pytest.raises(ContractError):
            roc_curve(sc, ThresholdConfig(), sweep=[-1.0])


class TestAucHelper:
    def test_perfect_detector(self):
        assert _trapezoid_auc([(0.0, 1.0)]) == pytest.approx(1.0)

    def test_diagonal(self):
        assert _trapezoid_auc([(0.5, 0.5)]) == pytest.approx(0.5)

    def test_extra_false_positives_never_help(self):
        base = [(0.1, 0.8), (0.3, 0.9)]
        worse = base + [(0.5, 0.9)]  # more FPR at the same TPR
        assert _trapezoid_auc(worse) <= _trapezoid_auc(base)
