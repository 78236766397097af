"""Synthetic piecewise-constant test signals and noise models.

Three built-in signals cover the benchmark regimes: a mix of long and short
altered segments (F1), short segments only (F2), and a single isolated
6-point segment (F3).  Short segments are 6-10 windows long with a level
offset of 0.5 from their surroundings.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import yaml

from .errors import ContractError, InputError
from .transform import Series

THETA_DEFAULT = 0.1  # minimum level jump that counts as a change-point
SHORT_RANGE_DEFAULT = (6, 10)
DEFAULT_SIGMA_GRID = (0.1, 0.2, 0.3, 0.4, 0.5)


@dataclass(frozen=True)
class PiecewiseSignal:
    lengths: tuple[int, ...]
    levels: tuple[float, ...]

    def __post_init__(self):
        if len(self.lengths) != len(self.levels) or not self.lengths:
            raise ContractError("lengths and levels must have equal count >= 1")
        if any(l < 1 for l in self.lengths):
            raise ContractError("segment lengths must be positive")

    @property
    def n(self) -> int:
        return int(sum(self.lengths))

    def values(self) -> np.ndarray:
        return np.repeat(np.asarray(self.levels, dtype=float), self.lengths)

    def change_points(self, theta: float = THETA_DEFAULT) -> tuple[int, ...]:
        """Boundaries (1-based index of the last window before the jump)
        where the level changes by more than ``theta``."""
        cps = []
        cum = 0
        for j in range(len(self.lengths) - 1):
            cum += self.lengths[j]
            if abs(self.levels[j + 1] - self.levels[j]) > theta:
                cps.append(cum)
        return tuple(cps)

    def short_boundaries(
        self,
        theta: float = THETA_DEFAULT,
        short_range: tuple[int, int] = SHORT_RANGE_DEFAULT,
    ) -> frozenset[int]:
        """Change-points bounding a segment whose length is in short_range."""
        lo, hi = short_range
        cps = set(self.change_points(theta))
        out = set()
        cum = 0
        for j, length in enumerate(self.lengths):
            start_boundary = cum
            cum += length
            end_boundary = cum
            if lo <= length <= hi:
                if start_boundary in cps:
                    out.add(start_boundary)
                if end_boundary in cps:
                    out.add(end_boundary)
        return frozenset(out)


# Fixed geometries; each satisfies the documented constraints (long segments
# > 10 windows, short segments 6-10 windows with 0.5 offset, levels in 0-4).
_BUILTIN_SIGNALS = {
    "F1": PiecewiseSignal(
        lengths=(40, 20, 30, 8, 30, 15, 25, 6, 30, 12, 34),
        levels=(1.0, 2.0, 1.0, 1.5, 1.0, 0.0, 1.0, 1.5, 1.0, 4.0, 1.0),
    ),
    "F2": PiecewiseSignal(
        lengths=(30, 6, 30, 8, 30, 10, 30, 7, 30, 9, 40),
        levels=(1.0, 1.5, 1.0, 2.0, 1.0, 0.5, 1.0, 2.5, 1.0, 1.8, 1.0),
    ),
    "F3": PiecewiseSignal(
        lengths=(147, 6, 147),
        levels=(1.0, 1.5, 1.0),
    ),
}


def builtin_signal(signal_id: str) -> PiecewiseSignal:
    try:
        return _BUILTIN_SIGNALS[signal_id]
    except KeyError:
        raise InputError(
            f"unknown signal id {signal_id!r}; choose from {sorted(_BUILTIN_SIGNALS)}"
        ) from None


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian or contaminated-normal noise.

    Contaminated draws come from N(0, sigma^2) with probability
    1 - contamination_prob and from N(0, (inflation*sigma)^2) otherwise.
    """

    kind: str = "gaussian"
    sigma: float = 0.3
    contamination_prob: float = 0.05
    inflation: float = 3.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "contaminated"):
            raise ContractError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise ContractError("sigma must be >= 0")
        if not 0.0 <= self.contamination_prob < 1.0:
            raise ContractError("contamination_prob must be in [0, 1)")


def sample_noise(model: NoiseModel, n: int, seed) -> np.ndarray:
    """n i.i.d. draws; deterministic given the seed (int or SeedSequence).

    For the contaminated model the stream is consumed in a fixed order: one
    uniform vector for component selection, then one standard-normal vector.
    """
    if n < 1:
        raise ContractError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if model.kind == "gaussian":
        return rng.standard_normal(n) * model.sigma
    pick = rng.random(n) < model.contamination_prob
    z = rng.standard_normal(n)
    scale = np.where(pick, model.inflation * model.sigma, model.sigma)
    return z * scale


@dataclass(frozen=True)
class SimulationScenario:
    signal: PiecewiseSignal
    noise: NoiseModel
    replicates: int = 1000
    base_seed: int = 0
    sigma_grid: tuple[float, ...] = DEFAULT_SIGMA_GRID
    short_segment_range: tuple[int, int] = SHORT_RANGE_DEFAULT
    stream_key: tuple[int, ...] = ()
    signal_id: Optional[str] = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ContractError("replicates must be >= 1")


def with_sigma(
    scenario: SimulationScenario, sigma: float, stream_index: int
) -> SimulationScenario:
    """Scenario variant at a given noise level with its own seed stream."""
    return replace(
        scenario,
        noise=replace(scenario.noise, sigma=sigma),
        stream_key=(*scenario.stream_key, stream_index),
    )


def replicate_seed(scenario: SimulationScenario, r: int) -> np.random.SeedSequence:
    """Injective mix of base_seed, stream key, and replicate index."""
    return np.random.SeedSequence([scenario.base_seed, *scenario.stream_key, r])


@dataclass(frozen=True)
class Replicate:
    series: Series
    truth: np.ndarray
    change_points: tuple[int, ...]
    signal: PiecewiseSignal


def generate_replicate(
    scenario: SimulationScenario, r: int, theta: float = THETA_DEFAULT
) -> Replicate:
    """Replicate r (1-based): y = f + noise, with truth attached."""
    if not 1 <= r <= scenario.replicates:
        raise ContractError(f"replicate index {r} outside [1, {scenario.replicates}]")
    f = scenario.signal.values()
    eps = sample_noise(scenario.noise, f.size, replicate_seed(scenario, r))
    series = Series.from_values(f + eps, label=f"replicate_{r}")
    return Replicate(
        series=series,
        truth=f,
        change_points=scenario.signal.change_points(theta),
        signal=scenario.signal,
    )


_SCENARIO_KEYS = {
    "signal", "noise", "sigma", "sigma_grid", "alpha", "inflation",
    "replicates", "base_seed", "short_segment_range",
}


def load_scenario(path) -> SimulationScenario:
    """Parse a YAML scenario file; raises InputError naming the bad key."""
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise InputError(f"cannot parse scenario file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise InputError(f"scenario file {path} must contain a mapping")
    unknown = set(raw) - _SCENARIO_KEYS
    if unknown:
        raise InputError(f"unknown scenario key(s): {sorted(unknown)}")

    sig_spec = raw.get("signal")
    signal_id = None
    if isinstance(sig_spec, str):
        signal_id = sig_spec
        signal = builtin_signal(sig_spec)
    elif isinstance(sig_spec, dict):
        extra = set(sig_spec) - {"lengths", "levels"}
        if extra:
            raise InputError(f"unknown signal key(s): {sorted(extra)}")
        try:
            signal = PiecewiseSignal(
                lengths=tuple(int(x) for x in sig_spec["lengths"]),
                levels=tuple(float(x) for x in sig_spec["levels"]),
            )
        except (KeyError, TypeError, ValueError, ContractError) as exc:
            raise InputError(f"invalid 'signal' specification: {exc}") from exc
    else:
        raise InputError("missing or invalid key 'signal'")

    sigma_grid = tuple(float(s) for s in raw.get("sigma_grid", DEFAULT_SIGMA_GRID))
    if not sigma_grid:
        raise InputError("'sigma_grid' must be non-empty")
    try:
        noise = NoiseModel(
            kind=raw.get("noise", "gaussian"),
            sigma=float(raw.get("sigma", sigma_grid[0])),
            contamination_prob=float(raw.get("alpha", 0.05)),
            inflation=float(raw.get("inflation", 3.0)),
        )
        short_range = tuple(raw.get("short_segment_range", SHORT_RANGE_DEFAULT))
        if len(short_range) != 2:
            raise InputError("'short_segment_range' must have two entries")
        return SimulationScenario(
            signal=signal,
            noise=noise,
            replicates=int(raw.get("replicates", 1000)),
            base_seed=int(raw.get("base_seed", 0)),
            sigma_grid=sigma_grid,
            short_segment_range=(int(short_range[0]), int(short_range[1])),
            signal_id=signal_id,
        )
    except (TypeError, ValueError, ContractError) as exc:
        raise InputError(f"invalid scenario value: {exc}") from exc


def save_scenario(scenario: SimulationScenario, path) -> None:
    """Write a scenario back to YAML; round-trips losslessly."""
    doc = {
        "signal": scenario.signal_id
        if scenario.signal_id is not None
        else {
            "lengths": list(scenario.signal.lengths),
            "levels": list(scenario.signal.levels),
        },
        "noise": scenario.noise.kind,
        "sigma": scenario.noise.sigma,
        "sigma_grid": list(scenario.sigma_grid),
        "alpha": scenario.noise.contamination_prob,
        "inflation": scenario.noise.inflation,
        "replicates": scenario.replicates,
        "base_seed": scenario.base_seed,
        "short_segment_range": list(scenario.short_segment_range),
    }
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)
