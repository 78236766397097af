"""Forward tail-greedy unbalanced Haar decomposition.

The transform repeatedly merges adjacent regions of the series, always
preferring the pairs whose unbalanced Haar detail coefficient is smallest in
magnitude, and records every merge in a unary-binary tree.  A proportion
``rho`` of the remaining regions is merged per pass, which bounds the number
of passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractError


@dataclass(frozen=True)
class Series:
    """One ordered sequence of copy-number-ratio observations.

    ``values`` and ``positions`` are parallel 1-d arrays; positions must be
    strictly increasing.  Index arguments throughout this module are 1-based.
    """

    values: np.ndarray
    positions: np.ndarray
    label: str = ""

    @classmethod
    def from_values(cls, values, positions=None, label: str = "") -> "Series":
        v = np.asarray(values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ContractError("series must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(v)):
            raise ContractError("series values must be finite")
        if positions is None:
            p = np.arange(1, v.size + 1, dtype=float)
        else:
            p = np.asarray(positions, dtype=float)
            if p.shape != v.shape:
                raise ContractError("positions must match values in length")
            if p.size > 1 and not np.all(np.diff(p) > 0):
                raise ContractError("positions must be strictly increasing")
        return cls(values=v, positions=p, label=label)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class DetailCoefficient:
    """One unbalanced Haar detail: support [s, e], breakpoint b (1-based).

    ``left_child``/``right_child`` index into ``MergeTree.details`` and point
    at the coefficients that produced the arm regions [s, b] and [b+1, e];
    they are None when the arm was still an unmerged single point.
    """

    scale: int
    within_scale_index: int
    s: int
    b: int
    e: int
    value: float
    left_weight: float
    right_weight: float
    left_child: Optional[int] = None
    right_child: Optional[int] = None

    @property
    def left_arm(self) -> int:
        return self.b - self.s + 1

    @property
    def right_arm(self) -> int:
        return self.e - self.b


@dataclass(frozen=True)
class MergeTree:
    """Full forward-transform record: n-1 details plus the root smooth."""

    details: tuple[DetailCoefficient, ...]
    root_smooth: float
    n: int
    rho: float

    def subtree_max_abs(self) -> np.ndarray:
        """Max |value| over each coefficient's descendant closure (self
        included).  Children always precede parents in production order, so a
        single forward pass suffices."""
        out = np.empty(len(self.details), dtype=float)
        for i, d in enumerate(self.details):
            m = abs(d.value)
            if d.left_child is not None:
                m = max(m, out[d.left_child])
            if d.right_child is not None:
                m = max(m, out[d.right_child])
            out[i] = m
        return out


def local_average(series: Series, s: int, e: int) -> float:
    """Rescaled average (e-s+1)^(-1/2) * sum(y_s..y_e), 1-based inclusive."""
    if not 1 <= s <= e <= series.n:
        raise IndexError(f"invalid range [{s}, {e}] for series of length {series.n}")
    return float(series.values[s - 1 : e].sum() / math.sqrt(e - s + 1))


def detail_weights(s: int, b: int, e: int) -> tuple[float, float]:
    """Unit-norm detail filter weights (l, r) for arms [s, b] and [b+1, e].

    Chosen so the merged smooth coefficient r*c_{s,b} + l*c_{b+1,e} equals
    the rescaled average over [s, e], making each merge an orthonormal
    rotation, and so the detail vanishes on constant input.
    """
    if not s <= b < e:
        raise IndexError(f"breakpoint {b} outside [{s}, {e - 1}]")
    total = e - s + 1
    return math.sqrt((e - b) / total), math.sqrt((b - s + 1) / total)


def detail_value(series: Series, s: int, b: int, e: int) -> float:
    """d_{s,b,e} = l*c_{s,b} - r*c_{b+1,e}."""
    if not 1 <= s <= b < e <= series.n:
        raise IndexError(f"invalid (s={s}, b={b}, e={e}) for length {series.n}")
    lw, rw = detail_weights(s, b, e)
    return lw * local_average(series, s, b) - rw * local_average(series, b + 1, e)


@dataclass
class RegionState:
    """Current partition of the series into contiguous regions.

    ``sums`` holds raw per-region sums (recomputed by addition on merge, never
    from child coefficients).  ``producer[i]`` is the index of the detail that
    created region i, or -1 for an unmerged single point.
    """

    starts: np.ndarray
    ends: np.ndarray
    sums: np.ndarray
    producer: np.ndarray

    @classmethod
    def initial(cls, series: Series) -> "RegionState":
        n = series.n
        idx = np.arange(1, n + 1, dtype=np.int64)
        return cls(
            starts=idx.copy(),
            ends=idx.copy(),
            sums=series.values.astype(float).copy(),
            producer=np.full(n, -1, dtype=np.int64),
        )

    @property
    def n_regions(self) -> int:
        return int(self.starts.size)


def merge_pass(
    state: RegionState,
    rho: float,
    scale: int = 1,
    index_offset: int = 0,
) -> tuple[tuple[DetailCoefficient, ...], RegionState]:
    """One pass: merge up to ceil(rho * n_regions) disjoint adjacent pairs.

    Candidate pairs are ranked by |detail| ascending (ties by smaller start
    index); a region participates in at most one merge per pass, so fewer
    merges than the quota may be accepted.  Accepted details get scale
    ``scale`` and within-scale indices ordered by increasing start.
    """
    m = state.n_regions
    if m < 2:
        raise ContractError("merge_pass needs at least 2 regions")
    if not 0.0 < rho <= 1.0:
        raise ContractError(f"rho must be in (0, 1], got {rho}")

    lens = (state.ends - state.starts + 1).astype(float)
    n1, n2 = lens[:-1], lens[1:]
    total = n1 + n2
    lw = np.sqrt(n2 / total)
    rw = np.sqrt(n1 / total)
    # algebraically l*c1 - r*c2; the mean-difference form vanishes exactly
    # whenever the two region means are equal
    d = np.sqrt(n1 * n2 / total) * (state.sums[:-1] / n1 - state.sums[1:] / n2)

    order = np.lexsort((state.starts[:-1], np.abs(d)))
    quota = math.ceil(rho * m)
    used = np.zeros(m, dtype=bool)
    accepted: list[int] = []
    for i in order:
        if len(accepted) == quota:
            break
        if used[i] or used[i + 1]:
            continue
        used[i] = used[i + 1] = True
        accepted.append(int(i))
    accepted.sort()

    details = []
    for k, i in enumerate(accepted, start=1):
        lc = int(state.producer[i])
        rc = int(state.producer[i + 1])
        details.append(
            DetailCoefficient(
                scale=scale,
                within_scale_index=k,
                s=int(state.starts[i]),
                b=int(state.ends[i]),
                e=int(state.ends[i + 1]),
                value=float(d[i]),
                left_weight=float(lw[i]),
                right_weight=float(rw[i]),
                left_child=lc if lc >= 0 else None,
                right_child=rc if rc >= 0 else None,
            )
        )

    acc = np.asarray(accepted, dtype=np.int64)
    starts = state.starts.copy()
    ends = state.ends.copy()
    sums = state.sums.copy()
    producer = state.producer.copy()
    ends[acc] = ends[acc + 1]
    sums[acc] = sums[acc] + sums[acc + 1]
    producer[acc] = index_offset + np.arange(len(accepted), dtype=np.int64)
    keep = np.ones(m, dtype=bool)
    keep[acc + 1] = False
    new_state = RegionState(starts[keep], ends[keep], sums[keep], producer[keep])
    return tuple(details), new_state


def forward_transform(series: Series, rho: float = 0.01) -> MergeTree:
    """Run merge passes until one region remains; returns the merge tree.

    A series of length n yields exactly n-1 detail coefficients.  For n = 1
    the tree is empty with root_smooth = y_1.
    """
    n = series.n
    if n == 1:
        return MergeTree(details=(), root_smooth=float(series.values[0]), n=1, rho=rho)
    state = RegionState.initial(series)
    details: list[DetailCoefficient] = []
    scale = 1
    while state.n_regions > 1:
        merged, state = merge_pass(state, rho, scale=scale, index_offset=len(details))
        details.extend(merged)
        scale += 1
    root = float(state.sums[0] / math.sqrt(n))
    return MergeTree(details=tuple(details), root_smooth=root, n=n, rho=rho)
