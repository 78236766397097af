"""Shared brute-force oracles and generators for the test suite.

The oracles deliberately avoid the library's code paths: rescaled averages
and details are recomputed from direct sums, and the descendant closure is
searched recursively by support inclusion instead of via child links.
"""

import math

import numpy as np
import pytest

from tguhseg import Series, forward_transform


def oracle_local_average(y, s, e):
    return sum(y[s - 1 : e]) / math.sqrt(e - s + 1)


def oracle_detail(y, s, b, e):
    p = b - s + 1
    q = e - b
    lw = math.sqrt(q / (p + q))
    rw = math.sqrt(p / (p + q))
    return lw * oracle_local_average(y, s, b) - rw * oracle_local_average(y, b + 1, e)


def oracle_connected_kept(details, lam):
    """Recursive descendant-closure search by support inclusion."""
    cache = {}

    def closure_exceeds(d):
        key = id(d)
        if key in cache:
            return cache[key]
        if abs(d.value) > lam:
            cache[key] = True
            return True
        result = any(
            closure_exceeds(d2)
            for d2 in details
            if d2 is not d and d.s <= d2.s and d2.e <= d.e
        )
        cache[key] = result
        return result

    return frozenset(d for d in details if closure_exceeds(d))


def random_series(rng, max_len=50, min_len=1):
    n = int(rng.integers(min_len, max_len + 1))
    return Series.from_values(rng.normal(size=n))


def random_piecewise(rng, n_segments=None, min_len=3, max_len=15):
    """Noiseless piecewise-constant series with all jumps >= 0.5.

    Jumps are quarter-unit multiples so every level (and hence every
    segment mean) is exactly representable in binary floating point.
    """
    k = n_segments or int(rng.integers(2, 7))
    lengths = rng.integers(min_len, max_len + 1, size=k)
    levels = [0.0]
    for _ in range(k - 1):
        jump = int(rng.integers(2, 9)) * 0.25 * float(rng.choice([-1.0, 1.0]))
        levels.append(levels[-1] + jump)
    values = np.repeat(levels, lengths)
    cps = np.cumsum(lengths)[:-1].tolist()
    return Series.from_values(values), cps


def exhaustive_small_series(max_len=8, alphabet=(0.0, 1.0, 2.0)):
    """All series of length 1..max_len over the alphabet."""
    import itertools

    for n in range(1, max_len + 1):
        for combo in itertools.product(alphabet, repeat=n):
            yield Series.from_values(combo)


@pytest.fixture(scope="session")
def small_trees():
    """Transforms of a fixed batch of random series, shared across tests."""
    rng = np.random.default_rng(424242)
    out = []
    for _ in range(50):
        s = random_series(rng, max_len=40, min_len=2)
        out.append((s, forward_transform(s)))
    return out
