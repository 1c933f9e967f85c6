"""Subsets read as lattice walks.

Step ``k`` goes up when ``k`` is in the set and right otherwise; the walk
meets the line y = x + l exactly when its running (ups - rights) equals l.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb

import numpy as np

from .rational import DomainError, Rational, as_rational, check_probability
from .sets import SetFamily, Subset


@dataclass(frozen=True)
class WalkProfile:
    heights: tuple[int, ...]  # ups - rights after each step; heights[0] is the origin

    @property
    def max_line(self) -> int:
        return max(self.heights)

    def hit_steps(self, ell: int) -> list[int]:
        return [k for k, h in enumerate(self.heights) if h == ell]

    def line_hits(self, ell: int) -> int:
        return sum(1 for h in self.heights if h == ell)

    def first_hit(self, ell: int) -> int | None:
        for k, h in enumerate(self.heights):
            if h == ell:
                return k
        return None

    def hit_points(self, ell: int) -> list[tuple[int, int]]:
        """Lattice points (x, x + ell) visited on the line."""
        return [((k - ell) // 2, (k + ell) // 2) for k in self.hit_steps(ell)]


def heights(mask: int, n: int) -> list[int]:
    out = [0]
    h = 0
    for k in range(n):
        h += 1 if mask >> k & 1 else -1
        out.append(h)
    return out


def max_height(mask: int, n: int) -> int:
    h = best = 0
    for k in range(n):
        h += 1 if mask >> k & 1 else -1
        if h > best:
            best = h
    return best


def walk_profile(F: Subset) -> WalkProfile:
    return WalkProfile(tuple(heights(F.mask, F.n)))


def line_hit_indices(mask: int, n: int, ell: int) -> list[int]:
    """x-coordinates j of the points (j, j + ell) the walk visits."""
    out = []
    h = 0
    if ell == 0:
        out.append(0)
    for k in range(1, n + 1):
        h += 1 if mask >> (k - 1) & 1 else -1
        if h == ell:
            out.append((k - ell) // 2)
    return out


def walk_lambda(F: SetFamily) -> int:
    """Largest l such that every member walk meets y = x + l."""
    if not len(F):
        raise DomainError("lambda of the empty family is unbounded")
    return min(max_height(m, F.n) for m in F.masks)


def restricted_walk_count(ell: int, s: int) -> int:
    """Walks (0,0) -> (s, ell+s) that never touch y = x + ell + 1."""
    if ell < 0 or s < 0:
        raise DomainError(f"need ell >= 0 and s >= 0, got ell={ell}, s={s}")
    below = comb(ell + 2 * s, s - 1) if s >= 1 else 0
    return comb(ell + 2 * s, s) - below


def hitting_weights(n: int, ell: int, a: int, b: int) -> int:
    """Integer weight of n-step walks meeting y = x + ell, at p = a/b.

    Each walk with k ups carries a^k (b-a)^(n-k); the measure is the
    result divided by b^n.
    """
    c = b - a
    if ell == 0:
        return b**n
    if ell > n:
        return 0
    offset = n  # heights range over [-n, ell - 1] before absorption
    w = [0] * (n + ell)
    w[offset] = 1
    hit = 0
    lo = hi = offset
    for k in range(1, n + 1):
        nw = [0] * (n + ell)
        for idx in range(lo, hi + 1):
            x = w[idx]
            if not x:
                continue
            up = idx + 1
            if up - offset == ell:
                hit += x * a * b ** (n - k)
            else:
                nw[up] += x * a
            nw[idx - 1] += x * c
        w = nw
        lo = max(lo - 1, 0)
        hi = min(hi + 1, offset + ell - 1)
    return hit


def f_line_measure(n: int, ell: int, p) -> Rational:
    """Exact measure of the n-step walks that meet y = x + ell."""
    p = check_probability(p)
    if ell < 0:
        raise DomainError(f"ell must be non-negative, got {ell}")
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    if ell > n:
        return Rational(0)
    a, b = int(p.numerator), int(p.denominator)
    return Rational(hitting_weights(n, ell, a, b), b**n)


@dataclass(frozen=True)
class SimResult:
    estimate: float
    stderr: float
    hits: int
    trials: int


def _chunk_trials(steps: int) -> int:
    per = max(4, (1 << 21) // max(steps, 1))
    return per - per % 4


def _count_hits(seed: int, start: int, count: int, steps: int, ell: int, threshold: int) -> int:
    bg = np.random.Philox(key=seed)
    # Philox yields four words per counter step; trial-aligned starts keep
    # each trial's draws fixed regardless of how trials are chunked.
    first = start * steps
    bg.advance(first // 4)
    skip = first % 4
    raw = bg.random_raw(skip + count * steps)[skip:]
    up = (raw >> np.uint64(11)) < np.uint64(threshold)
    moves = np.where(up, 1, -1).astype(np.int32).reshape(count, steps)
    paths = np.cumsum(moves, axis=1)
    return int(np.count_nonzero(paths.max(axis=1) >= ell))


def simulate_hits(p, ell: int, n: int, trials: int, seed: int, jobs: int = 1) -> SimResult:
    """Monte Carlo estimate of the probability that an n-step walk meets y = x + ell.

    Trial ``k`` consumes raw Philox words ``k*n .. k*n + n - 1`` under key
    ``seed``, so the estimate does not depend on ``jobs``.
    """
    p = check_probability(p)
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if n < 1:
        raise DomainError("steps must be at least 1")
    if ell < 0:
        raise DomainError("ell must be non-negative")
    if not 0 <= seed < 1 << 64:
        raise DomainError("seed must be an unsigned 64-bit integer")
    if ell == 0:
        return SimResult(1.0, 0.0, trials, trials)
    threshold = int(p * (1 << 53))
    size = _chunk_trials(n)
    chunks = [(s, min(size, trials - s)) for s in range(0, trials, size)]
    args = [(seed, s, c, n, ell, threshold) for s, c in chunks]
    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(_count_hits, *zip(*args)))
    else:
        counts = [_count_hits(*a) for a in args]
    hits = sum(counts)
    est = hits / trials
    return SimResult(est, math.sqrt(est * (1 - est) / trials), hits, trials)


def alpha(p) -> Rational:
    p = as_rational(p)
    return p / (1 - p)
