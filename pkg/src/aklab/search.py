"""Exhaustive branch-and-bound over up-closed families on a small ground set.

A family on [n] is a 2^n-bit integer (bit S set when the subset with mask S
is a member).  Measures are kept as integers scaled by b^n at p = a/b.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .analytics import closed_form_measure
from .rational import DomainError, Rational, check_probability
from .sets import SetFamily, cross_t_intersecting, mask_members

HARD_LIMIT = 6
FORCE_LIMIT = 7


class SearchBoundError(DomainError):
    pass


def search_limit() -> int:
    """The exhaustive bound, lowered (never raised) by AKLAB_MAX_N."""
    raw = os.environ.get("AKLAB_MAX_N")
    if raw is None or raw.strip() == "":
        return HARD_LIMIT
    try:
        val = int(raw)
    except ValueError:
        raise SearchBoundError(f"AKLAB_MAX_N must be an integer, got {raw!r}") from None
    return max(1, min(HARD_LIMIT, val))


def check_search_size(n: int, shifted_only: bool, force: bool) -> None:
    if n < 1:
        raise SearchBoundError(f"n must be positive, got {n}")
    limit = search_limit()
    if n <= limit:
        return
    if not force:
        raise SearchBoundError(f"n={n} exceeds the exhaustive bound {limit}; pass --force to override")
    if n <= HARD_LIMIT:
        return
    if n == FORCE_LIMIT and shifted_only:
        return
    if n == FORCE_LIMIT:
        raise SearchBoundError(f"n={n} is only searchable with --shifted-only")
    raise SearchBoundError(f"n={n} is beyond any supported search size (max {FORCE_LIMIT})")


@dataclass(frozen=True)
class SearchCertificate:
    argmax: SetFamily | tuple[SetFamily, SetFamily]
    value: Rational
    nodes_explored: int
    exhaustive: bool
    restricted_to_shifted: bool
    label: str = ""


class _Cube:
    """Precomputed tables for one (n, t, p)."""

    def __init__(self, n: int, t: int, p: Rational, shifted_only: bool):
        self.n, self.t = n, t
        a, b = int(p.numerator), int(p.denominator)
        self.scale = b**n
        self.wk = [a**k * (b - a) ** (n - k) for k in range(n + 1)]
        N = 1 << n
        self.level = [0] * (n + 1)
        for S in range(N):
            self.level[S.bit_count()] |= 1 << S
        # compat[S]: sets meeting S in at least t points
        self.compat = [sum(1 << W for W in range(N) if (W & S).bit_count() >= t) for S in range(N)]
        self.order = sorted(range(N), key=lambda S: (-S.bit_count(), mask_members(S)))
        if shifted_only:
            # excluding E forbids every W that shifts to E
            self.below = [self._shift_down(E) for E in range(N)]
        else:
            self.below = [sum(1 << W for W in range(N) if W & E == W) for E in range(N)]
        self.suffix = [0] * (N + 1)
        for idx in range(N - 1, -1, -1):
            self.suffix[idx] = self.suffix[idx + 1] | 1 << self.order[idx]
        self.big_enough = sum(1 << S for S in range(N) if S.bit_count() >= t)

    def _shift_down(self, E: int) -> int:
        e = mask_members(E)
        out = 0
        for W in range(1 << self.n):
            w = mask_members(W)
            if len(w) <= len(e) and all(x >= y for x, y in zip(w, e)):
                out |= 1 << W
        return out

    def weight(self, vec: int) -> int:
        return sum((vec & lv).bit_count() * w for lv, w in zip(self.level, self.wk))

    def family(self, vec: int) -> SetFamily:
        masks = []
        S = 0
        while vec:
            if vec & 1:
                masks.append(S)
            vec >>= 1
            S += 1
        return SetFamily(self.n, masks)

    def best_response(self, vec: int) -> int:
        out = (1 << (1 << self.n)) - 1
        S = 0
        while vec:
            if vec & 1:
                out &= self.compat[S]
            vec >>= 1
            S += 1
        return out


def _key(cube: _Cube, vec: int):
    return cube.family(vec).sort_key()


def best_response(A: SetFamily, t: int) -> SetFamily:
    """All B with |A ∩ B| >= t for every member A; the largest family cross t-intersecting with A."""
    if not len(A):
        raise DomainError("best response of the empty family is the whole cube; pass a nonempty family")
    if t < 1:
        raise DomainError(f"t must be at least 1, got {t}")
    n = A.n
    mins = A.minimal_masks
    return SetFamily(n, [W for W in range(1 << n) if all((W & S).bit_count() >= t for S in mins)])


def max_single(n: int, t: int, p, shifted_only: bool = False, force: bool = False) -> SearchCertificate:
    """Largest measure of a t-intersecting up-closed family on [n]."""
    p = check_probability(p)
    if t < 1:
        raise DomainError(f"t must be at least 1, got {t}")
    check_search_size(n, shifted_only, force)
    cube = _Cube(n, t, p, shifted_only)
    order, compat, below, suffix = cube.order, cube.compat, cube.below, cube.suffix
    N = len(order)
    full = (1 << N) - 1
    best_w = -1
    best_vec = 0
    best_key = None
    nodes = 0

    def visit(idx, chosen, cw, allowed, blocked):
        nonlocal best_w, best_vec, best_key, nodes
        nodes += 1
        open_ = allowed & ~blocked & suffix[idx]
        bound = cw + cube.weight(open_)
        if bound < best_w:
            return
        # skip sets that cannot join; each one only adds to the blocked region
        while idx < N and not open_ >> order[idx] & 1:
            blocked |= below[order[idx]]
            idx += 1
            open_ = allowed & ~blocked & suffix[idx]
        if idx == N or not open_:
            if cw > best_w:
                best_w, best_vec, best_key = cw, chosen, None
            elif cw == best_w:
                if best_key is None:
                    best_key = _key(cube, best_vec)
                k = _key(cube, chosen)
                if k < best_key:
                    best_vec, best_key = chosen, k
            return
        S = order[idx]
        visit(idx + 1, chosen | 1 << S, cw + cube.wk[S.bit_count()], allowed & compat[S], blocked)
        visit(idx + 1, chosen, cw, allowed, blocked | below[S])

    visit(0, 0, 0, full & cube.big_enough, 0)
    fam = cube.family(best_vec)
    return SearchCertificate(fam, Rational(best_w, cube.scale), nodes, True, shifted_only,
                             label="max single")


def max_cross(n: int, t: int, p, shifted_only: bool = False, force: bool = False) -> SearchCertificate:
    """Largest mu(A) mu(B) over cross t-intersecting up-closed pairs, with B the best response to A.

    Below the large-t regime this is exploration, not a check of any theorem.
    """
    p = check_probability(p)
    if t < 1:
        raise DomainError(f"t must be at least 1, got {t}")
    check_search_size(n, shifted_only, force)
    cube = _Cube(n, t, p, shifted_only)
    order, compat, below, suffix = cube.order, cube.compat, cube.below, cube.suffix
    N = len(order)
    full = (1 << N) - 1
    best_val = -1
    best = (0, 0)
    best_key = None
    nodes = 0

    def leaf(chosen, cw, resp):
        nonlocal best_val, best, best_key
        if not chosen:
            return
        val = cw * cube.weight(resp)
        if val > best_val:
            best_val, best, best_key = val, (chosen, resp), None
        elif val == best_val:
            if best_key is None:
                best_key = (_key(cube, best[0]), _key(cube, best[1]))
            k = (_key(cube, chosen), _key(cube, resp))
            if k < best_key:
                best, best_key = (chosen, resp), k

    def visit(idx, chosen, cw, resp, blocked):
        nonlocal nodes
        nodes += 1
        open_ = cube.big_enough & ~blocked & suffix[idx]
        bound = (cw + cube.weight(open_)) * cube.weight(resp)
        if bound < best_val:
            return
        while idx < N and not open_ >> order[idx] & 1:
            blocked |= below[order[idx]]
            idx += 1
            open_ = cube.big_enough & ~blocked & suffix[idx]
        if idx == N or not open_:
            leaf(chosen, cw, resp)
            return
        S = order[idx]
        visit(idx + 1, chosen | 1 << S, cw + cube.wk[S.bit_count()], resp & compat[S], blocked)
        visit(idx + 1, chosen, cw, resp, blocked | below[S])

    visit(0, 0, 0, full, 0)
    if best_val <= 0:
        raise DomainError(f"no nonempty cross {t}-intersecting pair on [{n}]")
    A, B = cube.family(best[0]), cube.family(best[1])
    if not cross_t_intersecting(A, B, t):  # pragma: no cover - internal consistency
        raise AssertionError("search returned an infeasible pair")
    return SearchCertificate((A, B), Rational(best_val, cube.scale**2), nodes, True, shifted_only,
                             label="conjecture exploration")


@dataclass(frozen=True)
class AKReference:
    per_r: list[tuple[int, Rational]]
    best_r: tuple[int, ...]
    best_value: Rational


def ak_reference(n: int, t: int, p) -> AKReference:
    p = check_probability(p)
    if not 1 <= t <= n:
        raise DomainError(f"need 1 <= t <= n, got t={t}, n={n}")
    per_r = [(r, closed_form_measure(t, r, p)) for r in range((n - t) // 2 + 1)]
    top = max(v for _, v in per_r)
    return AKReference(per_r, tuple(r for r, v in per_r if v == top), top)


def certificate_ok(cert: SearchCertificate, t: int) -> bool:
    """Re-validate a certificate's families against the stated t."""
    if isinstance(cert.argmax, tuple):
        A, B = cert.argmax
        fams = (A, B)
        ok = cross_t_intersecting(A, B, t)
    else:
        fams = (cert.argmax,)
        ok = cert.argmax.is_t_intersecting(t)
    ok = ok and all(F.up_closed for F in fams)
    if cert.restricted_to_shifted:
        ok = ok and all(F.shifted for F in fams)
    return ok


__all__ = [
    "AKReference",
    "SearchBoundError",
    "SearchCertificate",
    "ak_reference",
    "best_response",
    "certificate_ok",
    "max_cross",
    "max_single",
    "search_limit",
]
