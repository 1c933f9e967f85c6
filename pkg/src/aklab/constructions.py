"""Named families and walks, and the case classification of t-nice pairs."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .rational import DomainError
from .sets import (
    SetFamily,
    Subset,
    check_ground,
    cross_t_intersecting,
    interval_mask,
    members_mask,
)
from .walks import line_hit_indices, max_height, walk_lambda


def progression_mask(a: int, b: int) -> int:
    """[a, b]_2 = {a, a+2, a+4, ...} within [a, b]."""
    mask = 0
    for x in range(a, b + 1, 2):
        mask |= 1 << (x - 1)
    return mask


def frame(n: int, ell: int, j: int) -> SetFamily:
    """{F : |F ∩ [ell+2j]| >= ell+j}; ell = 0 allowed."""
    check_ground(n)
    m = ell + 2 * j
    if ell < 0 or j < 0:
        raise DomainError(f"need ell >= 0 and j >= 0, got ell={ell}, j={j}")
    if m > n:
        raise DomainError(f"need ell + 2j <= n, got {m} > {n}")
    need = ell + j
    inner = [x for x in range(1 << m) if x.bit_count() >= need]
    outer_bits = n - m
    masks = [x | (y << m) for y in range(1 << outer_bits) for x in inner]
    return SetFamily(n, masks)


def frt(n: int, t: int, r: int) -> SetFamily:
    if t < 1 or r < 0:
        raise DomainError(f"need t >= 1 and r >= 0, got t={t}, r={r}")
    return frame(n, t, r)


@dataclass(frozen=True)
class LinePartition:
    """F^l split as walks that also meet l+1, meet l once, or meet l repeatedly."""

    n: int
    ell: int
    tilde: SetFamily
    dot: SetFamily
    ddot: SetFamily

    def dot_at(self, i: int) -> SetFamily:
        """Members of the single-hit part whose hit is the point (i, ell+i)."""
        return SetFamily(self.n, [m for m in self.dot.masks
                                  if line_hit_indices(m, self.n, self.ell) == [i]])

    def ddot_at(self, i: int) -> SetFamily:
        return SetFamily(self.n, [m for m in self.ddot.masks
                                  if i in line_hit_indices(m, self.n, self.ell)])


def f_line_family(n: int, ell: int) -> SetFamily:
    check_ground(n)
    if ell < 0:
        raise DomainError(f"ell must be non-negative, got {ell}")
    return SetFamily(n, [m for m in range(1 << n) if max_height(m, n) >= ell])


def split_by_line(F: SetFamily, ell: int) -> tuple[SetFamily, SetFamily, SetFamily]:
    """Intersect F with the three parts of F^ell; members missing the line are dropped."""
    tilde, dot, ddot = [], [], []
    for m in F.masks:
        top = max_height(m, F.n)
        if top > ell:
            tilde.append(m)
        elif top == ell:
            if len(line_hit_indices(m, F.n, ell)) == 1:
                dot.append(m)
            else:
                ddot.append(m)
    return SetFamily(F.n, tilde), SetFamily(F.n, dot), SetFamily(F.n, ddot)


def partition(n: int, ell: int) -> LinePartition:
    tilde, dot, ddot = split_by_line(f_line_family(n, ell), ell)
    return LinePartition(n, ell, tilde, dot, ddot)


def d_walk_range(n: int, level: int, s: int) -> int:
    """Largest index i for which the boundary walk is defined (may be < 1)."""
    return n - level - 2 * s - 1


def d_walk(n: int, level: int, s: int, i: int, variant: str = "plain") -> Subset:
    """Boundary walks used to locate the membership thresholds I and J.

    plain:  [level-1] ∪ [level+s, level+2s] ∪ [level+2s+i+2, n]_2
    tilde:  [level-2] ∪ [level+s-1, level+2s] ∪ [level+2s+i+2, n]_2
    """
    check_ground(n)
    if s < 0:
        raise DomainError(f"s must be non-negative, got {s}")
    i_max = d_walk_range(n, level, s)
    if not 1 <= i <= i_max:
        raise DomainError(f"index i={i} outside [1, {i_max}]")
    tail = progression_mask(level + 2 * s + i + 2, n)
    if variant == "plain":
        if level < 1:
            raise DomainError("plain boundary walk needs level >= 1")
        mask = interval_mask(1, level - 1) | interval_mask(level + s, level + 2 * s) | tail
    elif variant == "tilde":
        if level < 2:
            raise DomainError("tilde boundary walk needs level >= 2")
        mask = interval_mask(1, level - 2) | interval_mask(level + s - 1, level + 2 * s) | tail
    else:
        raise DomainError(f"unknown variant {variant!r}")
    return Subset(n, mask)


def near_extremal(n: int, t: int, r: int) -> tuple[SetFamily, SetFamily]:
    """F_r^t with its (t+r)-subsets of [t+2r] traded for the sets G ∪ [t+2r+1, n], |G| = t+r-1.

    Needs n >= t+2r+2: with a single tail element two of the added sets can
    meet in only t-1 points.
    """
    m = t + 2 * r
    if n < m + 2:
        raise DomainError(f"near-extremal pair needs n >= t+2r+2 = {m + 2}, got n={n}")
    base = frt(n, t, r)
    removed = {members_mask(G) for G in combinations(range(1, m + 1), t + r)}
    tail = interval_mask(m + 1, n)
    added = {members_mask(G) | tail for G in combinations(range(1, m + 1), t + r - 1)}
    fam = SetFamily(n, (base.mask_set - removed) | added)
    return fam, fam


def extremal_pair(n: int, t: int, s: int, s_prime: int) -> tuple[SetFamily, SetFamily]:
    """(F^u_s, F^v_{s'}) with u = t - (s - s'), v = t + (s - s')."""
    d = s - s_prime
    if s_prime < 0 or d < 0:
        raise DomainError(f"need s >= s' >= 0, got s={s}, s'={s_prime}")
    u, v = t - d, t + d
    if u < 1:
        raise DomainError(f"u = t - (s - s') must be positive, got {u}")
    if u + 2 * s > n:
        raise DomainError(f"ground set too small: need n >= {u + 2 * s}, got {n}")
    return frt(n, u, s), frt(n, v, s_prime)


def extremal_subscripts(r: int) -> frozenset[tuple[int, int]]:
    if r < 0:
        raise DomainError(f"r must be non-negative, got {r}")
    if r == 0:
        return frozenset({(0, 0), (1, 1), (1, 0)})
    return frozenset({(r - 1, r - 1), (r, r), (r + 1, r + 1), (r, r - 1), (r + 1, r)})


@dataclass(frozen=True)
class PairClassification:
    u: int
    v: int
    s: int | None
    s_prime: int | None
    I: int | None
    J: int | None
    case: str  # NE | DE | NDE | degenerate
    in_R_ex: bool
    swapped: bool = False
    i_max: int | None = None
    reason: str = ""

    @property
    def subcase(self) -> str | None:
        """'I' when both boundary walks reach i_max, 'II' otherwise; None if undefined."""
        if self.case not in ("DE", "NDE") or self.I is None or self.J is None:
            return None
        return "I" if self.I == self.J == self.i_max else "II"

    def as_record(self) -> dict:
        return {
            "u": self.u, "v": self.v, "s": self.s, "s_prime": self.s_prime,
            "I": self.I, "J": self.J, "case": self.case, "in_R_ex": self.in_R_ex,
        }


def containing_indices(part: SetFamily, ell: int) -> set[int] | None:
    """Indices j with every member hitting (j, ell + j); None for an empty part."""
    common = None
    for m in part.masks:
        js = set(line_hit_indices(m, part.n, ell))
        common = js if common is None else common & js
    return common


def threshold_index(F: SetFamily, n: int, level: int, s: int, variant: str) -> int | None:
    """Largest I with the boundary walks 1..I all in F, or None if walk 1 is absent."""
    i_max = d_walk_range(n, level, s)
    if i_max < 1:
        return None
    I = 0
    for i in range(1, i_max + 1):
        if d_walk(n, level, s, i, variant).mask in F.mask_set:
            I = i
        else:
            break
    return I or None


def check_t_nice(A: SetFamily, B: SetFamily, t: int) -> None:
    if A.n != B.n:
        raise DomainError("families live on different ground sets")
    for name, F in (("A", A), ("B", B)):
        if not len(F):
            raise DomainError(f"family {name} is empty")
        if not F.up_closed:
            raise DomainError(f"family {name} is not up-closed")
        if not F.shifted:
            raise DomainError(f"family {name} is not shifted")
    if not cross_t_intersecting(A, B, t):
        raise DomainError(f"families are not cross {t}-intersecting")


def classify_pair(A: SetFamily, B: SetFamily, t: int, r: int) -> PairClassification:
    """Place a t-nice pair into the non-extremal / diagonal / non-diagonal case split."""
    check_t_nice(A, B, t)
    n = A.n
    u, v = walk_lambda(A), walk_lambda(B)
    swapped = u > v
    if swapped:
        A, B, u, v = B, A, v, u
    if u + v != 2 * t:
        why = "u + v > 2t" if u + v > 2 * t else "u + v < 2t"
        return PairClassification(u, v, None, None, None, None, "degenerate", False, swapped,
                                  reason=why)
    _, a_dot, a_ddot = split_by_line(A, u)
    _, b_dot, b_ddot = split_by_line(B, v)
    if not len(a_dot) or not len(b_dot):
        return PairClassification(u, v, None, None, None, None, "degenerate", False, swapped,
                                  reason="empty single-hit part")
    sa = containing_indices(SetFamily(n, a_dot.mask_set | a_ddot.mask_set), u)
    sb = containing_indices(SetFamily(n, b_dot.mask_set | b_ddot.mask_set), v)
    if len(sa) != 1 or len(sb) != 1:
        raise DomainError(f"no unique containing frame (candidates {sorted(sa)}, {sorted(sb)})")
    (s,), (s_prime,) = sa, sb
    in_rex = (s, s_prime) in extremal_subscripts(r)
    if in_rex and s == s_prime:
        case = "DE"
    elif in_rex and s == s_prime + 1:
        case = "NDE"
    else:
        case = "NE"
    I = J = i_max = None
    if case == "DE":
        i_max = d_walk_range(n, u, s)
        I = threshold_index(A, n, u, s, "plain")
        J = threshold_index(B, n, v, s_prime, "plain")
    elif case == "NDE":
        i_max = d_walk_range(n, u, s)
        I = threshold_index(A, n, u, s, "plain")
        J = threshold_index(B, n, v, s_prime, "tilde")
    return PairClassification(u, v, s, s_prime, I, J, case, in_rex, swapped, i_max)
