"""Exact finite-t evaluators for the closed-form quantities of the stability analysis.

Evaluators return exact rationals.  Whatever tolerance separates a finite-t
value from its large-t limit belongs to the caller.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import e, isqrt

from gmpy2 import comb

from .constructions import extremal_subscripts, frt
from .rational import DomainError, Rational, as_rational, check_probability
from .sets import SetFamily, difference, measure, same_ground, sym_diff


def _binom(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return int(comb(n, k))


def closed_form_measure(t: int, r: int, p) -> Rational:
    """Measure of F_r^t, grouped by |F ∩ [t+2r]|; independent of n."""
    if t < 1 or r < 0:
        raise DomainError(f"need t >= 1 and r >= 0, got t={t}, r={r}")
    p = check_probability(p)
    q = 1 - p
    m = t + 2 * r
    return sum((_binom(m, i) * p ** (m - i) * q**i for i in range(r + 1)), Rational(0))


def frame_measure(level: int, s: int, p) -> Rational:
    """Like closed_form_measure but allows level 0 (then F^0_s, all of whose walks meet the diagonal at (s,s))."""
    p = check_probability(p)
    q = 1 - p
    m = level + 2 * s
    return sum((_binom(m, i) * p ** (m - i) * q**i for i in range(s + 1)), Rational(0))


class Sign(enum.Enum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1

    @classmethod
    def of(cls, x) -> "Sign":
        return cls((x > 0) - (x < 0))


def threshold_sign(t: int, r: int, p) -> Sign:
    """Sign of mu_p(F^t_{r+1}) - mu_p(F^t_r)."""
    return Sign.of(closed_form_measure(t, r + 1, p) - closed_form_measure(t, r, p))


def threshold_p(t: int, r: int) -> Rational:
    """(r+1)/(t+2r+1): where F^t_r and F^t_{r+1} have equal measure."""
    return Rational(r + 1, t + 2 * r + 1)


def p_range(t: int, r: int) -> tuple[Rational, Rational]:
    """r/(t+2r-1) <= p <= (r+1)/(t+2r+1); the lower end is 0 when r = 0."""
    if t < 1 or r < 0:
        raise DomainError(f"need t >= 1 and r >= 0, got t={t}, r={r}")
    lo = Rational(r, t + 2 * r - 1) if r else Rational(0)
    return lo, Rational(r + 1, t + 2 * r + 1)


def h_eval(i: int, j: int, p) -> Rational:
    """p / q^(i+1) + C(i+2j, j) p^j."""
    if i < 0 or j < 0:
        raise DomainError(f"h needs i, j >= 0, got ({i}, {j})")
    p = check_probability(p)
    q = 1 - p
    return p / q ** (i + 1) + _binom(i + 2 * j, j) * p**j


def g_eval(t: int, r: int, s: int, s_prime: int, p) -> Rational:
    """h(u, s) h(v, s') p^(2t) / mu_p(F_r^t)^2 with u = t-(s-s'), v = t+(s-s')."""
    p = check_probability(p)
    u, v = t - (s - s_prime), t + (s - s_prime)
    if u < 1 or v < 1:
        raise DomainError(f"g needs u, v >= 1, got u={u}, v={v}")
    if s < 0 or s_prime < 0:
        raise DomainError(f"g needs s, s' >= 0, got ({s}, {s_prime})")
    # divide out p^t early: mu_p(F_r^t) / p^t is a polynomial of degree 2r in p
    q = 1 - p
    m = t + 2 * r
    reduced = sum((_binom(m, i) * p ** (2 * r - i) * q**i for i in range(r + 1)), Rational(0))
    return h_eval(u, s, p) * h_eval(v, s_prime, p) / reduced**2


def g_first_order(t: int, r: int, s: int, s_prime: int, p) -> float:
    """(r!)^2 (tp)^(s+s'-2r) / (s! s'!)."""
    from math import factorial

    tp = float(as_rational(p) * t)
    return factorial(r) ** 2 * tp ** (s + s_prime - 2 * r) / (factorial(s) * factorial(s_prime))


# Starting points of the ordering chains for the non-extremal subscripts,
# with the value each approaches from below, as functions of r.
NE_STARTS = (
    ((-2, -2), lambda r: Rational((r - 1) ** 2, r**2) if r else None),
    ((2, 2), lambda r: Rational((r + 1) ** 2, (r + 2) ** 2)),
    ((-1, -2), lambda r: Rational(r - 1, r) if r else None),
    ((2, 1), lambda r: Rational(r + 1, r + 2)),
    ((2, 0), lambda r: Rational(r + 1, r + 2)),
    ((2, -1), lambda r: Rational(r, r + 2)),
    ((1, -1), lambda r: Rational(r, r + 1)),
    ((1, -2), lambda r: Rational(r - 1, r + 1)),
    ((0, -2), lambda r: Rational(r - 1, r) if r else None),
)


@dataclass
class GRelations:
    t: int
    r: int
    p: Rational
    s_grid: list[int]
    values: dict[tuple[int, int], Rational] = field(default_factory=dict)
    exchange: list[tuple[tuple[int, int], tuple[int, int], bool]] = field(default_factory=list)
    diagonal: list[tuple[int, bool]] = field(default_factory=list)
    subdiagonal: list[tuple[int, bool]] = field(default_factory=list)
    starts: list[tuple[tuple[int, int], Rational, Rational | None]] = field(default_factory=list)

    @property
    def exchange_ok(self) -> bool:
        return all(ok for *_, ok in self.exchange)

    @property
    def chains_ok(self) -> bool:
        return all(ok for _, ok in self.diagonal) and all(ok for _, ok in self.subdiagonal)


def g_relations(t: int, r: int, p) -> GRelations:
    """Evaluate the g-orderings on the small-s grid and the nine non-extremal starting points.

    Grid: 0 <= s < 2e(r+1).  g with a negative subscript counts as 0.
    """
    p = check_probability(p)
    top = int(2 * e * (r + 1))
    if top >= 2 * e * (r + 1):
        top -= 1
    grid = list(range(top + 1))
    rep = GRelations(t, r, p, grid)
    cache = rep.values

    def g(s, sp):
        if s < 0 or sp < 0:
            return Rational(0)
        if (s, sp) not in cache:
            cache[(s, sp)] = g_eval(t, r, s, sp, p)
        return cache[(s, sp)]

    for s in grid:
        for sp in range(1, s + 1):
            rep.exchange.append(((s, sp), (s + 1, sp - 1), g(s, sp) > g(s + 1, sp - 1)))
    diag_cap = max(g(r - 2, r - 2), g(r + 2, r + 2))
    for s in grid:
        if s not in (r - 1, r, r + 1):
            rep.diagonal.append((s, g(s, s) <= diag_cap))
    sub_cap = max(g(r - 1, r - 2), g(r + 2, r + 1))
    for s in grid:
        if s not in (0, r, r + 1):
            rep.subdiagonal.append((s, g(s, s - 1) <= sub_cap))
    for (ds, dsp), limit in NE_STARTS:
        s, sp = r + ds, r + dsp
        if s < 0 or sp < 0:
            continue
        rep.starts.append(((s, sp), g(s, sp), limit(r)))
    return rep


@dataclass(frozen=True)
class XReport:
    X: Rational
    X_F: Rational
    X_Delta: Rational
    X_star: Rational
    weight_a: Rational  # p^(t-u)
    weight_b: Rational  # p^(t-v)


def x_quantities(A: SetFamily, B: SetFamily, t: int, s: int, s_prime: int, p) -> XReport:
    """Normalised measures of (A, B) against (F^u_s, F^v_{s'})."""
    p = check_probability(p)
    n = same_ground(A, B)
    u, v = t - (s - s_prime), t + (s - s_prime)
    if u < 1 or s_prime < 0 or s < s_prime:
        raise DomainError(f"need s >= s' >= 0 with u >= 1, got s={s}, s'={s_prime}, u={u}")
    if v + 2 * s_prime > n:
        raise DomainError(f"ground set too small: need n >= {v + 2 * s_prime}, got {n}")
    Fa, Fb = frt(n, u, s), frt(n, v, s_prime)
    wa, wb = p ** (t - u), p ** (t - v)

    def combo(x, y):
        return wa * measure(x, p) + wb * measure(y, p)

    return XReport(
        X=combo(A, B),
        X_F=combo(Fa, Fb),
        X_Delta=combo(sym_diff(A, Fa), sym_diff(B, Fb)),
        X_star=combo(difference(A, Fa), difference(B, Fb)),
        weight_a=wa,
        weight_b=wb,
    )


@dataclass(frozen=True)
class RatioReport:
    key: str  # short column name
    label: str
    ratio: Rational
    first_order: float
    main_term: Rational  # leading-binomial expression before dropping 1/t corrections

    @property
    def relative_error(self) -> float:
        return abs(float(self.ratio) / self.first_order - 1)


def ratio_report(t: int, r: int, p) -> list[RatioReport]:
    p = check_probability(p)
    q = 1 - p
    tpq = t * p * q
    base = closed_form_measure(t, r, p)
    out = [
        RatioReport(
            "pair_r+1_r",
            f"F^{{t-1}}_{{{r + 1}}}*F^{{t+1}}_{{{r}}}/(F^t_{r})^2",
            closed_form_measure(t - 1, r + 1, p) * closed_form_measure(t + 1, r, p) / base**2,
            float(tpq / (r + 1)),
            Rational((t + 2 * r + 1) ** 2, (r + 1) * (t + r + 1)) * p * q,
        ),
        RatioReport(
            "single_r+1",
            f"F^t_{{{r + 1}}}/F^t_{r}",
            closed_form_measure(t, r + 1, p) / base,
            float(tpq / (r + 1)),
            Rational((t + 2 * r + 2) * (t + 2 * r + 1), (r + 1) * (t + r + 1)) * p * q,
        ),
    ]
    if r >= 1:
        out += [
            RatioReport(
                "pair_r_r-1",
                f"F^{{t-1}}_{{{r}}}*F^{{t+1}}_{{{r - 1}}}/(F^t_{r})^2",
                closed_form_measure(t - 1, r, p) * closed_form_measure(t + 1, r - 1, p) / base**2,
                float(r / tpq),
                Rational((t + r) * r, (t + 2 * r) ** 2) / (p * q),
            ),
            RatioReport(
                "single_r-1",
                f"F^t_{{{r - 1}}}/F^t_{r}",
                closed_form_measure(t, r - 1, p) / base,
                float(r / tpq),
                Rational(r * (t + r), (t + 2 * r) * (t + 2 * r - 1)) / (p * q),
            ),
        ]
    return out


@dataclass(frozen=True)
class BoundReport:
    single_hit_upper: Rational  # measure bound for the single-hit part when the first boundary walk is absent
    complement_lower: Rational  # lower bound on mu_p(F^t_s minus A) when D_{I+1} is absent
    excess_upper: Rational  # alpha^(t+I), upper bound on mu_p(B minus F^t_s)

    @property
    def lower_over_upper(self) -> Rational:
        return self.complement_lower / self.excess_upper


def bound_report(n: int, t: int, s: int, I: int, p) -> BoundReport:
    p = check_probability(p)
    if t < 1 or s < 0 or I < 1:
        raise DomainError(f"need t >= 1, s >= 0, I >= 1, got t={t}, s={s}, I={I}")
    if I > n - t - 2 * s - 1:
        raise DomainError(f"I={I} exceeds i_max={n - t - 2 * s - 1}")
    q = 1 - p
    a = p / q
    coeff = _binom(t + 2 * s - 1, s) - _binom(t + 2 * s - 1, s - 1) - _binom(t + s - 1, s)
    return BoundReport(
        single_hit_upper=coeff * p ** (t + s) * q**s,
        complement_lower=_binom(t + s - 1, s) * p ** (t + s) * q ** (s + I + 1) * (1 - a),
        excess_upper=a ** (t + I),
    )


@dataclass(frozen=True)
class EndpointCheck:
    lower_endpoint: bool | None  # pq > r/(t+3r) at p = r/(t+2r-1); undefined for r = 0
    upper_endpoint: bool  # pq < (r+1)(t+1)/((t+2r+1)(t+r+1)) at p = (r+1)/(t+2r+1)


def endpoint_check(t: int, r: int) -> EndpointCheck:
    """The two endpoint inequalities that make the off-diagonal pairs lose to (F_r^t)^2."""
    if t < 1 or r < 0:
        raise DomainError(f"need t >= 1 and r >= 0, got t={t}, r={r}")
    lower = None
    if r >= 1:
        p = Rational(r, t + 2 * r - 1)
        lower = p * (1 - p) > Rational(r, t + 3 * r)
    p = Rational(r + 1, t + 2 * r + 1)
    upper = p * (1 - p) < Rational((r + 1) * (t + 1), (t + 2 * r + 1) * (t + r + 1))
    return EndpointCheck(lower, upper)


@dataclass(frozen=True)
class Budget:
    """2(1 - sqrt(1-delta)) / (1 - 2 eps1), exact or enclosed in [lower, upper]."""

    lower: Rational
    upper: Rational
    exact: bool
    bits: int = 128

    @property
    def width(self) -> Rational:
        return self.upper - self.lower

    @property
    def value(self) -> Rational:
        if not self.exact:
            raise DomainError("budget is irrational here; use lower/upper")
        return self.lower


def _rational_sqrt(x: Rational) -> Rational | None:
    a, b = int(x.numerator), int(x.denominator)
    ra, rb = isqrt(a), isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Rational(ra, rb)
    return None


def weakstability_budget(delta, epsilon1, bits: int = 128) -> Budget:
    delta, epsilon1 = as_rational(delta), as_rational(epsilon1)
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    if not 0 < epsilon1 < Rational(1, 2):
        raise DomainError("epsilon1 must lie in (0, 1/2)")
    x = 1 - delta
    c = 2 / (1 - 2 * epsilon1)
    root = _rational_sqrt(x)
    if root is not None:
        val = c * (1 - root)
        return Budget(val, val, True, bits)
    a, b = int(x.numerator), int(x.denominator)
    scale = 1 << bits
    lo_root = isqrt(a * scale * scale // b)  # floor(sqrt(x) * 2^bits)
    root_lo = Rational(lo_root, scale)
    root_hi = Rational(lo_root + 1, scale)
    return Budget(c * (1 - root_hi), c * (1 - root_lo), False, bits)
