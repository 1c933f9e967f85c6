"""Subsets of [n] as bit words, families of them, and the basic operations.

Element ``i`` of ``[n] = {1, ..., n}`` is bit ``i - 1`` of a subset's mask.
Families are immutable; their derived flags are computed once on demand.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator

from .rational import DomainError, Rational, check_probability

MAX_N = 24


def check_ground(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool):
        raise DomainError(f"ground set size must be an integer, got {n!r}")
    if not 1 <= n <= MAX_N:
        raise DomainError(f"ground set size must satisfy 1 <= n <= {MAX_N}, got {n}")
    return n


def mask_members(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def members_mask(members: Iterable[int]) -> int:
    mask = 0
    for x in members:
        mask |= 1 << (x - 1)
    return mask


def interval_mask(a: int, b: int) -> int:
    """Mask of [a, b]; empty when a > b."""
    if a > b:
        return 0
    a = max(a, 1)
    return ((1 << b) - 1) ^ ((1 << (a - 1)) - 1)


def canonical_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Order sets by size, then lexicographically by sorted members."""
    return (mask.bit_count(), mask_members(mask))


@dataclass(frozen=True)
class Subset:
    n: int
    mask: int

    def __post_init__(self):
        check_ground(self.n)
        if self.mask < 0 or self.mask >> self.n:
            raise DomainError(f"mask {self.mask:#x} has elements outside [1, {self.n}]")

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> "Subset":
        members = list(members)
        for x in members:
            if not 1 <= x <= n:
                raise DomainError(f"element {x} outside [1, {n}]")
        return cls(n, members_mask(members))

    @cached_property
    def members(self) -> tuple[int, ...]:
        return mask_members(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, x: int) -> bool:
        return 1 <= x <= self.n and bool(self.mask >> (x - 1) & 1)

    def ith(self, i: int) -> int:
        """The i-th smallest element, 1-based."""
        return self.members[i - 1]

    def __repr__(self) -> str:
        return f"Subset({self.n}, {set(self.members) or '{}'})"


@dataclass(frozen=True)
class Predicates:
    t_intersecting: bool
    up_closed: bool
    shifted: bool

    @property
    def t_nice(self) -> bool:
        return self.t_intersecting and self.up_closed and self.shifted


class SetFamily:
    """A duplicate-free family of subsets of [n].

    Members are kept as masks in canonical order (size, then lexicographic).
    """

    def __init__(self, n: int, masks: Iterable[int] = ()):
        check_ground(n)
        limit = 1 << n
        uniq = set()
        for m in masks:
            if not 0 <= m < limit:
                raise DomainError(f"mask {m:#x} has elements outside [1, {n}]")
            uniq.add(m)
        self.n = n
        self.masks: tuple[int, ...] = tuple(sorted(uniq, key=canonical_key))
        self._index = frozenset(uniq)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        out = []
        for s in sets:
            if isinstance(s, Subset):
                out.append(s.mask)
                continue
            s = list(s)
            for x in s:
                if not 1 <= x <= n:
                    raise DomainError(f"element {x} outside [1, {n}]")
            out.append(members_mask(s))
        return cls(n, out)

    @classmethod
    def power_set(cls, n: int) -> "SetFamily":
        return cls(n, range(1 << check_ground(n)))

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[Subset]:
        return (Subset(self.n, m) for m in self.masks)

    def __contains__(self, item) -> bool:
        if isinstance(item, Subset):
            return item.n == self.n and item.mask in self._index
        if isinstance(item, int):
            return item in self._index
        return members_mask(item) in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetFamily):
            return NotImplemented
        return self.n == other.n and self._index == other._index

    def __hash__(self) -> int:
        return hash((self.n, self._index))

    def __le__(self, other: "SetFamily") -> bool:
        same_ground(self, other)
        return self._index <= other._index

    def __repr__(self) -> str:
        shown = ", ".join(str(set(mask_members(m)) or "{}") for m in self.masks[:6])
        more = ", ..." if len(self.masks) > 6 else ""
        return f"SetFamily(n={self.n}, [{shown}{more}], size={len(self)})"

    @property
    def mask_set(self) -> frozenset[int]:
        return self._index

    def member_lists(self) -> list[tuple[int, ...]]:
        return [mask_members(m) for m in self.masks]

    def sort_key(self) -> tuple[tuple[int, ...], ...]:
        """Lexicographic key over the sorted member lists (used for tie-breaks)."""
        return tuple(sorted(mask_members(m) for m in self.masks))

    @cached_property
    def up_closed(self) -> bool:
        full = (1 << self.n) - 1
        idx = self._index
        for m in self.masks:
            free = full & ~m
            while free:
                bit = free & -free
                if m | bit not in idx:
                    return False
                free ^= bit
        return True

    @cached_property
    def shifted(self) -> bool:
        idx = self._index
        n = self.n
        for m in self.masks:
            for j in range(1, n):
                bj = 1 << j
                if not m & bj:
                    continue
                for i in range(j):
                    bi = 1 << i
                    if not m & bi and (m ^ bj ^ bi) not in idx:
                        return False
        return True

    @cached_property
    def minimal_masks(self) -> tuple[int, ...]:
        """Inclusion-minimal members."""
        idx = self._index
        if self.up_closed:
            out = []
            for m in self.masks:
                rest = m
                minimal = True
                while rest:
                    bit = rest & -rest
                    if m ^ bit in idx:
                        minimal = False
                        break
                    rest ^= bit
                if minimal:
                    out.append(m)
            return tuple(out)
        out = []
        # masks are sorted by size, so any proper subset appears earlier
        for m in self.masks:
            if not any(k & m == k for k in out):
                out.append(m)
        return tuple(out)

    @cached_property
    def _t_cache(self) -> dict[int, bool]:
        return {}

    def is_t_intersecting(self, t: int) -> bool:
        if t not in self._t_cache:
            mins = self.minimal_masks
            ok = all(m.bit_count() >= t for m in mins)
            if ok:
                ok = all((a & b).bit_count() >= t for a, b in combinations(mins, 2))
            self._t_cache[t] = ok
        return self._t_cache[t]


def same_ground(A: SetFamily, B: SetFamily) -> int:
    if A.n != B.n:
        raise DomainError(f"families live on different ground sets (n={A.n} vs n={B.n})")
    return A.n


def measure(F: SetFamily, p) -> Rational:
    """Exact product measure: sum over members of p^|A| (1-p)^(n-|A|)."""
    p = check_probability(p)
    q = 1 - p
    sizes = Counter(m.bit_count() for m in F.masks)
    total = Rational(0)
    for k, count in sizes.items():
        total += count * p**k * q ** (F.n - k)
    return total


def predicates(F: SetFamily, t: int) -> Predicates:
    if t < 1:
        raise DomainError(f"t must be at least 1, got {t}")
    return Predicates(F.is_t_intersecting(t), F.up_closed, F.shifted)


def cross_t_intersecting(A: SetFamily, B: SetFamily, t: int) -> bool:
    same_ground(A, B)
    ma, mb = A.minimal_masks, B.minimal_masks
    return all((a & b).bit_count() >= t for a in ma for b in mb)


def shift_ij(F: SetFamily, i: int, j: int) -> SetFamily:
    """The (i, j)-compression: replace j by i wherever the result is new."""
    if not 1 <= i < j <= F.n:
        raise DomainError(f"shift needs 1 <= i < j <= n, got i={i}, j={j}, n={F.n}")
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    idx = F.mask_set
    out = []
    changed = False
    for m in F.masks:
        if m & bj and not m & bi:
            moved = m ^ bj ^ bi
            if moved not in idx:
                out.append(moved)
                changed = True
                continue
        out.append(m)
    return SetFamily(F.n, out) if changed else F


def shift_fixpoint(F: SetFamily) -> SetFamily:
    pairs = [(i, j) for i in range(1, F.n + 1) for j in range(i + 1, F.n + 1)]
    while True:
        before = F
        for i, j in pairs:
            F = shift_ij(F, i, j)
        if F == before:
            return F


def shifts_to(A: Subset, B: Subset) -> bool:
    """A -> B: |A| <= |B| and the i-th element of A is >= that of B."""
    if A.n != B.n:
        raise DomainError("subsets of different ground sets")
    a, b = A.members, B.members
    if len(a) > len(b):
        return False
    return all(x >= y for x, y in zip(a, b))


def dual(A: Subset, t: int) -> Subset:
    """[(A)_t - 1] together with the complement of A."""
    if t < 1 or len(A) < t:
        raise DomainError(f"dual needs |A| >= t >= 1, got |A|={len(A)}, t={t}")
    full = (1 << A.n) - 1
    return Subset(A.n, interval_mask(1, A.ith(t) - 1) | (full & ~A.mask))


def up_closure(F: SetFamily) -> SetFamily:
    if F.up_closed:
        return F
    full = (1 << F.n) - 1
    seen = set(F.masks)
    stack = list(F.masks)
    while stack:
        m = stack.pop()
        free = full & ~m
        while free:
            bit = free & -free
            sup = m | bit
            if sup not in seen:
                seen.add(sup)
                stack.append(sup)
            free ^= bit
    return SetFamily(F.n, seen)


def sym_diff(A: SetFamily, B: SetFamily) -> SetFamily:
    same_ground(A, B)
    return SetFamily(A.n, A.mask_set ^ B.mask_set)


def difference(A: SetFamily, B: SetFamily) -> SetFamily:
    same_ground(A, B)
    return SetFamily(A.n, A.mask_set - B.mask_set)


def union(A: SetFamily, B: SetFamily) -> SetFamily:
    same_ground(A, B)
    return SetFamily(A.n, A.mask_set | B.mask_set)
