from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

import oracles
from aklab.constructions import frt
from aklab.rational import DomainError, Rational, parse_rational
from aklab.sets import (
    SetFamily,
    Subset,
    cross_t_intersecting,
    difference,
    dual,
    measure,
    predicates,
    shift_fixpoint,
    shift_ij,
    shifts_to,
    sym_diff,
    union,
    up_closure,
)

Q = Rational


def fam(n, *sets):
    return SetFamily.from_sets(n, sets)


@st.composite
def families(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    masks = draw(st.lists(st.integers(0, (1 << n) - 1), max_size=40))
    return SetFamily(n, masks)


class TestRational:
    def test_parse(self):
        assert parse_rational("3/9") == Q(1, 3)
        assert parse_rational(" -2 / 4 ") == Q(-1, 2)

    @pytest.mark.parametrize("bad", ["0.3", "1", "1/0", "a/b", "1//2"])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            parse_rational(bad)

    def test_lowest_terms(self):
        x = parse_rational("6/4")
        assert (x.numerator, x.denominator) == (3, 2)


class TestSubset:
    def test_members_and_bounds(self):
        A = Subset.of(7, [6, 2, 4])
        assert A.members == (2, 4, 6)
        assert 4 in A and 5 not in A
        assert A.ith(2) == 4
        with pytest.raises(DomainError):
            Subset.of(3, [4])
        with pytest.raises(DomainError):
            Subset(25, 0)


class TestMeasure:
    def test_examples(self):
        assert measure(SetFamily(3), Q(1, 3)) == 0
        assert measure(fam(2, {1}, {1, 2}), Q(1, 3)) == Q(1, 3)
        for n in (1, 5, 9):
            assert measure(SetFamily.power_set(n), Q(2, 7)) == 1

    @pytest.mark.parametrize("p", [Q(1, 5), Q(1, 3), Q(1, 2)])
    def test_power_set_normalised(self, p):
        for n in range(1, 15):
            assert measure(SetFamily.power_set(n), p) == 1

    @pytest.mark.parametrize("p", [Q(0), Q(1), Q(3, 2), Q(-1, 3)])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            measure(SetFamily(2), p)

    def test_rejects_float(self):
        with pytest.raises(TypeError):
            measure(SetFamily(2), 0.5)

    @given(families(), st.sampled_from([Fr(1, 5), Fr(1, 3), Fr(3, 7)]))
    def test_matches_term_by_term(self, F, p):
        sets = [frozenset(m) for m in F.member_lists()]
        assert measure(F, p) == oracles.measure(sets, F.n, p)


class TestPredicates:
    def test_examples(self):
        F = fam(3, {1, 2}, {1, 3}, {1, 2, 3})
        assert predicates(F, 1).t_intersecting
        assert not predicates(fam(2, {2}, {1, 2}), 1).shifted
        pr = predicates(frt(4, 2, 1), 2)
        assert pr.t_intersecting and pr.up_closed and pr.shifted and pr.t_nice

    def test_empty_family_vacuous(self):
        pr = predicates(SetFamily(4), 3)
        assert pr.t_intersecting and pr.up_closed and pr.shifted

    def test_t_must_be_positive(self):
        with pytest.raises(DomainError):
            predicates(SetFamily(2), 0)

    def test_single_small_set_not_t_intersecting(self):
        # |A ∩ A| = |A| < t
        assert not predicates(fam(3, {1}), 2).t_intersecting

    @given(families(max_n=6), st.integers(1, 3))
    def test_against_oracle(self, F, t):
        sets = {frozenset(m) for m in F.member_lists()}
        pr = predicates(F, t)
        assert pr.t_intersecting == oracles.is_t_intersecting(sets, t)
        assert pr.up_closed == oracles.is_up_closed(sets, F.n)
        assert pr.shifted == oracles.is_shifted(sets)


class TestCross:
    def test_examples(self):
        assert cross_t_intersecting(fam(3, {1, 2}), fam(3, {1, 2}, {1, 2, 3}), 2)
        assert not cross_t_intersecting(fam(3, {1, 2}), fam(3, {1, 3}), 2)
        # F_1^1 against F_0^3 on [4]
        assert cross_t_intersecting(frt(4, 1, 1), frt(4, 3, 0), 2)

    def test_mismatched_ground(self):
        with pytest.raises(DomainError):
            cross_t_intersecting(SetFamily(2), SetFamily(3), 1)

    @given(families(max_n=6), st.data(), st.integers(1, 3))
    def test_against_oracle(self, A, data, t):
        masks = data.draw(st.lists(st.integers(0, (1 << A.n) - 1), max_size=20))
        B = SetFamily(A.n, masks)
        a = [frozenset(x) for x in A.member_lists()]
        b = [frozenset(x) for x in B.member_lists()]
        assert cross_t_intersecting(A, B, t) == all(len(x & y) >= t for x in a for y in b)


class TestShift:
    def test_examples(self):
        F = fam(2, {2}, {1, 2})
        G = shift_ij(F, 1, 2)
        assert G == fam(2, {1}, {1, 2})
        assert measure(F, Q(1, 3)) == measure(G, Q(1, 3)) == Q(1, 3)
        assert shift_fixpoint(F) == G
        assert shift_fixpoint(SetFamily(5)) == SetFamily(5)
        H = frt(6, 2, 1)
        assert shift_fixpoint(H) == H
        assert shift_ij(H, 2, 5) is H

    @pytest.mark.parametrize("i,j", [(2, 2), (3, 1), (0, 2), (1, 4)])
    def test_domain(self, i, j):
        with pytest.raises(DomainError):
            shift_ij(SetFamily(3), i, j)

    @given(families(), st.data())
    def test_invariants(self, F, data):
        if F.n < 2:
            return
        i = data.draw(st.integers(1, F.n - 1))
        j = data.draw(st.integers(i + 1, F.n))
        G = shift_ij(F, i, j)
        assert len(G) == len(F)
        assert measure(G, Q(2, 7)) == measure(F, Q(2, 7))
        U = up_closure(F)
        assert shift_ij(U, i, j).up_closed
        assert shift_fixpoint(F).shifted


class TestShiftsToAndDual:
    def test_examples(self):
        assert shifts_to(Subset.of(7, [2, 4, 6]), Subset.of(7, [1, 4, 5, 7]))
        A = Subset.of(5, [2, 3])
        assert shifts_to(A, A)
        assert not shifts_to(Subset.of(2, [1]), Subset.of(2, [2]))

    def test_dual_examples(self):
        assert dual(Subset.of(7, [2, 4, 6]), 2).members == (1, 2, 3, 5, 7)
        for n, t in [(5, 1), (6, 3), (9, 4)]:
            got = dual(Subset.of(n, range(1, t + 1)), t).members
            assert got == tuple(range(1, t)) + tuple(range(t + 1, n + 1))

    def test_dual_domain(self):
        with pytest.raises(DomainError):
            dual(Subset.of(5, [1, 2]), 3)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_dual_exhaustive_small(self, n):
        subs = oracles.all_subsets(n)
        for t in range(1, min(n, 4) + 1):
            for A in subs:
                if len(A) < t:
                    continue
                D = dual(Subset.of(n, A), t)
                assert frozenset(D.members) == oracles.dual(A, t, n)
                assert len(A & frozenset(D.members)) == t - 1
                for B in subs:
                    if len(A & B) == t - 1:
                        assert oracles.shifts_to(B, frozenset(D.members))


class TestClosureAndAlgebra:
    def test_up_closure(self):
        assert up_closure(fam(3, {1, 2})) == fam(3, {1, 2}, {1, 2, 3})
        F = frt(5, 1, 1)
        assert up_closure(F) == F
        assert up_closure(SetFamily(3)) == SetFamily(3)

    @given(families(max_n=6))
    def test_up_closure_is_smallest(self, F):
        U = up_closure(F)
        assert U.up_closed and F <= U and up_closure(U) == U
        sets = {frozenset(m) for m in F.member_lists()}
        want = {S for S in oracles.all_subsets(F.n) if any(A <= S for A in sets)}
        assert {frozenset(m) for m in U.member_lists()} == want

    def test_sym_diff(self):
        F = frt(4, 2, 1)
        assert sym_diff(F, F) == SetFamily(4)
        assert sym_diff(F, SetFamily(4)) == F
        D = sym_diff(frt(4, 2, 0), F)
        want = oracles.frt(4, 2, 0) ^ oracles.frt(4, 2, 1)
        assert {frozenset(m) for m in D.member_lists()} == want
        assert union(difference(frt(4, 2, 0), F), difference(F, frt(4, 2, 0))) == D

    def test_mismatched(self):
        with pytest.raises(DomainError):
            sym_diff(SetFamily(2), SetFamily(3))


class TestFacts:
    def test_dual_not_in_partner(self):
        from aklab.constructions import extremal_pair, near_extremal

        pairs = [extremal_pair(8, 2, 1, 1), extremal_pair(8, 2, 1, 0), near_extremal(8, 2, 1)]
        for A, B in pairs:
            for S in A:
                if len(S) >= 2:
                    assert dual(S, 2).mask not in B.mask_set

    @pytest.mark.parametrize("n", range(2, 9))
    def test_shift_closure(self, n):
        subs = [Subset(n, m) for m in range(1 << n)]
        for t in (1, 2):
            for r in range(0, (n - t) // 2 + 1):
                F = frt(n, t, r)
                for S in F:
                    for T in subs:
                        if shifts_to(S, T):
                            assert T in F
