from fractions import Fraction as Fr

import pytest

import oracles
from aklab.analytics import closed_form_measure
from aklab.constructions import frt
from aklab.rational import DomainError, Rational
from aklab.search import (
    SearchBoundError,
    ak_reference,
    best_response,
    certificate_ok,
    check_search_size,
    max_cross,
    max_single,
    search_limit,
)
from aklab.sets import SetFamily, cross_t_intersecting, measure

Q = Rational
GRID = [Q(1, 5), Q(1, 4), Q(1, 3), Q(2, 5)]


def members(F):
    return {frozenset(m) for m in F.member_lists()}


class TestBestResponse:
    def test_examples(self):
        for t in (1, 2):
            F = frt(5, t, 0)
            assert best_response(F, t) == F
        F = frt(4, 2, 1)
        assert best_response(F, 2) == F
        full = SetFamily(4, [0b1111])
        assert best_response(full, 2) == SetFamily(4, [m for m in range(16) if m.bit_count() >= 2])

    def test_empty(self):
        with pytest.raises(DomainError):
            best_response(SetFamily(3), 1)

    @pytest.mark.parametrize("n", [3, 4])
    def test_antitone_and_triple(self, n):
        ups = [F for F in oracles.up_sets(n) if F]
        fams = [SetFamily.from_sets(n, F) for F in ups]
        for t in (1, 2):
            br = [best_response(F, t) for F in fams]
            for F, B, raw in zip(fams, br, ups):
                assert members(B) == oracles.best_response(raw, n, t)
                assert B.up_closed
                if len(B):
                    BB = best_response(B, t)
                    if len(BB):
                        assert best_response(BB, t) == B
            for i, F in enumerate(fams[:40]):
                for j, G in enumerate(fams[:40]):
                    if F <= G:
                        assert br[j] <= br[i]


class TestMaxSingle:
    def test_examples(self):
        c = max_single(2, 1, Q(1, 4))
        assert c.value == Q(1, 4) and c.argmax == frt(2, 1, 0)
        assert max_single(4, 2, Q(1, 3)).value == Q(1, 9)
        c = max_single(3, 3, Q(2, 7))
        assert c.value == Q(2, 7) ** 3 and c.argmax == SetFamily(3, [0b111])

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_against_brute_force(self, n):
        for t in (1, 2, 3):
            for p in GRID:
                assert max_single(n, t, p).value == oracles.max_single(n, t, Fr(int(p.numerator), int(p.denominator)))

    def test_tie_break_is_lexicographic(self):
        # at the threshold both F_0^2 and F_1^2 are optimal on [4]
        c = max_single(4, 2, Q(1, 3))
        ties = [F for F in (frt(4, 2, 0), frt(4, 2, 1))]
        assert measure(ties[0], Q(1, 3)) == measure(ties[1], Q(1, 3)) == c.value
        assert c.argmax.sort_key() <= min(F.sort_key() for F in ties)
        assert certificate_ok(c, 2)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_shifted_only_same_value(self, n):
        for t in (1, 2):
            for p in GRID:
                a = max_single(n, t, p)
                b = max_single(n, t, p, shifted_only=True)
                assert a.value == b.value
                assert certificate_ok(b, t) and b.argmax.shifted

    def test_no_feasible_sets(self):
        c = max_single(2, 3, Q(1, 3))
        assert c.value == 0 and len(c.argmax) == 0


class TestMaxCross:
    def test_examples(self):
        c = max_cross(2, 2, Q(1, 3))
        assert c.value == Q(1, 3) ** 4
        assert c.argmax == (SetFamily(2, [3]), SetFamily(2, [3]))
        c = max_cross(4, 2, Q(1, 4))
        assert c.value >= measure(frt(4, 2, 0), Q(1, 4)) ** 2
        assert certificate_ok(c, 2) and c.label == "conjecture exploration"
        c = max_cross(5, 1, Q(1, 3))
        assert c.value == max_single(5, 1, Q(1, 3)).value ** 2

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_against_brute_force(self, n):
        for t in (1, 2):
            for p in (Q(1, 4), Q(2, 5)):
                got = max_cross(n, t, p)
                assert got.value == oracles.max_cross(n, t, Fr(int(p.numerator), int(p.denominator)))
                A, B = got.argmax
                assert cross_t_intersecting(A, B, t)
                assert measure(A, p) * measure(B, p) == got.value

    def test_deterministic(self):
        a = max_cross(4, 1, Q(1, 3))
        b = max_cross(4, 1, Q(1, 3))
        assert a == b


class TestReference:
    def test_examples(self):
        ref = ak_reference(4, 2, Q(1, 3))
        assert ref.best_value == Q(1, 9) and ref.best_r == (0, 1)
        ref = ak_reference(4, 2, Q(1, 4))
        assert ref.best_r == (0,) and ref.best_value == Q(1, 16)
        ref = ak_reference(3, 3, Q(1, 5))
        assert ref.per_r == [(0, Q(1, 125))]

    def test_matches_closed_form(self):
        ref = ak_reference(9, 2, Q(1, 4))
        assert [v for _, v in ref.per_r] == [closed_form_measure(2, r, Q(1, 4)) for r in range(4)]


class TestBounds:
    def test_default(self, monkeypatch):
        monkeypatch.delenv("AKLAB_MAX_N", raising=False)
        assert search_limit() == 6
        with pytest.raises(SearchBoundError):
            max_single(7, 1, Q(1, 3))
        with pytest.raises(SearchBoundError):
            check_search_size(7, False, True)
        check_search_size(7, True, True)
        with pytest.raises(SearchBoundError):
            check_search_size(8, True, True)

    def test_env_only_lowers(self, monkeypatch):
        monkeypatch.setenv("AKLAB_MAX_N", "3")
        assert search_limit() == 3
        with pytest.raises(SearchBoundError):
            max_single(4, 1, Q(1, 3))
        assert max_single(4, 1, Q(1, 3), force=True).value == Q(1, 3)
        monkeypatch.setenv("AKLAB_MAX_N", "12")
        assert search_limit() == 6
        monkeypatch.setenv("AKLAB_MAX_N", "six")
        with pytest.raises(SearchBoundError):
            search_limit()
