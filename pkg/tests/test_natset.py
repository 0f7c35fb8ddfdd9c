# tests/test_natset.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from densitylab import tools
from densitylab.natset import (
    EMPTY,
    NATURALS,
    BlockList,
    Complement,
    DisjointUnion,
    Explicit,
    GeomBlocks,
    Intersection,
    Periodic,
    Union,
    naturals_power_sum,
    progression_power_sum,
)

""" Tests for structured sets: counting, power sums and combinations. """


### Strategies ###
@st.composite
def periodic_sets(draw, max_modulus=12):
    m = draw(st.integers(1, max_modulus))
    residues = draw(st.sets(st.integers(0, m - 1), max_size=m))
    return Periodic(m, tuple(residues))


@st.composite
def block_lists(draw):
    edges = draw(st.lists(st.integers(1, 3000), min_size=0, max_size=10, unique=True))
    edges = sorted(edges)
    if len(edges) % 2:
        edges = edges[:-1]
    return BlockList(tuple(zip(edges[::2], edges[1::2])))


@st.composite
def explicit_sets(draw):
    elements = draw(st.lists(st.integers(1, 3000), max_size=30, unique=True))
    return Explicit(tuple(sorted(elements)))


geom_sets = st.builds(
    GeomBlocks,
    st.integers(1, 20),
    st.floats(1.2, 4.0),
    st.floats(1.2, 4.0),
)

base_sets = st.one_of(periodic_sets(), block_lists(), explicit_sets(), geom_sets)
structured_sets = st.one_of(
    base_sets,
    base_sets.map(Complement),
    st.tuples(base_sets, base_sets).map(Intersection),
    st.tuples(base_sets, base_sets).map(Union),
)


def enumerated_counts(A, upto):
    members = np.array([A.member(k) for k in range(1, upto + 1)])
    return np.concatenate([[0], np.cumsum(members)])


### Counting ###
class TestPeriodic:
    def test_count(self):
        A = Periodic(3, (0,))
        assert [A.count(n) for n in range(7)] == [0, 0, 0, 1, 1, 1, 2]
        assert A.count(10) == 3

    def test_residues_sorted(self):
        assert Periodic(4, (3, 0, 1)).residues == (0, 1, 3)

    def test_empty_and_full(self):
        assert EMPTY.count(100) == 0
        assert NATURALS.count(100) == 100
        assert Periodic(5, ()).exact_density() == 0.0

    @pytest.mark.parametrize(
        "modulus, residues, match",
        [
            (0, (0,), r"Modulus must be a positive integer"),
            (4, (4,), r"Residues must lie in \[0, 4\)"),
            (4, (1, 1), r"Residues must be distinct"),
        ],
        ids=["zero-modulus", "residue-too-large", "repeated-residue"],
    )
    def test_invalid(self, modulus, residues, match):
        with pytest.raises(ValueError, match=match):
            Periodic(modulus, residues)

    def test_count_in_range(self):
        A = Periodic(4, (1, 2))
        assert A.count_in_range(1, 9) == 4
        assert A.count_in_range(5, 6) == 1
        assert A.count_in_range(6, 6) == 0


class TestBlocks:
    def test_block_list_count(self):
        A = BlockList(((1, 10), (100, 1000)))
        assert A.count(99) == 9
        assert A.count(500) == 410
        assert A.count(10**6) == 909
        assert A.exact_density() == 0.0

    @pytest.mark.parametrize(
        "intervals, match",
        [
            (((5, 3),), r"must satisfy a < b"),
            (((1, 10), (5, 20)), r"increasing, disjoint"),
            (((0, 3),), r"start at 1 or later"),
        ],
        ids=["reversed", "overlapping", "zero-start"],
    )
    def test_invalid_block_list(self, intervals, match):
        with pytest.raises(ValueError, match=match):
            BlockList(intervals)

    def test_geom_blocks(self, geom_set):
        assert list(geom_set.blocks(40)) == [(1, 2), (4, 8), (16, 32)]
        assert geom_set.count(20) == 10
        assert geom_set.count(31) == 21
        assert geom_set.member(5) and not geom_set.member(9)
        assert geom_set.exact_density() is None

    def test_geom_blocks_invalid(self):
        with pytest.raises(ValueError, match=r"ratios must be greater than 1"):
            GeomBlocks(1, 1.0, 2.0)
        with pytest.raises(ValueError, match=r"start must be a positive integer"):
            GeomBlocks(0, 2.0, 2.0)

    def test_breakpoints(self, geom_set):
        # last non-member before and last member of each block
        assert geom_set.breakpoints(1, 40) == [1, 3, 7, 15, 31]


class TestExplicit:
    def test_count_and_membership(self):
        A = Explicit((1, 5, 9))
        assert A.count(5) == 2
        assert A.member(9) and not A.member(2)
        assert A.runs(10) == [(1, 2), (5, 6), (9, 10)]

    def test_consecutive_elements_merge_into_runs(self):
        assert Explicit((3, 4, 5, 8)).runs(10) == [(3, 6), (8, 9)]

    def test_not_increasing(self):
        with pytest.raises(ValueError, match=r"strictly increasing"):
            Explicit((3, 2))

    def test_empty(self):
        assert Explicit(()).count(10) == 0
        assert Explicit(()).to_expr() == "explicit()"


def test_membership_requires_positive_integer(evens):
    with pytest.raises(ValueError, match=r"positive integers only"):
        evens.member(0)


def test_negative_horizon(evens):
    with pytest.raises(ValueError, match=r"Horizon must be non-negative"):
        evens.count(-1)


### Combinations ###
class TestCombinations:
    def test_complement(self):
        A = Complement(DisjointUnion((Periodic(4, (0,)), Periodic(4, (1,)))))
        assert [k for k in range(1, 9) if A.member(k)] == [2, 3, 6, 7]
        assert A.count(8) == 4
        assert A.exact_density() == 0.5
        assert A.periodic_form() == Periodic(4, (2, 3))

    def test_disjoint_union_certifies_disjointness(self, evens):
        with pytest.raises(tools.DisjointnessViolation, match=r"2 belongs"):
            DisjointUnion((evens, Periodic(4, (0, 2))))

    def test_disjoint_union_flattens(self):
        a, b, c = Periodic(3, (0,)), Periodic(3, (1,)), Explicit((2,))
        nested = DisjointUnion((a, DisjointUnion((b, c))))
        assert nested.parts == (a, b, c)
        assert nested.to_expr() == "union(mod(3;0),union(mod(3;1),explicit(2)))"
        assert nested.exact_density() == pytest.approx(2 / 3)

    def test_intersection_with_blocks(self, geom_set):
        A = Intersection((Periodic(2, (1,)), geom_set))
        # odd members of [1,2) [4,8) [16,32)
        assert A.count(31) == 1 + 2 + 8
        assert A.exact_density() is None

    def test_intersection_of_periodic_sets(self):
        A = Intersection((Periodic(2, (0,)), Periodic(3, (0,))))
        assert A.periodic_form() == Periodic(6, (0,))
        assert A.count(60) == 10
        assert A.exact_density() == pytest.approx(1 / 6)

    def test_union_of_periodic_sets(self):
        A = Union((Periodic(2, (0,)), Periodic(3, (0,))))
        assert A.count(12) == 8
        assert A.exact_density() == pytest.approx(4 / 6)
        assert A.to_expr() == "or(mod(2;0),mod(3;0))"

    def test_union_with_overlap(self, geom_set):
        A = Union((BlockList(((1, 10),)), Explicit((5, 20))))
        assert A.count(30) == 10

    def test_enumeration_fallback_and_cap(self, geom_set):
        # Neither periodic nor decomposable into runs: enumeration only
        A = Union((Periodic(2, (0,)), geom_set), cap=1000)
        counts = enumerated_counts(A, 500)
        assert A.count(500) == counts[-1]
        with pytest.raises(tools.EnumerationCapExceeded):
            A.count(2000)

    def test_cap_not_part_of_equality(self, geom_set):
        assert Union((geom_set, Periodic(2, (0,))), cap=10) == Union(
            (geom_set, Periodic(2, (0,)))
        )


@settings(max_examples=60, deadline=None)
@given(structured_sets)
def test_count_matches_enumeration(A):
    upto = 2000
    expected = enumerated_counts(A, upto)
    assert [A.count(n) for n in range(upto + 1)] == expected.tolist()


@settings(max_examples=60, deadline=None)
@given(structured_sets, st.integers(1, 5000))
def test_complement_counts_add_up(A, n):
    assert A.count(n) + Complement(A).count(n) == n


@settings(max_examples=40, deadline=None)
@given(structured_sets, st.integers(1, 2000))
def test_mask_matches_member(A, lo):
    mask = A.mask(lo, lo + 64)
    assert mask.tolist() == [A.member(k) for k in range(lo, lo + 64)]


### Power sums ###
def _direct_ratio(A, n, alpha):
    ks = np.arange(1, n + 1, dtype=np.float64)
    weights = (ks / n) ** alpha
    members = A.mask(1, n + 1)
    return math.fsum(weights[members]) / math.fsum(weights)


class TestPowerSums:
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0, 8.0])
    def test_ratio_matches_direct_sum(self, geom_set, alpha):
        A = Intersection((Periodic(3, (1, 2)), geom_set))
        n = 5000
        assert A.power_sum_ratio(n, alpha) == pytest.approx(
            _direct_ratio(A, n, alpha), rel=1e-9
        )

    def test_alpha_zero_is_count_ratio(self, geom_set):
        assert geom_set.power_sum_ratio(1000, 0) == geom_set.count(1000) / 1000

    def test_long_progression_approximation(self):
        # 333334 terms: head plus integral with its correction
        A = Periodic(3, (1,))
        n = 10**6
        got = A.power_sum_bounds(n, 2.0)
        expected = _direct_ratio(A, n, 2.0)
        assert got.value == pytest.approx(expected, rel=1e-9)
        assert abs(got.value - expected) <= got.error_bound + 1e-12

    def test_progression_power_sum_exact_branch(self):
        s = progression_power_sum(2, 3, 4, 10, 1.0)
        assert s.value == pytest.approx((2 + 5 + 8 + 11) / 10)
        assert s.error_bound == 0.0

    def test_naturals_power_sum(self):
        assert naturals_power_sum(4, 1.0).value == pytest.approx(10 / 4)

    def test_max_error(self):
        A = Periodic(3, (1,))
        with pytest.raises(tools.ApproximationError) as e:
            A.power_sum_ratio(10**6, 2.0, max_error=0.0)
        assert e.value.error_bound > 0
        # Exactly summed horizons meet any accuracy
        assert A.power_sum_ratio(1000, 2.0, max_error=0.0) > 0

    def test_invalid_arguments(self, evens):
        with pytest.raises(ValueError, match=r"Alpha must be non-negative"):
            evens.power_sum(10, -1.0)
        with pytest.raises(ValueError, match=r"Horizon must be at least 1"):
            evens.power_sum(0, 1.0)

    def test_complement_power_sums_add_up(self, geom_set):
        n, alpha = 10**5, 4.0
        total = geom_set.power_sum_ratio(n, alpha)
        total += Complement(geom_set).power_sum_ratio(n, alpha)
        assert total == pytest.approx(1.0, abs=1e-9)
