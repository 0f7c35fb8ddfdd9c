# tests/test_polya.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from densitylab.natset import BlockList, Complement, Explicit, GeomBlocks, Periodic
from densitylab.polya import (
    continuity_modulus_check,
    phi,
    phi_profile,
    select_index_set,
    t_estimate,
    theta,
    theta_evaluation,
    theta_extreme,
    theta_liminf,
    theta_limsup,
    window_bounds,
    window_candidates,
    window_sum,
)
from densitylab.seqcore import (
    Affine,
    ConstantValue,
    Indicator,
    PeriodicValues,
    SeededRandom01,
)

""" Tests for window averages, t(x), the Pólya densities and phi. """


### Windows ###
@pytest.mark.parametrize(
    "th, r, bounds",
    [(0.5, 100, (50, 100)), (0.5, 10.5, (5, 10)), (0.75, 8, (6, 8))],
    ids=["integer", "real-horizon", "three-quarters"],
)
def test_window_bounds(th, r, bounds):
    assert window_bounds(th, r) == bounds


@pytest.mark.parametrize(
    "th, r, match",
    [
        (0.0, 10, r"Theta must lie in \(0, 1\)"),
        (1.0, 10, r"Theta must lie in \(0, 1\)"),
        (0.5, 0.5, r"Window horizon r must be at least 1"),
    ],
    ids=["theta-zero", "theta-one", "short-horizon"],
)
def test_window_invalid(th, r, match):
    with pytest.raises(ValueError, match=match):
        window_bounds(th, r)


def test_theta_examples(evens, geom_set):
    assert theta(ConstantValue(1.0), 0.5, 100) == 1.0
    assert theta(Indicator(evens), 0.5, 100) == 0.5
    # 17..31 lie in the block [16, 32)
    assert theta(Indicator(geom_set), 0.5, 32) == 15 / 16


def test_left_endpoint_excluded():
    x = Indicator(Explicit((5,)))
    assert theta(x, 0.5, 10) == 0.0
    assert theta(x, 0.4, 10) == pytest.approx(1 / 6)


def test_theta_evaluation():
    evaluation = theta_evaluation(ConstantValue(0.5), 0.75, 8)
    assert evaluation.window_count == 2
    assert evaluation.value == 0.5
    assert evaluation.r == 8.0


### Window identities ###
THETAS = [1 - 2.0**-k for k in range(1, 11)]
WINDOW_SEQUENCES = [
    ConstantValue(0.3),
    PeriodicValues((0.2, -0.9, 0.4)),
    SeededRandom01(5, cap=2**17),
    Indicator(GeomBlocks(1, 2, 2)),
]
WINDOW_SETS = [
    Periodic(2, (0,)),
    GeomBlocks(1, 2, 2),
    Explicit((1, 5, 9)),
    BlockList(((1, 10), (100, 1000))),
]

# Dyadic horizons keep theta * r exact in floating point
horizons = st.builds(lambda n, m: n + m / 8, st.integers(2, 2**16), st.integers(0, 7))


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from(WINDOW_SEQUENCES),
    st.sampled_from(THETAS),
    horizons,
    st.floats(-0.999, 0.999),
)
def test_nearby_horizons_move_window_sum_by_two_values(x, th, r, shift):
    r2 = max(1.0, r + shift)
    assert abs(window_sum(x, th, r) - window_sum(x, th, r2)) <= 2 * x.sup_bound + 1e-9


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from(WINDOW_SEQUENCES),
    st.sampled_from(THETAS),
    horizons,
    st.floats(-2.0, 2.0),
    st.floats(-2.0, 2.0),
)
def test_theta_is_affine_equivariant(x, th, r, c, d):
    expected = c * theta(x, th, r) + d * theta(ConstantValue(1.0), th, r)
    assert theta(Affine(c, d, x), th, r) == pytest.approx(expected, abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(WINDOW_SETS), st.sampled_from(THETAS), horizons)
def test_set_and_complement_fill_the_window(A, th, r):
    both = theta(Indicator(A), th, r) + theta(Indicator(Complement(A)), th, r)
    assert both == pytest.approx(theta(ConstantValue(1.0), th, r), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from(WINDOW_SEQUENCES),
    st.sampled_from(THETAS),
    st.sampled_from(THETAS),
    horizons,
)
def test_window_splits_at_the_inner_ratio(x, th, th2, r):
    split = window_sum(x, th, th2 * r) + window_sum(x, th2, r)
    assert window_sum(x, th * th2, r) == pytest.approx(split, abs=1e-8)


@pytest.mark.parametrize(
    "A", WINDOW_SETS, ids=["evens", "geom", "explicit", "list"]
)
def test_indicator_split_is_exact(A):
    x = Indicator(A)
    for th, th2, r in [(0.5, 0.75, 1000), (0.75, 0.875, 4096.5), (0.5, 0.5, 37.25)]:
        split = window_sum(x, th, th2 * r) + window_sum(x, th2, r)
        assert window_sum(x, th * th2, r) == split


def test_window_candidates(geom_set):
    # 31 is the last member of [16, 32)
    candidates = window_candidates(Indicator(geom_set), 0.5, 20, 70)
    assert 31 in candidates and 32 in candidates and 62 in candidates
    assert all(20 <= n <= 70 for n in candidates)


### Extremes over the tail ###
def test_theta_extremes_of_evens(evens, desk_config):
    x = Indicator(evens)
    assert theta_limsup(x, 0.5, desk_config) == 0.5
    assert theta_liminf(x, 0.5, desk_config) == 0.5


def test_ties_resolve_to_smallest_horizon(desk_config):
    n, value = theta_extreme(ConstantValue(0.5), 0.5, desk_config)
    assert value == 0.5
    assert n == desk_config.tail_horizons()[0]


def test_geom_extremes_sit_inside_blocks(geom_set, desk_config):
    n, value = theta_extreme(Indicator(geom_set), 0.75, desk_config)
    assert value == pytest.approx(1.0, abs=1e-3)
    assert geom_set.member(n)


def test_coarse_windows_are_skipped(geom_set, desk_config):
    th = desk_config.theta_grid[-1]
    n, value = theta_extreme(Indicator(geom_set), th, desk_config)
    assert n - int(th * n) >= desk_config.min_window
    assert value >= 0.99


def test_short_horizons_fall_back_to_the_largest(make_config):
    cfg = make_config(2**10)
    th = cfg.theta_grid[-1]
    assert theta_extreme(ConstantValue(0.5), th, cfg) == (1024, 0.5)


class TestTEstimate:
    def test_periodic_set(self, make_config):
        report = t_estimate(Indicator(Periodic(3, (0,))), make_config())
        assert report.extrapolated == pytest.approx(1 / 3, abs=1e-2)
        assert report.quantity == "upper_polya_density"

    def test_evens(self, evens, make_config):
        report = t_estimate(Indicator(evens), make_config())
        assert report.extrapolated == pytest.approx(0.5, abs=1e-3)

    def test_geom_blocks(self, geom_set, make_config):
        cfg = make_config()
        x = Indicator(geom_set)
        assert t_estimate(x, cfg).extrapolated >= 0.98
        lower = t_estimate(x, cfg, "lower")
        assert lower.extrapolated <= 0.02
        assert lower.quantity == "lower_polya_density"

    def test_constant(self, make_config):
        report = t_estimate(ConstantValue(0.3), make_config())
        assert report.extrapolated == 0.3
        assert report.quantity == "upper_t"
        assert len(report.estimates) == 10

    def test_lower_side_is_reflected_upper_side(self, make_config):
        cfg = make_config()
        x = PeriodicValues((0.2, 0.9, 0.4))
        lower = t_estimate(x, cfg, "lower").extrapolated
        reflected = t_estimate(Affine(-1.0, 0.0, x), cfg).extrapolated
        assert lower == pytest.approx(-reflected, abs=1e-12)

    def test_display(self, evens, desk_config, capsys):
        t_estimate(Indicator(evens), desk_config, disp=True)
        assert "upper_polya_density: ind(mod(2;0))" in capsys.readouterr().out


### Subsequences ###
class TestPhi:
    def test_block_ends(self, geom_set):
        x = Indicator(geom_set)
        index_set = [2 * 4**k - 1 for k in range(5, 10)]
        assert phi(x, 0.75, index_set) == pytest.approx(1.0, abs=1e-3)
        assert phi(x, 0.75, index_set, tail_window=1.0) == pytest.approx(
            1.0, abs=1e-3
        )

    def test_block_end_is_not_a_member(self, geom_set):
        # 2 * 4**k is the first integer after the block [4**k, 2 * 4**k)
        x = Indicator(geom_set)
        n = 2 * 4**8
        assert not geom_set.member(n)
        assert phi(x, 0.75, [n]) == 1 - 4 / n
        assert phi(x, 0.75, [n - 1]) >= 1.0

    def test_profile(self, evens):
        profile = phi_profile(Indicator(evens), [0.5, 0.75], [64, 128, 256])
        assert profile == [(0.5, 0.5), (0.75, 0.5)]

    @pytest.mark.parametrize(
        "index_set, tail_window, match",
        [
            ([], 1 / 3, r"Index set must be nonempty"),
            ([10, 5], 1 / 3, r"strictly increasing"),
            ([10, 20], 0.0, r"Tail window must lie in \(0, 1\]"),
        ],
        ids=["empty", "decreasing", "zero-tail"],
    )
    def test_invalid(self, evens, index_set, tail_window, match):
        with pytest.raises(ValueError, match=match):
            phi(Indicator(evens), 0.5, index_set, tail_window)


def test_select_index_set(geom_set, desk_config):
    x = Indicator(geom_set)
    selected = select_index_set(x, 0.75, 0.9, desk_config)
    assert selected
    assert all(theta(x, 0.75, n) >= 0.9 for n in selected)
    assert all(m / n < 0.75 for m, n in zip(selected, selected[1:]))
    assert phi(x, 0.75, selected) >= 0.9


def test_select_index_set_can_be_empty(desk_config):
    assert select_index_set(ConstantValue(0.2), 0.5, 0.5, desk_config) == []


### Continuity in theta ###
@pytest.mark.parametrize(
    "x, th, delta, r",
    [
        (ConstantValue(1.0), 0.5, 0.1, 1000),
        (Indicator(Explicit(tuple(range(1, 200, 3)))), 0.6, 0.05, 2 * 4**8),
        (SeededRandom01(7), 0.9, 0.05, 1e5),
    ],
    ids=["constant", "finite-set", "random"],
)
def test_continuity_modulus(x, th, delta, r):
    check = continuity_modulus_check(x, th, delta, r)
    assert check.ok
    assert check.lhs <= check.bound


def test_continuity_modulus_on_blocks(geom_set):
    assert continuity_modulus_check(Indicator(geom_set), 0.6, 0.05, 2 * 4**8).ok


def test_continuity_modulus_invalid_delta():
    with pytest.raises(ValueError, match=r"Delta must satisfy"):
        continuity_modulus_check(ConstantValue(1.0), 0.9, 0.2, 100)
