"""
Window functionals of bounded sequences.

For a window ratio theta in (0, 1) and a real horizon r >= 1 the window
sum and window average are

    S(theta, r) = sum of x_i over theta * r < i <= r
    Theta(theta, r) = S(theta, r) / (r * (1 - theta))

The left endpoint is excluded, also when theta * r is an integer. The
Pólya densities and the sublinear functional t(x) are the limits
theta -> 1 of limsup_n Theta(theta, n), estimated here over a grid of
ratios theta_k = 1 - 2**-k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import tools
from .densities import DensityReport, EstimatorConfig, extrapolate, extremum
from .seqcore import BoundedSeq, Indicator


### Window evaluations ###
@dataclass(frozen=True)
class ThetaEvaluation:
    """One window average with its window size."""

    theta: float
    r: float
    value: float
    window_count: int


def _check_window(th: float, r: float) -> None:
    if not 0 < th < 1:
        raise ValueError("Theta must lie in (0, 1)")
    if r < 1:
        raise ValueError("Window horizon r must be at least 1")


def window_bounds(th: float, r: float) -> tuple[int, int]:
    """Integer range (lo, hi] of the window (th * r, r]."""
    _check_window(th, r)
    return math.floor(th * r), math.floor(r)


def window_sum(x: BoundedSeq, th: float, r: float) -> float:
    """Window sum S(th, r) = x_{lo+1} + ... + x_{hi}."""
    lo, hi = window_bounds(th, r)
    return x.prefix_sum(hi) - x.prefix_sum(lo)


def theta(x: BoundedSeq, th: float, r: float) -> float:
    """Window average of x over (th * r, r], normalized by r(1 - th).

    Args:
        x (BoundedSeq): Sequence.
        th (float): Window ratio in (0, 1).
        r (float): Real horizon (>= 1).

    Returns:
        float: S(th, r) / (r(1 - th)).
    """
    return window_sum(x, th, r) / (r * (1 - th))


def theta_evaluation(x: BoundedSeq, th: float, r: float) -> ThetaEvaluation:
    lo, hi = window_bounds(th, r)
    return ThetaEvaluation(th, float(r), theta(x, th, r), hi - lo)


### Structural candidates ###
def window_candidates(x: BoundedSeq, th: float, lo: int, hi: int) -> list[int]:
    """
    Horizons n in [lo, hi] where the window (th * n, n] gains or loses a
    structural breakpoint of x at either end.
    """
    points: set[int] = set()
    for p in x.breakpoints(max(1, math.floor(th * lo)), hi):
        points.update((p, p + 1, math.ceil(p / th), math.ceil((p + 1) / th)))
    return sorted(n for n in points if lo <= n <= hi)


def _tail_candidates(x: BoundedSeq, th: float, cfg: EstimatorConfig) -> list[int]:
    # Horizons whose window holds fewer than min_window integers are skipped
    lo, hi = cfg.tail_range(x.max_horizon)
    points = set(cfg.tail_horizons(x.max_horizon))
    points.update(window_candidates(x, th, lo, hi))
    wide = sorted(n for n in points if n - math.floor(th * n) >= cfg.min_window)
    return wide or [hi]


def theta_extreme(
    x: BoundedSeq,
    th: float,
    cfg: EstimatorConfig,
    side: str = "upper",
) -> tuple[int, float]:
    """Tail-window extremum of Theta(th, n) and the horizon attaining it.

    Ties resolve to the smallest horizon.

    Args:
        x (BoundedSeq): Sequence.
        th (float): Window ratio in (0, 1).
        cfg (EstimatorConfig): Estimator configuration.
        side (str): "upper" (limsup) or "lower" (liminf).

    Returns:
        tuple: (horizon, value).
    """
    side = tools.resolve_side(side)
    horizons = _tail_candidates(x, th, cfg)
    values = tools.sweep(lambda n: theta(x, th, n), horizons, cfg.threads)
    best = extremum(values, side)
    return horizons[values.index(best)], best


def theta_limsup(x: BoundedSeq, th: float, cfg: EstimatorConfig) -> float:
    """Finite surrogate of limsup_n Theta(th, n)."""
    return theta_extreme(x, th, cfg, "upper")[1]


def theta_liminf(x: BoundedSeq, th: float, cfg: EstimatorConfig) -> float:
    """Finite surrogate of liminf_n Theta(th, n)."""
    return theta_extreme(x, th, cfg, "lower")[1]


### t(x) and the Pólya densities ###
def t_estimate(
    x: BoundedSeq,
    cfg: EstimatorConfig,
    side: str = "upper",
    disp: bool = False,
) -> DensityReport:
    """Estimate t(x) = lim_{theta -> 1} limsup_n Theta(theta, n).

    With side="lower" the liminf is used instead, which estimates
    -t(-x). For an indicator sequence the two sides are the upper and
    lower Pólya densities of the set. Estimates are clipped to the value
    range of x, which they can exceed only by window discretization.

    Args:
        x (BoundedSeq): Sequence.
        cfg (EstimatorConfig): Estimator configuration.
        side (str): "upper" or "lower".
        disp (bool): Print the report.

    Returns:
        DensityReport: One estimate per theta in the grid.
    """
    side = tools.resolve_side(side)
    lo, hi = x.bounds
    thetas = cfg.theta_grid
    values = [
        float(np.clip(theta_extreme(x, th, cfg, side)[1], lo, hi)) for th in thetas
    ]

    start = cfg.tail_start(len(values))
    tail = values[start:]
    name = "polya_density" if isinstance(x, Indicator) else "t"
    report = DensityReport(
        quantity=f"{side}_{name}",
        input=x.to_expr(),
        estimates=list(zip(thetas, values)),
        extrapolated=extrapolate(thetas, values, cfg, lambda t: 1.0 - t),
        error_indicator=max(tail) - min(tail),
    )
    if disp:
        report.display()
    return report


### Subsequence functions ###
def phi(
    x: BoundedSeq,
    th: float,
    index_set: Sequence[int],
    tail_window: float = 1 / 3,
) -> float:
    """Finite surrogate of liminf over n in index_set of Theta(th, n).

    Windows are half-open, so for blocks(geom;1,2,2) the index set
    {2 * 4**k - 1} keeps every window inside a block while {2 * 4**k}
    falls one member short.

    Args:
        x (BoundedSeq): Sequence.
        th (float): Window ratio in (0, 1).
        index_set (Sequence): Increasing horizons.
        tail_window (float): Fraction of index_set, from its end, used.

    Returns:
        float: Minimum window average over the tail of index_set.
    """
    if len(index_set) == 0:
        raise ValueError("Index set must be nonempty")
    if any(b <= a for a, b in zip(index_set, index_set[1:])):
        raise ValueError("Index set must be strictly increasing")
    if not 0 < tail_window <= 1:
        raise ValueError("Tail window must lie in (0, 1]")
    start = tools.tail_start(len(index_set), tail_window)
    return min(theta(x, th, n) for n in index_set[start:])


def phi_profile(
    x: BoundedSeq,
    thetas: Sequence[float],
    index_set: Sequence[int],
    tail_window: float = 1 / 3,
) -> list[tuple[float, float]]:
    """phi evaluated at every theta in thetas."""
    return [(th, phi(x, th, index_set, tail_window)) for th in thetas]


def select_index_set(
    x: BoundedSeq,
    theta0: float,
    level: float,
    cfg: EstimatorConfig,
) -> list[int]:
    """
    Greedy index selection: scan the horizon grid and its structural
    candidates in increasing order and keep n when Theta(theta0, n) is
    at least level and the previous kept horizon m has m / n < theta0,
    so kept windows never overlap.

    Args:
        x (BoundedSeq): Sequence.
        theta0 (float): Window ratio in (0, 1).
        level (float): Threshold on the window average.
        cfg (EstimatorConfig): Supplies the horizon grid.

    Returns:
        list: Selected horizons, possibly empty.
    """
    grid = cfg.horizons(x.max_horizon)
    structural = window_candidates(x, theta0, grid[0], grid[-1])
    candidates = sorted(set(grid) | set(structural))
    selected: list[int] = []
    for n in candidates:
        if selected and selected[-1] / n >= theta0:
            continue
        if theta(x, theta0, n) >= level:
            selected.append(n)
    return selected


### Continuity in theta ###
class ModulusCheck(NamedTuple):
    lhs: float
    bound: float
    ok: bool


def continuity_modulus_check(
    x: BoundedSeq,
    th: float,
    delta: float,
    r: float,
) -> ModulusCheck:
    """Check |Theta(th, r) - Theta(th + delta, r)| against its modulus
    (2 delta / (1 - th)) ||x|| + 2 ||x|| / (r (1 - th)).

    Args:
        x (BoundedSeq): Sequence.
        th (float): Window ratio in (0, 1).
        delta (float): Increment with 0 < delta < 1 - th.
        r (float): Real horizon (>= 1).

    Returns:
        ModulusCheck: (lhs, bound, ok).
    """
    if not 0 < delta < 1 - th:
        raise ValueError("Delta must satisfy 0 < delta < 1 - theta")
    lhs = abs(theta(x, th, r) - theta(x, th + delta, r))
    norm = x.sup_bound
    bound = 2 * delta / (1 - th) * norm + 2 * norm / (r * (1 - th))
    return ModulusCheck(lhs, bound, lhs <= bound)
