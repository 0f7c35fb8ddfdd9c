"""
Finite-horizon estimators for the upper and lower asymptotic densities,
the alpha-densities and their limits as alpha grows.

A limsup (liminf) is estimated as the maximum (minimum) over the tail
window of the horizon grid, augmented with the structural breakpoints of
the set, since extremes of A(n)/n sit at block boundaries that a purely
geometric grid misses.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

import numpy as np
from requests.structures import CaseInsensitiveDict
from scipy.stats import linregress

from . import tools
from .natset import DisjointUnion, NatSet

EXTRAPOLATIONS = CaseInsensitiveDict(
    {
        "lastValue": "lastValue",
        "last": "lastValue",
        "linearFit": "linearFit",
        "linear": "linearFit",
    }
)

DEFAULT_HORIZONS = tuple(2**k for k in range(1, 31))
DEFAULT_ALPHAS = tuple(float(2**k) for k in range(9))


### Configuration ###
@dataclass(frozen=True)
class EstimatorConfig:
    """Grids and policies shared by every estimator.

    Args:
        horizon_grid (tuple): Strictly increasing horizons n >= 1.
        alpha_grid (tuple): Strictly increasing exponents alpha >= 0.
        theta_k (int): Number K of window ratios theta_k = 1 - 2**-k.
        tail_window (float): Tail used for limsup/liminf estimation, in
            (0, 1]. Grid horizons n >= (1 - tail_window) * N are
            evaluated, and structural breakpoints are searched over the
            last tail_window share of the grid points.
        extrapolation (str): "lastValue" or "linearFit".
        threads (int): Worker threads for grid sweeps.
        cap (int): Enumeration cap for sets and random sequences.
        monotone_tol (float): Tolerance of the alpha-monotonicity check.
        mismatch_tol (float): Tolerance of the cross-route check.
        min_window (int): Fewest integers a window (theta * n, n] must
            hold for n to serve as a window horizon.
    """

    horizon_grid: tuple[int, ...] = DEFAULT_HORIZONS
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHAS
    theta_k: int = 10
    tail_window: float = 1 / 3
    extrapolation: str = "lastValue"
    threads: int = 1
    cap: int = tools.ENUMERATION_CAP
    monotone_tol: float = 1e-2
    mismatch_tol: float = 5e-2
    min_window: int = 256

    def __post_init__(self) -> None:
        ### Check for valid inputs ###
        horizons = tuple(int(n) for n in self.horizon_grid)
        alphas = tuple(float(a) for a in self.alpha_grid)
        if not horizons or horizons[0] < 1:
            raise ValueError(
                "Horizon grid must be a nonempty list of positive integers"
            )
        if any(b <= a for a, b in zip(horizons, horizons[1:])):
            raise ValueError("Horizon grid must be strictly increasing")
        if not alphas or alphas[0] < 0:
            raise ValueError("Alpha grid must be a nonempty list of non-negative reals")
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("Alpha grid must be strictly increasing")
        if int(self.theta_k) != self.theta_k or not 1 <= self.theta_k <= 50:
            raise ValueError("Theta grid size K must be an integer between 1 and 50")
        if not 0 < self.tail_window <= 1:
            raise ValueError("Tail window must lie in (0, 1]")
        if self.extrapolation not in EXTRAPOLATIONS:
            raise ValueError(
                "Unsupported extrapolation. Supported policies: "
                f"{', '.join(EXTRAPOLATIONS.keys())}"
            )
        if self.threads < 1:
            raise ValueError("Thread count must be at least 1")
        if self.cap < 1:
            raise ValueError("Enumeration cap must be at least 1")
        if self.monotone_tol < 0 or self.mismatch_tol < 0:
            raise ValueError("Tolerances must be non-negative")
        if self.min_window < 1:
            raise ValueError("Minimum window size must be at least 1")

        object.__setattr__(self, "horizon_grid", horizons)
        object.__setattr__(self, "alpha_grid", alphas)
        object.__setattr__(self, "theta_k", int(self.theta_k))
        object.__setattr__(self, "extrapolation", EXTRAPOLATIONS[self.extrapolation])

    @classmethod
    def from_horizon(cls, horizon: int, **overrides: Any) -> EstimatorConfig:
        """Configuration with the geometric ratio-2 grid up to horizon.

        Args:
            horizon (int): Largest horizon; appended to the grid when it
                is not a power of two.
            **overrides: Any other EstimatorConfig field.

        Returns:
            EstimatorConfig: Validated configuration.
        """
        if int(horizon) != horizon or horizon < 1:
            raise ValueError("Horizon must be a positive integer")
        grid = [2**k for k in range(1, int(horizon).bit_length()) if 2**k <= horizon]
        if not grid or grid[-1] != horizon:
            grid.append(int(horizon))
        return cls(horizon_grid=tuple(grid), **overrides)

    def with_overrides(self, **overrides: Any) -> EstimatorConfig:
        return replace(self, **overrides)

    @property
    def theta_grid(self) -> tuple[float, ...]:
        """Window ratios theta_k = 1 - 2**-k, k = 1..K."""
        return tuple(1.0 - 2.0**-k for k in range(1, self.theta_k + 1))

    def horizons(self, limit: int | None = None) -> tuple[int, ...]:
        """Horizon grid restricted to n <= limit."""
        grid = tuple(n for n in self.horizon_grid if limit is None or n <= limit)
        if not grid:
            raise ValueError(
                f"No grid horizon is within the evaluable range (<= {limit})"
            )
        return grid

    def tail_start(self, length: int) -> int:
        """Index where the tail window of a length-long grid begins."""
        return tools.tail_start(length, self.tail_window)

    def tail_horizons(self, limit: int | None = None) -> tuple[int, ...]:
        """Grid horizons n >= (1 - tail_window) * N, N the largest one.

        Always holds N itself.
        """
        grid = self.horizons(limit)
        floor = (1 - self.tail_window) * grid[-1]
        return tuple(n for n in grid if n >= floor)

    def tail_range(self, limit: int | None = None) -> tuple[int, int]:
        """Range searched for structural breakpoints.

        It spans the last tail_window share of the grid points.
        """
        grid = self.horizons(limit)
        return grid[self.tail_start(len(grid))], grid[-1]


### Reports ###
@dataclass
class DensityReport:
    """Estimates of one quantity with convergence diagnostics.

    Every value is a finite-horizon surrogate of a limit; `label` says
    so in serialized form.
    """

    quantity: str
    input: str
    estimates: list[tuple[float, float]]
    extrapolated: float
    error_indicator: float
    monotone: bool = True
    cross_route_gap: float | None = None
    aliases: tuple[str, ...] = ()
    surrogate: list[dict[str, float]] | None = None
    label: str = field(default="finite surrogate")

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready dictionary."""
        out: dict[str, Any] = {
            "quantity": self.quantity,
            "input": self.input,
            "estimates": [
                {"param": _json_number(p), "value": float(v)} for p, v in self.estimates
            ],
            "extrapolated": float(self.extrapolated),
            "error_indicator": float(self.error_indicator),
            "diagnostics": {
                "monotone": bool(self.monotone),
                "cross_route_gap": _json_gap(self.cross_route_gap),
            },
            "label": self.label,
        }
        if self.aliases:
            out["aliases"] = list(self.aliases)
        if self.surrogate is not None:
            out["surrogate"] = self.surrogate
        return out

    def display(self) -> None:
        """Print the report as a table."""
        params = [tools.format_number(p) for p, _ in self.estimates]
        names = [f"{self.quantity} @ {p}" for p in params]
        names += ["extrapolated", "error indicator"]
        values = [v for _, v in self.estimates]
        values += [self.extrapolated, self.error_indicator]
        notes = ["estimate"] * len(self.estimates) + [self.label, "tail spread"]
        if self.cross_route_gap is not None:
            names.append("cross-route gap")
            values.append(self.cross_route_gap)
            notes.append("|window - alpha|")
        tools.table(
            f"{self.quantity}: {self.input}",
            names,
            values,
            [".6f"] * len(values),
            notes,
        )


def _json_number(p: float) -> float | int:
    p = float(p)
    return int(p) if p.is_integer() and abs(p) < 2**53 else p


def _json_gap(gap: float | None) -> float | None:
    return None if gap is None else float(gap)


### Shared helpers ###
def extremum(values: Sequence[float], side: str) -> float:
    return max(values) if side == "upper" else min(values)


def tail_spread(values: Sequence[float], side: str) -> float:
    """
    Stability of a tail extremum: the gap between the extremum over all
    values and the extremum over their later half.
    """
    late = values[len(values) // 2 :]
    return abs(extremum(values, side) - extremum(late, side))


def extrapolate(
    params: Sequence[float],
    values: Sequence[float],
    cfg: EstimatorConfig,
    abscissa: Callable[[np.ndarray], np.ndarray],
) -> float:
    """
    Extrapolate a sequence of estimates to its limit.

    lastValue takes the estimate at the last parameter. linearFit
    regresses the tail estimates against abscissa(param) and takes the
    intercept at abscissa = 0, clipped to the range of the tail.

    Args:
        params (Sequence): Grid parameters, increasing.
        values (Sequence): Estimates at params.
        cfg (EstimatorConfig): Selects the policy and the tail.
        abscissa (Callable): Map from parameters to a variable that
            tends to 0 in the limit (1/alpha, 1 - theta).

    Returns:
        float: Extrapolated value.
    """
    start = cfg.tail_start(len(values))
    tail = np.asarray(values[start:], dtype=np.float64)
    if cfg.extrapolation == "lastValue" or len(tail) < 2:
        return float(values[-1])
    xs = abscissa(np.asarray(params[start:], dtype=np.float64))
    if np.ptp(xs) == 0:
        return float(values[-1])
    fit = linregress(xs, tail)
    return float(np.clip(fit.intercept, tail.min(), tail.max()))  # pyright: ignore


def candidate_horizons(A: NatSet, cfg: EstimatorConfig) -> list[int]:
    """Tail horizons together with the breakpoints of A in the tail range."""
    lo, hi = cfg.tail_range()
    return sorted(set(cfg.tail_horizons()) | set(A.breakpoints(lo, hi)))


def _scan(
    quantity: str,
    A: NatSet,
    cfg: EstimatorConfig,
    side: str,
    ratio: Callable[[int], float],
    disp: bool,
) -> DensityReport:
    horizons = candidate_horizons(A, cfg)
    values = tools.sweep(ratio, horizons, cfg.threads)
    report = DensityReport(
        quantity=quantity,
        input=A.to_expr(),
        estimates=[(float(n), float(v)) for n, v in zip(horizons, values)],
        extrapolated=extremum(values, side),
        error_indicator=tail_spread(values, side),
    )
    if disp:
        report.display()
    return report


### Asymptotic densities ###
def upper_density(A: NatSet, cfg: EstimatorConfig, disp: bool = False) -> DensityReport:
    """Upper asymptotic density limsup A(n)/n.

    Args:
        A (NatSet): Set.
        cfg (EstimatorConfig): Estimator configuration.
        disp (bool): Print the report.

    Returns:
        DensityReport: Tail-window estimate.
    """
    return _scan("upper_density", A, cfg, "upper", lambda n: A.count(n) / n, disp)


def lower_density(A: NatSet, cfg: EstimatorConfig, disp: bool = False) -> DensityReport:
    """Lower asymptotic density liminf A(n)/n.

    Args:
        A (NatSet): Set.
        cfg (EstimatorConfig): Estimator configuration.
        disp (bool): Print the report.

    Returns:
        DensityReport: Tail-window estimate.
    """
    return _scan("lower_density", A, cfg, "lower", lambda n: A.count(n) / n, disp)


### Alpha densities ###
def alpha_density(
    A: NatSet,
    alpha: float,
    cfg: EstimatorConfig,
    side: str = "upper",
    disp: bool = False,
) -> DensityReport:
    """Upper or lower alpha-density of A, the limsup (liminf) of
    A_alpha(n) / N_alpha(n).

    Args:
        A (NatSet): Set.
        alpha (float): Exponent (>= 0).
        cfg (EstimatorConfig): Estimator configuration.
        side (str): "upper" or "lower".
        disp (bool): Print the report.

    Returns:
        DensityReport: Tail-window estimate.
    """
    if alpha < 0:
        raise ValueError("Alpha must be non-negative")
    side = tools.resolve_side(side)
    return _scan(
        f"{side}_alpha_density[{tools.format_number(alpha)}]",
        A,
        cfg,
        side,
        lambda n: A.power_sum_ratio(n, alpha),
        disp,
    )


def d_infinity(
    A: NatSet,
    cfg: EstimatorConfig,
    side: str = "upper",
    disp: bool = False,
) -> DensityReport:
    """Limit of the alpha-densities as alpha grows.

    Upper alpha-densities are nondecreasing in alpha and lower ones
    nonincreasing. Breaks of that trend beyond cfg.monotone_tol are
    recorded in the report and signalled by a MonotonicityWarning.

    Args:
        A (NatSet): Set.
        cfg (EstimatorConfig): Estimator configuration.
        side (str): "upper" or "lower".
        disp (bool): Print the report.

    Returns:
        DensityReport: One estimate per alpha in the grid.
    """
    side = tools.resolve_side(side)
    alphas = cfg.alpha_grid
    values = [alpha_density(A, a, cfg, side).extrapolated for a in alphas]

    sign = 1.0 if side == "upper" else -1.0
    drops = [sign * (b - a) for a, b in zip(values, values[1:])]
    monotone = all(d >= -cfg.monotone_tol for d in drops)
    if not monotone:
        warnings.warn(
            f"{side} alpha-density estimates of {A.to_expr()} are not monotone in "
            f"alpha (largest break {-min(drops):.3e}); the horizon may be too short",
            tools.MonotonicityWarning,
            stacklevel=2,
        )

    start = cfg.tail_start(len(values))
    tail = values[start:]
    report = DensityReport(
        quantity=f"{side}_d_infinity",
        input=A.to_expr(),
        estimates=list(zip(alphas, values)),
        extrapolated=extrapolate(alphas, values, cfg, lambda a: 1.0 / a),
        error_indicator=max(tail) - min(tail),
        monotone=monotone,
    )
    if disp:
        report.display()
    return report


def alpha_window_bound(theta: float, alpha: float, eps: float) -> float:
    """
    Upper bound theta**(alpha + 1) + 2 * eps * (1 - theta) * (alpha + 1)
    for the lower alpha-density of a set whose lower window ratio at
    theta drops below 2 * eps infinitely often.

    Args:
        theta (float): Window ratio in (0, 1).
        alpha (float): Exponent (>= 0).
        eps (float): Window level (>= 0).

    Returns:
        float: The bound.
    """
    if not 0 < theta < 1:
        raise ValueError("Theta must lie in (0, 1)")
    if alpha < 0 or eps < 0:
        raise ValueError("Alpha and eps must be non-negative")
    return theta ** (alpha + 1) + 2 * eps * (1 - theta) * (alpha + 1)


def alpha_additivity_residual(
    A: NatSet,
    B: NatSet,
    alpha: float,
    cfg: EstimatorConfig,
) -> float:
    """Residual of lower_alpha(A ∪ B) = d(A) + lower_alpha(B).

    Args:
        A (NatSet): Set with a certified density.
        B (NatSet): Set disjoint from A.
        alpha (float): Exponent (>= 0).
        cfg (EstimatorConfig): Estimator configuration.

    Returns:
        float: Absolute residual.
    """
    d = A.exact_density()
    if d is None:
        raise ValueError("The first set must have a certified density")
    union = DisjointUnion((A, B))
    lhs = alpha_density(union, alpha, cfg, "lower").extrapolated
    rhs = d + alpha_density(B, alpha, cfg, "lower").extrapolated
    return abs(lhs - rhs)
