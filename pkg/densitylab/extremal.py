"""
Extremal density values and finite surrogate functionals.

The largest value any density measure assigns to a set A equals its
upper Pólya density and its upper alpha-density limit. Both routes are
computed and compared. The inf over density measures follows by
complementation.

A Surrogate is a finite convex combination of window averages
Theta(theta_k, n). It is linear and positive in the sequence and
stands in for the ultrafilter-limit functionals that extend the Cesàro
mean, which cannot be constructed.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Any, Sequence

from . import tools
from .densities import DensityReport, EstimatorConfig, alpha_window_bound, d_infinity
from .natset import DisjointUnion, NatSet
from .polya import theta, theta_extreme, t_estimate
from .seqcore import BoundedSeq, Indicator, step_approximate

UPPER_ALIASES = ("upper_extreme", "upper_polya_density", "upper_d_infinity", "d_u")
LOWER_ALIASES = ("lower_extreme", "lower_polya_density", "lower_d_infinity", "d_l")


### Surrogates ###
@dataclass(frozen=True)
class SurrogateAtom:
    """One window average Theta(theta_k, n) with weight w."""

    theta_k: int
    n: int
    w: float

    def __post_init__(self) -> None:
        if int(self.theta_k) != self.theta_k or self.theta_k < 1:
            raise ValueError("Theta index k must be a positive integer")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("Atom horizon n must be a positive integer")
        if not self.w >= 0:
            raise ValueError("Atom weight must be non-negative")
        object.__setattr__(self, "theta_k", int(self.theta_k))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "w", float(self.w))

    @property
    def theta(self) -> float:
        return 1.0 - 2.0**-self.theta_k


@dataclass(frozen=True)
class Surrogate:
    """Finite convex combination of window averages.

    Args:
        atoms (tuple[SurrogateAtom, ...]): Atoms with weights summing to 1.
        theta_grid (tuple[float, ...]): Ratios the indices refer to; an
            atom with index k uses theta_grid[k - 1].
    """

    atoms: tuple[SurrogateAtom, ...]
    theta_grid: tuple[float, ...] = EstimatorConfig().theta_grid

    def __post_init__(self) -> None:
        ### Check for valid inputs ###
        atoms = tuple(self.atoms)
        if not atoms:
            raise ValueError("A surrogate needs at least one atom")
        if abs(math.fsum(a.w for a in atoms) - 1.0) > 1e-12:
            raise ValueError("Surrogate weights must sum to 1")
        if any(a.theta_k > len(self.theta_grid) for a in atoms):
            raise ValueError(
                f"Theta index out of range; the grid has {len(self.theta_grid)} ratios"
            )
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "theta_grid", tuple(self.theta_grid))

    @classmethod
    def single(
        cls, theta_k: int, n: int, cfg: EstimatorConfig | None = None
    ) -> Surrogate:
        """Single-atom surrogate Theta(theta_k, n)."""
        grid = (cfg or EstimatorConfig()).theta_grid
        return cls((SurrogateAtom(theta_k, n, 1.0),), grid)

    def to_json(self) -> list[dict[str, float]]:
        """Atom list {theta_k, n, w}."""
        return [{"theta_k": a.theta_k, "n": a.n, "w": a.w} for a in self.atoms]

    @classmethod
    def from_json(
        cls,
        data: str | Sequence[dict[str, Any]] | dict[str, Any],
        cfg: EstimatorConfig | None = None,
    ) -> Surrogate:
        """Build a surrogate from an atom list or its JSON text."""
        atoms = json.loads(data) if isinstance(data, str) else data
        if isinstance(atoms, dict):
            atoms = atoms.get("atoms", atoms.get("surrogate"))
        if not isinstance(atoms, list):
            raise ValueError("Surrogate JSON must be a list of {theta_k, n, w} atoms")
        try:
            parsed = tuple(SurrogateAtom(a["theta_k"], a["n"], a["w"]) for a in atoms)
        except (KeyError, TypeError) as e:
            raise ValueError(f"Malformed surrogate atom: {e}") from e
        grid = (cfg or EstimatorConfig()).theta_grid
        return cls(parsed, grid)


def eval_surrogate(f: Surrogate, x: BoundedSeq) -> float:
    """Evaluate f on x as sum of w * Theta(theta_k, n).

    Args:
        f (Surrogate): Surrogate functional.
        x (BoundedSeq): Sequence.

    Returns:
        float: f(x).
    """
    return math.fsum(a.w * theta(x, f.theta_grid[a.theta_k - 1], a.n) for a in f.atoms)


def surrogate_measure(f: Surrogate, A: NatSet) -> float:
    """Value of the finitely additive measure A -> f(indicator(A)).

    Atoms see the half-open window (theta * n, n]. For blocks(geom;1,2,2)
    the horizon n = 2 * 4**k is the first integer after a block, so its
    window counts one non-member; at n = 2 * 4**k - 1 the whole window
    lies inside the block when theta >= 1/2.
    """
    return eval_surrogate(f, Indicator(A))


def functional_from_measure(f: Surrogate, x: BoundedSeq, eps: float) -> float:
    """
    Evaluate f on x through its measure only: approximate x within eps by
    a step sequence sum c_j chi_{A_j} and return sum c_j mu(A_j).

    Args:
        f (Surrogate): Surrogate functional.
        x (BoundedSeq): Sequence.
        eps (float): Uniform approximation accuracy (> 0).

    Returns:
        float: Step-sequence value of f on x.
    """
    s = step_approximate(x, eps)
    return math.fsum(c * surrogate_measure(f, a) for c, a in s.levels)


### Searches over single atoms ###
def surrogate_sup(
    x: BoundedSeq, cfg: EstimatorConfig
) -> tuple[Surrogate, float]:
    """Best single-atom surrogate at the largest theta index.

    Convex combinations never exceed their best atom, so single atoms
    suffice for the supremum. Horizons range over the tail window and
    the structural candidates; ties go to the smallest horizon.

    Args:
        x (BoundedSeq): Sequence.
        cfg (EstimatorConfig): Estimator configuration.

    Returns:
        tuple: (surrogate, value).
    """
    k = cfg.theta_k
    n, value = theta_extreme(x, cfg.theta_grid[k - 1], cfg, "upper")
    return Surrogate.single(k, n, cfg), value


def per_theta_maximizers(
    x: BoundedSeq, cfg: EstimatorConfig
) -> list[tuple[Surrogate, float]]:
    """One maximizing single-atom surrogate per theta in the grid."""
    out = []
    for k, th in enumerate(cfg.theta_grid, start=1):
        n, value = theta_extreme(x, th, cfg, "upper")
        out.append((Surrogate.single(k, n, cfg), value))
    return out


### Extremal values ###
def _check_routes(A: NatSet, gap: float, cfg: EstimatorConfig, what: str) -> None:
    if gap > cfg.mismatch_tol:
        warnings.warn(
            f"{what} of {A.to_expr()}: window and alpha routes differ by {gap:.3e} "
            f"(> {cfg.mismatch_tol:g}); the alpha route converges slowly",
            tools.CrossRouteMismatch,
            stacklevel=3,
        )


def upper_extreme(A: NatSet, cfg: EstimatorConfig, disp: bool = False) -> DensityReport:
    """Largest value a density measure gives A.

    The window route (upper Pólya density) is the reported value. The
    alpha route (upper alpha-density at the largest alpha) is computed
    alongside and their gap becomes the error indicator.

    Args:
        A (NatSet): Set.
        cfg (EstimatorConfig): Estimator configuration.
        disp (bool): Print the report.

    Returns:
        DensityReport: Estimates per theta plus the cross-route gap.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", tools.MonotonicityWarning)
        alpha_route = d_infinity(A, cfg, "upper")
    window_route = t_estimate(Indicator(A), cfg, "upper")
    gap = abs(window_route.extrapolated - alpha_route.extrapolated)
    _check_routes(A, gap, cfg, "Upper extreme")

    k = cfg.theta_k
    n, _ = theta_extreme(Indicator(A), cfg.theta_grid[k - 1], cfg, "upper")
    report = DensityReport(
        quantity="upper_extreme",
        input=A.to_expr(),
        estimates=window_route.estimates,
        extrapolated=window_route.extrapolated,
        error_indicator=gap,
        monotone=alpha_route.monotone,
        cross_route_gap=gap,
        aliases=UPPER_ALIASES,
        surrogate=Surrogate.single(k, n, cfg).to_json(),
    )
    if disp:
        report.display()
    return report


def lower_extreme(A: NatSet, cfg: EstimatorConfig, disp: bool = False) -> DensityReport:
    """Smallest value a density measure gives A, as
    1 - upper_extreme(complement of A).

    The direct lower window route is computed as well and the larger of
    its gap and the complement's cross-route gap becomes the error
    indicator.

    Args:
        A (NatSet): Set.
        cfg (EstimatorConfig): Estimator configuration.
        disp (bool): Print the report.

    Returns:
        DensityReport: Estimates per theta.
    """
    upper = upper_extreme(A.complement(), cfg)
    direct = t_estimate(Indicator(A), cfg, "lower")
    value = 1.0 - upper.extrapolated
    gap = abs(value - direct.extrapolated)

    report = DensityReport(
        quantity="lower_extreme",
        input=A.to_expr(),
        estimates=[(th, 1.0 - v) for th, v in upper.estimates],
        extrapolated=value,
        error_indicator=max(gap, upper.error_indicator),
        monotone=upper.monotone,
        cross_route_gap=upper.cross_route_gap,
        aliases=LOWER_ALIASES,
    )
    if disp:
        report.display()
    return report


def lower_alpha_bound(A: NatSet, cfg: EstimatorConfig) -> float:
    """
    Upper bound on the lower alpha-density at the largest alpha, from
    the smallest lower window average over the theta grid. A window level
    below 2 * eps at ratio theta bounds the alpha-density by
    theta**(alpha + 1) + 2 * eps * (1 - theta) * (alpha + 1).
    """
    alpha = cfg.alpha_grid[-1]
    bounds = []
    for th in cfg.theta_grid:
        level = theta_extreme(Indicator(A), th, cfg, "lower")[1]
        bounds.append(alpha_window_bound(th, alpha, level / 2))
    return min(1.0, min(bounds))


def verify_additivity(A: NatSet, B: NatSet, cfg: EstimatorConfig) -> float:
    """Residual of lower_extreme(A ∪ B) = d(A) + lower_extreme(B).

    Args:
        A (NatSet): Set with a certified density.
        B (NatSet): Set disjoint from A.
        cfg (EstimatorConfig): Estimator configuration.

    Returns:
        float: Absolute residual.
    """
    d = A.exact_density()
    if d is None:
        raise ValueError("The first set must have a certified density")
    union = DisjointUnion((A, B))
    lhs = lower_extreme(union, cfg).extrapolated
    rhs = d + lower_extreme(B, cfg).extrapolated
    return abs(lhs - rhs)
