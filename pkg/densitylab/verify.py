"""
Property suites run by `densitylab verify`.

Each property draws its inputs from a numpy generator seeded by the
suite seed and returns a PropertyResult. The "full" suite uses the
sample counts and horizons of the acceptance checks. The "core" suite
runs the same properties on fewer samples and shorter horizons.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from requests.structures import CaseInsensitiveDict

from . import tools
from .densities import EstimatorConfig, d_infinity, lower_density, upper_density
from .dsl import parse_set_expr
from .extremal import (
    Surrogate,
    eval_surrogate,
    functional_from_measure,
    lower_extreme,
    surrogate_sup,
    upper_extreme,
    verify_additivity,
)
from .natset import (
    BlockList,
    Complement,
    DisjointUnion,
    Explicit,
    GeomBlocks,
    Intersection,
    NatSet,
    Periodic,
)
from .polya import continuity_modulus_check, t_estimate, theta, window_sum
from .seqcore import (
    Affine,
    BoundedSeq,
    ConstantValue,
    Indicator,
    PeriodicValues,
    Rounded,
    SeededRandom01,
    Sum,
)

TEST_FAMILY = (
    "mod(3;0)",
    "mod(2;0)",
    "compl(union(mod(4;0),mod(4;1)))",
    "blocks(geom;1,2,2)",
    "blocks(geom;3,3,2)",
    "blocks(list;[1,10),[100,1000))",
    "explicit(1,5,9)",
    "union(mod(4;0),blocks(list;[1,4)))",
    "inter(mod(2;1),blocks(geom;1,2,2))",
)

# (set with a density, disjoint set)
ADDITIVITY_PAIRS = (
    ("mod(2;0)", "explicit()"),
    ("mod(2;0)", "inter(mod(2;1),blocks(geom;1,2,2))"),
    ("mod(4;0)", "explicit(1,5,9)"),
    ("mod(3;0)", "inter(mod(3;1),blocks(geom;1,2,2))"),
    ("mod(3;0)", "inter(mod(3;2),blocks(geom;1,2,2))"),
    ("mod(4;0,2)", "inter(mod(4;1),blocks(list;[1,1000)))"),
    ("mod(5;0)", "inter(mod(5;1,2),blocks(geom;2,2,3))"),
    ("explicit(1,3,5)", "mod(2;0)"),
    ("mod(6;0)", "inter(compl(mod(6;0)),blocks(geom;1,2,2))"),
    ("mod(2;1)", "inter(mod(2;0),blocks(geom;1,3,2))"),
)

SUITES = CaseInsensitiveDict({"core": "core", "full": "full"})


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteContext:
    """Randomness and scale shared by the properties of one run."""

    rng: np.random.Generator
    full: bool
    threads: int = 1

    def size(self, full: int, core: int) -> int:
        return full if self.full else core

    @property
    def cfg(self) -> EstimatorConfig:
        return EstimatorConfig(threads=self.threads)

    @property
    def seq_cfg(self) -> EstimatorConfig:
        # Random sequences are materialized, so their grid stays short
        horizon = 2**23 if self.full else 2**20
        return EstimatorConfig.from_horizon(horizon, threads=self.threads)

    def seed(self) -> int:
        return int(self.rng.integers(0, 2**31))


def _result(name: str, failures: list[str], checked: int) -> PropertyResult:
    if failures:
        detail = f"{len(failures)} failure(s) in {checked} checked: {failures[0]}"
        return PropertyResult(name, False, detail)
    return PropertyResult(name, True, f"{checked} checked")


### Random inputs ###
def random_periodic(rng: np.random.Generator, max_modulus: int = 10) -> Periodic:
    m = int(rng.integers(1, max_modulus + 1))
    size = int(rng.integers(1, m + 1))
    residues = rng.choice(m, size=size, replace=False)
    return Periodic(m, tuple(int(r) for r in residues))


def _sorted_sample(rng: np.random.Generator, hi: int, size: int) -> list[int]:
    picked = rng.choice(np.arange(1, hi), size=size, replace=False)
    return sorted(int(v) for v in picked)


def random_structured_set(rng: np.random.Generator, depth: int = 0) -> NatSet:
    """A random set of any structured kind, for oracle comparisons."""
    kind = int(rng.integers(0, 7 if depth < 2 else 4))
    if kind == 0:
        return random_periodic(rng, 12)
    if kind == 1:
        edges = _sorted_sample(rng, 5000, 2 * int(rng.integers(1, 6)))
        return BlockList(tuple(zip(edges[::2], edges[1::2])))
    if kind == 2:
        return GeomBlocks(
            int(rng.integers(1, 20)),
            float(rng.uniform(1.2, 4.0)),
            float(rng.uniform(1.2, 4.0)),
        )
    if kind == 3:
        return Explicit(tuple(_sorted_sample(rng, 10**4, int(rng.integers(0, 40)))))
    if kind == 4:
        return Complement(random_structured_set(rng, depth + 1))
    if kind == 5:
        # Disjoint by construction: the parts use complementary residues
        m = int(rng.integers(2, 9))
        residues = [int(r) for r in rng.permutation(m)]
        cut = int(rng.integers(1, m))
        left = Periodic(m, tuple(residues[:cut]))
        right = Intersection(
            (Periodic(m, tuple(residues[cut:])), random_structured_set(rng, depth + 1))
        )
        return DisjointUnion((left, right))
    return Intersection(
        (random_structured_set(rng, depth + 1), random_structured_set(rng, depth + 1))
    )


def random_sequence(rng: np.random.Generator, cap: int) -> BoundedSeq:
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return SeededRandom01(int(rng.integers(0, 2**31)), cap=cap)
    if kind == 1:
        return Indicator(GeomBlocks(1, 2, 2))
    if kind == 2:
        return ConstantValue(float(rng.uniform(-1, 1)))
    size = int(rng.integers(1, 6))
    return PeriodicValues(tuple(float(v) for v in rng.uniform(-1, 1, size=size)))


### Properties ###
def four_route_concordance(ctx: SuiteContext) -> PropertyResult:
    A = GeomBlocks(1, 2, 2)
    window_route = upper_extreme(A, ctx.cfg)
    alpha_route = d_infinity(A, ctx.cfg, "upper").extrapolated
    gap = window_route.cross_route_gap
    failures = []
    if window_route.extrapolated < 0.98:
        failures.append(f"window route {window_route.extrapolated:.4f} < 0.98")
    if alpha_route < 0.97:
        failures.append(f"alpha route {alpha_route:.4f} < 0.97")
    if gap is None or gap > 0.05:
        failures.append(f"cross-route gap {gap} > 0.05")
    return _result("four_route_concordance", failures, 1)


def exact_density_collapse(ctx: SuiteContext) -> PropertyResult:
    cfg = ctx.cfg
    count = ctx.size(20, 4)
    failures = []
    for _ in range(count):
        A = random_periodic(ctx.rng)
        d = float(A.exact_density())  # pyright: ignore[reportArgumentType]
        values = {
            "upper": upper_density(A, cfg).extrapolated,
            "lower": lower_density(A, cfg).extrapolated,
            "polya_upper": t_estimate(Indicator(A), cfg, "upper").extrapolated,
            "polya_lower": t_estimate(Indicator(A), cfg, "lower").extrapolated,
            "upper_extreme": upper_extreme(A, cfg).extrapolated,
            "lower_extreme": lower_extreme(A, cfg).extrapolated,
        }
        for alpha in (1, 2, 4, 8):
            values[f"alpha_{alpha}"] = A.power_sum_ratio(10**6, alpha)
        for name, value in values.items():
            if abs(value - d) > 1e-2:
                failures.append(f"{A.to_expr()} {name} = {value:.4f}, density {d:.4f}")
    return _result("exact_density_collapse", failures, count)


def duality(ctx: SuiteContext) -> PropertyResult:
    failures = []
    for expr in TEST_FAMILY:
        A = parse_set_expr(expr)
        upper = upper_extreme(A, ctx.cfg).extrapolated
        lower = lower_extreme(A.complement(), ctx.cfg).extrapolated
        if abs(upper + lower - 1) > 2e-2:
            failures.append(f"{expr}: {upper:.4f} + {lower:.4f} != 1")
    return _result("duality", failures, len(TEST_FAMILY))


def sandwich_chain(ctx: SuiteContext) -> PropertyResult:
    tol = 2e-2
    failures = []
    for expr in TEST_FAMILY:
        A = parse_set_expr(expr)
        chain = (
            lower_extreme(A, ctx.cfg).extrapolated,
            lower_density(A, ctx.cfg).extrapolated,
            upper_density(A, ctx.cfg).extrapolated,
            upper_extreme(A, ctx.cfg).extrapolated,
        )
        if any(b < a - tol for a, b in zip(chain, chain[1:])):
            failures.append(f"{expr}: {', '.join(f'{v:.4f}' for v in chain)}")
    return _result("sandwich_chain", failures, len(TEST_FAMILY))


def rounding_transform_bounds(ctx: SuiteContext) -> PropertyResult:
    count = ctx.size(50, 5)
    upto = ctx.size(10**5, 10**4)
    horizons = [2**k for k in range(1, upto.bit_length())]
    failures = []
    for _ in range(count):
        x = SeededRandom01(ctx.seed())
        rounded = Rounded(x)
        drift = rounded.prefix_sums(1, upto + 1) - x.prefix_sums(1, upto + 1)
        if not np.all(np.abs(drift) < 1):
            failures.append(f"{x.to_expr()}: prefix drift reaches 1")
        if not np.all(np.isin(rounded.values(1, upto + 1), (0.0, 1.0))):
            failures.append(f"{x.to_expr()}: rounded values leave {{0, 1}}")
        for th in ctx.cfg.theta_grid:
            for n in horizons:
                gap = abs(theta(x, th, n) - theta(rounded, th, n))
                if gap > 2 / (n * (1 - th)):
                    failures.append(f"{x.to_expr()}: theta={th} n={n} gap {gap:.3e}")
    return _result("rounding_transform_bounds", failures, count)


def continuity_modulus(ctx: SuiteContext) -> PropertyResult:
    count = ctx.size(1000, 100)
    failures = []
    for _ in range(count):
        x = random_sequence(ctx.rng, cap=2**17)
        th = float(ctx.rng.uniform(0.05, 0.95))
        # The modulus holds for delta up to (1 - theta) / 2
        delta = float(ctx.rng.uniform(1e-6, 0.5)) * (1 - th)
        r = float(ctx.rng.uniform(1.0, 10**5))
        check = continuity_modulus_check(x, th, delta, r)
        if not check.ok:
            failures.append(
                f"{x.to_expr()} theta={th:.4f} delta={delta:.4f} r={r:.1f}: "
                f"{check.lhs:.3e} > {check.bound:.3e}"
            )
    return _result("continuity_modulus", failures, count)


def surrogate_sup_matches_t(ctx: SuiteContext) -> PropertyResult:
    inputs: list[tuple[BoundedSeq, EstimatorConfig]] = [
        (Indicator(parse_set_expr(expr)), ctx.cfg) for expr in TEST_FAMILY
    ]
    seq_cfg = ctx.seq_cfg
    inputs += [
        (SeededRandom01(ctx.seed()), seq_cfg) for _ in range(ctx.size(10, 2))
    ]
    failures = []
    for x, cfg in inputs:
        _, value = surrogate_sup(x, cfg)
        t = t_estimate(x, cfg).extrapolated
        if abs(value - t) > 3e-2:
            failures.append(f"{x.to_expr()}: sup {value:.4f}, t {t:.4f}")
    return _result("surrogate_sup_matches_t", failures, len(inputs))


def cesaro_extension(ctx: SuiteContext) -> PropertyResult:
    count = ctx.size(10, 3)
    failures = []
    for _ in range(count):
        size = int(ctx.rng.integers(1, 7))
        x = PeriodicValues(tuple(float(v) for v in ctx.rng.uniform(0, 1, size=size)))
        n = int(ctx.rng.integers(2**20, 2**22))
        value = eval_surrogate(Surrogate.single(10, n), x)
        if abs(value - x.mean) > 2e-2:
            failures.append(f"{x.to_expr()} n={n}: {value:.4f}, mean {x.mean:.4f}")
    return _result("cesaro_extension", failures, count)


def additivity(ctx: SuiteContext) -> PropertyResult:
    pairs = ADDITIVITY_PAIRS if ctx.full else ADDITIVITY_PAIRS[:3]
    failures = []
    for a, b in pairs:
        residual = verify_additivity(parse_set_expr(a), parse_set_expr(b), ctx.cfg)
        if residual > 3e-2:
            failures.append(f"({a}, {b}): residual {residual:.4f}")
    return _result("additivity", failures, len(pairs))


def step_extension(ctx: SuiteContext) -> PropertyResult:
    count = ctx.size(5, 2)
    failures = []
    for _ in range(count):
        x = SeededRandom01(ctx.seed())
        k = int(ctx.rng.integers(1, 11))
        n = int(ctx.rng.integers(10**4, ctx.size(10**5, 2 * 10**4)))
        f = Surrogate.single(k, n)
        th = f.theta_grid[k - 1]
        direct = eval_surrogate(f, x)
        for eps in (0.1, 0.05, 0.01):
            gap = abs(functional_from_measure(f, x, eps) - direct)
            if gap > eps + 2 / (n * (1 - th)):
                failures.append(f"{x.to_expr()} k={k} n={n} eps={eps}: gap {gap:.3e}")
    return _result("step_extension", failures, count)


def _enumerated_ratio(members: np.ndarray, n: int, alpha: float) -> float:
    ks = np.arange(1, n + 1, dtype=np.float64) / n
    return math.fsum(ks[members[:n]] ** alpha) / math.fsum(ks**alpha)


def oracle_equivalence(ctx: SuiteContext) -> PropertyResult:
    count = ctx.size(100, 20)
    upto = ctx.size(10**4, 2000)
    failures = []
    for _ in range(count):
        A = random_structured_set(ctx.rng)
        members = np.array([A.member(k) for k in range(1, upto + 1)])
        enumerated = np.concatenate([[0], np.cumsum(members)])
        closed = np.array([A.count(n) for n in range(upto + 1)])
        if not np.array_equal(enumerated, closed):
            n = int(np.nonzero(enumerated != closed)[0][0])
            failures.append(
                f"{A.to_expr()}: count({n}) = {closed[n]}, enumeration {enumerated[n]}"
            )
            continue
        for n in (int(v) for v in ctx.rng.integers(1, upto + 1, size=5)):
            for alpha in (0.5, 1.0, 2.0, 4.0):
                expected = _enumerated_ratio(members, n, alpha)
                got = A.power_sum_ratio(n, alpha)
                if abs(got - expected) > 1e-9 * expected + 1e-12:
                    failures.append(
                        f"{A.to_expr()}: ratio(n={n}, alpha={alpha}) = {got!r}, "
                        f"enumeration {expected!r}"
                    )
    return _result("oracle_equivalence", failures, count)


def window_identities(ctx: SuiteContext) -> PropertyResult:
    count = ctx.size(500, 50)
    thetas = ctx.cfg.theta_grid
    one = ConstantValue(1.0)
    failures = []
    for _ in range(count):
        x = random_sequence(ctx.rng, cap=2**17)
        A = random_structured_set(ctx.rng)
        i, j = (int(v) for v in ctx.rng.integers(0, len(thetas), size=2))
        th, th2 = thetas[i], thetas[j]
        n = int(ctx.rng.integers(2, 2**16))
        # Dyadic r and theta keep the window products exact in floating point
        r = n + int(ctx.rng.integers(0, 8)) / 8
        r2 = max(1.0, r + float(ctx.rng.uniform(-1, 1)))
        c, d = (float(v) for v in ctx.rng.uniform(-2, 2, size=2))
        label = f"{x.to_expr()} theta={th} r={r}"

        shift = abs(window_sum(x, th, r) - window_sum(x, th, r2))
        if shift > 2 * x.sup_bound + 1e-9:
            failures.append(f"{label}: |S(r) - S({r2:.3f})| = {shift:.3e}")
        affine = theta(Affine(c, d, x), th, r)
        expected = c * theta(x, th, r) + d * theta(one, th, r)
        if abs(affine - expected) > 1e-8:
            failures.append(f"{label}: affine c={c:.3f} d={d:.3f} is off")
        both = theta(Indicator(A), th, r) + theta(Indicator(A.complement()), th, r)
        if abs(both - theta(one, th, r)) > 1e-12:
            failures.append(f"{A.to_expr()} theta={th} r={r}: complement sum {both!r}")
        split = window_sum(x, th, th2 * r) + window_sum(x, th2, r)
        if abs(window_sum(x, th * th2, r) - split) > 1e-8:
            failures.append(f"{label} theta'={th2}: splitting identity fails")
    return _result("window_identities", failures, count)


def sublinear_laws(ctx: SuiteContext) -> PropertyResult:
    cfg = ctx.seq_cfg
    # Window discretization moves a window average by at most 2/min_window
    tol = 2e-2 + 2 / cfg.min_window
    x = Indicator(GeomBlocks(1, 2, 2))
    y = SeededRandom01(ctx.seed())
    z = SeededRandom01(ctx.seed())
    periodic = PeriodicValues((0.2, 0.6, 0.1))

    def t(seq: BoundedSeq) -> float:
        return t_estimate(seq, cfg).extrapolated

    tx, ty = t(x), t(y)
    shifted = t(Sum(x, periodic))
    c = float(ctx.rng.uniform(0.1, 3.0))
    failures = []
    if t(Sum(y, z)) > ty + t(z) + tol:
        failures.append("subadditivity")
    if shifted > tx + t(periodic) + tol:
        failures.append("subadditivity with a periodic sequence")
    if abs(t(Affine(c, 0.0, y)) - c * ty) > tol:
        failures.append(f"positive homogeneity (c={c:.3f})")
    if abs(shifted - (tx + periodic.mean)) > tol:
        failures.append("translation by a Cesàro-convergent sequence")
    if t(Sum(y, ConstantValue(0.1))) < ty - tol:
        failures.append("monotonicity")
    if abs(t(Rounded(y)) - ty) > tol:
        failures.append("invariance under rounding")
    return _result("sublinear_laws", failures, 6)


PROPERTIES: tuple[Callable[[SuiteContext], PropertyResult], ...] = (
    four_route_concordance,
    exact_density_collapse,
    duality,
    sandwich_chain,
    rounding_transform_bounds,
    continuity_modulus,
    surrogate_sup_matches_t,
    cesaro_extension,
    additivity,
    step_extension,
    oracle_equivalence,
    sublinear_laws,
    window_identities,
)


def run_suite(
    suite: str = "core",
    seed: int = 42,
    threads: int = 1,
) -> list[PropertyResult]:
    """Run every property of a suite.

    Args:
        suite (str): "core" or "full".
        seed (int): Seed of the input generator.
        threads (int): Worker threads for grid sweeps.

    Returns:
        list: One PropertyResult per property, in a fixed order.
    """
    if suite not in SUITES:
        raise ValueError(
            f"Unsupported suite. Supported suites: {', '.join(SUITES.keys())}"
        )
    ctx = SuiteContext(np.random.default_rng(seed), SUITES[suite] == "full", threads)
    results = []
    for prop in PROPERTIES:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", tools.CrossRouteMismatch)
            warnings.simplefilter("ignore", tools.MonotonicityWarning)
            try:
                results.append(prop(ctx))
            except (ValueError, ArithmeticError, RuntimeError) as e:
                results.append(PropertyResult(prop.__name__, False, f"raised {e!r}"))
    return results
