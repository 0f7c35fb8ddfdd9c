"""
Bounded real sequences x = (x_1, x_2, ...) with memoized prefix sums,
Cesàro means, the 0/1 rounding transform and step-sequence
quantization.

Every sequence exposes the prefix sums P(n) = x_1 + ... + x_n, since
Cesàro means and window averages are differences of P. Sequences with
structure (indicators, constants, periodic values, explicit prefixes)
have closed-form prefix sums at any horizon. Seeded random sequences
and level sets are materialized in chunks and memoized up to a cap.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from . import tools
from .natset import NATURALS, Enumerated, NatSet, Periodic, PowerSum


### Base class ###
class BoundedSeq(ABC):
    """A bounded real sequence indexed by i >= 1."""

    @property
    @abstractmethod
    def bounds(self) -> tuple[float, float]:
        """Interval (lo, hi) containing every value."""

    @property
    def sup_bound(self) -> float:
        """Bound on |x_i|."""
        lo, hi = self.bounds
        return max(abs(lo), abs(hi))

    @property
    def max_horizon(self) -> int | None:
        """Largest index that can be evaluated, or None if unlimited."""
        return None

    def value(self, i: int) -> float:
        if i < 1:
            raise ValueError("Sequence index must be a positive integer")
        return float(self.values(i, i + 1)[0])

    def values(self, lo: int, hi: int) -> NDArray[np.float64]:
        """Values x_i for i in [lo, hi), lo >= 1."""
        if lo < 1 or hi < lo:
            raise ValueError("Index range must satisfy 1 <= lo <= hi")
        return self._values(int(lo), int(hi))

    def prefix_sum(self, n: int) -> float:
        """P(n) = x_1 + ... + x_n; P(0) = 0."""
        if n < 0:
            raise ValueError("Horizon must be non-negative")
        if n == 0:
            return 0.0
        return float(self._prefix(int(n)))

    def prefix_sums(self, lo: int, hi: int) -> NDArray[np.float64]:
        """[P(lo), ..., P(hi - 1)] for 0 <= lo <= hi."""
        if lo < 0 or hi < lo:
            raise ValueError("Horizon range must satisfy 0 <= lo <= hi")
        if hi == lo:
            return np.zeros(0)
        if lo == 0:
            return np.concatenate([[0.0], self.prefix_sums(1, hi)])
        return self.prefix_sum(lo - 1) + np.cumsum(self._values(lo, hi))

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        """Horizons in [lo, hi] where the sequence changes regime."""
        return []

    @abstractmethod
    def to_expr(self) -> str:
        """Render the sequence in the expression language."""

    def __str__(self) -> str:
        return self.to_expr()

    @abstractmethod
    def _values(self, lo: int, hi: int) -> NDArray[np.float64]: ...

    @abstractmethod
    def _prefix(self, n: int) -> float: ...


### Closed-form variants ###
@dataclass(frozen=True)
class Indicator(BoundedSeq):
    """Indicator sequence of a set; P(n) = A(n)."""

    nat_set: NatSet

    @property
    def bounds(self) -> tuple[float, float]:
        return 0.0, 1.0

    def _values(self, lo: int, hi: int) -> NDArray[np.float64]:
        return self.nat_set.mask(lo, hi).astype(np.float64)

    def _prefix(self, n: int) -> float:
        return float(self.nat_set.count(n))

    def prefix_sums(self, lo: int, hi: int) -> NDArray[np.float64]:
        if 0 < lo < hi:
            base = self.nat_set.count(lo - 1)
            return base + np.cumsum(self.nat_set.mask(lo, hi), dtype=np.float64)
        return super().prefix_sums(lo, hi)

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        return self.nat_set.breakpoints(lo, hi)

    def to_expr(self) -> str:
        return f"ind({self.nat_set.to_expr()})"


@dataclass(frozen=True)
class ConstantValue(BoundedSeq):
    """The constant sequence x_i = c."""

    c: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.c):
            raise ValueError("Constant must be a finite real number")
        object.__setattr__(self, "c", float(self.c))

    @property
    def bounds(self) -> tuple[float, float]:
        return self.c, self.c

    def _values(self, lo: int, hi: int) -> NDArray[np.float64]:
        return np.full(hi - lo, self.c)

    def _prefix(self, n: int) -> float:
        return self.c * n

    def prefix_sums(self, lo: int, hi: int) -> NDArray[np.float64]:
        return self.c * np.arange(lo, hi, dtype=np.float64)

    def to_expr(self) -> str:
        return f"const({tools.format_number(self.c)})"


@dataclass(frozen=True)
class PeriodicValues(BoundedSeq):
    """x_i = values[(i - 1) mod p]."""

    pattern: tuple[float, ...]

    def __post_init__(self) -> None:
        pattern = tuple(float(v) for v in self.pattern)
        if not pattern:
            raise ValueError("Periodic values need at least one value")
        if not all(math.isfinite(v) for v in pattern):
            raise ValueError("Periodic values must be finite real numbers")
        object.__setattr__(self, "pattern", pattern)

    @property
    def period(self) -> int:
        return len(self.pattern)

    @property
    def mean(self) -> float:
        """Cesàro mean of the sequence."""
        return math.fsum(self.pattern) / self.period

    @property
    def bounds(self) -> tuple[float, float]:
        return min(self.pattern), max(self.pattern)

    def _values(self, lo: int, hi: int) -> NDArray[np.float64]:
        idx = (np.arange(lo, hi, dtype=np.int64) - 1) % self.period
        return np.asarray(self.pattern)[idx]

    def _prefix(self, n: int) -> float:
        return float(self.prefix_sums(n, n + 1)[0])

    def prefix_sums(self, lo: int, hi: int) -> NDArray[np.float64]:
        full, rest = np.divmod(np.arange(lo, hi, dtype=np.int64), self.period)
        partial = np.concatenate([[0.0], np.cumsum(self.pattern)])
        return full * partial[-1] + partial[rest]

    def to_expr(self) -> str:
        return f"periodic({','.join(tools.format_number(v) for v in self.pattern)})"


@dataclass(frozen=True)
class ExplicitPrefixWithConstantTail(BoundedSeq):
    """Listed values x_1, ..., x_L followed by x_i = tail for i > L."""

    head: tuple[float, ...]
    tail: float

    def __post_init__(self) -> None:
        head = tuple(float(v) for v in self.head)
        if not all(math.isfinite(v) for v in (*head, self.tail)):
            raise ValueError("Prefix values and tail must be finite real numbers")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "tail", float(self.tail))

    @property
    def bounds(self) -> tuple[float, float]:
        everything = (*self.head, self.tail)
        return min(everything), max(everything)

    def _values(self, lo: int, hi: int) -> NDArray[np.float64]:
        out = np.full(hi - lo, self.tail)
        listed = np.asarray(self.head[lo - 1 : hi - 1], dtype=np.float64)
        out[: len(listed)] = listed
        return out

    def _prefix(self, n: int) -> float:
        return float(self.prefix_sums(n, n + 1)[0])

    def prefix_sums(self, lo: int, hi: int) -> NDArray[np.float64]:
        ns = np.arange(lo, hi, dtype=np.int64)
        length = len(self.head)
        partial = np.concatenate([[0.0], np.cumsum(self.head)])
        return partial[np.minimum(ns, length)] + self.tail * np.maximum(ns - length, 0)

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        length = len(self.head)
        return [length] if lo <= length <= hi else []

    def to_expr(self) -> str:
        head = ",".join(tools.format_number(v) for v in self.head)
        return f"prefix({head};{tools.format_number(self.tail)})"


### Combinators ###
@dataclass(frozen=True)
class Affine(BoundedSeq):
    """x_i = scale * inner_i + shift."""

    scale: float
    shift: float
    inner: BoundedSeq

    def __post_init__(self) -> None:
        if not (math.isfinite(self.scale) and math.isfinite(self.shift)):
            raise ValueError("Affine scale and shift must be finite real numbers")
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "shift", float(self.shift))

    @property
    def bounds(self) -> tuple[float, float]:
        lo, hi = self.inner.bounds
        ends = sorted((self.scale * lo + self.shift, self.scale * hi + self.shift))
        return ends[0], ends[1]

    @property
    def max_horizon(self) -> int | None:
        return self.inner.max_horizon

    def _values(self, lo: int, hi: int) -> NDArray[np.float64]:
        return self.scale * self.inner.values(lo, hi) + self.shift

    def _prefix(self, n: int) -> float:
        return self.scale * self.inner.prefix_sum(n) + self.shift * n

    def prefix_sums(self, lo: int, hi: int) -> NDArray[np.float64]:
        ns = np.arange(lo, hi, dtype=np.float64)
        return self.scale * self.inner.prefix_sums(lo, hi) + self.shift * ns

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        return self.inner.breakpoints(lo, hi)

    def to_expr(self) -> str:
        return (
            f"affine({tools.format_number(self.scale)},"
            f"{tools.format_number(self.shift)},{self.inner.to_expr()})"
        )


def _min_horizon(*horizons: int | None) -> int | None:
    known = [h for h in horizons if h is not None]
    return min(known) if known else None


@dataclass(frozen=True)
class Sum(BoundedSeq):
    """Pointwise sum of two sequences."""

    left: BoundedSeq
    right: BoundedSeq

    @property
    def bounds(self) -> tuple[float, float]:
        (a, b), (c, d) = self.left.bounds, self.right.bounds
        return a + c, b + d

    @property
    def max_horizon(self) -> int | None:
        return _min_horizon(self.left.max_horizon, self.right.max_horizon)

    def _values(self, lo: int, hi: int) -> NDArray[np.float64]:
        return self.left.values(lo, hi) + self.right.values(lo, hi)

    def _prefix(self, n: int) -> float:
        return self.left.prefix_sum(n) + self.right.prefix_sum(n)

    def prefix_sums(self, lo: int, hi: int) -> NDArray[np.float64]:
        return self.left.prefix_sums(lo, hi) + self.right.prefix_sums(lo, hi)

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        points = set(self.left.breakpoints(lo, hi))
        points.update(self.right.breakpoints(lo, hi))
        return sorted(points)

    def to_expr(self) -> str:
        return f"sum({self.left.to_expr()},{self.right.to_expr()})"


### Seeded random values ###
@lru_cache(maxsize=64)
def _random_chunk(seed: int, j: int) -> NDArray[np.float64]:
    # Chunk j holds x_i for i in [j * CHUNK_SIZE + 1, (j + 1) * CHUNK_SIZE]
    chunk = np.random.default_rng([seed, j]).random(tools.CHUNK_SIZE)
    chunk.setflags(write=False)
    return chunk


@dataclass(frozen=True)
class SeededRandom01(BoundedSeq):
    """
    Reproducible pseudo-random values in [0, 1). Chunk j of the
    sequence is drawn from numpy's default generator seeded with
    (seed, j), so any index is reachable without generating the ones
    before it and equal seeds give identical sequences.

    Args:
        seed (int): Non-negative seed.
        cap (int): Largest index whose prefix sum may be materialized.
    """

    seed: int
    cap: int = field(default=tools.ENUMERATION_CAP, compare=False)
    _memo: tools.ChunkedPrefix = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("Seed must be a non-negative integer")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(
            self, "_memo", tools.ChunkedPrefix(self._values, cap=self.cap)
        )

    @property
    def bounds(self) -> tuple[float, float]:
        return 0.0, 1.0

    @property
    def max_horizon(self) -> int | None:
        return self.cap

    def _values(self, lo: int, hi: int) -> NDArray[np.float64]:
        parts: list[NDArray[np.float64]] = []
        i = lo
        while i < hi:
            j, off = divmod(i - 1, tools.CHUNK_SIZE)
            take = min(tools.CHUNK_SIZE - off, hi - i)
            parts.append(_random_chunk(self.seed, j)[off : off + take])
            i += take
        return np.concatenate(parts) if parts else np.zeros(0)

    def _prefix(self, n: int) -> float:
        return float(self._memo.prefix(n))

    def prefix_sums(self, lo: int, hi: int) -> NDArray[np.float64]:
        return self._memo.prefix_array(lo, hi)

    def to_expr(self) -> str:
        return f"rand01({self.seed})"


### Rounding transform ###
def _check_unit_interval(values: NDArray[np.float64], lo: int) -> None:
    bad = np.nonzero((values < 0) | (values > 1))[0]
    if len(bad):
        i = int(bad[0])
        raise tools.DomainError(
            f"Rounding requires values in [0, 1]; x_{lo + i} = {float(values[i])!r}"
        )


@dataclass(frozen=True)
class Rounded(BoundedSeq):
    """
    0/1 sequence with prefix sums floor(s_n), where s_n are the prefix
    sums of the inner sequence. Hence x~_n = floor(s_n) - floor(s_{n-1})
    is 0 or 1 and |floor(s_n) - s_n| < 1 at every n.

    The inner values must lie in [0, 1]. They are checked on the prefix
    [1, 10^4] at construction and on every range evaluated afterwards.
    """

    inner: BoundedSeq

    def __post_init__(self) -> None:
        lo, hi = self.inner.bounds
        if lo < 0 or hi > 1:
            upto = _min_horizon(tools.SAMPLE_PREFIX, self.inner.max_horizon)
            _check_unit_interval(self.inner.values(1, upto + 1), 1)  # pyright: ignore

    @property
    def bounds(self) -> tuple[float, float]:
        return 0.0, 1.0

    @property
    def max_horizon(self) -> int | None:
        return self.inner.max_horizon

    def _values(self, lo: int, hi: int) -> NDArray[np.float64]:
        _check_unit_interval(self.inner.values(lo, hi), lo)
        return np.diff(np.floor(self.inner.prefix_sums(lo - 1, hi)))

    def _prefix(self, n: int) -> float:
        return math.floor(self.inner.prefix_sum(n))

    def prefix_sums(self, lo: int, hi: int) -> NDArray[np.float64]:
        return np.floor(self.inner.prefix_sums(lo, hi))

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        return self.inner.breakpoints(lo, hi)

    def to_expr(self) -> str:
        return f"round({self.inner.to_expr()})"


def _is_zero_one(x: BoundedSeq) -> bool:
    if isinstance(x, (Indicator, Rounded)):
        return True
    if isinstance(x, ConstantValue):
        listed: tuple[float, ...] = (x.c,)
    elif isinstance(x, PeriodicValues):
        listed = x.pattern
    elif isinstance(x, ExplicitPrefixWithConstantTail):
        listed = (*x.head, x.tail)
    else:
        return False
    return set(listed) <= {0.0, 1.0}


def rounding_transform(x: BoundedSeq) -> BoundedSeq:
    """Round a [0, 1]-valued sequence to a 0/1 sequence with the same
    prefix sums up to an error below 1.

    Args:
        x (BoundedSeq): Sequence with values in [0, 1].

    Returns:
        BoundedSeq: x itself when it is already 0/1 valued, else the
            Rounded sequence.
    """
    if _is_zero_one(x):
        return x
    return Rounded(x)


### Cesàro means ###
def cesaro_estimate(x: BoundedSeq, n: int) -> float:
    """Cesàro mean (x_1 + ... + x_n) / n.

    Args:
        x (BoundedSeq): Sequence.
        n (int): Horizon (>= 1).

    Returns:
        float: Prefix average.
    """
    if n < 1:
        raise ValueError("Horizon must be at least 1")
    return x.prefix_sum(n) / n


### Step sequences ###
@dataclass(frozen=True)
class LevelSet(NatSet):
    """
    The set {i : rint(x_i / eps) == level} of indices where x rounds to
    level * eps. Counts are memoized chunk by chunk.
    """

    seq: BoundedSeq
    eps: float
    level: int
    cap: int = field(default=tools.ENUMERATION_CAP, compare=False)
    _counts: Enumerated = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.eps <= 0:
            raise ValueError("Quantization step must be positive")
        cap = _min_horizon(self.cap, self.seq.max_horizon)
        object.__setattr__(self, "eps", float(self.eps))
        object.__setattr__(self, "level", int(self.level))
        object.__setattr__(self, "_counts", Enumerated(self, cap))  # pyright: ignore

    def _contains(self, k: int) -> bool:
        return bool(self._mask(k, k + 1)[0])

    def _count(self, n: int) -> int:
        return self._counts.count(n)

    def _power_sum(self, n: int, alpha: float) -> PowerSum:
        return self._counts.power_sum(n, alpha)

    def _mask(self, lo: int, hi: int) -> NDArray[np.bool_]:
        return np.rint(self.seq.values(lo, hi) / self.eps) == self.level

    def to_expr(self) -> str:
        return (
            f"level({self.seq.to_expr()};{tools.format_number(self.eps)},{self.level})"
        )


@dataclass(frozen=True)
class StepSeq(BoundedSeq):
    """Finite linear combination sum_j c_j * indicator(A_j)."""

    levels: tuple[tuple[float, NatSet], ...]

    def __post_init__(self) -> None:
        levels = tuple((float(c), a) for c, a in self.levels)
        if not all(math.isfinite(c) for c, _ in levels):
            raise ValueError("Step levels must be finite real numbers")
        object.__setattr__(self, "levels", levels)

    @property
    def bounds(self) -> tuple[float, float]:
        lo = sum(min(c, 0.0) for c, _ in self.levels)
        hi = sum(max(c, 0.0) for c, _ in self.levels)
        return lo, hi

    def _values(self, lo: int, hi: int) -> NDArray[np.float64]:
        out = np.zeros(hi - lo)
        for c, a in self.levels:
            out += c * a.mask(lo, hi)
        return out

    def _prefix(self, n: int) -> float:
        return float(self.prefix_sums(n, n + 1)[0])

    def prefix_sums(self, lo: int, hi: int) -> NDArray[np.float64]:
        if lo == 0 or hi <= lo:
            return super().prefix_sums(lo, hi)
        out = np.zeros(hi - lo)
        for c, a in self.levels:
            out += c * (a.count(lo - 1) + np.cumsum(a.mask(lo, hi), dtype=np.float64))
        return out

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        return sorted({p for _, a in self.levels for p in a.breakpoints(lo, hi)})

    def to_expr(self) -> str:
        terms = [
            f"affine({tools.format_number(c)},0,ind({a.to_expr()}))"
            for c, a in self.levels
        ]
        if not terms:
            return "const(0)"
        expr = terms[-1]
        for term in reversed(terms[:-1]):
            expr = f"sum({term},{expr})"
        return expr


def _positions(pattern: tuple[float, ...], v: float) -> list[int]:
    # Residues k mod p of the indices k >= 1 where the pattern takes v
    p = len(pattern)
    return [(j + 1) % p for j, w in enumerate(pattern) if w == v]


def step_approximate(x: BoundedSeq, eps: float) -> StepSeq:
    """Approximate x uniformly within eps by a step sequence.

    Indicators, constants and periodic values are represented exactly.
    Otherwise x is quantized to the grid eps * Z and every grid level in
    the range of x becomes one level set, so the uniform error is at
    most eps / 2.

    Args:
        x (BoundedSeq): Sequence to approximate.
        eps (float): Uniform accuracy (> 0).

    Returns:
        StepSeq: Levels (c_j, A_j) with |x_i - sum c_j chi_{A_j}(i)| <= eps.
    """
    if eps <= 0:
        raise ValueError("Approximation accuracy eps must be positive")

    if isinstance(x, StepSeq):
        return x
    if isinstance(x, Indicator):
        return StepSeq(((1.0, x.nat_set),))
    if isinstance(x, ConstantValue):
        return StepSeq(((x.c, NATURALS),))
    if isinstance(x, PeriodicValues):
        p = x.period
        distinct = sorted(set(x.pattern))
        return StepSeq(
            tuple(
                (v, Periodic(p, tuple(_positions(x.pattern, v))))
                for v in distinct
            )
        )

    lo, hi = x.bounds
    first, last = int(np.rint(lo / eps)), int(np.rint(hi / eps))
    return StepSeq(
        tuple((j * eps, LevelSet(x, eps, j)) for j in range(first, last + 1))
    )
