"""
Structured subsets of the positive integers N = {1, 2, 3, ...}.

Each set answers membership, the counting function

    A(n) = |A ∩ {1, ..., n}|

and the power sums A_alpha(n) = sum_{k in A, k <= n} k**alpha without
element-by-element enumeration whenever its structure allows it.
Power sums are kept in the normalized form sum (k / n)**alpha so that
horizons like 4**15 and exponents like 256 never overflow.

Periodic, block and explicit sets are closed form. Intersections and
non-certified unions reduce to a periodic part times an interval
decomposition when they can and otherwise enumerate, up to a cap.
"""

from __future__ import annotations

import bisect
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterator

import numpy as np
from numpy.typing import NDArray

from . import tools

Runs = list[tuple[int, int]]


### Power sums ###
@dataclass(frozen=True)
class PowerSum:
    """A normalized power sum with an absolute error bound."""

    value: float
    error_bound: float = 0.0

    def __add__(self, other: PowerSum) -> PowerSum:
        return PowerSum(self.value + other.value, self.error_bound + other.error_bound)

    def __sub__(self, other: PowerSum) -> PowerSum:
        return PowerSum(self.value - other.value, self.error_bound + other.error_bound)


ZERO_SUM = PowerSum(0.0, 0.0)


def _log_pow(u: float, p: float) -> float:
    # u**p for u > 0 evaluated in log-space
    return math.exp(p * math.log(u))


def _exact_progression(
    first: int, step: int, count: int, n: int, alpha: float
) -> float:
    ks = first + step * np.arange(count, dtype=np.float64)
    return float(np.sum(np.exp(alpha * np.log(ks / n))))


def progression_power_sum(
    first: int,
    step: int,
    count: int,
    n: int,
    alpha: float,
    exact_terms: int = tools.EXACT_TERMS,
) -> PowerSum:
    """
    Normalized power sum over an arithmetic progression,

        sum_{j < count} ((first + j * step) / n) ** alpha.

    Progressions with at most exact_terms terms are summed exactly.
    Longer ones sum a short head exactly and replace the rest by the
    midpoint integral with its leading Euler-Maclaurin correction; the
    size of that correction is reported as the error bound.

    Args:
        first (int): First term (>= 1).
        step (int): Common difference (>= 1).
        count (int): Number of terms.
        n (int): Normalizing horizon.
        alpha (float): Exponent (>= 0).
        exact_terms (int): Longest progression summed exactly.

    Returns:
        PowerSum: Value and absolute error bound.
    """
    if count <= 0:
        return ZERO_SUM
    if alpha == 0:
        return PowerSum(float(count), 0.0)
    if count <= exact_terms:
        return PowerSum(_exact_progression(first, step, count, n, alpha), 0.0)

    head = _exact_progression(first, step, tools.HEAD_TERMS, n, alpha)

    # Midpoint cells of width `step` around the remaining terms
    lo = (first + tools.HEAD_TERMS * step - step / 2) / n
    hi = (first + (count - 1) * step + step / 2) / n
    integral = (
        n / (step * (alpha + 1)) * (_log_pow(hi, alpha + 1) - _log_pow(lo, alpha + 1))
    )
    correction = (
        -(step / 24) * (alpha / n) * (_log_pow(hi, alpha - 1) - _log_pow(lo, alpha - 1))
    )
    value = head + integral + correction

    return PowerSum(value, abs(correction) + 1e-15 * abs(value))


def range_power_sum(a: int, b: int, n: int, alpha: float) -> PowerSum:
    """Normalized power sum over the integers of [a, b)."""
    return progression_power_sum(a, 1, b - a, n, alpha)


def naturals_power_sum(n: int, alpha: float) -> PowerSum:
    """Normalized power sum N_alpha(n) / n**alpha over [1, n]."""
    return range_power_sum(1, n + 1, n, alpha)


### Interval helpers ###
def _merge_runs(runs: Runs) -> Runs:
    merged: Runs = []
    for a, b in sorted(runs):
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def _intersect_runs(left: Runs, right: Runs) -> Runs:
    out: Runs = []
    i = j = 0
    while i < len(left) and j < len(right):
        a = max(left[i][0], right[j][0])
        b = min(left[i][1], right[j][1])
        if a < b:
            out.append((a, b))
        if left[i][1] < right[j][1]:
            i += 1
        else:
            j += 1
    return out


def _gaps(runs: Runs, n: int) -> Runs:
    out: Runs = []
    prev = 1
    for a, b in runs:
        if a > prev:
            out.append((prev, a))
        prev = max(prev, b)
    if prev <= n:
        out.append((prev, n + 1))
    return out


def _clip_runs(intervals: Iterator[tuple[int, int]] | Runs, n: int) -> Runs:
    out: Runs = []
    for a, b in intervals:
        if a > n:
            break
        out.append((a, min(b, n + 1)))
    return out


def _runs_mask(runs: Runs, lo: int, hi: int) -> NDArray[np.bool_]:
    ks = np.arange(lo, hi, dtype=np.int64)
    if not runs:
        return np.zeros(len(ks), dtype=bool)
    starts = np.array([a for a, _ in runs], dtype=np.int64)
    ends = np.array([b for _, b in runs], dtype=np.int64)
    idx = np.searchsorted(starts, ks, side="right") - 1
    inside = idx >= 0
    inside[inside] = ks[inside] < ends[idx[inside]]
    return inside


### Base class ###
class NatSet(ABC):
    """
    A subset of N described by its structure. Instances are immutable
    and every method is re-entrant.
    """

    ## Operations ##
    def member(self, k: int) -> bool:
        """Return True iff k belongs to the set.

        Args:
            k (int): Positive integer.

        Returns:
            bool: Membership of k.
        """
        if k < 1:
            raise ValueError("Membership is defined for positive integers only")
        return self._contains(int(k))

    def count(self, n: int) -> int:
        """Counting function A(n) = |A ∩ [1, n]|.

        Args:
            n (int): Horizon (>= 0).

        Returns:
            int: Number of elements not exceeding n.
        """
        if n < 0:
            raise ValueError("Horizon must be non-negative")
        if n == 0:
            return 0
        return int(self._count(int(n)))

    def power_sum(self, n: int, alpha: float) -> PowerSum:
        """Normalized power sum A_alpha(n) / n**alpha with error bound.

        Args:
            n (int): Horizon (>= 1).
            alpha (float): Exponent (>= 0).

        Returns:
            PowerSum: Value and absolute error bound.
        """
        if n < 1:
            raise ValueError("Horizon must be at least 1")
        if alpha < 0:
            raise ValueError("Alpha must be non-negative")
        return self._power_sum(int(n), float(alpha))

    def power_sum_bounds(self, n: int, alpha: float) -> PowerSum:
        """Ratio A_alpha(n) / N_alpha(n) together with its error bound.

        Args:
            n (int): Horizon (>= 1).
            alpha (float): Exponent (>= 0).

        Returns:
            PowerSum: Ratio in [0, 1] and absolute error bound.
        """
        if alpha == 0:
            return PowerSum(self.count(n) / n, 0.0)
        part = self.power_sum(n, alpha)
        whole = naturals_power_sum(int(n), float(alpha))
        ratio = part.value / whole.value
        bound = (part.error_bound + ratio * whole.error_bound) / whole.value
        return PowerSum(min(max(ratio, 0.0), 1.0), bound)

    def power_sum_ratio(
        self,
        n: int,
        alpha: float,
        max_error: float | None = None,
    ) -> float:
        """Power-sum ratio A_alpha(n) / N_alpha(n).

        Args:
            n (int): Horizon (>= 1).
            alpha (float): Exponent (>= 0).
            max_error (float, optional): Largest acceptable error bound
                of the block-integral approximation.

        Returns:
            float: Ratio in [0, 1].
        """
        result = self.power_sum_bounds(n, alpha)
        if max_error is not None and result.error_bound > max_error:
            raise tools.ApproximationError(result.error_bound, max_error)
        return result.value

    def exact_density(self) -> float | None:
        """Asymptotic density when the structure certifies it, else None."""
        return None

    def mask(self, lo: int, hi: int) -> NDArray[np.bool_]:
        """Vectorized membership of the integers in [lo, hi), lo >= 1."""
        if lo < 1 or hi < lo:
            raise ValueError("Mask range must satisfy 1 <= lo <= hi")
        return self._mask(int(lo), int(hi))

    def runs(self, n: int) -> Runs | None:
        """Interval decomposition of A ∩ [1, n], or None if unavailable."""
        return None

    def periodic_form(self) -> Periodic | None:
        """Equivalent Periodic set, or None if the set is not periodic."""
        return None

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        """
        Structural breakpoints in [lo, hi]: for every run [a, b) the last
        non-member a - 1 and the last member b - 1. Extremes of A(n)/n
        sit at these horizons.
        """
        runs = self.runs(hi)
        if runs is None:
            return []
        points = {a - 1 for a, _ in runs} | {b - 1 for _, b in runs}
        return sorted(p for p in points if p >= max(lo, 1) and p <= hi)

    def complement(self) -> Complement:
        return Complement(self)

    @abstractmethod
    def to_expr(self) -> str:
        """Render the set in the expression language."""

    def __str__(self) -> str:
        return self.to_expr()

    ## Implementation hooks ##
    @abstractmethod
    def _contains(self, k: int) -> bool: ...

    @abstractmethod
    def _count(self, n: int) -> int: ...

    @abstractmethod
    def _power_sum(self, n: int, alpha: float) -> PowerSum: ...

    @abstractmethod
    def _mask(self, lo: int, hi: int) -> NDArray[np.bool_]: ...


### Enumeration fallback ###
class Enumerated:
    """Capped enumeration of a set through its mask."""

    def __init__(self, owner: NatSet, cap: int) -> None:
        self._owner = owner
        self._cap = cap
        self._counts = tools.ChunkedPrefix(owner._mask, cap=cap, dtype=np.int64)

    def count(self, n: int) -> int:
        return int(self._counts.prefix(n))

    def power_sum(self, n: int, alpha: float) -> PowerSum:
        if n > self._cap:
            raise tools.EnumerationCapExceeded(n, self._cap)
        total = 0.0
        for lo in range(1, n + 1, tools.CHUNK_SIZE):
            hi = min(lo + tools.CHUNK_SIZE, n + 1)
            ks = np.arange(lo, hi, dtype=np.float64)[self._owner._mask(lo, hi)]
            total += float(np.sum(np.exp(alpha * np.log(ks / n))))
        return PowerSum(total, 0.0)


### Periodic sets ###
def _residue_count(n: int, modulus: int, r: int) -> int:
    # |{1 <= k <= n : k ≡ r (mod modulus)}| for 0 <= r < modulus
    return (n - r) // modulus + 1 - (1 if r == 0 else 0)


def _merge_periodic(forms: list[Periodic], intersect: bool) -> Periodic | None:
    modulus = reduce(math.lcm, (p.modulus for p in forms), 1)
    if modulus > tools.MAX_MODULUS:
        return None
    r = np.arange(modulus, dtype=np.int64)
    masks = [np.isin(r % p.modulus, p.residues) for p in forms]
    if intersect:
        keep = np.logical_and.reduce(masks) if masks else np.ones(modulus, dtype=bool)
    else:
        keep = np.logical_or.reduce(masks) if masks else np.zeros(modulus, dtype=bool)
    return Periodic(modulus, tuple(int(v) for v in np.nonzero(keep)[0]))


@dataclass(frozen=True)
class Periodic(NatSet):
    """Residue classes {k : k mod modulus in residues}.

    Args:
        modulus (int): Period m >= 1.
        residues (tuple[int, ...]): Distinct residues in [0, m).
    """

    modulus: int
    residues: tuple[int, ...]

    def __post_init__(self) -> None:
        ### Check for valid inputs ###
        if int(self.modulus) != self.modulus or self.modulus < 1:
            raise ValueError("Modulus must be a positive integer")
        residues = tuple(int(r) for r in self.residues)
        if len(set(residues)) != len(residues):
            raise ValueError("Residues must be distinct")
        if any(r < 0 or r >= self.modulus for r in residues):
            raise ValueError(f"Residues must lie in [0, {self.modulus})")
        object.__setattr__(self, "modulus", int(self.modulus))
        object.__setattr__(self, "residues", tuple(sorted(residues)))

    def _contains(self, k: int) -> bool:
        return k % self.modulus in self.residues

    def _count(self, n: int) -> int:
        return sum(_residue_count(n, self.modulus, r) for r in self.residues)

    def count_in_range(self, a: int, b: int) -> int:
        """Number of members in [a, b)."""
        if b <= a:
            return 0
        return self._count(b - 1) - (self._count(a - 1) if a > 1 else 0)

    def power_sum_in_range(self, a: int, b: int, n: int, alpha: float) -> PowerSum:
        """Normalized power sum of the members in [a, b)."""
        total = ZERO_SUM
        for r in self.residues:
            first = a + (r - a) % self.modulus
            if first >= b:
                continue
            count = (b - 1 - first) // self.modulus + 1
            total = total + progression_power_sum(first, self.modulus, count, n, alpha)
        return total

    def _power_sum(self, n: int, alpha: float) -> PowerSum:
        return self.power_sum_in_range(1, n + 1, n, alpha)

    def _mask(self, lo: int, hi: int) -> NDArray[np.bool_]:
        ks = np.arange(lo, hi, dtype=np.int64)
        return np.isin(ks % self.modulus, self.residues)

    def exact_density(self) -> float | None:
        return len(self.residues) / self.modulus

    def runs(self, n: int) -> Runs | None:
        if not self.residues:
            return []
        if len(self.residues) == self.modulus:
            return [(1, n + 1)] if n >= 1 else []
        return None

    def periodic_form(self) -> Periodic | None:
        return self

    def to_expr(self) -> str:
        return f"mod({self.modulus};{','.join(str(r) for r in self.residues)})"


NATURALS = Periodic(1, (0,))
EMPTY = Periodic(1, ())


### Block sets ###
@dataclass(frozen=True)
class BlockList(NatSet):
    """Finite union of half-open blocks [a_j, b_j).

    Args:
        intervals (tuple[tuple[int, int], ...]): Blocks with
            1 <= a_j < b_j <= a_{j+1}.
    """

    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        intervals = tuple((int(a), int(b)) for a, b in self.intervals)
        prev_end = 1
        for a, b in intervals:
            if a < prev_end:
                raise ValueError(
                    "Blocks must be increasing, disjoint and start at 1 or later"
                )
            if b <= a:
                raise ValueError("Each block [a, b) must satisfy a < b")
            prev_end = b
        object.__setattr__(self, "intervals", intervals)

    def _contains(self, k: int) -> bool:
        i = bisect.bisect_right([a for a, _ in self.intervals], k) - 1
        return i >= 0 and k < self.intervals[i][1]

    def runs(self, n: int) -> Runs | None:
        return _merge_runs(_clip_runs(self.intervals, n))

    def _count(self, n: int) -> int:
        return sum(b - a for a, b in _clip_runs(self.intervals, n))

    def _power_sum(self, n: int, alpha: float) -> PowerSum:
        total = ZERO_SUM
        for a, b in _clip_runs(self.intervals, n):
            total = total + range_power_sum(a, b, n, alpha)
        return total

    def _mask(self, lo: int, hi: int) -> NDArray[np.bool_]:
        return _runs_mask(list(self.intervals), lo, hi)

    def exact_density(self) -> float | None:
        return 0.0

    def to_expr(self) -> str:
        return f"blocks(list;{','.join(f'[{a},{b})' for a, b in self.intervals)})"


@dataclass(frozen=True)
class GeomBlocks(NatSet):
    """
    Geometrically growing blocks [c_k, ceil(c_k * on_ratio)) with
    c_0 = start and c_{k+1} = ceil(c_k * on_ratio * off_ratio). With
    start=1 and both ratios 2 the blocks are [1,2), [4,8), [16,32), ...
    and the set has lower density 1/3 and upper density 2/3.

    Args:
        start (int): First block start (>= 1).
        on_ratio (float): Block length ratio (> 1).
        off_ratio (float): Gap ratio (> 1).
    """

    start: int
    on_ratio: float
    off_ratio: float

    def __post_init__(self) -> None:
        ### Check for valid inputs ###
        if int(self.start) != self.start or self.start < 1:
            raise ValueError("Block start must be a positive integer")
        if self.on_ratio <= 1 or self.off_ratio <= 1:
            raise ValueError("Block ratios must be greater than 1")
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "on_ratio", float(self.on_ratio))
        object.__setattr__(self, "off_ratio", float(self.off_ratio))

    def blocks(self, upto: int) -> Iterator[tuple[int, int]]:
        """Yield the blocks [c_k, e_k) with c_k <= upto."""
        c = self.start
        while c <= upto:
            yield c, math.ceil(c * self.on_ratio)
            c = math.ceil(c * self.on_ratio * self.off_ratio)

    def _contains(self, k: int) -> bool:
        return any(a <= k < b for a, b in self.blocks(k))

    def runs(self, n: int) -> Runs | None:
        return _clip_runs(self.blocks(n), n)

    def _count(self, n: int) -> int:
        return sum(b - a for a, b in _clip_runs(self.blocks(n), n))

    def _power_sum(self, n: int, alpha: float) -> PowerSum:
        total = ZERO_SUM
        for a, b in _clip_runs(self.blocks(n), n):
            total = total + range_power_sum(a, b, n, alpha)
        return total

    def _mask(self, lo: int, hi: int) -> NDArray[np.bool_]:
        return _runs_mask(list(self.blocks(hi)), lo, hi)

    def to_expr(self) -> str:
        return (
            f"blocks(geom;{tools.format_number(self.start)},"
            f"{tools.format_number(self.on_ratio)},"
            f"{tools.format_number(self.off_ratio)})"
        )


@dataclass(frozen=True)
class Explicit(NatSet):
    """Finite set listed in strictly increasing order."""

    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        elements = tuple(int(e) for e in self.elements)
        if any(e < 1 for e in elements):
            raise ValueError("Explicit elements must be positive integers")
        if any(b <= a for a, b in zip(elements, elements[1:])):
            raise ValueError("Explicit elements must be strictly increasing")
        object.__setattr__(self, "elements", elements)

    def _contains(self, k: int) -> bool:
        i = bisect.bisect_left(self.elements, k)
        return i < len(self.elements) and self.elements[i] == k

    def runs(self, n: int) -> Runs | None:
        runs: Runs = []
        for e in self.elements:
            if e > n:
                break
            if runs and runs[-1][1] == e:
                runs[-1] = (runs[-1][0], e + 1)
            else:
                runs.append((e, e + 1))
        return runs

    def _count(self, n: int) -> int:
        return bisect.bisect_right(self.elements, n)

    def _power_sum(self, n: int, alpha: float) -> PowerSum:
        ks = np.array(self.elements[: self._count(n)], dtype=np.float64)
        if len(ks) == 0:
            return ZERO_SUM
        return PowerSum(float(np.sum(np.exp(alpha * np.log(ks / n)))), 0.0)

    def _mask(self, lo: int, hi: int) -> NDArray[np.bool_]:
        return np.isin(np.arange(lo, hi, dtype=np.int64), self.elements)

    def exact_density(self) -> float | None:
        return 0.0

    def to_expr(self) -> str:
        return f"explicit({','.join(str(e) for e in self.elements)})"


### Boolean combinations ###
@dataclass(frozen=True)
class Complement(NatSet):
    """N minus the inner set."""

    inner: NatSet

    def _contains(self, k: int) -> bool:
        return not self.inner._contains(k)

    def _count(self, n: int) -> int:
        return n - self.inner.count(n)

    def _power_sum(self, n: int, alpha: float) -> PowerSum:
        return naturals_power_sum(n, alpha) - self.inner.power_sum(n, alpha)

    def _mask(self, lo: int, hi: int) -> NDArray[np.bool_]:
        return ~self.inner._mask(lo, hi)

    def exact_density(self) -> float | None:
        d = self.inner.exact_density()
        return None if d is None else 1.0 - d

    def runs(self, n: int) -> Runs | None:
        inner = self.inner.runs(n)
        return None if inner is None else _gaps(inner, n)

    def periodic_form(self) -> Periodic | None:
        inner = self.inner.periodic_form()
        if inner is None:
            return None
        kept = tuple(r for r in range(inner.modulus) if r not in inner.residues)
        return Periodic(inner.modulus, kept)

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        return self.inner.breakpoints(lo, hi)

    def to_expr(self) -> str:
        return f"compl({self.inner.to_expr()})"


def _flatten(kind: type, parts: tuple[NatSet, ...]) -> tuple[NatSet, ...]:
    flat: list[NatSet] = []
    for p in parts:
        if isinstance(p, kind):
            flat.extend(p.parts)  # pyright: ignore[reportAttributeAccessIssue]
        else:
            flat.append(p)
    return tuple(flat)


def _nested_expr(name: str, parts: tuple[NatSet, ...]) -> str:
    if len(parts) == 1:
        return parts[0].to_expr()
    return f"{name}({parts[0].to_expr()},{_nested_expr(name, parts[1:])})"


def _union_breakpoints(parts: tuple[NatSet, ...], lo: int, hi: int) -> list[int]:
    return sorted({p for part in parts for p in part.breakpoints(lo, hi)})


def check_disjoint(parts: tuple[NatSet, ...], upto: int = tools.SAMPLE_PREFIX) -> None:
    """Raise DisjointnessViolation if two parts share an element <= upto."""
    coverage = np.zeros(upto, dtype=np.int64)
    for part in parts:
        coverage += part.mask(1, upto + 1)
    shared = np.nonzero(coverage > 1)[0]
    if len(shared):
        raise tools.DisjointnessViolation(
            f"Union parts are not disjoint: {int(shared[0]) + 1} belongs to "
            "more than one part"
        )


@dataclass(frozen=True)
class DisjointUnion(NatSet):
    """
    Union of pairwise disjoint sets. Disjointness is certified on the
    prefix [1, 10^4] at construction; counts and power sums add up.
    """

    parts: tuple[NatSet, ...]

    def __post_init__(self) -> None:
        parts = _flatten(DisjointUnion, tuple(self.parts))
        if not parts:
            raise ValueError("A union needs at least one part")
        check_disjoint(parts)
        object.__setattr__(self, "parts", parts)

    def _contains(self, k: int) -> bool:
        return any(p._contains(k) for p in self.parts)

    def _count(self, n: int) -> int:
        return sum(p.count(n) for p in self.parts)

    def _power_sum(self, n: int, alpha: float) -> PowerSum:
        return reduce(lambda s, p: s + p.power_sum(n, alpha), self.parts, ZERO_SUM)

    def _mask(self, lo: int, hi: int) -> NDArray[np.bool_]:
        return np.logical_or.reduce([p._mask(lo, hi) for p in self.parts])

    def exact_density(self) -> float | None:
        densities = [p.exact_density() for p in self.parts]
        if any(d is None for d in densities):
            return None
        return float(sum(densities))  # pyright: ignore[reportArgumentType]

    def runs(self, n: int) -> Runs | None:
        runs = [p.runs(n) for p in self.parts]
        if any(r is None for r in runs):
            return None
        return _merge_runs([iv for r in runs for iv in r])  # pyright: ignore

    def periodic_form(self) -> Periodic | None:
        forms = [p.periodic_form() for p in self.parts]
        if any(f is None for f in forms):
            return None
        return _merge_periodic(forms, intersect=False)  # pyright: ignore

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        return _union_breakpoints(self.parts, lo, hi)

    def to_expr(self) -> str:
        return _nested_expr("union", self.parts)


@dataclass(frozen=True)
class _Combination(NatSet):
    # Shared machinery of Union and Intersection: a periodic part times
    # an interval decomposition, else capped enumeration.
    parts: tuple[NatSet, ...]
    cap: int = field(default=tools.ENUMERATION_CAP, compare=False)
    _fallback: Enumerated = field(init=False, repr=False, compare=False)

    _intersect = True

    def __post_init__(self) -> None:
        parts = _flatten(type(self), tuple(self.parts))
        if not parts:
            raise ValueError("A combination needs at least one part")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "_fallback", Enumerated(self, self.cap))

    def periodic_form(self) -> Periodic | None:
        forms = [p.periodic_form() for p in self.parts]
        if any(f is None for f in forms):
            return None
        return _merge_periodic(forms, intersect=self._intersect)  # pyright: ignore

    def _structure(self, n: int) -> tuple[Periodic, Runs] | None:
        raise NotImplementedError

    def _count(self, n: int) -> int:
        structure = self._structure(n)
        if structure is None:
            return self._fallback.count(n)
        periodic, runs = structure
        return sum(periodic.count_in_range(a, b) for a, b in runs)

    def _power_sum(self, n: int, alpha: float) -> PowerSum:
        structure = self._structure(n)
        if structure is None:
            return self._fallback.power_sum(n, alpha)
        periodic, runs = structure
        total = ZERO_SUM
        for a, b in runs:
            total = total + periodic.power_sum_in_range(a, b, n, alpha)
        return total

    def breakpoints(self, lo: int, hi: int) -> list[int]:
        return _union_breakpoints(self.parts, lo, hi)


@dataclass(frozen=True)
class Intersection(_Combination):
    """Intersection of sets."""

    _intersect = True

    def _contains(self, k: int) -> bool:
        return all(p._contains(k) for p in self.parts)

    def _mask(self, lo: int, hi: int) -> NDArray[np.bool_]:
        return np.logical_and.reduce([p._mask(lo, hi) for p in self.parts])

    def _structure(self, n: int) -> tuple[Periodic, Runs] | None:
        forms = [p.periodic_form() for p in self.parts]
        periodic = [f for f in forms if f is not None]
        rest = [p for p, f in zip(self.parts, forms) if f is None]
        merged = _merge_periodic(periodic, intersect=True) if periodic else NATURALS
        if merged is None:
            return None
        runs: Runs = [(1, n + 1)]
        for part in rest:
            part_runs = part.runs(n)
            if part_runs is None:
                return None
            runs = _intersect_runs(runs, part_runs)
        return merged, runs

    def runs(self, n: int) -> Runs | None:
        result: Runs = [(1, n + 1)]
        for part in self.parts:
            part_runs = part.runs(n)
            if part_runs is None:
                return None
            result = _intersect_runs(result, part_runs)
        return result

    def exact_density(self) -> float | None:
        form = self.periodic_form()
        if form is not None:
            return form.exact_density()
        if any(p.exact_density() == 0.0 for p in self.parts):
            return 0.0
        return None

    def to_expr(self) -> str:
        return _nested_expr("inter", self.parts)


@dataclass(frozen=True)
class Union(_Combination):
    """Union of sets that are not certified disjoint."""

    _intersect = False

    def _contains(self, k: int) -> bool:
        return any(p._contains(k) for p in self.parts)

    def _mask(self, lo: int, hi: int) -> NDArray[np.bool_]:
        return np.logical_or.reduce([p._mask(lo, hi) for p in self.parts])

    def _structure(self, n: int) -> tuple[Periodic, Runs] | None:
        form = self.periodic_form()
        if form is not None:
            return form, [(1, n + 1)]
        runs = self.runs(n)
        if runs is None:
            return None
        return NATURALS, runs

    def runs(self, n: int) -> Runs | None:
        runs = [p.runs(n) for p in self.parts]
        if any(r is None for r in runs):
            return None
        return _merge_runs([iv for r in runs for iv in r])  # pyright: ignore

    def exact_density(self) -> float | None:
        form = self.periodic_form()
        if form is not None:
            return form.exact_density()
        if all(p.exact_density() == 0.0 for p in self.parts):
            return 0.0
        return None

    def to_expr(self) -> str:
        return _nested_expr("or", self.parts)
