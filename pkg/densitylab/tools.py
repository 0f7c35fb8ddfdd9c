"""
Constants, exceptions and display helpers shared across densitylab.

Constants:

- ENUMERATION_CAP: Default maximum number of integers scanned by an
  enumeration fallback.
- EXACT_TERMS: Largest run of terms summed exactly in a power sum.
- CHUNK_SIZE: Chunk length of memoized prefix sums.
- SAMPLE_PREFIX: Prefix [1, SAMPLE_PREFIX] used for disjointness and
  domain certificates.
- SIDES: Case-insensitive lookup of the upper/lower estimation side.
- MAX_MODULUS: Largest modulus of a merged periodic set.

"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from requests.structures import CaseInsensitiveDict
from tabulate import tabulate


### Constants ###
ENUMERATION_CAP = 10**7  # integers scanned
EXACT_TERMS = 10**5  # terms summed exactly per block
HEAD_TERMS = 64  # exact head before the integral approximation
CHUNK_SIZE = 2**16  # prefix-sum memo chunk
SAMPLE_PREFIX = 10**4  # certificate prefix [1, 10^4]
MAX_MODULUS = 10**6  # largest lcm for merged periodic sets

SIDES = CaseInsensitiveDict(
    {
        "upper": "upper",
        "sup": "upper",
        "limsup": "upper",
        "lower": "lower",
        "inf": "lower",
        "liminf": "lower",
    }
)


### Exceptions and diagnostics ###
class EnumerationCapExceeded(RuntimeError):
    """Raised when a fallback would scan more integers than allowed."""

    def __init__(self, requested: int, cap: int) -> None:
        super().__init__(
            f"Enumeration up to {requested} exceeds the cap of {cap} integers. "
            "Raise the cap (--cap) or use a structured set."
        )
        self.requested = requested
        self.cap = cap


class ApproximationError(ArithmeticError):
    """Raised when an approximated power sum misses the requested accuracy."""

    def __init__(self, error_bound: float, max_error: float) -> None:
        super().__init__(
            f"Power-sum approximation error bound {error_bound:.3e} "
            f"exceeds the requested {max_error:.3e}"
        )
        self.error_bound = error_bound
        self.max_error = max_error


class DomainError(ValueError):
    """Raised when a sequence leaves the domain an operation requires."""


class DisjointnessViolation(ValueError):
    """Raised when sets claimed disjoint share an element."""


class MonotonicityWarning(UserWarning):
    """Finite-horizon alpha estimates break the expected monotone trend."""


class CrossRouteMismatch(UserWarning):
    """The window route and the alpha route disagree beyond tolerance."""


def resolve_side(side: str) -> str:
    """Normalize a side name to "upper" or "lower".

    Args:
        side (str): Side name (upper, lower, sup, inf, limsup, liminf).

    Returns:
        str: "upper" or "lower".
    """
    if side not in SIDES:
        raise ValueError(
            f"Unsupported side. Supported sides: {', '.join(SIDES.keys())}"
        )
    return SIDES[side]


def tail_start(length: int, fraction: float) -> int:
    """Index where the last `fraction` of `length` items begins.

    The tail always keeps at least the last item.
    """
    if length < 1:
        raise ValueError("Cannot take the tail of an empty grid")
    return min(math.floor(length * (1 - fraction)), length - 1)


### Parallel sweeps ###
T = TypeVar("T")
R = TypeVar("R")


def sweep(
    fn: Callable[[T], R],
    items: Iterable[T],
    threads: int = 1,
) -> list[R]:
    """Map fn over items, optionally on a thread pool.

    Results keep the order of items, so aggregation downstream is
    deterministic regardless of the thread count.

    Args:
        fn (Callable): Function applied to each item.
        items (Iterable): Inputs.
        threads (int): Worker threads (1 runs inline).

    Returns:
        list: fn(item) for each item, in input order.
    """
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


### Display Calculations ###
def table(
    title: str,
    var_names: list[str],
    var: list[float],
    var_fmts: list[str],
    units: list[str],
) -> None:
    """Print a formatted table of variables.

    Args:
        title (str): Title of the table.
        var_names (list): List of variable names.
        var (list): Variable values.
        var_fmts (list): List of formats for each variable.
        units (list): Unit or note for each variable.

    Returns:
        None
    """

    data = pd.DataFrame(
        [var_names, [format(v, "8" + fmt) for v, fmt in zip(var, var_fmts)], units]
    ).T
    rendered = tabulate(
        data,  # pyright: ignore[reportArgumentType]
        disable_numparse=True,
        tablefmt="fancy_grid",
        showindex=False,
    )

    # Center the title based on the table width
    width = len(rendered.splitlines()[0])
    print(f"\033[1m{title}\033[0m".center(width))
    print(rendered)


### Memoized prefix sums ###
class ChunkedPrefix:
    """
    Lazily built prefix sums P(n) = v_1 + ... + v_n of a value stream,
    computed in chunks of CHUNK_SIZE and memoized. Chunks are appended
    under a lock, so one instance can serve concurrent evaluators.

    Args:
        chunk_values (Callable): Returns the values v_i for i in
            [lo, hi) as an array.
        cap (int): Largest index that may be materialized.
        dtype: Accumulator dtype (np.float64 or np.int64).
    """

    def __init__(
        self,
        chunk_values: Callable[[int, int], NDArray],
        cap: int = ENUMERATION_CAP,
        dtype: type = np.float64,
    ) -> None:
        self._chunk_values = chunk_values
        self._cap = cap
        self._dtype = dtype
        self._chunks: list[NDArray] = []
        self._lock = threading.Lock()

    @property
    def cap(self) -> int:
        return self._cap

    def _ensure(self, n: int) -> None:
        if n > self._cap:
            raise EnumerationCapExceeded(n, self._cap)
        needed = -(-n // CHUNK_SIZE)
        if len(self._chunks) >= needed:
            return
        with self._lock:
            while len(self._chunks) < needed:
                lo = len(self._chunks) * CHUNK_SIZE + 1
                values = np.asarray(
                    self._chunk_values(lo, lo + CHUNK_SIZE), dtype=self._dtype
                )
                offset = self._chunks[-1][-1] if self._chunks else self._dtype(0)
                self._chunks.append(offset + np.cumsum(values, dtype=self._dtype))

    def prefix(self, n: int):
        """Return P(n); P(0) = 0."""
        if n <= 0:
            return self._dtype(0)
        self._ensure(n)
        j, i = divmod(n - 1, CHUNK_SIZE)
        return self._chunks[j][i]

    def prefix_array(self, lo: int, hi: int) -> NDArray:
        """Return [P(lo), ..., P(hi - 1)] for 0 <= lo <= hi."""
        if hi <= lo:
            return np.zeros(0, dtype=self._dtype)
        self._ensure(hi - 1)
        parts: list[NDArray] = []
        i = lo
        if i == 0:
            parts.append(np.zeros(1, dtype=self._dtype))
            i = 1
        while i < hi:
            j, off = divmod(i - 1, CHUNK_SIZE)
            take = min(CHUNK_SIZE - off, hi - i)
            parts.append(self._chunks[j][off : off + take])
            i += take
        return np.concatenate(parts)


### Formatting ###
def format_number(value: float) -> str:
    """Render a number for expressions: integral values without a dot."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if value.is_integer():
        return str(int(value))
    return repr(value)
