# tests/test_tools.py
import threading

import numpy as np
import pytest
from densitylab import tools

""" Tests for shared helpers: sides, sweeps, tables and chunked prefixes. """


@pytest.mark.parametrize(
    "side, expected",
    [
        ("upper", "upper"),
        ("LimSup", "upper"),
        ("sup", "upper"),
        ("Lower", "lower"),
        ("liminf", "lower"),
        ("INF", "lower"),
    ],
)
def test_resolve_side_is_case_insensitive(side, expected):
    assert tools.resolve_side(side) == expected


def test_unsupported_side():
    with pytest.raises(ValueError, match=r"Unsupported side"):
        tools.resolve_side("middle")


@pytest.mark.parametrize(
    "length, fraction, start",
    [(30, 1 / 3, 20), (20, 1 / 3, 13), (5, 1.0, 0), (5, 0.01, 4), (1, 0.5, 0)],
    ids=["default-grid", "desk-grid", "whole", "keeps-last", "single"],
)
def test_tail_start(length, fraction, start):
    assert tools.tail_start(length, fraction) == start


def test_tail_of_empty_grid():
    with pytest.raises(ValueError, match=r"Cannot take the tail of an empty grid"):
        tools.tail_start(0, 0.5)


@pytest.mark.parametrize("threads", [1, 4], ids=["inline", "pool"])
def test_sweep_keeps_input_order(threads):
    items = list(range(50))
    assert tools.sweep(lambda v: v * v, items, threads) == [v * v for v in items]


def test_sweep_uses_worker_threads():
    names = tools.sweep(
        lambda _: threading.current_thread().name, range(8), threads=4
    )
    assert any(name != threading.main_thread().name for name in names)


def test_table_prints_title_and_rows(capsys):
    tools.table("Report", ["a", "b"], [0.5, 0.25], [".3f", ".3f"], ["x", "y"])
    out = capsys.readouterr().out
    assert "Report" in out
    assert "0.500" in out and "0.250" in out
    assert "╒" in out  # fancy_grid


@pytest.mark.parametrize(
    "value, text",
    [(3, "3"), (2.0, "2"), (0.5, "0.5"), (np.int64(7), "7"), (-1.25, "-1.25")],
    ids=["int", "integral-float", "float", "numpy-int", "negative"],
)
def test_format_number(value, text):
    assert tools.format_number(value) == text


class TestChunkedPrefix:
    def test_matches_cumsum_across_chunks(self):
        values = lambda lo, hi: np.arange(lo, hi, dtype=np.float64)
        memo = tools.ChunkedPrefix(values, cap=10**6)
        n = 3 * tools.CHUNK_SIZE + 17
        expected = np.cumsum(np.arange(1, n + 1, dtype=np.float64))
        assert memo.prefix(n) == expected[-1]
        assert memo.prefix(0) == 0
        np.testing.assert_array_equal(memo.prefix_array(1, n + 1), expected)

    def test_prefix_array_from_zero(self):
        memo = tools.ChunkedPrefix(lambda lo, hi: np.ones(hi - lo), cap=100)
        np.testing.assert_array_equal(memo.prefix_array(0, 4), [0.0, 1.0, 2.0, 3.0])

    def test_cap_exceeded(self):
        memo = tools.ChunkedPrefix(lambda lo, hi: np.ones(hi - lo), cap=100)
        with pytest.raises(tools.EnumerationCapExceeded, match=r"exceeds the cap") as e:
            memo.prefix(101)
        assert e.value.requested == 101
        assert e.value.cap == 100

    def test_integer_accumulator(self):
        memo = tools.ChunkedPrefix(
            lambda lo, hi: np.ones(hi - lo, dtype=bool), cap=10**5, dtype=np.int64
        )
        assert memo.prefix(12345) == 12345
