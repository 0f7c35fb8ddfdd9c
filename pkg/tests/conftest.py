# tests/conftest.py
import pytest
from densitylab.densities import EstimatorConfig
from densitylab.dsl import parse_seq_expr, parse_set_expr
from densitylab.natset import GeomBlocks, Periodic


@pytest.fixture
def make_config():
    def _make(horizon=None, **overrides):
        # Default grid reaches 2**30; a horizon switches to the ratio-2 grid
        if horizon is None:
            return EstimatorConfig(**overrides)
        return EstimatorConfig.from_horizon(horizon, **overrides)

    return _make


@pytest.fixture
def desk_config(make_config):
    return make_config(2**20)


@pytest.fixture
def geom_set():
    # [1,2) [4,8) [16,32) ...: lower density 1/3, upper density 2/3
    return GeomBlocks(1, 2, 2)


@pytest.fixture
def evens():
    return Periodic(2, (0,))


@pytest.fixture
def build_set():
    """Parse a set expression with an optional enumeration cap."""

    def _build(text, cap=None):
        return parse_set_expr(text) if cap is None else parse_set_expr(text, cap=cap)

    return _build


@pytest.fixture
def build_seq():
    def _build(text, cap=None):
        return parse_seq_expr(text) if cap is None else parse_seq_expr(text, cap=cap)

    return _build
