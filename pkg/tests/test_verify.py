# tests/test_verify.py
import numpy as np
import pytest
from densitylab import verify
from densitylab.dsl import parse_set_expr
from densitylab.verify import (
    PROPERTIES,
    SuiteContext,
    random_structured_set,
    run_suite,
    window_identities,
)

""" Tests for the property suites. """


@pytest.fixture
def core_context():
    return SuiteContext(np.random.default_rng(42), full=False)


def test_unsupported_suite():
    with pytest.raises(ValueError, match=r"Unsupported suite"):
        run_suite("nightly")


def test_context_scale(core_context):
    assert core_context.size(100, 20) == 20
    assert core_context.seq_cfg.horizon_grid[-1] == 2**20
    full = SuiteContext(np.random.default_rng(0), full=True, threads=2)
    assert full.size(100, 20) == 100
    assert full.cfg.threads == 2


@pytest.mark.parametrize("prop", PROPERTIES, ids=lambda p: p.__name__)
def test_core_properties_pass(core_context, prop):
    result = prop(core_context)
    assert result.passed, result.detail
    assert result.name == prop.__name__


def test_test_family_parses():
    for expr in verify.TEST_FAMILY:
        assert parse_set_expr(expr).to_expr() == expr


def test_random_sets_are_reproducible():
    a = random_structured_set(np.random.default_rng(3))
    b = random_structured_set(np.random.default_rng(3))
    assert a == b


def test_raising_property_becomes_failure(monkeypatch):
    def broken(ctx):
        raise ArithmeticError("no convergence")

    monkeypatch.setattr(verify, "PROPERTIES", (broken,))
    (result,) = run_suite("core", seed=1)
    assert not result.passed
    assert result.name == "broken"
    assert "raised" in result.detail


def test_suite_names_are_case_insensitive(monkeypatch):
    monkeypatch.setattr(
        verify, "PROPERTIES", (lambda ctx: verify.PropertyResult("ok", True),)
    )
    assert [r.name for r in run_suite("CORE")] == ["ok"]


def test_property_names_are_distinct():
    assert len(PROPERTIES) == 13
    names = [p.__name__ for p in PROPERTIES]
    assert len(set(names)) == len(names)


def test_core_suite_passes_at_default_seed():
    results = run_suite("core", seed=42)
    failed = [f"{r.name}: {r.detail}" for r in results if not r.passed]
    assert not failed


def test_window_identities_cover_every_draw(core_context):
    result = window_identities(core_context)
    assert result.passed, result.detail
    assert result.detail == "50 checked"
