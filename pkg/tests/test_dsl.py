# tests/test_dsl.py
import pytest
from densitylab import tools
from densitylab.dsl import (
    DslError,
    DslSemanticError,
    DslSyntaxError,
    parse_seq_expr,
    parse_set_expr,
)
from densitylab.natset import (
    BlockList,
    Complement,
    DisjointUnion,
    Explicit,
    GeomBlocks,
    Intersection,
    Periodic,
    Union,
)
from densitylab.seqcore import (
    Affine,
    ConstantValue,
    Indicator,
    LevelSet,
    SeededRandom01,
)

""" Tests for the set and sequence expression language. """


### Sets ###
@pytest.mark.parametrize(
    "text, expected",
    [
        ("mod(3;0)", Periodic(3, (0,))),
        ("mod(5;)", Periodic(5, ())),
        ("blocks(geom;1,2,2)", GeomBlocks(1, 2.0, 2.0)),
        ("blocks(list;[1,10),[100,1000))", BlockList(((1, 10), (100, 1000)))),
        (
            "union(mod(4;0),mod(4;1))",
            DisjointUnion((Periodic(4, (0,)), Periodic(4, (1,)))),
        ),
        (
            "or(mod(2;0),mod(3;0))",
            Union((Periodic(2, (0,)), Periodic(3, (0,)))),
        ),
        (
            "inter(mod(3;1),blocks(geom;1,2,2))",
            Intersection((Periodic(3, (1,)), GeomBlocks(1, 2.0, 2.0))),
        ),
        ("compl(explicit(1,5,9))", Complement(Explicit((1, 5, 9)))),
        ("explicit()", Explicit(())),
        ("level(rand01(3);0.1,5)", LevelSet(SeededRandom01(3), 0.1, 5)),
    ],
    ids=[
        "mod",
        "mod-empty",
        "geom",
        "list",
        "union",
        "or",
        "inter",
        "compl",
        "explicit-empty",
        "level",
    ],
)
def test_parse_set(text, expected):
    A = parse_set_expr(text)
    assert A == expected
    assert A.to_expr() == text


def test_nested_union_round_trip():
    text = "union(mod(3;0),union(mod(3;1),explicit(2)))"
    A = parse_set_expr(text)
    assert len(A.parts) == 3  # pyright: ignore[reportAttributeAccessIssue]
    assert A.to_expr() == text
    assert parse_set_expr(A.to_expr()) == A


def test_whitespace_and_comments():
    text = "union( mod(4;0) ,  # multiples of four\n   mod(4;1)\n)"
    assert parse_set_expr(text) == parse_set_expr("union(mod(4;0),mod(4;1))")


def test_negative_level():
    A = parse_set_expr("level(affine(-1,0,rand01(3));0.5,-1)")
    assert A.level == -1  # pyright: ignore[reportAttributeAccessIssue]


def test_cap_reaches_combinations():
    A = parse_set_expr("or(mod(2;0),blocks(geom;1,2,2))", cap=1000)
    assert A.count(1000) > 0
    with pytest.raises(tools.EnumerationCapExceeded):
        A.count(2000)


### Sequences ###
@pytest.mark.parametrize(
    "text",
    [
        "ind(mod(2;0))",
        "const(0.3)",
        "periodic(0.2,0.6)",
        "affine(2,-1,rand01(7))",
        "prefix(1,0,1;0.5)",
        "round(const(0.5))",
        "sum(const(0.25),ind(mod(2;0)))",
    ],
)
def test_sequence_round_trip(text):
    x = parse_seq_expr(text)
    assert x.to_expr() == text
    assert parse_seq_expr(x.to_expr()) == x


def test_parse_sequence_objects():
    assert parse_seq_expr("affine(2,-1,rand01(7))") == Affine(
        2.0, -1.0, SeededRandom01(7)
    )
    assert parse_seq_expr("ind(mod(2;0))") == Indicator(Periodic(2, (0,)))
    assert parse_seq_expr("const(1e-1)") == ConstantValue(0.1)
    assert parse_seq_expr("const(.5)") == ConstantValue(0.5)


def test_seed_cap_reaches_random_sequences():
    x = parse_seq_expr("rand01(5)", cap=100)
    assert x.max_horizon == 100


### Errors ###
def test_syntax_error_position():
    with pytest.raises(DslSyntaxError) as e:
        parse_set_expr("union(mod(2;0),\n  mdo(2;1))")
    assert e.value.line == 2
    assert e.value.column == 3
    assert e.value.token == "mdo"
    assert "line 2" in str(e.value)


def test_trailing_text():
    with pytest.raises(DslSyntaxError) as e:
        parse_set_expr("mod(3;0) extra")
    assert e.value.token == "extra"
    assert e.value.column == 10


def test_empty_input():
    with pytest.raises(DslSyntaxError) as e:
        parse_set_expr("")
    assert e.value.token == "<end of input>"


def test_sequence_is_not_a_set():
    with pytest.raises(DslSyntaxError):
        parse_set_expr("const(0.5)")


@pytest.mark.parametrize(
    "text, token, column, match",
    [
        ("mod(3;5)", "mod", 1, r"Residues must lie in \[0, 3\)"),
        ("compl(mod(3;5))", "mod", 7, r"Residues must lie in"),
        ("union(mod(2;0),mod(4;0))", "union", 1, r"not disjoint"),
        ("blocks(list;[5,3))", "blocks", 1, r"a < b"),
        ("mod(0;)", "mod", 1, r"Modulus must be a positive integer"),
    ],
    ids=["residue", "nested", "overlap", "reversed-block", "zero-modulus"],
)
def test_semantic_errors(text, token, column, match):
    with pytest.raises(DslSemanticError, match=match) as e:
        parse_set_expr(text)
    assert e.value.token == token
    assert e.value.column == column
    assert e.value.line == 1


def test_rounding_out_of_range():
    with pytest.raises(DslSemanticError, match=r"values in \[0, 1\]") as e:
        parse_seq_expr("round(const(2))")
    assert e.value.token == "round"


def test_errors_are_value_errors():
    assert issubclass(DslError, ValueError)
    with pytest.raises(ValueError):
        parse_seq_expr("periodic()")
