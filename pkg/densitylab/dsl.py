"""
Expression language for sets and sequences.

    setexpr  := "mod(" INT ";" [INT {"," INT}] ")"
              | "blocks(geom;" NUM "," NUM "," NUM ")"
              | "blocks(list;" [interval {"," interval}] ")"
              | "union(" setexpr "," setexpr ")"       disjoint, certified
              | "or(" setexpr "," setexpr ")"          not certified
              | "inter(" setexpr "," setexpr ")"
              | "compl(" setexpr ")"
              | "explicit(" [INT {"," INT}] ")"
              | "level(" seqexpr ";" NUM "," INT ")"
    interval := "[" INT "," INT ")"
    seqexpr  := "ind(" setexpr ")" | "const(" NUM ")"
              | "periodic(" NUM {"," NUM} ")"
              | "affine(" NUM "," NUM "," seqexpr ")"
              | "rand01(" INT ")"
              | "prefix(" [NUM {"," NUM}] ";" NUM ")"
              | "round(" seqexpr ")"
              | "sum(" seqexpr "," seqexpr ")"

Whitespace and newlines between tokens are ignored; "#" starts a
comment that runs to the end of the line. Every set and sequence
prints back in this language, and printing then parsing gives a
structurally equal object.

Parsing happens in two passes. The grammar turns text into Node trees
that remember where each construct starts; building then turns nodes
into objects, so constructor errors (a residue outside [0, m), blocks
out of order, overlapping union parts) are reported at the construct
that caused them.
"""

from __future__ import annotations

import re
from typing import Any, Callable

from pyparsing import (
    Forward,
    Group,
    Keyword,
    MatchFirst,
    Optional,
    ParseException,
    ParseResults,
    ParserElement,
    Regex,
    Suppress,
    ZeroOrMore,
    col,
    lineno,
    python_style_comment,
)

from . import tools
from .natset import (
    BlockList,
    Complement,
    DisjointUnion,
    Explicit,
    GeomBlocks,
    Intersection,
    NatSet,
    Periodic,
    Union,
)
from .seqcore import (
    Affine,
    BoundedSeq,
    ConstantValue,
    ExplicitPrefixWithConstantTail,
    Indicator,
    LevelSet,
    PeriodicValues,
    Rounded,
    SeededRandom01,
    Sum,
)


### Errors ###
class DslError(ValueError):
    """Base of expression errors; carries the position of the problem."""

    def __init__(self, message: str, line: int, column: int, token: str) -> None:
        super().__init__(f"{message} (line {line}, column {column}, at {token!r})")
        self.line = line
        self.column = column
        self.token = token


class DslSyntaxError(DslError):
    """The text does not follow the grammar."""


class DslSemanticError(DslError):
    """The text parses but describes an invalid set or sequence."""


### Parse tree ###
class Node:
    def __init__(self, kind: str, s: str, loc: int, toks: ParseResults) -> None:
        self.kind = kind
        self.text = s
        self.loc = loc
        self.args = [t.as_list() if isinstance(t, ParseResults) else t for t in toks]

    def __repr__(self) -> str:
        return "Node({}, {})".format(self.kind, ", ".join(repr(a) for a in self.args))


def _node(kind: str) -> Callable[[str, int, ParseResults], Node]:
    def action(s: str, loc: int, toks: ParseResults) -> Node:
        return Node(kind, s, loc, toks)

    return action


def _make_grammar() -> tuple[ParserElement, ParserElement]:
    lparen, rparen = Suppress("("), Suppress(")")
    comma, semi = Suppress(","), Suppress(";")

    int_number = Regex(r"\d+").set_parse_action(lambda t: int(t[0]))
    signed_int = Regex(r"[+-]?\d+").set_parse_action(lambda t: int(t[0]))
    number = Regex(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?").set_parse_action(
        lambda t: float(t[0])
    )

    def listed(item: ParserElement) -> ParserElement:
        return Group(Optional(item + ZeroOrMore(comma + item)))

    def head(name: str) -> ParserElement:
        return Suppress(Keyword(name)) + lparen

    set_expr = Forward()
    seq_expr = Forward()

    interval = Group(Suppress("[") + int_number + comma + int_number + rparen)

    mod = head("mod") + int_number + semi + listed(int_number) + rparen
    geom = (
        head("blocks") + Suppress(Keyword("geom")) + semi
        + number + comma + number + comma + number + rparen
    )
    block_list = (
        head("blocks") + Suppress(Keyword("list")) + semi + listed(interval) + rparen
    )
    union = head("union") + set_expr + comma + set_expr + rparen
    union_any = head("or") + set_expr + comma + set_expr + rparen
    inter = head("inter") + set_expr + comma + set_expr + rparen
    compl = head("compl") + set_expr + rparen
    explicit = head("explicit") + listed(int_number) + rparen
    level = head("level") + seq_expr + semi + number + comma + signed_int + rparen

    ind = head("ind") + set_expr + rparen
    const = head("const") + number + rparen
    periodic = head("periodic") + number + ZeroOrMore(comma + number) + rparen
    affine = head("affine") + number + comma + number + comma + seq_expr + rparen
    rand01 = head("rand01") + int_number + rparen
    prefix = head("prefix") + listed(number) + semi + number + rparen
    rounded = head("round") + seq_expr + rparen
    total = head("sum") + seq_expr + comma + seq_expr + rparen

    set_rules = {
        "mod": mod,
        "geom": geom,
        "list": block_list,
        "union": union,
        "or": union_any,
        "inter": inter,
        "compl": compl,
        "explicit": explicit,
        "level": level,
    }
    seq_rules = {
        "ind": ind,
        "const": const,
        "periodic": periodic,
        "affine": affine,
        "rand01": rand01,
        "prefix": prefix,
        "round": rounded,
        "sum": total,
    }
    for kind, rule in {**set_rules, **seq_rules}.items():
        rule.set_parse_action(_node(kind))

    set_expr <<= MatchFirst(list(set_rules.values()))
    seq_expr <<= MatchFirst(list(seq_rules.values()))

    for expr in (set_expr, seq_expr):
        expr.ignore(python_style_comment)
    return set_expr, seq_expr


SET_GRAMMAR, SEQ_GRAMMAR = _make_grammar()

TOKEN_NAMES = {
    "geom": "blocks",
    "list": "blocks",
}


### Building ###
class _Builder:
    def __init__(self, cap: int) -> None:
        self.cap = cap

    def build(self, node: Node) -> Any:
        args = [self.build(a) if isinstance(a, Node) else a for a in node.args]
        try:
            return getattr(self, f"_{node.kind}")(*args)
        except DslError:
            raise
        except ValueError as e:
            raise DslSemanticError(
                str(e),
                lineno(node.loc, node.text),
                col(node.loc, node.text),
                TOKEN_NAMES.get(node.kind, node.kind),
            ) from e

    # Sets
    def _mod(self, modulus: int, residues: list[int]) -> NatSet:
        return Periodic(modulus, tuple(residues))

    def _geom(self, start: float, on: float, off: float) -> NatSet:
        return GeomBlocks(start, on, off)  # pyright: ignore[reportArgumentType]

    def _list(self, intervals: list[list[int]]) -> NatSet:
        return BlockList(tuple((a, b) for a, b in intervals))

    def _union(self, a: NatSet, b: NatSet) -> NatSet:
        return DisjointUnion((a, b))

    def _or(self, a: NatSet, b: NatSet) -> NatSet:
        return Union((a, b), cap=self.cap)

    def _inter(self, a: NatSet, b: NatSet) -> NatSet:
        return Intersection((a, b), cap=self.cap)

    def _compl(self, a: NatSet) -> NatSet:
        return Complement(a)

    def _explicit(self, elements: list[int]) -> NatSet:
        return Explicit(tuple(elements))

    def _level(self, seq: BoundedSeq, eps: float, j: int) -> NatSet:
        return LevelSet(seq, eps, j, cap=self.cap)

    # Sequences
    def _ind(self, a: NatSet) -> BoundedSeq:
        return Indicator(a)

    def _const(self, c: float) -> BoundedSeq:
        return ConstantValue(c)

    def _periodic(self, *pattern: float) -> BoundedSeq:
        return PeriodicValues(tuple(pattern))

    def _affine(self, scale: float, shift: float, inner: BoundedSeq) -> BoundedSeq:
        return Affine(scale, shift, inner)

    def _rand01(self, seed: int) -> BoundedSeq:
        return SeededRandom01(seed, cap=self.cap)

    def _prefix(self, values: list[float], tail: float) -> BoundedSeq:
        return ExplicitPrefixWithConstantTail(tuple(values), tail)

    def _round(self, inner: BoundedSeq) -> BoundedSeq:
        return Rounded(inner)

    def _sum(self, a: BoundedSeq, b: BoundedSeq) -> BoundedSeq:
        return Sum(a, b)


def _offending_token(text: str, loc: int) -> str:
    match = re.match(r"[A-Za-z_]\w*|[+-]?\d[\d.eE+-]*|\S", text[loc:])
    return match.group(0) if match else "<end of input>"


def _parse(grammar: ParserElement, text: str, cap: int) -> Any:
    try:
        (node,) = grammar.parse_string(text, parse_all=True)
    except ParseException as e:
        token = _offending_token(text, e.loc)
        raise DslSyntaxError(
            f"Invalid expression: {e.msg}", e.lineno, e.col, token
        ) from None
    return _Builder(cap).build(node)


def parse_set_expr(text: str, cap: int = tools.ENUMERATION_CAP) -> NatSet:
    """Parse a set expression.

    Args:
        text (str): Expression, e.g. "compl(union(mod(4;0),mod(4;1)))".
        cap (int): Enumeration cap for intersections and unions.

    Returns:
        NatSet: The parsed set.
    """
    return _parse(SET_GRAMMAR, text, cap)


def parse_seq_expr(text: str, cap: int = tools.ENUMERATION_CAP) -> BoundedSeq:
    """Parse a sequence expression.

    Args:
        text (str): Expression, e.g. "affine(2,-1,rand01(7))".
        cap (int): Enumeration cap for random sequences and level sets.

    Returns:
        BoundedSeq: The parsed sequence.
    """
    return _parse(SEQ_GRAMMAR, text, cap)
