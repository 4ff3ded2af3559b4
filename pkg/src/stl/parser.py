"""
STL Parser
==========

Parse formula strings into ``Formula`` trees.

Grammar (EBNF)::

    phi   := pred | "true" | "false" | "(" phi ")"
           | "!" phi | "F[" a "," b "]" phi | "G[" a "," b "]" phi
           | phi "U[" a "," b "]" phi | phi "&" phi | phi "|" phi
    pred  := expr (">" | "<") expr
    expr  := number | "y[" k "]" | "-" expr | expr ("*" | "+" | "-") expr
           | ("min" | "max") "(" expr ("," expr)* ")" | "abs(" expr ")"
           | "(" expr ")"

Precedence, tightest first: unary (!, F, G), U, &, |. Binary operators
associate to the left.
"""

from dataclasses import dataclass

from pyparsing import (
    Forward, Keyword, Literal, OpAssoc, ParseBaseException, ParseFatalException,
    ParserElement, Regex, Suppress, ZeroOrMore, infix_notation, one_of
)

from ..utils.errors import StlSyntaxError
from .formula import (
    Always, And, BinOp, BoolConst, Const, Coord, Eventually, Formula, Func, Neg,
    Not, Or, Predicate, Until
)

ParserElement.enable_packrat()

_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"


@dataclass(frozen=True)
class _TemporalOp:
    kind: str
    a: float
    b: float


def _temporal(kind: str) -> ParserElement:
    pattern = rf"{kind}\s*\[\s*(?P<a>{_NUMBER})\s*,\s*(?P<b>{_NUMBER})\s*\]"

    def action(s, loc, toks):
        a, b = float(toks['a']), float(toks['b'])
        if a > b:
            raise ParseFatalException(s, loc, f"interval lower bound {a} exceeds upper bound {b}")
        return _TemporalOp(kind, a, b)

    return Regex(pattern).set_parse_action(action)


def _fold_binary(toks):
    items = toks[0]
    node = items[0]
    for i in range(1, len(items), 2):
        node = BinOp(items[i], node, items[i + 1])
    return node


def _negate(toks):
    operand = toks[0][1]
    if isinstance(operand, Const):
        return Const(-operand.value)
    return Neg(operand)


def _function(s, loc, toks):
    name, args = toks[0], tuple(toks[1:])
    if name == 'abs' and len(args) != 1:
        raise ParseFatalException(s, loc, "abs takes exactly one argument")
    return Func(name, args)


def _unary(toks):
    op, child = toks[0][0], toks[0][1]
    if op == '!':
        return Not(child)
    if op.kind == 'F':
        return Eventually(op.a, op.b, child)
    return Always(op.a, op.b, child)


def _until(toks):
    items = toks[0]
    node = items[0]
    for i in range(1, len(items), 2):
        op = items[i]
        node = Until(op.a, op.b, node, items[i + 1])
    return node


def _logical(cls):
    def action(toks):
        items = toks[0]
        node = items[0]
        for i in range(2, len(items), 2):
            node = cls(node, items[i])
        return node
    return action


def _build_grammar() -> ParserElement:
    number = Regex(_NUMBER).set_parse_action(lambda t: Const(float(t[0])))
    coord = Regex(r"y\s*\[\s*(?P<k>\d+)\s*\]").set_parse_action(lambda t: Coord(int(t['k'])))

    expr = Forward()
    func_name = Keyword("min") | Keyword("max") | Keyword("abs")
    func = (func_name + Suppress("(") + expr + ZeroOrMore(Suppress(",") + expr) + Suppress(")"))
    func.set_parse_action(_function)

    expr <<= infix_notation(
        func | coord | number,
        [
            (Literal("-"), 1, OpAssoc.RIGHT, _negate),
            (Literal("*"), 2, OpAssoc.LEFT, _fold_binary),
            (one_of("+ -"), 2, OpAssoc.LEFT, _fold_binary),
        ],
    )

    predicate = (expr + one_of("> <") + expr).set_parse_action(lambda t: Predicate(t[0], t[1], t[2]))
    constant = (Keyword("true") | Keyword("false")).set_parse_action(lambda t: BoolConst(t[0] == "true"))

    unary_op = Literal("!") | _temporal("F") | _temporal("G")
    formula = infix_notation(
        predicate | constant,
        [
            (unary_op, 1, OpAssoc.RIGHT, _unary),
            (_temporal("U"), 2, OpAssoc.LEFT, _until),
            (Literal("&"), 2, OpAssoc.LEFT, _logical(And)),
            (Literal("|"), 2, OpAssoc.LEFT, _logical(Or)),
        ],
    )
    return formula


_GRAMMAR = _build_grammar()


def parse(text: str) -> Formula:
    """
    Parse a formula string.

    Args:
        text: Formula in the documented grammar

    Returns:
        Formula tree

    Raises:
        StlSyntaxError: With the failing position
    """
    try:
        result = _GRAMMAR.parse_string(text, parse_all=True)
    except ParseBaseException as e:
        raise StlSyntaxError(e.msg, e.loc) from None
    return result[0]


def load_formula(path: str) -> Formula:
    """Parse a formula stored in a text file (``#`` starts a comment line)."""
    with open(path, 'r') as f:
        lines = [line for line in f.read().splitlines() if not line.lstrip().startswith('#')]
    return parse(" ".join(lines))


__all__ = ['parse', 'load_formula']
