"""Arithmetic expression language for problem coefficients.

Problem files carry the coefficient a(t) and the nonlinearity f(t, u) as
text.  The grammar is conventional infix arithmetic:

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' factor)?
    base   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

'^' is right-associative, and a leading minus applies to the whole power:
-x^2 parses as -(x^2).  The only variables are t and u; pi and e are
built-in constants, and e^t is written exp(t).

Evaluation is array-aware (scalars or numpy arrays for t and u) and total
on valid domains: log of a nonpositive value, square root of a negative,
division by zero and similar never produce a silent NaN but raise
:class:`ExprEvalError` carrying the offending subexpression and sample.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr",
    "ExprError",
    "ExprSyntaxError",
    "ExprEvalError",
    "parse",
    "evaluate",
    "to_text",
    "variables_of",
]

FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "ln": 1,
    "sqrt": 1,
    "abs": 1,
    "pow": 2,
    "min": 2,
    "max": 2,
}

CONSTANTS = {"pi": math.pi, "e": math.e}

DEFAULT_VARIABLES = ("t", "u")


class ExprError(ValueError):
    """Base class for expression language failures."""


class ExprSyntaxError(ExprError):
    """Parse failure; ``offset`` is the byte offset into the source text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ExprEvalError(ExprError):
    """Domain failure during evaluation; carries the offending subexpression."""

    def __init__(self, message: str, subexpr: "Expr", sample: dict | None = None):
        self.subexpr = subexpr
        self.sample = dict(sample) if sample else {}
        where = f" in '{to_text(subexpr)}'"
        at = ""
        if self.sample:
            at = " at " + ", ".join(f"{k}={v!r}" for k, v in sorted(self.sample.items()))
        super().__init__(message + where + at)


class Expr:
    """Base class of parsed expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Const(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Bin(Expr):
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    args: tuple


_TOKEN_RE = re.compile(
    r"""
    (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
  | (?P<ws>\s+)
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "num":
            tokens.append(("num", m.group(), pos))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group(), pos))
        elif m.lastgroup == "op":
            tokens.append((m.group(), m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.pos = 0
        self.variables = tuple(variables)

    @property
    def current(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.current
        if tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}",
                                  tok[2])
        return self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.current[0] in ("+", "-"):
            op = self.advance()[0]
            node = Bin(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.current[0] in ("*", "/"):
            op = self.advance()[0]
            node = Bin(op, node, self.parse_factor())
        return node

    def parse_factor(self) -> Expr:
        if self.current[0] == "-":
            self.advance()
            return Neg(self.parse_factor())
        node = self.parse_base()
        if self.current[0] == "^":
            self.advance()
            node = Bin("^", node, self.parse_factor())
        return node

    def parse_base(self) -> Expr:
        kind, text, offset = self.current
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "ident":
            self.advance()
            if self.current[0] == "(":
                return self.parse_call(text, offset)
            if text in CONSTANTS:
                return Const(text)
            if text in self.variables:
                return Var(text)
            if text in FUNCTIONS:
                raise ExprSyntaxError(f"function {text!r} needs arguments", offset)
            raise ExprSyntaxError(f"unknown identifier {text!r}", offset)
        if kind == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"expected a value, found {text or 'end of input'!r}",
                              offset)

    def parse_call(self, name: str, offset: int) -> Expr:
        if name not in FUNCTIONS:
            raise ExprSyntaxError(f"unknown function {name!r}", offset)
        self.expect("(")
        args = [self.parse_expr()]
        while self.current[0] == ",":
            self.advance()
            args.append(self.parse_expr())
        self.expect(")")
        arity = FUNCTIONS[name]
        if len(args) != arity:
            raise ExprSyntaxError(
                f"{name} takes {arity} argument{'s' if arity > 1 else ''}, got {len(args)}",
                offset,
            )
        return Call(name, tuple(args))


def parse(text: str, variables=DEFAULT_VARIABLES) -> Expr:
    """Parse source text into an Expr, permitting only the given variables."""
    parser = _Parser(_tokenize(text), variables)
    node = parser.parse_expr()
    kind, tok_text, offset = parser.current
    if kind != "eof":
        raise ExprSyntaxError(f"unexpected trailing input {tok_text!r}", offset)
    return node


def variables_of(e: Expr) -> frozenset:
    """Names of the variables referenced anywhere in the expression."""
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Neg):
        return variables_of(e.operand)
    if isinstance(e, Bin):
        return variables_of(e.lhs) | variables_of(e.rhs)
    if isinstance(e, Call):
        out = frozenset()
        for a in e.args:
            out |= variables_of(a)
        return out
    return frozenset()


def _witness(env: dict, mask: np.ndarray) -> dict:
    """Variable values at the first offending broadcast index."""
    flat = np.flatnonzero(np.atleast_1d(mask))
    if flat.size == 0:
        return {}
    idx = np.unravel_index(flat[0], np.shape(mask)) if np.ndim(mask) else ()
    out = {}
    for name, value in env.items():
        if value is None:
            continue
        arr = np.asarray(value, dtype=float)
        if arr.ndim == 0:
            out[name] = float(arr)
        else:
            out[name] = float(np.broadcast_to(arr, np.shape(mask))[idx])
    return out


def _check_domain(ok: np.ndarray, message: str, node: Expr, env: dict):
    if not np.all(ok):
        raise ExprEvalError(message, node, _witness(env, ~np.asarray(ok)))


def _eval(e: Expr, env: dict):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Var):
        if e.name not in env or env[e.name] is None:
            raise ExprEvalError(f"no value supplied for variable {e.name!r}", e)
        return env[e.name]
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, Bin):
        lhs = _eval(e.lhs, env)
        rhs = _eval(e.rhs, env)
        if e.op == "+":
            return lhs + rhs
        if e.op == "-":
            return lhs - rhs
        if e.op == "*":
            return lhs * rhs
        if e.op == "/":
            _check_domain(np.asarray(rhs) != 0.0, "division by zero", e, env)
            return lhs / rhs
        return _power(lhs, rhs, e, env)
    if isinstance(e, Call):
        args = [_eval(a, env) for a in e.args]
        return _apply(e, args, env)
    raise TypeError(f"not an expression node: {e!r}")


def _power(base, expo, node: Expr, env: dict):
    base_arr = np.asarray(base, dtype=float)
    expo_arr = np.asarray(expo, dtype=float)
    if np.any(base_arr < 0.0) and not np.all(expo_arr == np.round(expo_arr)):
        _check_domain(base_arr >= 0.0,
                      "negative base with non-integer exponent", node, env)
    _check_domain((base_arr != 0.0) | (expo_arr >= 0.0),
                  "zero base with negative exponent", node, env)
    return base ** expo


def _apply(node: Call, args, env: dict):
    x = args[0]
    if node.fn == "sin":
        return np.sin(x)
    if node.fn == "cos":
        return np.cos(x)
    if node.fn == "exp":
        return np.exp(x)
    if node.fn == "abs":
        return np.abs(x)
    if node.fn == "ln":
        _check_domain(np.asarray(x) > 0.0, "log of a nonpositive value", node, env)
        return np.log(x)
    if node.fn == "sqrt":
        _check_domain(np.asarray(x) >= 0.0, "square root of a negative value", node, env)
        return np.sqrt(x)
    if node.fn == "pow":
        return _power(args[0], args[1], node, env)
    if node.fn == "min":
        return np.minimum(args[0], args[1])
    return np.maximum(args[0], args[1])


def evaluate(e: Expr, t=None, u=None):
    """Evaluate an expression at t and/or u (scalars or numpy arrays)."""
    env = {"t": t, "u": u}
    # domain checks preempt divide/invalid; overflow to inf is converted to
    # an ExprEvalError below, so keep numpy quiet in between
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        value = _eval(e, env)
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ExprEvalError("evaluation produced a non-finite value", e,
                            _witness(env, ~np.isfinite(arr)))
    scalar_inputs = all(v is None or np.ndim(v) == 0 for v in env.values())
    return float(arr) if (scalar_inputs and arr.ndim == 0) else arr


_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, Bin):
        if e.op in ("+", "-"):
            return _PREC_ADD
        if e.op in ("*", "/"):
            return _PREC_MUL
        return _PREC_POW
    if isinstance(e, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def _wrap(text: str, needs: bool) -> str:
    return f"({text})" if needs else text


def to_text(e: Expr) -> str:
    """Canonical source text; reparsing it yields a structurally equal Expr."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(to_text(e.operand), _prec(e.operand) < _PREC_NEG)
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(to_text(a) for a in e.args)})"
    if isinstance(e, Bin):
        p = _prec(e)
        if e.op == "^":
            # right-associative: the left operand must bind strictly tighter
            lhs = _wrap(to_text(e.lhs), _prec(e.lhs) <= p)
            rhs = _wrap(to_text(e.rhs), _prec(e.rhs) < p)
        else:
            lhs = _wrap(to_text(e.lhs), _prec(e.lhs) < p)
            rhs = _wrap(to_text(e.rhs), _prec(e.rhs) <= p)
        return f"{lhs} {e.op} {rhs}" if e.op in ("+", "-") else f"{lhs}{e.op}{rhs}"
    raise TypeError(f"not an expression node: {e!r}")
