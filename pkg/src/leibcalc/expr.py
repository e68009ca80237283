"""Symbolic scalar expressions: parsing, exact differentiation, evaluation.

The expression language is deliberately small: named variables, arithmetic,
integer powers, and a fixed set of smooth functions including a built-in
C-infinity cutoff ``bump`` (identically 1 below 1, identically 0 above 2,
glued with exp(-1/t) transitions).  Trees are immutable, hashable and closed
under differentiation, so derived quantities can be differentiated again
without losing exactness.

Simplification is conservative on purpose: constant folding and 0/1
identities only.  Equality of mathematical content is checked by evaluation,
not by canonical form.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

__all__ = [
    "Expr",
    "Constant",
    "Variable",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Neg",
    "IntPow",
    "Call",
    "ExprError",
    "ParseError",
    "EvalError",
    "DomainError",
    "FUNCTION_NAMES",
    "MAX_EXPONENT",
    "parse_expr",
    "diff",
    "evaluate",
    "substitute",
    "free_variables",
    "compile_to_numpy",
    "as_expr",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "intpow",
    "call",
    "ZERO",
    "ONE",
]


class ExprError(Exception):
    """Base class for expression-level failures."""


class ParseError(ExprError):
    """Raised on malformed input; carries the byte offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class EvalError(ExprError):
    """Raised when an expression cannot be evaluated (unbound variable)."""


class DomainError(EvalError):
    """Raised on log/sqrt/division domain violations, with the subexpression."""

    def __init__(self, message: str, expression: "Expr"):
        super().__init__(f"{message} while evaluating '{expression}'")
        self.expression = expression


FUNCTION_NAMES = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "bump")
MAX_EXPONENT = 64

_BUMP_DERIV_RE = re.compile(r"bump_d([1-9][0-9]*)\Z")

# precedence levels matching the grammar: expr < term < factor < power < atom
_P_EXPR, _P_TERM, _P_FACTOR, _P_POWER, _P_ATOM = range(5)


def is_function_name(name: str) -> bool:
    return name in FUNCTION_NAMES or _BUMP_DERIV_RE.match(name) is not None


@dataclass(frozen=True, slots=True, repr=False)
class Expr:
    """Immutable expression tree node."""

    def diff(self, var: str) -> "Expr":
        raise NotImplementedError

    def evaluate(self, env: Mapping[str, float]) -> float:
        raise NotImplementedError

    def substitute(self, mapping: Mapping[str, "Expr"]) -> "Expr":
        raise NotImplementedError

    def children(self) -> tuple["Expr", ...]:
        return ()

    def free_variables(self) -> frozenset[str]:
        out: set[str] = set()
        stack: list[Expr] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Variable):
                out.add(node.name)
            else:
                stack.extend(node.children())
        return frozenset(out)

    # -- rendering ---------------------------------------------------------

    def _precedence(self) -> int:
        raise NotImplementedError

    def _render(self) -> str:
        raise NotImplementedError

    def _rendered(self, min_prec: int) -> str:
        text = self._render()
        if self._precedence() < min_prec:
            return f"({text})"
        return text

    def __str__(self) -> str:
        return self._render()

    def __repr__(self) -> str:
        return self._render()

    # -- operator sugar (smart constructors, conservative folding) ---------

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return intpow(self, exponent)


@dataclass(frozen=True, slots=True, repr=False)
class Constant(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))

    def diff(self, var):
        return ZERO

    def evaluate(self, env):
        return self.value

    def substitute(self, mapping):
        return self

    def _precedence(self):
        return _P_ATOM if self.value >= 0 else _P_FACTOR

    def _render(self):
        v = self.value
        if v == int(v) and abs(v) < 1e16:
            return str(int(v))
        return repr(v)


@dataclass(frozen=True, slots=True, repr=False)
class Variable(Expr):
    name: str

    def diff(self, var):
        return ONE if self.name == var else ZERO

    def evaluate(self, env):
        try:
            return float(env[self.name])
        except KeyError:
            raise EvalError(f"unbound variable '{self.name}'") from None

    def substitute(self, mapping):
        return mapping.get(self.name, self)

    def _precedence(self):
        return _P_ATOM

    def _render(self):
        return self.name


@dataclass(frozen=True, slots=True, repr=False)
class Add(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def diff(self, var):
        return add(self.left.diff(var), self.right.diff(var))

    def evaluate(self, env):
        return self.left.evaluate(env) + self.right.evaluate(env)

    def substitute(self, mapping):
        return add(self.left.substitute(mapping), self.right.substitute(mapping))

    def _precedence(self):
        return _P_EXPR

    def _render(self):
        return f"{self.left._rendered(_P_EXPR)} + {self.right._rendered(_P_TERM)}"


@dataclass(frozen=True, slots=True, repr=False)
class Sub(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def diff(self, var):
        return sub(self.left.diff(var), self.right.diff(var))

    def evaluate(self, env):
        return self.left.evaluate(env) - self.right.evaluate(env)

    def substitute(self, mapping):
        return sub(self.left.substitute(mapping), self.right.substitute(mapping))

    def _precedence(self):
        return _P_EXPR

    def _render(self):
        return f"{self.left._rendered(_P_EXPR)} - {self.right._rendered(_P_TERM)}"


@dataclass(frozen=True, slots=True, repr=False)
class Mul(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def diff(self, var):
        return add(
            mul(self.left.diff(var), self.right),
            mul(self.left, self.right.diff(var)),
        )

    def evaluate(self, env):
        return self.left.evaluate(env) * self.right.evaluate(env)

    def substitute(self, mapping):
        return mul(self.left.substitute(mapping), self.right.substitute(mapping))

    def _precedence(self):
        return _P_TERM

    def _render(self):
        return f"{self.left._rendered(_P_TERM)} * {self.right._rendered(_P_FACTOR)}"


@dataclass(frozen=True, slots=True, repr=False)
class Div(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)

    def diff(self, var):
        # (u/v)' = (u'v - uv') / v^2
        return div(
            sub(
                mul(self.left.diff(var), self.right),
                mul(self.left, self.right.diff(var)),
            ),
            intpow(self.right, 2),
        )

    def evaluate(self, env):
        denominator = self.right.evaluate(env)
        if denominator == 0.0:
            raise DomainError("division by zero", self)
        return self.left.evaluate(env) / denominator

    def substitute(self, mapping):
        return div(self.left.substitute(mapping), self.right.substitute(mapping))

    def _precedence(self):
        return _P_TERM

    def _render(self):
        return f"{self.left._rendered(_P_TERM)} / {self.right._rendered(_P_FACTOR)}"


@dataclass(frozen=True, slots=True, repr=False)
class Neg(Expr):
    operand: Expr

    def children(self):
        return (self.operand,)

    def diff(self, var):
        return neg(self.operand.diff(var))

    def evaluate(self, env):
        return -self.operand.evaluate(env)

    def substitute(self, mapping):
        return neg(self.operand.substitute(mapping))

    def _precedence(self):
        return _P_FACTOR

    def _render(self):
        return f"-{self.operand._rendered(_P_POWER)}"


@dataclass(frozen=True, slots=True, repr=False)
class IntPow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool):
            raise TypeError("IntPow exponent must be a Python int")
        if abs(self.exponent) > MAX_EXPONENT:
            raise ValueError(f"integer exponent out of range (|k| <= {MAX_EXPONENT})")

    def children(self):
        return (self.base,)

    def diff(self, var):
        k = self.exponent
        return mul(
            mul(Constant(k), intpow(self.base, k - 1)),
            self.base.diff(var),
        )

    def evaluate(self, env):
        base = self.base.evaluate(env)
        try:
            return float(base**self.exponent)
        except ZeroDivisionError:
            raise DomainError("zero raised to a negative power", self) from None
        except OverflowError:
            raise DomainError("overflow in power", self) from None

    def substitute(self, mapping):
        return intpow(self.base.substitute(mapping), self.exponent)

    def _precedence(self):
        return _P_POWER

    def _render(self):
        return f"{self.base._rendered(_P_ATOM)}^{self.exponent}"


@dataclass(frozen=True, slots=True, repr=False)
class Call(Expr):
    fn: str
    argument: Expr

    def __post_init__(self):
        if not is_function_name(self.fn):
            raise ValueError(f"unknown function '{self.fn}'")

    def children(self):
        return (self.argument,)

    def diff(self, var):
        inner = self.argument.diff(var)
        return mul(_outer_derivative(self.fn, self.argument), inner)

    def evaluate(self, env):
        value = self.argument.evaluate(env)
        return _call_value(self, value)

    def substitute(self, mapping):
        return call(self.fn, self.argument.substitute(mapping))

    def _precedence(self):
        return _P_ATOM

    def _render(self):
        return f"{self.fn}({self.argument._render()})"


ZERO = Constant(0.0)
ONE = Constant(1.0)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Constant(value)
    raise TypeError(f"cannot interpret {value!r} as an expression")


def _const_value(e: Expr) -> float | None:
    return e.value if isinstance(e, Constant) else None


def add(a: Expr, b: Expr) -> Expr:
    av, bv = _const_value(a), _const_value(b)
    if av is not None and bv is not None:
        return Constant(av + bv)
    if av == 0.0:
        return b
    if bv == 0.0:
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    av, bv = _const_value(a), _const_value(b)
    if av is not None and bv is not None:
        return Constant(av - bv)
    if bv == 0.0:
        return a
    if av == 0.0:
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    av, bv = _const_value(a), _const_value(b)
    if av is not None and bv is not None:
        return Constant(av * bv)
    if av == 0.0 or bv == 0.0:
        return ZERO
    if av == 1.0:
        return b
    if bv == 1.0:
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    av, bv = _const_value(a), _const_value(b)
    if bv == 1.0:
        return a
    if av == 0.0:
        return ZERO
    if av is not None and bv is not None and bv != 0.0:
        return Constant(av / bv)
    return Div(a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Constant):
        return Constant(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def intpow(base: Expr, exponent: int) -> Expr:
    exponent = int(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    v = _const_value(base)
    if v is not None and not (v == 0.0 and exponent < 0):
        folded = v**exponent
        if math.isfinite(folded):
            return Constant(folded)
    return IntPow(base, exponent)


def call(fn: str, argument: Expr) -> Expr:
    v = _const_value(argument)
    if v is not None:
        try:
            return Constant(_call_value(Call(fn, argument), v))
        except EvalError:
            pass  # keep the node so evaluation reports the domain problem
    return Call(fn, argument)


# -- built-in functions ------------------------------------------------------

_BUMP_GUARD = 1e-9  # transition values within this margin of 1 or 2 are 0/flat


def _call_value(node: Call, v: float) -> float:
    fn = node.fn
    try:
        if fn == "sin":
            return math.sin(v)
        if fn == "cos":
            return math.cos(v)
        if fn == "tan":
            return math.tan(v)
        if fn == "exp":
            return math.exp(v)
        if fn == "log":
            if v <= 0.0:
                raise DomainError("log of a non-positive value", node)
            return math.log(v)
        if fn == "sqrt":
            if v < 0.0:
                raise DomainError("sqrt of a negative value", node)
            return math.sqrt(v)
        if fn == "sinh":
            return math.sinh(v)
        if fn == "cosh":
            return math.cosh(v)
        if fn == "bump":
            return _bump_scalar(0, v)
        m = _BUMP_DERIV_RE.match(fn)
        if m:
            return _bump_scalar(int(m.group(1)), v)
    except OverflowError:
        raise DomainError("overflow", node) from None
    raise EvalError(f"unknown function '{fn}'")


def _outer_derivative(fn: str, u: Expr) -> Expr:
    if fn == "sin":
        return call("cos", u)
    if fn == "cos":
        return neg(call("sin", u))
    if fn == "tan":
        return add(ONE, intpow(call("tan", u), 2))
    if fn == "exp":
        return call("exp", u)
    if fn == "log":
        return div(ONE, u)
    if fn == "sqrt":
        return div(ONE, mul(Constant(2.0), call("sqrt", u)))
    if fn == "sinh":
        return call("cosh", u)
    if fn == "cosh":
        return call("sinh", u)
    if fn == "bump":
        return call("bump_d1", u)
    m = _BUMP_DERIV_RE.match(fn)
    if m:
        return call(f"bump_d{int(m.group(1)) + 1}", u)
    raise EvalError(f"unknown function '{fn}'")


# The cutoff transition on (1, 2) is exp(-1/(2-u)) / (exp(-1/(2-u)) + exp(-1/(u-1))).
# Its derivatives are ordinary expression trees, derived lazily and cached, so the
# whole bump family stays closed under diff while the plateaus stay exact.

_BUMP_VAR = "_u"
_bump_profiles: list[Expr] = []
_bump_profile_fns: dict[int, Callable] = {}
_bump_cache_lock = threading.Lock()


def _bump_profile(order: int) -> Expr:
    with _bump_cache_lock:
        if not _bump_profiles:
            u = Variable(_BUMP_VAR)
            near = call("exp", neg(div(ONE, sub(Constant(2.0), u))))
            far = call("exp", neg(div(ONE, sub(u, ONE))))
            _bump_profiles.append(div(near, add(near, far)))
        while len(_bump_profiles) <= order:
            _bump_profiles.append(_bump_profiles[-1].diff(_BUMP_VAR))
        return _bump_profiles[order]


def _bump_profile_fn(order: int) -> Callable:
    fn = _bump_profile_fns.get(order)
    if fn is None:
        fn = compile_to_numpy(_bump_profile(order), (_BUMP_VAR,))
        _bump_profile_fns[order] = fn
    return fn


def _bump_scalar(order: int, v: float) -> float:
    if v <= 1.0 + _BUMP_GUARD:
        return 1.0 if order == 0 else 0.0
    if v >= 2.0 - _BUMP_GUARD:
        return 0.0
    return _bump_profile(order).evaluate({_BUMP_VAR: v})


def _bump_array(order: int, values):
    values = np.asarray(values, dtype=float)
    scalar_input = values.ndim == 0
    values = np.atleast_1d(values)
    out = np.zeros_like(values)
    if order == 0:
        out[values <= 1.0 + _BUMP_GUARD] = 1.0
    inside = (values > 1.0 + _BUMP_GUARD) & (values < 2.0 - _BUMP_GUARD)
    if inside.any():
        out[inside] = _bump_profile_fn(order)(values[inside])
    return out[0] if scalar_input else out


# -- module-level operations -------------------------------------------------


def diff(expression: Expr, var: str) -> Expr:
    """Exact partial derivative with respect to the named variable."""
    return expression.diff(var)


def evaluate(expression: Expr, env: Mapping[str, float]) -> float:
    """Evaluate with the given variable bindings.

    Raises ``EvalError`` for unbound variables and ``DomainError`` (with the
    offending subexpression) for log/sqrt/division violations.
    """
    return expression.evaluate(env)


def substitute(expression: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions, rebuilding with light folding."""
    return expression.substitute(mapping)


def free_variables(expression: Expr) -> frozenset[str]:
    return expression.free_variables()


# -- vectorized compilation ---------------------------------------------------

_NUMPY_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
}


def compile_to_numpy(expression: Expr, variables: Iterable[str]) -> Callable:
    """Compile to a vectorized callable over numpy arrays.

    The compiled function performs no domain checking; it is meant for
    quadrature and sampling sweeps over points known to be safe.  Argument
    order follows ``variables``.
    """
    order = tuple(variables)
    index = {name: i for i, name in enumerate(order)}
    missing = expression.free_variables() - set(order)
    if missing:
        raise EvalError(f"unbound variables in compiled expression: {sorted(missing)}")

    def build(node: Expr):
        if isinstance(node, Constant):
            v = node.value
            return lambda args: v
        if isinstance(node, Variable):
            i = index[node.name]
            return lambda args: args[i]
        if isinstance(node, Add):
            lf, rf = build(node.left), build(node.right)
            return lambda args: lf(args) + rf(args)
        if isinstance(node, Sub):
            lf, rf = build(node.left), build(node.right)
            return lambda args: lf(args) - rf(args)
        if isinstance(node, Mul):
            lf, rf = build(node.left), build(node.right)
            return lambda args: lf(args) * rf(args)
        if isinstance(node, Div):
            lf, rf = build(node.left), build(node.right)
            return lambda args: lf(args) / rf(args)
        if isinstance(node, Neg):
            f = build(node.operand)
            return lambda args: -f(args)
        if isinstance(node, IntPow):
            f, k = build(node.base), node.exponent
            return lambda args: f(args) ** k
        if isinstance(node, Call):
            f = build(node.argument)
            simple = _NUMPY_FUNCTIONS.get(node.fn)
            if simple is not None:
                return lambda args: simple(f(args))
            if node.fn == "bump":
                return lambda args: _bump_array(0, f(args))
            m = _BUMP_DERIV_RE.match(node.fn)
            if m:
                k = int(m.group(1))
                return lambda args: _bump_array(k, f(args))
        raise EvalError(f"cannot compile node '{node}'")

    body = build(expression)

    def compiled(*arrays):
        out = body(arrays)
        if arrays and np.ndim(out) == 0:
            out = np.full(np.shape(arrays[0]), float(out))
        return out

    return compiled


# -- parser -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, text: str, allowed_vars):
        self.text = text
        self.allowed = frozenset(allowed_vars)
        self.pos = 0
        self.token = None
        self.token_pos = 0
        self._advance()

    def _advance(self):
        m = _TOKEN_RE.match(self.text, self.pos)
        if m is None:
            rest = self.text[self.pos :]
            if not rest.strip():
                self.token = ("eof", "", len(self.text))
                self.pos = len(self.text)
                return
            offset = self.pos + (len(rest) - len(rest.lstrip()))
            raise ParseError(f"unexpected character {self.text[offset]!r}", offset)
        self.token_pos = m.start(m.lastgroup)
        self.token = (m.lastgroup, m.group(m.lastgroup), self.token_pos)
        self.pos = m.end()

    def _expect_op(self, symbol: str):
        kind, value, pos = self.token
        if kind != "op" or value != symbol:
            raise ParseError(f"expected '{symbol}'", pos)
        self._advance()

    def _at_op(self, *symbols) -> bool:
        kind, value, _ = self.token
        return kind == "op" and value in symbols

    def parse(self) -> Expr:
        stripped = self.text.strip()
        if not stripped:
            raise ParseError("empty expression", 0)
        result = self.expr()
        kind, value, pos = self.token
        if kind != "eof":
            raise ParseError(f"unexpected trailing input {value!r}", pos)
        return result

    def expr(self) -> Expr:
        node = self.term()
        while self._at_op("+", "-"):
            op = self.token[1]
            self._advance()
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self._at_op("*", "/"):
            op = self.token[1]
            self._advance()
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self) -> Expr:
        if self._at_op("-"):
            self._advance()
            return Neg(self.power())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self._at_op("^"):
            self._advance()
            return IntPow(base, self.integer())
        return base

    def integer(self) -> int:
        negative = False
        if self._at_op("-"):
            negative = True
            self._advance()
        kind, value, pos = self.token
        if kind != "number":
            raise ParseError("expected an integer exponent", pos)
        if not re.fullmatch(r"\d+", value):
            raise ParseError("exponent must be an integer", pos)
        self._advance()
        k = int(value)
        if k > MAX_EXPONENT:
            raise ParseError("integer exponent out of range", pos)
        return -k if negative else k

    def atom(self) -> Expr:
        kind, value, pos = self.token
        if kind == "number":
            self._advance()
            return Constant(float(value))
        if kind == "ident":
            self._advance()
            if self._at_op("("):
                if not is_function_name(value):
                    raise ParseError(f"unknown function '{value}'", pos)
                self._advance()
                argument = self.expr()
                self._expect_op(")")
                return Call(value, argument)
            if value not in self.allowed:
                raise ParseError(f"unknown variable '{value}'", pos)
            return Variable(value)
        if kind == "op" and value == "(":
            self._advance()
            node = self.expr()
            self._expect_op(")")
            return node
        raise ParseError("expected a number, name or '('", pos)


def parse_expr(text: str, allowed_vars) -> Expr:
    """Parse ``text`` against the expression grammar.

    Only names listed in ``allowed_vars`` may appear as variables; function
    names are fixed.  Errors carry the byte offset of the failure.
    """
    return _Parser(text, allowed_vars).parse()
