"""Expression trees for C-valued fields on C^4 with exact first and second
order forward-mode differentiation.

Expressions are built over the Cartesian coordinates x0..x3 of C^4 and are
always *evaluated on a slice* (see coords.SliceSpec): the slice
parametrization is substituted first and the jet is taken with respect to
the slice's real parameters (or the complex coordinates themselves on the
C4 slice).  This sidesteps Wirtinger calculus: conj() of a subtree is just
entrywise conjugation of its jet, which is exact on real-parameter slices
and rejected on the C4 slice where it would not be holomorphic.

sqrt and log use the principal branch; an explicit BranchSign flips the
sign of every sqrt in the tree, mirroring the pervasive +- of the closed
forms this package evaluates.  Points within TAU_BRANCH of a pole or a
branch point raise SingularPoint rather than returning garbage.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Mapping, Sequence

import numpy as np

from . import tolerances
from .coords import SliceKind, SliceSpec


class SingularPoint(Exception):
    """Evaluation hit a pole, branch point or log/sqrt of ~0."""


class BranchSign(Enum):
    PLUS = 1
    MINUS = -1


class Op(Enum):
    CONST = "const"
    COORD = "coord"
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    NEG = "neg"
    POW = "pow"
    SQRT = "sqrt"
    LOG = "log"
    EXP = "exp"
    CONJ = "conj"


@dataclass(frozen=True)
class FieldExpr:
    op: Op
    children: tuple = ()
    value: complex = 0j  # payload of CONST
    index: int = 0       # payload of COORD (0..3) and POW (integer exponent)

    # -- construction helpers --------------------------------------------

    @staticmethod
    def const(c) -> "FieldExpr":
        return FieldExpr(Op.CONST, value=complex(c))

    @staticmethod
    def coord(i: int) -> "FieldExpr":
        if not 0 <= i <= 3:
            raise ValueError("coordinate index must be 0..3")
        return FieldExpr(Op.COORD, index=i)

    @staticmethod
    def _wrap(x) -> "FieldExpr":
        return x if isinstance(x, FieldExpr) else FieldExpr.const(x)

    def __add__(self, other):
        return FieldExpr(Op.ADD, (self, FieldExpr._wrap(other)))

    def __radd__(self, other):
        return FieldExpr(Op.ADD, (FieldExpr._wrap(other), self))

    def __sub__(self, other):
        return FieldExpr(Op.SUB, (self, FieldExpr._wrap(other)))

    def __rsub__(self, other):
        return FieldExpr(Op.SUB, (FieldExpr._wrap(other), self))

    def __mul__(self, other):
        return FieldExpr(Op.MUL, (self, FieldExpr._wrap(other)))

    def __rmul__(self, other):
        return FieldExpr(Op.MUL, (FieldExpr._wrap(other), self))

    def __truediv__(self, other):
        return FieldExpr(Op.DIV, (self, FieldExpr._wrap(other)))

    def __rtruediv__(self, other):
        return FieldExpr(Op.DIV, (FieldExpr._wrap(other), self))

    def __neg__(self):
        return FieldExpr(Op.NEG, (self,))

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers; use exp/log for general ones")
        return FieldExpr(Op.POW, (self,), index=n)

    def __str__(self):
        return to_str(self)

    # free-of-conj test, needed by symbolic differentiation and C4 jets
    def is_holomorphic(self) -> bool:
        if self.op is Op.CONJ:
            return False
        return all(c.is_holomorphic() for c in self.children)


def sqrt(x) -> FieldExpr:
    return FieldExpr(Op.SQRT, (FieldExpr._wrap(x),))


def log(x) -> FieldExpr:
    return FieldExpr(Op.LOG, (FieldExpr._wrap(x),))


def exp(x) -> FieldExpr:
    return FieldExpr(Op.EXP, (FieldExpr._wrap(x),))


def conj(x) -> FieldExpr:
    return FieldExpr(Op.CONJ, (FieldExpr._wrap(x),))


X0 = FieldExpr.coord(0)
X1 = FieldExpr.coord(1)
X2 = FieldExpr.coord(2)
X3 = FieldExpr.coord(3)
I = FieldExpr.const(1j)
ONE = FieldExpr.const(1.0)
ZERO = FieldExpr.const(0.0)

# null coordinates as expressions
Q1 = X0 + I * X1
QT1 = X0 - I * X1
Q2 = X2 + I * X3
QT2 = X2 - I * X3
# Minkowski time on slices through points with x0 = -i t:  t = i x0
T = I * X0


# -- jets ---------------------------------------------------------------------

@dataclass
class JetC2:
    """Second-order jet: value, gradient and (symmetric) Hessian with
    respect to the parameters of the slice the jet was taken on."""

    value: complex
    grad: np.ndarray
    hess: np.ndarray

    @property
    def nparams(self) -> int:
        return self.grad.shape[0]


def _jet_const(c: complex, k: int) -> JetC2:
    return JetC2(complex(c), np.zeros(k, dtype=complex), np.zeros((k, k), dtype=complex))


def _principal_sqrt(z: complex) -> complex:
    # normalize -0.0 imaginary parts so radicands that ride along the cut
    # (e.g. negative reals on a real slice) pick a consistent side
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    return cmath.sqrt(z)


def _principal_log(z: complex) -> complex:
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    return cmath.log(z)


def eval_jet(
    expr: FieldExpr,
    slc: SliceSpec,
    u: Sequence[complex],
    branch: BranchSign = BranchSign.PLUS,
) -> JetC2:
    """Evaluate ``expr`` on the slice at parameters ``u``: value, gradient
    and Hessian with respect to the slice parameters."""
    u = np.asarray(u, dtype=complex)
    k = slc.nparams
    if u.shape != (k,):
        raise ValueError(f"slice expects {k} parameters")
    if slc.is_real and np.max(np.abs(u.imag)) > 0:
        raise ValueError("real slice parameters must be real")
    base = slc.basepoint.array()
    dirs = slc.direction_matrix()  # 4 x k
    coords = base + dirs @ u
    on_c4 = slc.kind is SliceKind.C4
    sign = branch.value
    tau = tolerances.TAU_BRANCH

    memo: Dict[int, JetC2] = {}

    def rec(e: FieldExpr) -> JetC2:
        got = memo.get(id(e))
        if got is not None:
            return got
        op = e.op
        if op is Op.CONST:
            r = _jet_const(e.value, k)
        elif op is Op.COORD:
            r = JetC2(complex(coords[e.index]), dirs[e.index].copy(),
                      np.zeros((k, k), dtype=complex))
        elif op is Op.ADD:
            a, b = rec(e.children[0]), rec(e.children[1])
            r = JetC2(a.value + b.value, a.grad + b.grad, a.hess + b.hess)
        elif op is Op.SUB:
            a, b = rec(e.children[0]), rec(e.children[1])
            r = JetC2(a.value - b.value, a.grad - b.grad, a.hess - b.hess)
        elif op is Op.NEG:
            a = rec(e.children[0])
            r = JetC2(-a.value, -a.grad, -a.hess)
        elif op is Op.MUL:
            a, b = rec(e.children[0]), rec(e.children[1])
            r = JetC2(
                a.value * b.value,
                a.value * b.grad + b.value * a.grad,
                a.value * b.hess + b.value * a.hess
                + np.outer(a.grad, b.grad) + np.outer(b.grad, a.grad),
            )
        elif op is Op.DIV:
            a, b = rec(e.children[0]), rec(e.children[1])
            if abs(b.value) < tau:
                raise SingularPoint(f"division by ~0 at parameters {u}")
            ib = _reciprocal(b)
            r = _mul(a, ib)
        elif op is Op.POW:
            a = rec(e.children[0])
            n = e.index
            if n < 0:
                if abs(a.value) < tau:
                    raise SingularPoint(f"negative power of ~0 at parameters {u}")
                r = _int_pow(_reciprocal(a), -n, k)
            else:
                r = _int_pow(a, n, k)
        elif op is Op.SQRT:
            a = rec(e.children[0])
            if abs(a.value) < tau:
                raise SingularPoint(f"sqrt branch point at parameters {u}")
            s = sign * _principal_sqrt(a.value)
            g = a.grad / (2 * s)
            h = a.hess / (2 * s) - np.outer(a.grad, a.grad) / (4 * s ** 3)
            r = JetC2(s, g, h)
        elif op is Op.LOG:
            a = rec(e.children[0])
            if abs(a.value) < tau:
                raise SingularPoint(f"log of ~0 at parameters {u}")
            v = a.value
            r = JetC2(
                _principal_log(v),
                a.grad / v,
                a.hess / v - np.outer(a.grad, a.grad) / v ** 2,
            )
        elif op is Op.EXP:
            a = rec(e.children[0])
            ev = cmath.exp(a.value)
            r = JetC2(ev, ev * a.grad, ev * (a.hess + np.outer(a.grad, a.grad)))
        elif op is Op.CONJ:
            if on_c4:
                raise SingularPoint("conj() is not holomorphic on the C4 slice")
            a = rec(e.children[0])
            r = JetC2(np.conj(a.value), np.conj(a.grad), np.conj(a.hess))
        else:  # pragma: no cover
            raise AssertionError(op)
        memo[id(e)] = r
        return r

    def _mul(a: JetC2, b: JetC2) -> JetC2:
        return JetC2(
            a.value * b.value,
            a.value * b.grad + b.value * a.grad,
            a.value * b.hess + b.value * a.hess
            + np.outer(a.grad, b.grad) + np.outer(b.grad, a.grad),
        )

    def _reciprocal(a: JetC2) -> JetC2:
        v = a.value
        return JetC2(
            1.0 / v,
            -a.grad / v ** 2,
            -a.hess / v ** 2 + 2 * np.outer(a.grad, a.grad) / v ** 3,
        )

    def _int_pow(a: JetC2, n: int, k: int) -> JetC2:
        if n == 0:
            return _jet_const(1.0, k)
        v = a.value
        return JetC2(
            v ** n,
            n * v ** (n - 1) * a.grad,
            n * v ** (n - 1) * a.hess
            + n * (n - 1) * v ** (n - 2) * np.outer(a.grad, a.grad),
        )

    return rec(expr)


def eval_value(expr, slc, u, branch: BranchSign = BranchSign.PLUS) -> complex:
    """Value-only evaluation (no derivative bookkeeping)."""
    u = np.asarray(u, dtype=complex)
    k = slc.nparams
    if u.shape != (k,):
        raise ValueError(f"slice expects {k} parameters")
    if slc.is_real and np.max(np.abs(u.imag)) > 0:
        raise ValueError("real slice parameters must be real")
    coords = slc.basepoint.array() + slc.direction_matrix() @ u
    on_c4 = slc.kind is SliceKind.C4
    sign = branch.value
    tau = tolerances.TAU_BRANCH
    memo: Dict[int, complex] = {}

    def rec(e: FieldExpr) -> complex:
        got = memo.get(id(e))
        if got is not None:
            return got
        op = e.op
        if op is Op.CONST:
            r = e.value
        elif op is Op.COORD:
            r = complex(coords[e.index])
        elif op is Op.ADD:
            r = rec(e.children[0]) + rec(e.children[1])
        elif op is Op.SUB:
            r = rec(e.children[0]) - rec(e.children[1])
        elif op is Op.NEG:
            r = -rec(e.children[0])
        elif op is Op.MUL:
            r = rec(e.children[0]) * rec(e.children[1])
        elif op is Op.DIV:
            den = rec(e.children[1])
            if abs(den) < tau:
                raise SingularPoint(f"division by ~0 at parameters {u}")
            r = rec(e.children[0]) / den
        elif op is Op.POW:
            base = rec(e.children[0])
            if e.index < 0 and abs(base) < tau:
                raise SingularPoint(f"negative power of ~0 at parameters {u}")
            r = base ** e.index
        elif op is Op.SQRT:
            v = rec(e.children[0])
            if abs(v) < tau:
                raise SingularPoint(f"sqrt branch point at parameters {u}")
            r = sign * _principal_sqrt(v)
        elif op is Op.LOG:
            v = rec(e.children[0])
            if abs(v) < tau:
                raise SingularPoint(f"log of ~0 at parameters {u}")
            r = _principal_log(v)
        elif op is Op.EXP:
            r = cmath.exp(rec(e.children[0]))
        elif op is Op.CONJ:
            if on_c4:
                raise SingularPoint("conj() is not holomorphic on the C4 slice")
            r = np.conj(rec(e.children[0]))
        else:  # pragma: no cover
            raise AssertionError(op)
        memo[id(e)] = r
        return r

    return complex(rec(expr))


# -- differential operators from jets ----------------------------------------

_LAPLACE_SLICES = {
    "euclid4": (SliceKind.R4,),
    "complex4": (SliceKind.C4,),
    "minkowski4": (SliceKind.M4,),
    "euclid3": (SliceKind.R3,),
}


def _check_kind(kind: str, slc: SliceSpec) -> np.ndarray:
    from .coords import metric_signature

    if kind not in _LAPLACE_SLICES:
        raise ValueError(f"unknown operator kind {kind!r}")
    if slc.kind not in _LAPLACE_SLICES[kind]:
        raise ValueError(f"operator kind {kind!r} needs a slice of kind "
                         f"{[s.value for s in _LAPLACE_SLICES[kind]]}")
    return metric_signature(kind)


def laplacian(expr, slc, u, kind: str, branch: BranchSign = BranchSign.PLUS) -> complex:
    """Signature-correct trace of the Hessian: -d_t^2 + sum d_xi^2 on
    Minkowski slices, the plain sum on the others."""
    sig = _check_kind(kind, slc)
    jet = eval_jet(expr, slc, u, branch)
    return complex(np.sum(sig * np.diag(jet.hess)))


def grad_square(expr, slc, u, kind: str, branch: BranchSign = BranchSign.PLUS) -> complex:
    """<grad f, grad f> for the flat metric of the requested kind."""
    sig = _check_kind(kind, slc)
    jet = eval_jet(expr, slc, u, branch)
    return complex(np.sum(sig * jet.grad ** 2))


# first derivatives along null-coordinate directions, per slice kind;
# each entry is the coefficient vector contracting jet.grad
_D = {
    SliceKind.C4: {
        "q1": np.array([0.5, -0.5j, 0, 0]),
        "qt1": np.array([0.5, 0.5j, 0, 0]),
        "q2": np.array([0, 0, 0.5, -0.5j]),
        "qt2": np.array([0, 0, 0.5, 0.5j]),
    },
    SliceKind.R4: {
        "q1": np.array([0.5, -0.5j, 0, 0]),
        "q1bar": np.array([0.5, 0.5j, 0, 0]),
        "q2": np.array([0, 0, 0.5, -0.5j]),
        "q2bar": np.array([0, 0, 0.5, 0.5j]),
    },
    SliceKind.M4: {
        # slice parameters are (t, x1, x2, x3); v = x1 + t, w = x1 - t
        "v": np.array([0.5, 0.5, 0, 0]),
        "w": np.array([-0.5, 0.5, 0, 0]),
        "q2": np.array([0, 0, 0.5, -0.5j]),
        "q2bar": np.array([0, 0, 0.5, 0.5j]),
        "t": np.array([1.0, 0, 0, 0]),
    },
}


def null_derivative(jet: JetC2, slice_kind: SliceKind, which: str) -> complex:
    try:
        coeffs = _D[slice_kind][which]
    except KeyError:
        raise ValueError(f"no derivative {which!r} on slice kind {slice_kind}") from None
    return complex(coeffs @ jet.grad)


# -- symbolic differentiation and substitution --------------------------------

def _c(x) -> FieldExpr:
    return FieldExpr.const(x)


def _is_zero(e: FieldExpr) -> bool:
    return e.op is Op.CONST and e.value == 0


def _add_s(a, b):
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return FieldExpr(Op.ADD, (a, b))


def _mul_s(a, b):
    if _is_zero(a) or _is_zero(b):
        return ZERO
    if a.op is Op.CONST and a.value == 1:
        return b
    if b.op is Op.CONST and b.value == 1:
        return a
    return FieldExpr(Op.MUL, (a, b))


def diff(expr: FieldExpr, i: int) -> FieldExpr:
    """Symbolic derivative with respect to coordinate i (holomorphic trees
    only; conj() has no coordinate derivative)."""
    op = expr.op
    if op is Op.CONST:
        return ZERO
    if op is Op.COORD:
        return ONE if expr.index == i else ZERO
    if op is Op.ADD:
        return _add_s(diff(expr.children[0], i), diff(expr.children[1], i))
    if op is Op.SUB:
        a = diff(expr.children[0], i)
        b = diff(expr.children[1], i)
        if _is_zero(b):
            return a
        return FieldExpr(Op.SUB, (a, b))
    if op is Op.NEG:
        d = diff(expr.children[0], i)
        return ZERO if _is_zero(d) else FieldExpr(Op.NEG, (d,))
    if op is Op.MUL:
        a, b = expr.children
        return _add_s(_mul_s(diff(a, i), b), _mul_s(a, diff(b, i)))
    if op is Op.DIV:
        a, b = expr.children
        num = FieldExpr(Op.SUB, (_mul_s(diff(a, i), b), _mul_s(a, diff(b, i))))
        return FieldExpr(Op.DIV, (num, b ** 2))
    if op is Op.POW:
        a = expr.children[0]
        n = expr.index
        if n == 0:
            return ZERO
        return _mul_s(_mul_s(_c(n), a ** (n - 1)), diff(a, i))
    if op is Op.SQRT:
        a = expr.children[0]
        return FieldExpr(Op.DIV, (diff(a, i), _mul_s(_c(2), expr)))
    if op is Op.LOG:
        a = expr.children[0]
        return FieldExpr(Op.DIV, (diff(a, i), a))
    if op is Op.EXP:
        return _mul_s(expr, diff(expr.children[0], i))
    if op is Op.CONJ:
        raise ValueError("cannot differentiate conj() symbolically")
    raise AssertionError(op)  # pragma: no cover


def subs(expr: FieldExpr, mapping: Mapping[int, FieldExpr]) -> FieldExpr:
    """Replace Coord(i) by mapping[i] throughout (identity where missing)."""
    memo: Dict[int, FieldExpr] = {}

    def rec(e: FieldExpr) -> FieldExpr:
        got = memo.get(id(e))
        if got is not None:
            return got
        if e.op is Op.COORD and e.index in mapping:
            r = mapping[e.index]
        elif not e.children:
            r = e
        else:
            r = FieldExpr(e.op, tuple(rec(c) for c in e.children),
                          value=e.value, index=e.index)
        memo[id(e)] = r
        return r

    return rec(expr)


# -- parsing and printing ------------------------------------------------------

_SYMBOLS: Dict[str, FieldExpr] = {
    "x0": X0, "x1": X1, "x2": X2, "x3": X3,
    "q1": Q1, "qt1": QT1, "q2": Q2, "qt2": QT2,
    "t": T,
    "i": I, "I": I,
}

_FUNCS: Dict[str, Callable[[FieldExpr], FieldExpr]] = {
    "sqrt": sqrt, "log": log, "exp": exp, "conj": conj,
}


class ParseError(ValueError):
    pass


def parse_expr(text: str) -> FieldExpr:
    """Parse the CLI's infix syntax: symbols x0..x3, t, q1, qt1, q2, qt2,
    functions sqrt/log/exp/conj, imaginary unit i, operators + - * / ^."""
    tokens = _tokenize(text)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take(kind=None):
        tok = peek()
        if tok is None:
            raise ParseError("unexpected end of expression")
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, got {tok[1]!r}")
        pos[0] += 1
        return tok

    def parse_sum():
        node = parse_term()
        while (tok := peek()) and tok[0] in ("+", "-"):
            take()
            rhs = parse_term()
            node = node + rhs if tok[0] == "+" else node - rhs
        return node

    def parse_term():
        node = parse_unary()
        while (tok := peek()) and tok[0] in ("*", "/"):
            take()
            rhs = parse_unary()
            node = node * rhs if tok[0] == "*" else node / rhs
        return node

    def parse_unary():
        tok = peek()
        if tok and tok[0] == "-":
            take()
            return -parse_unary()
        if tok and tok[0] == "+":
            take()
            return parse_unary()
        return parse_power()

    def parse_power():
        base = parse_atom()
        tok = peek()
        if tok and tok[0] == "^":
            take()
            neg = False
            t2 = peek()
            if t2 and t2[0] == "-":
                take()
                neg = True
            num = take("num")
            if not float(num[1]).is_integer():
                raise ParseError("exponents must be integers")
            n = int(float(num[1]))
            return base ** (-n if neg else n)
        return base

    def parse_atom():
        tok = take()
        kind, text = tok
        if kind == "num":
            return FieldExpr.const(float(text))
        if kind == "(":
            node = parse_sum()
            take(")")
            return node
        if kind == "name":
            if text in _FUNCS:
                take("(")
                arg = parse_sum()
                take(")")
                return _FUNCS[text](arg)
            if text in _SYMBOLS:
                return _SYMBOLS[text]
            raise ParseError(f"unknown symbol {text!r}")
        raise ParseError(f"unexpected token {text!r}")

    node = parse_sum()
    if pos[0] != len(tokens):
        raise ParseError(f"trailing input at {tokens[pos[0]][1]!r}")
    return node


def _tokenize(text: str):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE" and j + 1 < n and (
                text[j + 1].isdigit() or text[j + 1] in "+-"
            ):
                j += 2
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(("num", text[i:j]))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j]))
            i = j
            continue
        if ch == "*" and i + 1 < n and text[i + 1] == "*":
            tokens.append(("^", "**"))
            i += 2
            continue
        if ch in "+-*/^(),":
            tokens.append((ch, ch))
            i += 1
            continue
        raise ParseError(f"bad character {ch!r}")
    return tokens


_PREC = {Op.ADD: 1, Op.SUB: 1, Op.MUL: 2, Op.DIV: 2, Op.NEG: 3, Op.POW: 4}


def to_str(e: FieldExpr) -> str:
    def wrap(child: FieldExpr, parent_prec: int) -> str:
        s = to_str(child)
        if child.op in _PREC and _PREC[child.op] < parent_prec:
            return f"({s})"
        return s

    op = e.op
    if op is Op.CONST:
        v = e.value
        if v.imag == 0:
            return _fmt_real(v.real)
        if v.real == 0:
            if v.imag == 1:
                return "i"
            if v.imag == -1:
                return "-i"
            return f"{_fmt_real(v.imag)}*i"
        return f"({_fmt_real(v.real)}+{_fmt_real(v.imag)}*i)"
    if op is Op.COORD:
        return f"x{e.index}"
    if op is Op.ADD:
        return f"{wrap(e.children[0], 1)} + {wrap(e.children[1], 2)}"
    if op is Op.SUB:
        return f"{wrap(e.children[0], 1)} - {wrap(e.children[1], 2)}"
    if op is Op.MUL:
        return f"{wrap(e.children[0], 2)}*{wrap(e.children[1], 2)}"
    if op is Op.DIV:
        return f"{wrap(e.children[0], 2)}/{wrap(e.children[1], 3)}"
    if op is Op.NEG:
        return f"-{wrap(e.children[0], 3)}"
    if op is Op.POW:
        return f"{wrap(e.children[0], 4)}^{e.index}"
    return f"{op.value}({to_str(e.children[0])})"


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)
