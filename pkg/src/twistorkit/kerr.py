"""Twistor surfaces psi = 0 in CP^3 and the Kerr-equation solver.

Substituting the incidence relations w2 = w0 q1 - w1 qt2 and
w3 = w0 q2 + w1 qt1 into a homogeneous psi(w0, w1, w2, w3) reduces it to a
polynomial of degree <= deg(psi) in mu = w1/w0 whose roots represent the
integrable distributions cut out by the surface.  Degrees 1 and 2 get
closed forms (quadratic formula, sign chosen by BranchSign); higher
degrees fall back to numpy's companion-matrix roots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import tolerances
from .coords import Point4C, PointLike, SliceKind, SliceSpec, to_null
from .fieldexpr import (
    BranchSign,
    FieldExpr,
    Q1,
    Q2,
    QT1,
    QT2,
    eval_value,
    sqrt,
)


class DegenerateAtPoint(Exception):
    """The reduced polynomial (or its discriminant) vanished at the point."""


class UnsupportedDegree(Exception):
    """Closed forms exist only for reduced degree <= 2."""


class NoConvergence(Exception):
    """Numerical root extraction failed (degree > 2 fallback)."""


Monomial = Tuple[Tuple[int, int, int, int], complex]


@dataclass(frozen=True)
class TwistorSurface:
    name: str
    degree: int
    monomials: Tuple[Monomial, ...]

    @staticmethod
    def make(name: str, monomials: Sequence[Tuple[Sequence[int], complex]]) -> "TwistorSurface":
        merged: Dict[Tuple[int, int, int, int], complex] = {}
        degree = None
        for exps, coeff in monomials:
            e = tuple(int(x) for x in exps)
            if len(e) != 4 or any(x < 0 for x in e):
                raise ValueError(f"bad exponent tuple {e}")
            d = sum(e)
            if degree is None:
                degree = d
            elif d != degree:
                raise ValueError("surface polynomial is not homogeneous")
            merged[e] = merged.get(e, 0j) + complex(coeff)
        merged = {e: c for e, c in merged.items() if c != 0}
        if not merged:
            raise ValueError("surface polynomial is identically zero")
        ordered = tuple(sorted(merged.items()))
        return TwistorSurface(name=name, degree=int(degree), monomials=ordered)

    def __call__(self, w: Sequence[complex]) -> complex:
        w = np.asarray(w, dtype=complex)
        total = 0j
        for (e0, e1, e2, e3), c in self.monomials:
            total += c * w[0] ** e0 * w[1] ** e1 * w[2] ** e2 * w[3] ** e3
        return complex(total)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "degree": self.degree,
            "monomials": [
                {"e": list(e), "c": [c.real, c.imag]} for e, c in self.monomials
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "TwistorSurface":
        monos = [(m["e"], complex(m["c"][0], m["c"][1])) for m in data["monomials"]]
        surf = TwistorSurface.make(data.get("name", "unnamed"), monos)
        if "degree" in data and int(data["degree"]) != surf.degree:
            raise ValueError("declared degree does not match monomials")
        return surf


def load_surface(path: str) -> TwistorSurface:
    with open(path, "r", encoding="utf-8") as fh:
        return TwistorSurface.from_json(json.load(fh))


# -- reduction under the incidence substitution --------------------------------

def reduced_coefficients(surface: TwistorSurface) -> List[Optional[FieldExpr]]:
    """Expression coefficients c_k of the reduced polynomial
    sum_k c_k w0^(d-k) w1^k; None marks a structurally absent power."""
    d = surface.degree
    coeffs: List[Optional[FieldExpr]] = [None] * (d + 1)
    for (e0, e1, e2, e3), gamma in surface.monomials:
        for j2 in range(e2 + 1):
            for j3 in range(e3 + 1):
                k = e1 + (e2 - j2) + (e3 - j3)
                scalar = gamma * comb(e2, j2) * comb(e3, j3) * (-1) ** (e2 - j2)
                term: FieldExpr = FieldExpr.const(scalar)
                for base, power in ((Q1, j2), (QT2, e2 - j2), (Q2, j3), (QT1, e3 - j3)):
                    if power == 1:
                        term = term * base
                    elif power > 1:
                        term = term * base ** power
                coeffs[k] = term if coeffs[k] is None else coeffs[k] + term
    return coeffs


def _coeff_values(surface: TwistorSurface, p: PointLike) -> np.ndarray:
    p = Point4C.of(p)
    c4 = SliceSpec(SliceKind.C4)
    out = []
    for c in reduced_coefficients(surface):
        out.append(0j if c is None else eval_value(c, c4, p.array()))
    return np.array(out, dtype=complex)


def kerr_eval_all(surface: TwistorSurface, p: PointLike) -> List[Tuple[complex, complex]]:
    """All homogeneous [w0, w1] roots of the reduced polynomial at p,
    including roots at infinity [0, 1] for vanishing leading coefficients."""
    c = _coeff_values(surface, p)
    scale = float(np.max(np.abs(c)))
    if scale < tolerances.TAU_BRANCH:
        raise DegenerateAtPoint("reduced polynomial vanishes identically at the point")
    c = c / scale
    deg = len(c) - 1
    while deg > 0 and abs(c[deg]) < tolerances.TAU_BRANCH:
        deg -= 1
    pairs: List[Tuple[complex, complex]] = [(0j, 1.0 + 0j)] * (len(c) - 1 - deg)
    if deg == 0:
        return pairs
    cc = c[: deg + 1]
    if deg == 1:
        pairs.append((1.0 + 0j, -cc[0] / cc[1]))
    elif deg == 2:
        disc = cc[1] ** 2 - 4 * cc[2] * cc[0]
        if abs(disc) < tolerances.TAU_BRANCH:
            raise DegenerateAtPoint("double root: discriminant ~ 0")
        sq = np.sqrt(disc)
        pairs.append((1.0 + 0j, (-cc[1] + sq) / (2 * cc[2])))
        pairs.append((1.0 + 0j, (-cc[1] - sq) / (2 * cc[2])))
    else:
        roots = np.roots(cc[::-1])
        if np.any(~np.isfinite(roots)):
            raise NoConvergence("root extraction failed")
        for r in sorted(roots, key=lambda z: (z.real, z.imag)):
            pairs.append((1.0 + 0j, complex(r)))
    return pairs


def kerr_eval(surface: TwistorSurface, p: PointLike,
              branch: BranchSign = BranchSign.PLUS) -> Tuple[complex, complex]:
    """Branch-selected root: for degree 2 the quadratic formula with the
    requested sign; PLUS takes the first root otherwise."""
    c = _coeff_values(surface, p)
    scale = float(np.max(np.abs(c)))
    if scale < tolerances.TAU_BRANCH:
        raise DegenerateAtPoint("reduced polynomial vanishes identically at the point")
    c = c / scale
    deg = len(c) - 1
    while deg > 0 and abs(c[deg]) < tolerances.TAU_BRANCH:
        deg -= 1
    if deg == 0:
        return (0j, 1.0 + 0j)
    if deg == 1:
        if branch is BranchSign.MINUS and len(c) - 1 > deg:
            return (0j, 1.0 + 0j)  # the root that escaped to infinity
        return (1.0 + 0j, -c[0] / c[1])
    if deg == 2:
        disc = c[1] ** 2 - 4 * c[2] * c[0]
        if abs(disc) < tolerances.TAU_BRANCH:
            raise DegenerateAtPoint("double root: discriminant ~ 0")
        sq = np.sqrt(disc)
        sign = 1.0 if branch is BranchSign.PLUS else -1.0
        return (1.0 + 0j, (-c[1] + sign * sq) / (2 * c[2]))
    pairs = kerr_eval_all(surface, p)
    return pairs[0] if branch is BranchSign.PLUS else pairs[-1]


def kerr_field(surface: TwistorSurface,
               branch: BranchSign = BranchSign.PLUS) -> FieldExpr:
    """Closed-form mu as an expression on C^4 (rational for reduced degree
    1, rational-with-sqrt for degree 2)."""
    coeffs = reduced_coefficients(surface)
    deg = max((k for k, c in enumerate(coeffs) if c is not None), default=-1)
    if deg < 1:
        raise UnsupportedDegree("reduced polynomial has no mu dependence")
    if deg == 1:
        c0 = coeffs[0] if coeffs[0] is not None else FieldExpr.const(0)
        return -(c0 / coeffs[1])
    if deg == 2:
        c0 = coeffs[0] if coeffs[0] is not None else FieldExpr.const(0)
        c1 = coeffs[1] if coeffs[1] is not None else FieldExpr.const(0)
        c2 = coeffs[2]
        disc = c1 ** 2 - FieldExpr.const(4) * c2 * c0
        root = sqrt(disc)
        if branch is BranchSign.MINUS:
            root = -root
        return (-c1 + root) / (FieldExpr.const(2) * c2)
    raise UnsupportedDegree(f"no closed form for reduced degree {deg}")


def surface_contains(surface: TwistorSurface, w: Sequence[complex],
                     tol: float | None = None) -> Tuple[bool, float]:
    """Normalized residual |psi(w)| / max|w_i|^degree and the containment
    verdict at tolerance tol (default TAU_ALG)."""
    tol = tolerances.TAU_ALG if tol is None else tol
    w = np.asarray(w, dtype=complex)
    scale = float(np.max(np.abs(w)))
    if scale == 0:
        raise ValueError("the zero quadruple is not a point of CP^3")
    residual = abs(surface(w / scale))
    return residual <= tol, residual


def kerr_pair_residual(surface: TwistorSurface, p: PointLike,
                       pair: Sequence[complex]) -> float:
    """|psi(iota(p, pair))| normalized; the defining property of a Kerr root."""
    n = to_null(p)
    w0, w1 = complex(pair[0]), complex(pair[1])
    w = np.array([w0, w1, w0 * n.q1 - w1 * n.qt2, w0 * n.q2 + w1 * n.qt1])
    _, res = surface_contains(surface, w, tol=np.inf)
    return res


# -- linear coordinate changes ---------------------------------------------------

def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0j) + c1 * c2
    return out


def substitute_linear(surface: TwistorSurface, N: np.ndarray,
                      name: str | None = None) -> TwistorSurface:
    """The surface psi'(w) = psi(N w) for a linear change of homogeneous
    coordinates; exact monomial expansion."""
    N = np.asarray(N, dtype=complex)
    if N.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    rows = [
        {tuple(int(k == j) for k in range(4)): N[i, j]
         for j in range(4) if N[i, j] != 0}
        for i in range(4)
    ]
    total: dict = {}
    for exps, coeff in surface.monomials:
        acc = {(0, 0, 0, 0): coeff}
        for i, e in enumerate(exps):
            for _ in range(e):
                acc = _poly_mul(acc, rows[i])
        for e, c in acc.items():
            total[e] = total.get(e, 0j) + c
    scale = max(abs(c) for c in total.values())
    monos = [(e, c) for e, c in total.items() if abs(c) > 1e-14 * scale]
    return TwistorSurface.make(name or f"{surface.name}-transformed", monos)


def transform_surface(surface: TwistorSurface, P: np.ndarray,
                      name: str | None = None) -> TwistorSurface:
    """Image surface under the CP^3 action of P: psi' = psi o P^{-1}."""
    return substitute_linear(surface, np.linalg.inv(np.asarray(P, dtype=complex)),
                             name)


def surfaces_proportional(s1: TwistorSurface, s2: TwistorSurface,
                          tol: float | None = None) -> Tuple[bool, float]:
    """Whether the two homogeneous polynomials agree up to a scalar."""
    tol = tolerances.TAU_ALG if tol is None else tol
    if s1.degree != s2.degree:
        return False, float("inf")
    all_exps = sorted({e for e, _ in s1.monomials} | {e for e, _ in s2.monomials})
    d1 = dict(s1.monomials)
    d2 = dict(s2.monomials)
    v1 = np.array([d1.get(e, 0j) for e in all_exps])
    v2 = np.array([d2.get(e, 0j) for e in all_exps])
    i = int(np.argmax(np.abs(v1)))
    if abs(v2[i]) == 0:
        return False, float("inf")
    diff = float(np.max(np.abs(v1 / v1[i] - v2 / v2[i])))
    return diff <= tol, diff
