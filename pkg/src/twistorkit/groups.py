"""Conformal group actions: the block Moebius action on the standard
chart, SL(2,H)/SU(4,h) membership predicates, the induced CP^3 action,
the wedge-square double cover into SO(6,C), and the SO(2,4) action in
quadric coordinates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from . import tolerances
from .coords import (
    Point4C,
    PointLike,
    point_of_qmatrix,
    qmatrix_of_point,
    QMatrix,
)
from .fieldexpr import FieldExpr, Q1, Q2, QT1, QT2, subs
from .twistor import TwistorPoint, h_form


class AtInfinity(Exception):
    """The transformation sends the point to infinity of the chart."""


@dataclass(frozen=True)
class BlockMatrix4:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @staticmethod
    def of(m) -> "BlockMatrix4":
        a = np.asarray(m, dtype=complex)
        if a.shape != (4, 4):
            raise ValueError("expected a 4x4 matrix")
        return BlockMatrix4(a[:2, :2].copy(), a[:2, 2:].copy(),
                            a[2:, :2].copy(), a[2:, 2:].copy())

    @staticmethod
    def from_blocks(A, B, C, D) -> "BlockMatrix4":
        mk = lambda x: np.asarray(x, dtype=complex).reshape(2, 2)
        return BlockMatrix4(mk(A), mk(B), mk(C), mk(D))

    def matrix(self) -> np.ndarray:
        top = np.hstack([self.A, self.B])
        bot = np.hstack([self.C, self.D])
        return np.vstack([top, bot])

    def det(self) -> complex:
        return complex(np.linalg.det(self.matrix()))

    def inverse(self) -> "BlockMatrix4":
        return BlockMatrix4.of(np.linalg.inv(self.matrix()))

    def __matmul__(self, other: "BlockMatrix4") -> "BlockMatrix4":
        return BlockMatrix4.of(self.matrix() @ other.matrix())


def mobius(P: BlockMatrix4, p: PointLike) -> Point4C:
    """Q -> (C + D Q)(A + B Q)^{-1} on the standard chart."""
    Q = qmatrix_of_point(p).entries
    M = P.A + P.B @ Q
    if abs(np.linalg.det(M)) < tolerances.TAU_BRANCH:
        raise AtInfinity("A + BQ is singular; image lies at infinity")
    Qnew = (P.C + P.D @ Q) @ np.linalg.inv(M)
    return point_of_qmatrix(QMatrix(Qnew))


def _is_quaternionic_block(M: np.ndarray, tol: float) -> bool:
    return (
        abs(M[1, 1] - np.conj(M[0, 0])) <= tol
        and abs(M[0, 1] + np.conj(M[1, 0])) <= tol
    )


def is_sl2h(P: BlockMatrix4, tol: float | None = None) -> bool:
    """All four blocks quaternionic and det P = 1."""
    tol = tolerances.TAU_ALG if tol is None else tol
    return (
        all(_is_quaternionic_block(M, tol) for M in (P.A, P.B, P.C, P.D))
        and abs(P.det() - 1.0) <= tol
    )


def is_su4h(P: BlockMatrix4, tol: float | None = None, spot_checks: int = 20) -> bool:
    """Membership in SU(4,h): the three block conditions
    A*C = -C*A, A*D + C*B = I, B*D = -D*B, det P = 1, cross-checked by
    h-form preservation on seeded random vectors."""
    tol = tolerances.TAU_ALG if tol is None else tol
    A, B, C, D = P.A, P.B, P.C, P.D
    star = lambda M: np.conj(M.T)
    conds = (
        np.max(np.abs(star(A) @ C + star(C) @ A)) <= tol
        and np.max(np.abs(star(A) @ D + star(C) @ B - np.eye(2))) <= tol
        and np.max(np.abs(star(B) @ D + star(D) @ B)) <= tol
        and abs(P.det() - 1.0) <= tol
    )
    if not conds:
        return False
    rng = np.random.default_rng(2024)
    M = P.matrix()
    for _ in range(spot_checks):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        if abs(h_form(M @ v, M @ v) - h_form(v, v)) > 1e-8 * (1 + abs(h_form(v, v))):
            return False
    return True


def act_cp3(P: BlockMatrix4, w) -> TwistorPoint:
    return TwistorPoint.of(P.matrix() @ TwistorPoint.of(w).array())


_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def wedge_square(P: BlockMatrix4) -> np.ndarray:
    """The 6x6 matrix R with R(v ^ w) = Pv ^ Pw in the basis
    e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4 (the z_ij order)."""
    M = P.matrix()
    R = np.zeros((6, 6), dtype=complex)
    for col, (i, j) in enumerate(_PAIRS):
        for row, (k, l) in enumerate(_PAIRS):
            R[row, col] = M[k, i] * M[l, j] - M[k, j] * M[l, i]
    return R


def plucker_form_matrix() -> np.ndarray:
    """Symmetric matrix of the Plucker quadratic form
    z12 z34 - z13 z24 + z14 z23."""
    G = np.zeros((6, 6))
    G[0, 5] = G[5, 0] = 0.5
    G[1, 4] = G[4, 1] = -0.5
    G[2, 3] = G[3, 2] = 0.5
    return G


# -- SO(2,4) action in (eta, xi-hat) coordinates --------------------------------

_MINK = np.diag([-1.0, 1.0, 1.0, 1.0])


def minkowski_norm2(x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    return float(x @ _MINK @ x)


@dataclass(frozen=True)
class SixMatrix:
    """A 6x6 matrix acting on (eta0, eta1, xi-hat) quadric coordinates,
    in which a Minkowski point embeds as (1, |x|_1^2, x)."""

    R: np.ndarray

    @staticmethod
    def of(m) -> "SixMatrix":
        a = np.asarray(m, dtype=complex)
        if a.shape != (6, 6):
            raise ValueError("expected a 6x6 matrix")
        return SixMatrix(a)

    @staticmethod
    def from_blocks(E, F, G, H) -> "SixMatrix":
        E = np.asarray(E, dtype=complex).reshape(2, 2)
        F = np.asarray(F, dtype=complex).reshape(2, 4)
        G = np.asarray(G, dtype=complex).reshape(4, 2)
        H = np.asarray(H, dtype=complex).reshape(4, 4)
        return SixMatrix(np.block([[E, F], [G, H]]))

    def quadric_form_residual(self) -> float:
        """How far R is from preserving eta0 eta1 - |xi|_1^2."""
        Gm = np.zeros((6, 6))
        Gm[0, 1] = Gm[1, 0] = 0.5
        Gm[2:, 2:] = -_MINK
        diff = self.R.T @ Gm @ self.R - Gm
        return float(np.max(np.abs(diff)))


def act_quadric(R: SixMatrix, x: Sequence[float]) -> np.ndarray:
    """Conformal action on a Minkowski point (t, x1, x2, x3)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise ValueError("expected a Minkowski point (t, x1, x2, x3)")
    vec = np.concatenate([[1.0, minkowski_norm2(x)], x]).astype(complex)
    out = R.R @ vec
    if abs(out[0]) < tolerances.TAU_BRANCH:
        raise AtInfinity("denominator vanished: image at infinity")
    image = out[2:] / out[0]
    if np.max(np.abs(image.imag)) > 1e-8:
        raise ValueError("matrix does not preserve the Minkowski slice here")
    image = image.real
    if abs(out[1] / out[0] - minkowski_norm2(image)) > 1e-6 * (1 + abs(out[1] / out[0])):
        raise ValueError("matrix does not preserve the quadric at this point")
    return image


def quadric_lorentz(H: Sequence[Sequence[float]]) -> SixMatrix:
    return SixMatrix.from_blocks(np.eye(2), np.zeros((2, 4)),
                                 np.zeros((4, 2)), np.asarray(H, dtype=float))


def quadric_dilation(lam: float) -> SixMatrix:
    E = np.diag([1.0 / lam, lam])
    return SixMatrix.from_blocks(E, np.zeros((2, 4)), np.zeros((4, 2)), np.eye(4))


def quadric_translation(a: Sequence[float]) -> SixMatrix:
    """Blocks built from the parameter a; the induced action is the
    translation x -> x + 2a."""
    c = 2.0 * np.asarray(a, dtype=float)
    E = np.array([[1.0, 0.0], [minkowski_norm2(c), 1.0]])
    F = np.vstack([np.zeros(4), 2.0 * (_MINK @ c)])
    G = np.column_stack([c, np.zeros(4)])
    return SixMatrix.from_blocks(E, F, G, np.eye(4))


def quadric_inversion(H: Sequence[Sequence[float]] | None = None) -> SixMatrix:
    """E swaps eta0 and eta1: x -> Hx / |x|_1^2 (H = diag(1,-1,-1,-1)
    reproduces the standard Minkowski inversion)."""
    if H is None:
        H = np.diag([1.0, -1.0, -1.0, -1.0])
    E = np.array([[0.0, 1.0], [1.0, 0.0]])
    return SixMatrix.from_blocks(E, np.zeros((2, 4)), np.zeros((4, 2)),
                                 np.asarray(H, dtype=float))


# -- named catalog matrices -----------------------------------------------------

def _translation_blocks(t: float, x1: float, x2: float, x3: float) -> BlockMatrix4:
    p = Point4C(-1j * t, x1, x2, x3)  # Minkowski point: x0 = -i t
    C = qmatrix_of_point(p).entries
    return BlockMatrix4.from_blocks(np.eye(2), np.zeros((2, 2)), C, np.eye(2))


def _r4_translation_blocks(x0: float, x1: float, x2: float, x3: float) -> BlockMatrix4:
    C = qmatrix_of_point(Point4C(x0, x1, x2, x3)).entries
    return BlockMatrix4.from_blocks(np.eye(2), np.zeros((2, 2)), C, np.eye(2))


def named_matrix(key: str) -> BlockMatrix4:
    """Catalog matrices: identity, inversion, dilation:L,
    translation:t,x1,x2,x3, translation-r4:x0,x1,x2,x3, lorentz-boost:L,
    cxsame."""
    name, _, arg = key.partition(":")
    if name == "identity":
        return BlockMatrix4.of(np.eye(4))
    if name == "inversion":
        return BlockMatrix4.from_blocks(np.zeros((2, 2)), np.eye(2),
                                        np.eye(2), np.zeros((2, 2)))
    if name == "dilation":
        lam = float(arg)
        if lam <= 0:
            raise ValueError("dilation factor must be positive")
        return BlockMatrix4.from_blocks(lam ** -0.5 * np.eye(2), np.zeros((2, 2)),
                                        np.zeros((2, 2)), lam ** 0.5 * np.eye(2))
    if name == "translation":
        vals = [float(s) for s in arg.split(",")]
        if len(vals) != 4:
            raise ValueError("translation needs t,x1,x2,x3")
        return _translation_blocks(*vals)
    if name == "translation-r4":
        vals = [float(s) for s in arg.split(",")]
        if len(vals) != 4:
            raise ValueError("translation-r4 needs x0,x1,x2,x3")
        return _r4_translation_blocks(*vals)
    if name == "lorentz-boost":
        lam = float(arg)
        D = np.diag([np.exp(lam / 2), np.exp(-lam / 2)])
        A = np.linalg.inv(np.conj(D.T))
        return BlockMatrix4.from_blocks(A, np.zeros((2, 2)), np.zeros((2, 2)), D)
    if name == "cxsame":
        theta = np.exp(1j * np.pi / 4)  # theta^4 = -1
        return BlockMatrix4.of(np.diag([theta, 1j * theta, 1j * theta, theta]))
    raise ValueError(f"unknown matrix key {key!r}")


def load_matrix(path: str) -> BlockMatrix4:
    """JSON format: {"rows": [[ [re,im], ... 4 entries ], ... 4 rows ]}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    rows = data["rows"]
    m = np.array([[complex(e[0], e[1]) for e in row] for row in rows])
    return BlockMatrix4.of(m)


# -- pushing expression fields through the action -------------------------------

def mobius_coordinate_exprs(P: BlockMatrix4) -> Tuple[FieldExpr, FieldExpr, FieldExpr, FieldExpr]:
    """Cartesian coordinates of the Moebius image as expressions of the
    source point: entries of (C + DQ)(A + BQ)^{-1} unpacked to x0..x3."""
    q = [[Q1, -QT2], [Q2, QT1]]

    def block_apply(M, col):
        return [
            FieldExpr.const(M[0, 0]) * col[0] + FieldExpr.const(M[0, 1]) * col[1],
            FieldExpr.const(M[1, 0]) * col[0] + FieldExpr.const(M[1, 1]) * col[1],
        ]

    def affine(Mlin, Mconst):
        # columns of Mconst + Mlin @ Q
        cols = []
        for j in range(2):
            col = block_apply(Mlin, [q[0][j], q[1][j]])
            col[0] = col[0] + FieldExpr.const(Mconst[0, j])
            col[1] = col[1] + FieldExpr.const(Mconst[1, j])
            cols.append(col)
        return cols

    num = affine(P.D, P.C)   # columns of C + DQ
    den = affine(P.B, P.A)   # columns of A + BQ
    # den as [a b; c d] with inverse [d -b; -c a]/det
    a, c = den[0]
    b, d = den[1]
    det = a * d - b * c
    N = [[num[0][0], num[1][0]], [num[0][1], num[1][1]]]  # N[i][j] entry i,j
    Vinv = [[d / det, -b / det], [-c / det, a / det]]
    Qn = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            Qn[i][j] = N[i][0] * Vinv[0][j] + N[i][1] * Vinv[1][j]
    q1n, qt2n_neg, q2n, qt1n = Qn[0][0], Qn[0][1], Qn[1][0], Qn[1][1]
    qt2n = -qt2n_neg
    half = FieldExpr.const(0.5)
    mhalf_i = FieldExpr.const(-0.5j)
    x0 = half * (q1n + qt1n)
    x1 = mhalf_i * (q1n - qt1n)
    x2 = half * (q2n + qt2n)
    x3 = mhalf_i * (q2n - qt2n)
    return x0, x1, x2, x3


def pushforward_mu(P: BlockMatrix4, mu: FieldExpr) -> FieldExpr:
    """The mu-field of the congruence transported by the conformal map of
    P: evaluate the transformed twistor section at the preimage point."""
    Pinv = P.inverse()
    x0, x1, x2, x3 = mobius_coordinate_exprs(Pinv)
    pre = {0: x0, 1: x1, 2: x2, 3: x3}
    mu_pre = subs(mu, pre)
    q1_pre, qt1_pre = subs(Q1, pre), subs(QT1, pre)
    q2_pre, qt2_pre = subs(Q2, pre), subs(QT2, pre)
    w = [
        FieldExpr.const(1.0),
        mu_pre,
        q1_pre - mu_pre * qt2_pre,
        q2_pre + mu_pre * qt1_pre,
    ]
    M = P.matrix()
    out0 = FieldExpr.const(0.0)
    out1 = FieldExpr.const(0.0)
    for j in range(4):
        out0 = out0 + FieldExpr.const(M[0, j]) * w[j]
        out1 = out1 + FieldExpr.const(M[1, j]) * w[j]
    return out1 / out0


def pushforward_scalar(P: BlockMatrix4, f: FieldExpr) -> FieldExpr:
    """f composed with the inverse Moebius map (a plain coordinate change)."""
    x0, x1, x2, x3 = mobius_coordinate_exprs(P.inverse())
    return subs(f, {0: x0, 1: x1, 2: x2, 3: x3})
