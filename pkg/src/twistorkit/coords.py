"""Points of C^4, null coordinates, real slices, flat metrics and the
2x2 matrix forms of points.

Conventions:
  * Cartesian coordinates (x0, x1, x2, x3), all complex.
  * Null coordinates q1 = x0 + i x1, qt1 = x0 - i x1,
                     q2 = x2 + i x3, qt2 = x2 - i x3.
  * The Minkowski slice through p is parametrized by
    (t, x1, x2, x3) -> (p0 - i t, p1 + x1, p2 + x2, p3 + x3),
    so the time coordinate satisfies x0 = p0 - i t.
  * The point at infinity of the Riemann sphere is the sentinel
    ``INFINITY`` below, never an IEEE Inf.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np

from . import tolerances


class _Infinity:
    """Point at infinity of C u {oo}; a unique sentinel."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


@dataclass(frozen=True)
class Point4C:
    x0: complex
    x1: complex
    x2: complex
    x3: complex

    def array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3], dtype=complex)

    @staticmethod
    def of(value) -> "Point4C":
        if isinstance(value, Point4C):
            return value
        a = np.asarray(value, dtype=complex)
        if a.shape != (4,):
            raise ValueError("a point of C^4 needs exactly 4 components")
        return Point4C(*map(complex, a))

    def __add__(self, other) -> "Point4C":
        return Point4C.of(self.array() + Point4C.of(other).array())

    def __sub__(self, other) -> "Point4C":
        return Point4C.of(self.array() - Point4C.of(other).array())


ORIGIN = Point4C(0, 0, 0, 0)

PointLike = Union[Point4C, Sequence[complex], np.ndarray]


@dataclass(frozen=True)
class NullCoords:
    q1: complex
    qt1: complex
    q2: complex
    qt2: complex

    def array(self) -> np.ndarray:
        return np.array([self.q1, self.qt1, self.q2, self.qt2], dtype=complex)


def to_null(p: PointLike) -> NullCoords:
    p = Point4C.of(p)
    return NullCoords(
        q1=p.x0 + 1j * p.x1,
        qt1=p.x0 - 1j * p.x1,
        q2=p.x2 + 1j * p.x3,
        qt2=p.x2 - 1j * p.x3,
    )


def from_null(n: NullCoords) -> Point4C:
    return Point4C(
        x0=(n.q1 + n.qt1) / 2,
        x1=(n.q1 - n.qt1) / (2j),
        x2=(n.q2 + n.qt2) / 2,
        x3=(n.q2 - n.qt2) / (2j),
    )


class SliceKind(Enum):
    R4 = "R4"
    R3 = "R3"
    M4 = "M4"
    C4 = "C4"


_NPARAMS = {SliceKind.R4: 4, SliceKind.R3: 3, SliceKind.M4: 4, SliceKind.C4: 4}


@dataclass(frozen=True)
class SliceSpec:
    """An affine real (or complex, for C4) slice of C^4.

    The slice is the image of u -> basepoint + M u where the columns of M
    are the coordinate directions of the slice parameters:

      R4: u = (x0, x1, x2, x3) real offsets,
      R3: u = (x1, x2, x3) real offsets (x0 frozen at the basepoint),
      M4: u = (t, x1, x2, x3) real, with the x0 direction entering as -i t,
      C4: u = the four complex coordinates themselves (basepoint added).
    """

    kind: SliceKind
    basepoint: Point4C = ORIGIN

    @property
    def nparams(self) -> int:
        return _NPARAMS[self.kind]

    @property
    def is_real(self) -> bool:
        return self.kind is not SliceKind.C4

    def direction_matrix(self) -> np.ndarray:
        """4 x nparams complex matrix M with columns d(point)/d(u_j)."""
        if self.kind is SliceKind.R4 or self.kind is SliceKind.C4:
            return np.eye(4, dtype=complex)
        if self.kind is SliceKind.R3:
            m = np.zeros((4, 3), dtype=complex)
            m[1, 0] = m[2, 1] = m[3, 2] = 1.0
            return m
        m = np.eye(4, dtype=complex)
        m[0, 0] = -1j  # x0 = p0 - i t
        return m

    def point(self, u: Sequence[complex]) -> Point4C:
        u = np.asarray(u, dtype=complex)
        if u.shape != (self.nparams,):
            raise ValueError(
                f"slice kind {self.kind.value} expects {self.nparams} parameters, got {u.shape}"
            )
        if self.is_real and np.max(np.abs(u.imag)) > 0:
            raise ValueError("real slice parameters must be real")
        return Point4C.of(self.basepoint.array() + self.direction_matrix() @ u)


def slice_point(spec: SliceSpec, u: Sequence[float]) -> Point4C:
    return spec.point(u)


# -- metrics -----------------------------------------------------------------

_SIGNATURES = {
    "euclid4": np.array([1.0, 1.0, 1.0, 1.0]),
    "complex4": np.array([1.0, 1.0, 1.0, 1.0]),
    "minkowski4": np.array([-1.0, 1.0, 1.0, 1.0]),
    "euclid3": np.array([1.0, 1.0, 1.0]),
}


def metric_signature(kind: str) -> np.ndarray:
    try:
        return _SIGNATURES[kind]
    except KeyError:
        raise ValueError(f"unknown metric kind {kind!r}") from None


def metric_pair(kind: str, v: Sequence[complex], w: Sequence[complex]) -> complex:
    """Complex-bilinear symmetric pairing for the requested flat metric.

    'euclid4'/'complex4' pair 4-vectors with + + + +, 'minkowski4' pairs
    (t, x1, x2, x3) components with - + + +, 'euclid3' pairs 3-vectors.
    """
    sig = metric_signature(kind)
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if v.shape != sig.shape or w.shape != sig.shape:
        raise ValueError(f"metric {kind!r} expects vectors of shape {sig.shape}")
    return complex(np.sum(sig * v * w))


def metric_null_coords(v: NullCoords, w: NullCoords) -> complex:
    """g^C = dq1 dqt1 + dq2 dqt2 evaluated on null components."""
    return complex(
        (v.q1 * w.qt1 + v.qt1 * w.q1 + v.q2 * w.qt2 + v.qt2 * w.q2) / 2
    )


# -- stereographic projection from (-1, 0, 0) --------------------------------

def stereo_inv(u) -> np.ndarray:
    """Inverse stereographic projection C u {oo} -> S^2 c R^3."""
    if u is INFINITY:
        return np.array([-1.0, 0.0, 0.0])
    u = complex(u)
    n = 1.0 + abs(u) ** 2
    return np.array([(1.0 - abs(u) ** 2) / n, 2.0 * u.real / n, 2.0 * u.imag / n])


def stereo(U: Sequence[float]):
    """Stereographic projection S^2 -> C u {oo}; the pole (-1,0,0) maps to oo."""
    U = np.asarray(U, dtype=float)
    if U.shape != (3,):
        raise ValueError("stereo expects a 3-vector")
    if abs(np.linalg.norm(U) - 1.0) > 1e-6:
        raise ValueError("stereo expects a unit vector")
    if 1.0 + U[0] <= tolerances.TAU_ALG:
        return INFINITY
    return complex(U[1], U[2]) / (1.0 + U[0])


# -- 2x2 matrix forms ---------------------------------------------------------

class QClass(Enum):
    QUATERNIONIC = "Quaternionic"
    SKEW_HERMITIAN = "SkewHermitian"
    NEITHER = "Neither"


@dataclass(frozen=True)
class QMatrix:
    entries: np.ndarray  # 2x2 complex

    @staticmethod
    def of(m) -> "QMatrix":
        a = np.asarray(m, dtype=complex)
        if a.shape != (2, 2):
            raise ValueError("QMatrix needs a 2x2 matrix")
        return QMatrix(a)


def qmatrix_of_point(p: PointLike) -> QMatrix:
    """Q = [[q1, -qt2], [q2, qt1]] for the point with those null coordinates."""
    n = to_null(p)
    return QMatrix(np.array([[n.q1, -n.qt2], [n.q2, n.qt1]], dtype=complex))


def point_of_qmatrix(q: QMatrix) -> Point4C:
    m = q.entries
    return from_null(NullCoords(q1=m[0, 0], qt1=m[1, 1], q2=m[1, 0], qt2=-m[0, 1]))


@dataclass(frozen=True)
class QClassification:
    classes: tuple
    point: Point4C
    minkowski_tuple: tuple | None  # (t, x1, x2, x3) when skew-Hermitian


def classify_qmatrix(q: QMatrix, tol: float | None = None) -> QClassification:
    """Decide whether Q has the R^4 (quaternionic) or M^4 (skew-Hermitian)
    form and recover the represented point.

    Q = [[q1, -qt2], [q2, qt1]]; quaternionic means qt_i = conj(q_i)
    (a real point), skew-Hermitian means Q* = -Q (a Minkowski point
    x0 = -i t).  The zero matrix belongs to both classes.
    """
    tol = tolerances.TAU_ALG if tol is None else tol
    m = q.entries
    classes = []
    if (
        abs(m[1, 1] - np.conj(m[0, 0])) <= tol
        and abs(m[0, 1] + np.conj(m[1, 0])) <= tol
    ):
        classes.append(QClass.QUATERNIONIC)
    if np.max(np.abs(m + np.conj(m.T))) <= tol:
        classes.append(QClass.SKEW_HERMITIAN)
    point = point_of_qmatrix(q)
    mink = None
    if QClass.SKEW_HERMITIAN in classes:
        # x0 = -i t  =>  t = i x0
        t = 1j * point.x0
        mink = (t.real, point.x1.real, point.x2.real, point.x3.real)
    if not classes:
        classes.append(QClass.NEITHER)
    return QClassification(tuple(classes), point, mink)
