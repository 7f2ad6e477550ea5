"""Compactification machinery: the Plucker embedding of the standard
chart, quadric coordinates, incidence relations, twistor projections and
the fundamental map.

Projective quadruples/sextuples are normalized so their first component of
maximum modulus equals 1, which is chart-free and stable near w0 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from . import tolerances
from .coords import INFINITY, Point4C, PointLike, to_null


def _normalize(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    scale = mags.max()
    if scale == 0:
        raise ValueError("projective point cannot be the zero vector")
    idx = int(np.argmax(mags >= scale * (1 - 1e-15)))
    return v / v[idx]


@dataclass(frozen=True)
class TwistorPoint:
    w: Tuple[complex, complex, complex, complex]

    @staticmethod
    def of(value) -> "TwistorPoint":
        if isinstance(value, TwistorPoint):
            return value
        a = np.asarray(value, dtype=complex)
        if a.shape != (4,):
            raise ValueError("a twistor point needs 4 homogeneous components")
        return TwistorPoint(tuple(map(complex, _normalize(a))))

    def array(self) -> np.ndarray:
        return np.array(self.w, dtype=complex)

    @property
    def at_infinity_line(self) -> bool:
        """True on CP1_0, the line of alpha-planes at infinity."""
        scale = np.max(np.abs(self.array()))
        return (
            abs(self.w[0]) <= tolerances.TAU_ALG * scale
            and abs(self.w[1]) <= tolerances.TAU_ALG * scale
        )


@dataclass(frozen=True)
class PluckerPoint:
    z: Tuple[complex, ...]  # (z12, z13, z14, z23, z24, z34)

    @staticmethod
    def of(value) -> "PluckerPoint":
        a = np.asarray(value, dtype=complex)
        if a.shape != (6,):
            raise ValueError("a Plucker point needs 6 components")
        return PluckerPoint(tuple(map(complex, _normalize(a))))

    def array(self) -> np.ndarray:
        return np.array(self.z, dtype=complex)

    def quadric_residual(self) -> float:
        z12, z13, z14, z23, z24, z34 = self.z
        return abs(z12 * z34 - z13 * z24 + z14 * z23)


XI = "xi"
XI_TILDE = "xi_tilde"


@dataclass(frozen=True)
class XiPoint:
    xi: Tuple[complex, ...]
    variant: str

    def array(self) -> np.ndarray:
        return np.array(self.xi, dtype=complex)

    def quadric_residual(self) -> float:
        """Residual of the defining quadric: signature (1,5) for the xi
        variant, (2,4) for xi_tilde."""
        x = self.array()
        if self.variant == XI:
            sig = np.array([1, -1, -1, -1, -1, -1])
        else:
            sig = np.array([1, -1, 1, -1, -1, -1])
        return abs(complex(np.sum(sig * x * x)))

    def reality_defect(self) -> float:
        """How far the components are from being all real up to a common
        phase (0 on the compactified real/Minkowski slices)."""
        x = self.array()
        idx = int(np.argmax(np.abs(x)))
        x = x / x[idx]
        return float(np.max(np.abs(x.imag)))


def embed_j(p: PointLike) -> PluckerPoint:
    """Plucker image of the standard chart:
    [1, -qt2, qt1, -q1, -q2, q1 qt1 + q2 qt2]."""
    n = to_null(p)
    return PluckerPoint.of([
        1.0,
        -n.qt2,
        n.qt1,
        -n.q1,
        -n.q2,
        n.q1 * n.qt1 + n.q2 * n.qt2,
    ])


def to_xi(z: PluckerPoint, variant: str = XI) -> XiPoint:
    """Linear change to the quadric-diagonalizing coordinates; the
    xi_tilde variant multiplies xi2 by i and is real on Minkowski slices."""
    z12, z13, z14, z23, z24, z34 = z.z
    xi = np.array([
        z12 + z34,
        z12 - z34,
        z14 - z23,
        1j * (z14 + z23),
        -(z13 + z24),
        -1j * (z13 - z24),
    ])
    if variant == XI_TILDE:
        xi = xi.copy()
        xi[2] = 1j * xi[2]
    elif variant != XI:
        raise ValueError(f"unknown variant {variant!r}")
    return XiPoint(tuple(map(complex, xi)), variant)


def incidence(w, p: PointLike) -> Tuple[complex, complex]:
    """The two incidence residuals (w0 q1 - w1 qt2 - w2, w0 q2 + w1 qt1 - w3)."""
    w = TwistorPoint.of(w).array()
    n = to_null(p)
    return (
        complex(w[0] * n.q1 - w[1] * n.qt2 - w[2]),
        complex(w[0] * n.q2 + w[1] * n.qt1 - w[3]),
    )


def iota(p: PointLike, direction: Sequence[complex]) -> TwistorPoint:
    """Fundamental map: the twistor of the alpha-plane through p with
    direction [w0, w1]."""
    w0, w1 = complex(direction[0]), complex(direction[1])
    if w0 == 0 and w1 == 0:
        raise ValueError("direction [0, 0] is not a point of CP^1")
    n = to_null(p)
    return TwistorPoint.of([
        w0,
        w1,
        w0 * n.q1 - w1 * n.qt2,
        w0 * n.q2 + w1 * n.qt1,
    ])


def translate_twistor(w, a: PointLike) -> np.ndarray:
    """Representative adapted to the slice through a:
    w2' = w2 - w0 a1 + w1 at2,  w3' = w3 - w0 a2 - w1 at1."""
    w = TwistorPoint.of(w).array()
    na = to_null(a)
    return np.array([
        w[0],
        w[1],
        w[2] - w[0] * na.q1 + w[1] * na.qt2,
        w[3] - w[0] * na.q2 - w[1] * na.qt1,
    ])


def pi_a(w, a: PointLike = Point4C(0, 0, 0, 0)) -> Union[Point4C, object]:
    """Intersection of the alpha-plane of w with the real slice through a;
    the CP1 of alpha-planes at infinity maps to the single point INFINITY."""
    wt = translate_twistor(w, a)
    n2 = abs(wt[0]) ** 2 + abs(wt[1]) ** 2
    scale = float(np.max(np.abs(wt)))
    if n2 <= (tolerances.TAU_ALG * scale) ** 2:
        return INFINITY
    q1 = (np.conj(wt[0]) * wt[2] + wt[1] * np.conj(wt[3])) / n2
    q2 = (np.conj(wt[0]) * wt[3] - wt[1] * np.conj(wt[2])) / n2
    offset = np.array([q1.real, q1.imag, q2.real, q2.imag], dtype=complex)
    return Point4C.of(Point4C.of(a).array() + offset)


def h_form(v: Sequence[complex], w: Sequence[complex]) -> complex:
    """The (2,2) Hermitian form h(v, w) = v0 conj(w2) + v1 conj(w3)
    + v2 conj(w0) + v3 conj(w1) whose null set is N^5."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return complex(
        v[0] * np.conj(w[2]) + v[1] * np.conj(w[3])
        + v[2] * np.conj(w[0]) + v[3] * np.conj(w[1])
    )


def in_N5(w, a: PointLike = Point4C(0, 0, 0, 0)) -> float:
    """Signed h-value of the a-translated representative; zero iff the
    alpha-plane meets the R3 slice through a, and its sign separates the
    two open orbits of CP^3."""
    wt = translate_twistor(w, a)
    scale = float(np.max(np.abs(wt)))
    return float(np.real(h_form(wt / scale, wt / scale)))


def beta_swap(p: PointLike) -> Point4C:
    """The q2 <-> qt2 involution under which beta-planes take the standard
    alpha-plane parametrization (x3 -> -x3)."""
    p = Point4C.of(p)
    return Point4C(p.x0, p.x1, p.x2, -p.x3)
