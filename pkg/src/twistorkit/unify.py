"""The pointwise dictionary between alpha-planes, Hermitian structures,
unit vector fields and null directions, and the projection/extension
between conformal foliations of an R3 slice and shear-free congruences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .coords import (
    SliceKind,
    SliceSpec,
    stereo_inv,
)
from .fieldexpr import BranchSign, FieldExpr, SingularPoint, eval_jet, eval_value


@dataclass
class Frame:
    """Orthonormal frame (e0, e1, e2, e3) of a real 4-slice adapted to a
    direction pair [w0, w1]: e0 = d/dx0, e1 = U, J e0 = e1, J e2 = e3."""

    pair: tuple
    e0: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    U: np.ndarray       # unit 3-vector, the spatial part of e1
    J: np.ndarray       # 4x4 real matrix
    alpha_basis: np.ndarray  # rows e0 + i e1, e2 + i e3
    plane_basis: np.ndarray  # the defining null-coordinate spanning pair


def alpha_plane_basis(pair: Sequence[complex]) -> np.ndarray:
    """Spanning pair of the alpha-plane in Cartesian tangent components:
    w0 d/dqt1 - w1 d/dq2 and w0 d/dqt2 + w1 d/dq1."""
    w0, w1 = complex(pair[0]), complex(pair[1])
    d_qt1 = 0.5 * np.array([1, 1j, 0, 0])
    d_q1 = 0.5 * np.array([1, -1j, 0, 0])
    d_q2 = 0.5 * np.array([0, 0, 1, -1j])
    d_qt2 = 0.5 * np.array([0, 0, 1, 1j])
    return np.vstack([w0 * d_qt1 - w1 * d_q2, w0 * d_qt2 + w1 * d_q1])


def mu_to_frame(pair: Sequence[complex]) -> Frame:
    """Adapted orthonormal frame for the homogeneous direction [w0, w1]
    (mu = w1/w0, u = i mu, U = stereo_inv(u); mu = infinity is the pair
    [0, 1])."""
    w = np.asarray(pair, dtype=complex)
    if w.shape != (2,):
        raise ValueError("mu_to_frame expects a homogeneous pair [w0, w1]")
    norm2 = float(abs(w[0]) ** 2 + abs(w[1]) ** 2)
    if norm2 == 0:
        raise ValueError("[0, 0] is not a direction")
    w0, w1 = w
    U = np.array([
        (abs(w0) ** 2 - abs(w1) ** 2) / norm2,
        -2 * (w1 * np.conj(w0)).imag / norm2,
        2 * (w1 * np.conj(w0)).real / norm2,
    ])
    e0 = np.array([1.0, 0.0, 0.0, 0.0])
    e1 = np.concatenate([[0.0], U])
    E = np.array([
        0.0,
        -2j * w0 * w1 / norm2,
        (w0 ** 2 + w1 ** 2) / norm2,
        1j * (w0 ** 2 - w1 ** 2) / norm2,
    ])
    e2 = E.real.copy()
    e3 = E.imag.copy()
    J = (np.outer(e1, e0) - np.outer(e0, e1)
         + np.outer(e3, e2) - np.outer(e2, e3))
    return Frame(
        pair=(complex(w0), complex(w1)),
        e0=e0, e1=e1, e2=e2, e3=e3, U=U, J=J,
        alpha_basis=np.vstack([e0 + 1j * e1, e2 + 1j * e3]),
        plane_basis=alpha_plane_basis(pair),
    )


def span_distance(basis_a: np.ndarray, basis_b: np.ndarray) -> float:
    """Numerical rank test: 0 iff the two row spans agree."""
    stacked = np.vstack([basis_a, basis_b])
    s = np.linalg.svd(stacked, compute_uv=False)
    return float(s[2] / s[0]) if s[0] > 0 else 0.0


# -- projection and extension --------------------------------------------------

class NoPreimage(Exception):
    """No backward null ray from the query point hits the slice."""


class NonUnique(Exception):
    """Newton runs from perturbed seeds disagree: caustic proximity."""


class UField:
    """A unit tangent field on an R3 slice, evaluated from expressions for
    either mu (stereographic route) or the three components of U."""

    def __init__(self, evaluate: Callable[[np.ndarray], np.ndarray]):
        self._evaluate = evaluate

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        return self._evaluate(np.asarray(x, dtype=float))

    @staticmethod
    def from_mu(mu: FieldExpr, slc: SliceSpec,
                branch: BranchSign = BranchSign.PLUS) -> "UField":
        if slc.kind is not SliceKind.R3:
            raise ValueError("from_mu expects an R3 slice")

        def evaluate(x: np.ndarray) -> np.ndarray:
            m = eval_value(mu, slc, x.astype(complex), branch)
            return stereo_inv(1j * m)

        return UField(evaluate)

    @staticmethod
    def from_first_integral(f: FieldExpr, slc: SliceSpec,
                            branch: BranchSign = BranchSign.PLUS) -> "UField":
        """Unit positive tangent of the foliation by level curves of a
        horizontally conformal f = f1 + i f2: U = grad f1 x grad f2,
        normalized."""
        if slc.kind is not SliceKind.R3:
            raise ValueError("from_first_integral expects an R3 slice")

        def evaluate(x: np.ndarray) -> np.ndarray:
            jet = eval_jet(f, slc, x.astype(complex), branch)
            g1 = jet.grad.real
            g2 = jet.grad.imag
            u = np.cross(g1, g2)
            n = np.linalg.norm(u)
            if n < 1e-12:
                raise SingularPoint("vanishing grad f1 x grad f2")
            return u / n

        return UField(evaluate)

    @staticmethod
    def from_components(U: Sequence[FieldExpr], slc: SliceSpec,
                        branch: BranchSign = BranchSign.PLUS) -> "UField":
        if slc.kind not in (SliceKind.R3, SliceKind.M4):
            raise ValueError("component fields live on R3 or M4 slices")

        def evaluate(x: np.ndarray) -> np.ndarray:
            vals = np.array([
                eval_value(c, slc, x.astype(complex), branch) for c in U
            ])
            if np.max(np.abs(vals.imag)) > 1e-9:
                raise SingularPoint("U not real at this point")
            return vals.real

        return UField(evaluate)


def project_to_slice(mu: FieldExpr, slc: SliceSpec,
                     branch: BranchSign = BranchSign.PLUS) -> UField:
    """U = stereo_inv(i mu) restricted to the R3 slice."""
    return UField.from_mu(mu, slc, branch)


def extend_from_slice(ufield: UField, t: float, x: Sequence[float],
                      tol: float = 1e-12, max_iter: int = 60):
    """Transport the slice foliation along its null rays: solve
    x = y + t U(y) for the foot point y on the slice and return (U(y), y).

    Newton iteration with finite-difference Jacobian; a second run from a
    perturbed seed detects non-uniqueness near caustics.
    """
    x = np.asarray(x, dtype=float)

    def solve(seed: np.ndarray) -> np.ndarray:
        y = seed.copy()
        h = 1e-7
        for _ in range(max_iter):
            try:
                g = y + t * ufield(y) - x
            except SingularPoint as exc:
                raise NoPreimage(str(exc)) from exc
            if np.linalg.norm(g) < tol:
                return y
            jac = np.eye(3)
            for j in range(3):
                dy = np.zeros(3)
                dy[j] = h
                jac[:, j] += t * (ufield(y + dy) - ufield(y - dy)) / (2 * h)
            try:
                step = np.linalg.solve(jac, g)
            except np.linalg.LinAlgError as exc:
                raise NoPreimage("singular Newton system") from exc
            y = y - step
        raise NoPreimage("Newton did not converge")

    if t == 0:
        return ufield(x), x
    foot = solve(x)
    rng = np.random.default_rng(7)
    foot2 = solve(x + 1e-3 * rng.standard_normal(3))
    if np.linalg.norm(foot - foot2) > 1e-6:
        raise NonUnique("perturbed Newton runs disagree")
    return ufield(foot), foot
