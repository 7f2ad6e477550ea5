"""Numerical certificates for the defining PDEs: horizontal conformality,
the three integrability systems (alpha-plane / Hermitian / shear-free),
harmonic morphism residuals on flat 4-spaces, hyperbolic harmonicity, and
the twist/shear/expansion tensors of a null congruence.

Every check draws seeded samples from a box on a slice, evaluates the
residuals with exact jets, and returns a ResidualReport.  Samples that hit
a singular or branch locus are rejected and redrawn.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np

from . import tolerances
from .coords import (
    INFINITY,
    SliceKind,
    SliceSpec,
    stereo,
)
from .fieldexpr import (
    BranchSign,
    FieldExpr,
    SingularPoint,
    eval_jet,
    grad_square,
    laplacian,
    null_derivative,
)


class EmptyDomain(Exception):
    """Every drawn sample hit a singular locus."""


class NotSubmersive(Exception):
    """dphi vanished where a submersion was required."""


@dataclass(frozen=True)
class SamplerSpec:
    """Seeded uniform sampling over a box of slice parameters.

    ``box`` has one (lo, hi) pair per slice parameter.  On the C4 slice the
    same pair bounds both the real and the imaginary part.
    """

    slc: SliceSpec
    box: Tuple[Tuple[float, float], ...]
    samples: int = 500
    seed: int = 42

    def __post_init__(self):
        if len(self.box) != self.slc.nparams:
            raise ValueError(
                f"box needs {self.slc.nparams} ranges for slice kind {self.slc.kind.value}"
            )

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        u = rng.uniform(lo, hi)
        if self.slc.kind is SliceKind.C4:
            return u + 1j * rng.uniform(lo, hi)
        return u.astype(complex)


@dataclass
class ResidualReport:
    condition: str
    seed: int
    box: Tuple[Tuple[float, float], ...]
    samples: int
    max_abs: float
    mean_abs: float
    tol: float
    failures: List[Tuple[tuple, complex]] = field(default_factory=list)
    rejected: int = 0

    @property
    def passed(self) -> bool:
        return self.max_abs <= self.tol

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "seed": self.seed,
            "box": [list(b) for b in self.box],
            "samples": self.samples,
            "max_abs": self.max_abs,
            "mean_abs": self.mean_abs,
            "tol": self.tol,
            "pass": self.passed,
            "rejected": self.rejected,
            "failures": [
                {
                    "point": [[z.real, z.imag] for z in pt],
                    "value": [val.real, val.imag],
                }
                for pt, val in self.failures
            ],
        }


_MAX_REJECT_FACTOR = 200


def run_check(
    condition: str,
    sampler: SamplerSpec,
    residual_fn: Callable[[np.ndarray], Sequence[complex]],
    tol: float | None = None,
    max_failures: int = 20,
) -> ResidualReport:
    """Sample the box, evaluate residual_fn at each accepted point and
    aggregate |residual| statistics."""
    tol = tolerances.TAU_ALG if tol is None else tol
    rng = np.random.default_rng(sampler.seed)
    values: List[float] = []
    failures: List[Tuple[tuple, complex]] = []
    rejected = 0
    budget = _MAX_REJECT_FACTOR * sampler.samples
    accepted = 0
    while accepted < sampler.samples:
        if rejected >= budget:
            break
        u = sampler.draw(rng)
        try:
            res = residual_fn(u)
        except SingularPoint:
            rejected += 1
            continue
        accepted += 1
        point = tuple(complex(z) for z in sampler.slc.point(u).array())
        for r in res:
            a = abs(r)
            values.append(a)
            if a > tol and len(failures) < max_failures:
                failures.append((point, complex(r)))
    if not values:
        raise EmptyDomain(f"no usable samples for condition {condition!r}")
    arr = np.array(values)
    return ResidualReport(
        condition=condition,
        seed=sampler.seed,
        box=sampler.box,
        samples=accepted,
        max_abs=float(arr.max()),
        mean_abs=float(arr.mean()),
        tol=tol,
        failures=failures,
        rejected=rejected,
    )


# -- horizontally conformal on R^3 --------------------------------------------

def check_hc3(f: FieldExpr, sampler: SamplerSpec, tol: float | None = None,
              branch: BranchSign = BranchSign.PLUS) -> ResidualReport:
    """sum_i (df/dx_i)^2 = 0 over the R3 slice (i = 1, 2, 3)."""
    if sampler.slc.kind is not SliceKind.R3:
        raise ValueError("check_hc3 samples an R3 slice")

    def residual(u):
        return [grad_square(f, sampler.slc, u, "euclid3", branch)]

    return run_check("hc3", sampler, residual, tol)


# -- integrability systems for mu ---------------------------------------------

def _mu_pair_residuals(mu: FieldExpr, slc: SliceSpec, u, branch) -> List[complex]:
    jet = eval_jet(mu, slc, u, branch)
    m = jet.value
    k = slc.kind
    if k is SliceKind.C4:
        r1 = null_derivative(jet, k, "qt1") - m * null_derivative(jet, k, "q2")
        r2 = null_derivative(jet, k, "qt2") + m * null_derivative(jet, k, "q1")
    elif k is SliceKind.R4:
        r1 = null_derivative(jet, k, "q1bar") - m * null_derivative(jet, k, "q2")
        r2 = null_derivative(jet, k, "q2bar") + m * null_derivative(jet, k, "q1")
    elif k is SliceKind.M4:
        r1 = null_derivative(jet, k, "v") + 1j * m * null_derivative(jet, k, "q2")
        r2 = null_derivative(jet, k, "q2bar") - 1j * m * null_derivative(jet, k, "w")
    else:  # pragma: no cover
        raise AssertionError(k)
    return [r1, r2]


def check_alpha(mu: FieldExpr, sampler: SamplerSpec, tol: float | None = None,
                branch: BranchSign = BranchSign.PLUS) -> ResidualReport:
    """Integrability of the alpha-plane distribution represented by mu
    (holomorphic pair) on a C4 box."""
    if sampler.slc.kind is not SliceKind.C4:
        raise ValueError("check_alpha samples a C4 box")
    return run_check(
        "alpha", sampler, lambda u: _mu_pair_residuals(mu, sampler.slc, u, branch), tol
    )


def check_hermitian(mu: FieldExpr, sampler: SamplerSpec, tol: float | None = None,
                    branch: BranchSign = BranchSign.PLUS) -> ResidualReport:
    """Integrability of the almost Hermitian structure represented by mu on
    an R4 slice."""
    if sampler.slc.kind is not SliceKind.R4:
        raise ValueError("check_hermitian samples an R4 slice")
    return run_check(
        "hermitian", sampler, lambda u: _mu_pair_residuals(mu, sampler.slc, u, branch), tol
    )


def check_sfr(mu: FieldExpr, sampler: SamplerSpec, tol: float | None = None,
              branch: BranchSign = BranchSign.PLUS) -> ResidualReport:
    """Shear-free ray congruence condition for mu on a Minkowski slice,
    written in v = x1 + t, w = x1 - t."""
    if sampler.slc.kind is not SliceKind.M4:
        raise ValueError("check_sfr samples an M4 slice")
    return run_check(
        "sfr", sampler, lambda u: _mu_pair_residuals(mu, sampler.slc, u, branch), tol
    )


# -- harmonic morphism residuals ----------------------------------------------

_HM_KINDS = {"euclid4", "minkowski4", "complex4"}


def check_harmonic_morphism(phi: FieldExpr, kind: str, sampler: SamplerSpec,
                            tol: float | None = None,
                            branch: BranchSign = BranchSign.PLUS) -> ResidualReport:
    """Laplacian and <grad, grad> residuals, both reported."""
    if kind not in _HM_KINDS:
        raise ValueError(f"kind must be one of {sorted(_HM_KINDS)}")

    def residual(u):
        return [
            laplacian(phi, sampler.slc, u, kind, branch),
            grad_square(phi, sampler.slc, u, kind, branch),
        ]

    return run_check(f"hm-{kind}", sampler, residual, tol)


def check_hyperbolic_hm(phi: FieldExpr, sampler: SamplerSpec,
                        a0: complex | None = None,
                        tol: float | None = None,
                        branch: BranchSign = BranchSign.PLUS) -> ResidualReport:
    """Hyperbolic harmonic morphism residuals on an R4 slice minus its
    boundary R3 slice:

        (x0 - a0) * sum_i d^2 phi / dx_i^2  -  2 dphi/dx0 = 0
        sum_i (dphi/dx_i)^2 = 0

    where a0 defaults to the x0 coordinate of the slice basepoint (so the
    weight is exactly the first slice parameter).  Sampling boxes must keep
    that parameter away from 0.
    """
    if sampler.slc.kind is not SliceKind.R4:
        raise ValueError("check_hyperbolic_hm samples an R4 slice")
    a0c = sampler.slc.basepoint.x0 if a0 is None else complex(a0)
    base_x0 = sampler.slc.basepoint.x0

    def residual(u):
        jet = eval_jet(phi, sampler.slc, u, branch)
        weight = base_x0 + u[0] - a0c
        lap = complex(np.trace(jet.hess))
        return [weight * lap - 2 * jet.grad[0], complex(np.sum(jet.grad ** 2))]

    return run_check("hyperbolic", sampler, residual, tol)


def check_boundary_orthogonality(phi: FieldExpr, sampler: SamplerSpec,
                                 tol: float | None = None,
                                 branch: BranchSign = BranchSign.PLUS) -> ResidualReport:
    """dphi/dx0 sampled on an R3 slice (holomorphic derivative normal to
    the slice; phi must be conj-free)."""
    if sampler.slc.kind is not SliceKind.R3:
        raise ValueError("check_boundary_orthogonality samples an R3 slice")
    if not phi.is_holomorphic():
        raise ValueError("boundary orthogonality needs a holomorphic phi")
    c4 = SliceSpec(SliceKind.C4)

    def residual(u):
        p = sampler.slc.point(u)
        jet = eval_jet(phi, c4, p.array(), branch)
        return [jet.grad[0]]

    return run_check("orthogonality", sampler, residual, tol)


# -- congruence tensors --------------------------------------------------------

@dataclass
class CongruenceTensors:
    twist: float
    shear_norm: float
    expansion: float
    screen: np.ndarray  # 2x3, the screen basis used


def _screen_basis(Uv: np.ndarray) -> np.ndarray:
    """Orthonormal (e2, e3) spanning U-perp in the R3 slice, oriented so
    that (U, e2, e3) is positively oriented."""
    axes = np.eye(3)
    a = axes[int(np.argmin(np.abs(Uv)))]
    e2 = a - np.dot(a, Uv) * Uv
    n = np.linalg.norm(e2)
    if n < 1e-12:
        raise ValueError("degenerate screen basis")
    e2 = e2 / n
    e3 = np.cross(Uv, e2)
    return np.vstack([e2, e3])


def congruence_tensors(U: Sequence[FieldExpr], slc: SliceSpec, u,
                       branch: BranchSign = BranchSign.PLUS) -> CongruenceTensors:
    """Twist, shear and expansion of the null congruence w = d/dt + U at a
    point of a Minkowski slice.

    U is a triple of expressions whose restriction to the slice is a real
    unit vector field.  With B(X, Y) = g(D_X w, Y) on the screen space,
    twist = (B(e3,e2) - B(e2,e3))/2, the shear is the trace-free symmetric
    part of -B and the expansion its trace.
    """
    if slc.kind is not SliceKind.M4:
        raise ValueError("congruence tensors live on a Minkowski slice")
    jets = [eval_jet(c, slc, u, branch) for c in U]
    Uv = np.array([j.value for j in jets])
    if np.max(np.abs(Uv.imag)) > 1e-8:
        raise ValueError("U is not real on the slice")
    Uv = Uv.real
    if abs(np.linalg.norm(Uv) - 1.0) > tolerances.TAU_ALG * 10:
        raise ValueError("U is not a unit vector")
    # spatial Jacobian dU_i/dx_j (parameters are (t, x1, x2, x3))
    J = np.array([j.grad[1:4] for j in jets])
    if np.max(np.abs(J.imag)) > 1e-8:
        raise ValueError("dU is not real on the slice")
    J = J.real
    screen = _screen_basis(Uv)
    e2, e3 = screen

    def B(x, y):
        return float(np.dot(J @ x, y))

    twist = 0.5 * (B(e3, e2) - B(e2, e3))
    A = -np.array([[B(e2, e2), 0.5 * (B(e2, e3) + B(e3, e2))],
                   [0.5 * (B(e2, e3) + B(e3, e2)), B(e3, e3)]])
    expansion = float(np.trace(A))
    shear = A - 0.5 * expansion * np.eye(2)
    return CongruenceTensors(
        twist=twist,
        shear_norm=float(np.linalg.norm(shear)),
        expansion=expansion,
        screen=screen,
    )


def check_shear(U: Sequence[FieldExpr], sampler: SamplerSpec,
                tol: float | None = None,
                branch: BranchSign = BranchSign.PLUS) -> ResidualReport:
    """Shear-tensor norm of the congruence w = d/dt + U sampled over a
    Minkowski box (every sampled point lies on some ray, so shear-freeness
    of the congruence means this vanishes identically)."""
    if sampler.slc.kind is not SliceKind.M4:
        raise ValueError("check_shear samples an M4 slice")

    def residual(u):
        ct = congruence_tensors(U, sampler.slc, u, branch)
        return [complex(ct.shear_norm)]

    return run_check("shear", sampler, residual, tol)


# -- shear-free congruence from a harmonic morphism ----------------------------

@dataclass
class SfrFromHm:
    pairs: List[tuple]          # homogeneous [w0, w1] pairs, one per null direction
    degenerate: bool
    kernel_dim: int

    def mu_values(self):
        return [INFINITY if abs(w0) <= abs(w1) * 1e-14 else w1 / w0
                for (w0, w1) in self.pairs]


def _mu_pair_of_direction(X: np.ndarray) -> tuple:
    """Homogeneous [w0, w1] with U = stereo_inv(i mu) for the null vector
    X = (X_t, X_vec), normalized to d/dt + U."""
    if abs(X[0]) < 1e-13:
        raise ValueError("null direction with vanishing time component")
    Uv = X[1:] / X[0]
    uval = stereo(Uv / np.linalg.norm(Uv))
    if uval is INFINITY:
        return (0.0, 1.0)
    return (1.0, complex(-1j * uval))


def sfr_from_hm(phi: FieldExpr, slc: SliceSpec, u,
                branch: BranchSign = BranchSign.PLUS) -> SfrFromHm:
    """Null direction(s) inside ker dphi at a Minkowski point, as
    homogeneous mu-pairs.

    A submersive harmonic morphism has a 2-dimensional fibre plane whose
    null directions each generate a shear-free congruence; a degenerate
    point (rank-1 dphi) has ker dphi = W-perp with a unique null W, which
    is detected and returned.
    """
    if slc.kind is not SliceKind.M4:
        raise ValueError("sfr_from_hm works on a Minkowski slice")
    jet = eval_jet(phi, slc, u, branch)
    g = jet.grad  # d phi / d(t, x1, x2, x3)
    scale = np.max(np.abs(g))
    if scale < tolerances.TAU_BRANCH:
        raise NotSubmersive("dphi ~ 0")
    rows = np.vstack([g.real, g.imag]) / scale
    _, s, vt = np.linalg.svd(rows)
    rank = int(np.sum(s > 1e-9))
    eta = np.array([-1.0, 1.0, 1.0, 1.0])

    def mink(a, b):
        return float(np.sum(eta * a * b))

    if rank <= 1:
        r = vt[0]  # unit covector spanning the row space
        W = eta * r  # raise the index
        if abs(mink(W, W)) > 1e-8:
            raise ValueError("rank-1 dphi with non-null dual direction")
        return SfrFromHm([_mu_pair_of_direction(W)], degenerate=True, kernel_dim=3)

    k1, k2 = vt[2], vt[3]
    a = mink(k2, k2)
    b = 2 * mink(k1, k2)
    c = mink(k1, k1)
    directions: List[np.ndarray] = []
    if abs(a) < 1e-12:
        # k2 itself is null; the finite root handles the other direction
        directions.append(k2)
        if abs(b) > 1e-12:
            directions.append(k1 + (-c / b) * k2)
    else:
        disc = b * b - 4 * a * c
        if disc < -1e-10:
            raise ValueError("fibre plane contains no null direction")
        sq = np.sqrt(max(disc, 0.0))
        for root in ((-b + sq) / (2 * a), (-b - sq) / (2 * a)):
            directions.append(k1 + root * k2)
    pairs = []
    for X in directions:
        pair = _mu_pair_of_direction(X)
        if not any(_pairs_close(pair, q) for q in pairs):
            pairs.append(pair)
    pairs.sort(key=_pair_sort_key)
    if branch is BranchSign.MINUS:
        pairs = list(reversed(pairs))
    return SfrFromHm(pairs, degenerate=False, kernel_dim=2)


def _pairs_close(p, q, tol=1e-8) -> bool:
    a = np.array(p, dtype=complex)
    b = np.array(q, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    ip = np.vdot(a, b)
    return abs(abs(ip) - 1.0) < tol


def _pair_sort_key(p):
    w0, w1 = p
    if abs(w0) < 1e-14:
        return (1, 0.0, 0.0)
    m = complex(w1) / complex(w0)
    return (0, m.real, m.imag)
