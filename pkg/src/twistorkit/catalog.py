"""The worked-example catalog: every closed-form field, surface, tangent
field and default sampling box used by the verification sweeps, the
tracer and the CLI.

Branch bookkeeping: each entry's expressions are built with one verified
sign pairing (recorded in ``notes``); the other sign is available through
the BranchSign argument of the underlying constructors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .coords import Point4C, SliceKind, SliceSpec
from .fieldexpr import (
    BranchSign,
    FieldExpr,
    I,
    Q1,
    Q2,
    QT1,
    QT2,
    T,
    X0,
    X1,
    X2,
    X3,
    eval_value,
    sqrt,
)
from .hyperbolic import chart_for
from .kerr import TwistorSurface
from .residuals import (
    ResidualReport,
    SamplerSpec,
    check_alpha,
    check_boundary_orthogonality,
    check_harmonic_morphism,
    check_hc3,
    check_hermitian,
    check_hyperbolic_hm,
    check_sfr,
    check_shear,
)
from .unify import UField

DEFAULT_SEED = 42

Box = Tuple[Tuple[float, float], ...]

_DEFAULT_BOXES: Dict[str, Tuple[SliceKind, Box]] = {
    "hc3": (SliceKind.R3, ((0.3, 1.2),) * 3),
    "alpha": (SliceKind.C4, ((0.25, 1.0),) * 4),
    "hermitian": (SliceKind.R4, ((0.3, 1.2),) * 4),
    "sfr": (SliceKind.M4, ((0.1, 0.45), (0.3, 1.2), (0.3, 1.2), (0.3, 1.2))),
    "hm-euclid4": (SliceKind.R4, ((0.3, 1.2),) * 4),
    "hm-minkowski4": (SliceKind.M4, ((0.1, 0.45), (0.3, 1.2), (0.3, 1.2), (0.3, 1.2))),
    "cxhm": (SliceKind.C4, ((0.25, 1.0),) * 4),
    "hyperbolic": (SliceKind.R4, ((0.25, 1.2),) * 4),
    "orthogonality": (SliceKind.R3, ((0.3, 1.2),) * 3),
    "shear": (SliceKind.M4, ((0.1, 0.45), (0.3, 1.2), (0.3, 1.2), (0.3, 1.2))),
}

# inside-the-cone box for the circle-based congruences: x2^2 + x3^2 >= t^2 + 0.1
_CONE_BOX: Box = ((0.1, 0.45), (0.3, 1.2), (0.5, 1.2), (0.5, 1.2))


@dataclass
class TraceSpec:
    plane: Tuple[str, str]                      # projection axes for figures
    default_t: float
    default_leaves: Tuple[Tuple[float, float, float], ...]
    ufield: Callable[[float], UField]
    invariant: Callable[[float], Callable[[np.ndarray], complex]]
    period: Optional[Callable[[np.ndarray], float]] = None  # arclength of one loop


@dataclass
class CatalogEntry:
    key: str
    description: str
    conditions: Tuple[str, ...]
    surface: Optional[TwistorSurface] = None
    mu: Optional[FieldExpr] = None     # closed form on C^4
    f3: Optional[FieldExpr] = None     # horizontally conformal function for hc3
    phi: Optional[FieldExpr] = None    # hyperbolic harmonic morphism (a0 = 0)
    chart_family: Optional[str] = None
    u_m4: Optional[Tuple[FieldExpr, FieldExpr, FieldExpr]] = None
    trace: Optional[TraceSpec] = None
    boxes: Dict[str, Tuple[SliceKind, Box]] = field(default_factory=dict)
    notes: str = ""

    def box_for(self, condition: str) -> Tuple[SliceKind, Box]:
        if condition in self.boxes:
            return self.boxes[condition]
        return _DEFAULT_BOXES[condition]

    def sampler(self, condition: str, samples: int, seed: int,
                basepoint: Point4C = Point4C(0, 0, 0, 0)) -> SamplerSpec:
        kind, box = self.box_for(condition)
        return SamplerSpec(SliceSpec(kind, basepoint), box, samples=samples, seed=seed)


# -- closed forms ----------------------------------------------------------------

def _abs3() -> FieldExpr:
    return sqrt(X1 ** 2 + X2 ** 2 + X3 ** 2)


def radial_f(branch: BranchSign = BranchSign.PLUS) -> FieldExpr:
    r = _abs3()
    den = X1 + r if branch is BranchSign.PLUS else X1 - r
    return (X2 + I * X3) / den


def bunch_f(c: float = 0.0) -> FieldExpr:
    x1c = X1 + FieldExpr.const(c)
    return (x1c ** 2 + X2 ** 2 + X3 ** 2) / (X2 + I * X3)


def circles_f(branch: BranchSign = BranchSign.PLUS) -> FieldExpr:
    rho = sqrt(X2 ** 2 + X3 ** 2)
    return -I * X1 + rho if branch is BranchSign.PLUS else -I * X1 - rho


def hopf_mu() -> FieldExpr:
    return -(Q2 / QT1)


def robinson_mu(s: float) -> FieldExpr:
    return -(Q2 / (QT1 + FieldExpr.const(s)))


def robinson_surface(s: float) -> TwistorSurface:
    return TwistorSurface.make(f"robinson:{s:g}",
                               [((0, 1, 0, 0), s), ((0, 0, 0, 1), 1.0)])


def robinson_phi(s: float, a0: complex = 0.0) -> FieldExpr:
    """phi_a of the linear surface family:
    (q1 qt1 + q2 qt2 - 2 a0 (qt1 + s) + (q1 - qt1) s - s^2)/q2."""
    sc = FieldExpr.const(s)
    return (
        Q1 * QT1 + Q2 * QT2
        - FieldExpr.const(2 * complex(a0)) * (QT1 + sc)
        + (Q1 - QT1) * sc - sc ** 2
    ) / Q2


def circles_u_m4(branch: BranchSign = BranchSign.PLUS) -> Tuple[FieldExpr, ...]:
    """Unit tangent of the circle congruence on Minkowski slices:
    U = (0, t x2 - r x3, r x2 + t x3) / (x2^2 + x3^2), r^2 = x2^2 + x3^2 - t^2."""
    r = sqrt(X0 ** 2 + X2 ** 2 + X3 ** 2)  # equals sqrt(x2^2 + x3^2 - t^2) on M4
    if branch is BranchSign.MINUS:
        r = -r
    rho2 = X2 ** 2 + X3 ** 2
    return (
        FieldExpr.const(0.0),
        (T * X2 - r * X3) / rho2,
        (r * X2 + T * X3) / rho2,
    )


def radial_u(branch: BranchSign = BranchSign.PLUS) -> Tuple[FieldExpr, ...]:
    r = _abs3()
    sign = FieldExpr.const(1.0 if branch is BranchSign.PLUS else -1.0)
    return (sign * X1 / r, sign * X2 / r, sign * X3 / r)


def robinson_u_m4(s: float) -> Tuple[FieldExpr, ...]:
    """Unit tangent of the Robinson congruence, from the homogeneous pair
    [qt1 + s, -q2] restricted to Minkowski slices (v = x1 + t)."""
    v = X1 + T
    sc = FieldExpr.const(s)
    n = sc ** 2 + v ** 2 + X2 ** 2 + X3 ** 2
    u1 = (sc ** 2 + v ** 2 - X2 ** 2 - X3 ** 2) / n
    u2 = FieldExpr.const(2.0) * (X2 * v + X3 * sc) / n
    u3 = FieldExpr.const(-2.0) * (X2 * sc - X3 * v) / n
    return (u1, u2, u3)


def bunch_u(c: float = 0.0) -> Tuple[FieldExpr, ...]:
    x1c = X1 + FieldExpr.const(c)
    n = x1c ** 2 + X2 ** 2 + X3 ** 2
    return (
        (x1c ** 2 - X2 ** 2 - X3 ** 2) / n,
        FieldExpr.const(2.0) * x1c * X2 / n,
        FieldExpr.const(2.0) * x1c * X3 / n,
    )


# quadric surface mu fields, "+" root of each quadratic
def quadric_radial_mu(branch: BranchSign = BranchSign.PLUS) -> FieldExpr:
    disc = (Q1 - QT1) ** 2 - FieldExpr.const(4) * Q2 * QT2
    root = sqrt(disc)
    if branch is BranchSign.MINUS:
        root = -root
    return ((Q1 - QT1) + root) / (FieldExpr.const(2) * QT2)


def quadric_circles_mu(branch: BranchSign = BranchSign.PLUS) -> FieldExpr:
    disc = (Q1 + QT1) ** 2 + FieldExpr.const(4) * Q2 * QT2
    root = sqrt(disc)
    if branch is BranchSign.MINUS:
        root = -root
    return ((Q1 + QT1) + root) / (FieldExpr.const(2) * QT2)


def quadric_coaxal_mu(branch: BranchSign = BranchSign.PLUS) -> FieldExpr:
    big = FieldExpr.const(1.0) + Q1 * QT1 - Q2 * QT2
    disc = big ** 2 + FieldExpr.const(4) * Q1 * QT1 * Q2 * QT2
    root = sqrt(disc)
    if branch is BranchSign.MINUS:
        root = -root
    return (big + root) / (FieldExpr.const(2) * QT1 * QT2)


def coaxal_f(branch: BranchSign = BranchSign.PLUS) -> FieldExpr:
    """zeta(p) of the coaxal chart: boundary function whose level sets are
    the coaxal circles."""
    return chart_for("quadric-coaxal", branch).zeta_of_p


# -- trace helpers ---------------------------------------------------------------

def _t_slice(t: float) -> SliceSpec:
    return SliceSpec(SliceKind.R3, Point4C(-1j * t, 0.0, 0.0, 0.0))


def _circles_trace() -> TraceSpec:
    u_exprs = circles_u_m4(BranchSign.PLUS)
    chart = chart_for("quadric-circles")

    def ufield(t: float) -> UField:
        return UField.from_components(u_exprs, _t_slice(t))

    def invariant(t: float) -> Callable[[np.ndarray], complex]:
        slc = _t_slice(t)
        if t == 0.0:
            f = circles_f(BranchSign.PLUS)
            return lambda x: eval_value(f, slc, np.asarray(x, dtype=complex))
        # single-valued level function of phi_a = zeta - a0 log eta with
        # a0 = -i t: the combination eta * exp(-zeta / a0) has no branch cut
        a0 = -1j * t

        def inv(x):
            x = np.asarray(x, dtype=complex)
            zeta = eval_value(chart.zeta_of_p, slc, x)
            eta = eval_value(chart.eta_of_p, slc, x)
            return eta * np.exp(-zeta / a0)

        return inv

    def period(x: np.ndarray) -> float:
        return float(2 * np.pi * np.hypot(x[1], x[2]))

    return TraceSpec(
        plane=("x2", "x3"),
        default_t=1.0,
        default_leaves=((0.0, 1.2, 0.0), (0.0, 1.6, 0.0), (0.0, 2.0, 0.0)),
        ufield=ufield,
        invariant=invariant,
        period=period,
    )


def _coaxal_trace() -> TraceSpec:
    f = coaxal_f(BranchSign.PLUS)

    def ufield(t: float) -> UField:
        if t != 0.0:
            raise ValueError("the coaxal figure lives on the t = 0 slice")
        # the first-integral route stays regular on x1 = 0, where the
        # mu expression has a spurious pole from its qt1 qt2 denominator
        return UField.from_first_integral(f, _t_slice(0.0))

    def invariant(t: float) -> Callable[[np.ndarray], complex]:
        slc = _t_slice(t)
        return lambda x: eval_value(f, slc, np.asarray(x, dtype=complex))

    return TraceSpec(
        plane=("x1", "x2"),
        default_t=0.0,
        default_leaves=((0.0, 0.5, 0.0), (0.0, 1.4, 0.0), (0.3, 0.8, 0.0), (-0.4, 1.1, 0.0)),
        ufield=ufield,
        invariant=invariant,
    )


# -- the catalog -----------------------------------------------------------------

def _build_catalog() -> Dict[str, CatalogEntry]:
    entries = {}

    entries["linear-null"] = CatalogEntry(
        key="linear-null",
        description="linear isotropic f = x1 + i x2: foliation of R^3 by parallel lines",
        conditions=("hc3", "cxhm", "hm-euclid4", "hm-minkowski4",
                    "hyperbolic", "orthogonality"),
        f3=X1 + I * X2,
        phi=X1 + I * X2,
        boxes={"hc3": (SliceKind.R3, ((-1.2, 1.2),) * 3),
               "cxhm": (SliceKind.C4, ((-1.0, 1.0),) * 4),
               "hm-euclid4": (SliceKind.R4, ((-1.2, 1.2),) * 4),
               "hm-minkowski4": (SliceKind.M4, ((-1.2, 1.2),) * 4),
               "orthogonality": (SliceKind.R3, ((-1.2, 1.2),) * 3)},
        notes="coefficients (1, i, 0): a1^2 + a2^2 + a3^2 = 0",
    )

    entries["bunch"] = CatalogEntry(
        key="bunch",
        description="f = ((x1+c)^2 + x2^2 + x3^2)/(x2 + i x3): circles tangent to the x1-axis",
        conditions=("hc3",),
        f3=bunch_f(0.0),
        notes="horizontally conformal but not R^3-harmonic; c = 0",
    )

    entries["radial"] = CatalogEntry(
        key="radial",
        description="f = (x2 + i x3)/(x1 + |x|): foliation by radial lines",
        conditions=("hc3", "shear"),
        f3=radial_f(BranchSign.PLUS),
        u_m4=radial_u(BranchSign.PLUS),
        notes="+ branch; the congruence is t-independent and twist-free",
    )

    entries["circles"] = CatalogEntry(
        key="circles",
        description="f = -i x1 + sqrt(x2^2 + x3^2): circles about the x1-axis; involutes off the slice",
        conditions=("hc3", "shear"),
        f3=circles_f(BranchSign.PLUS),
        u_m4=circles_u_m4(BranchSign.PLUS),
        trace=_circles_trace(),
        boxes={"hc3": (SliceKind.R3, ((0.3, 1.2), (0.5, 1.2), (0.5, 1.2)))},
        notes="+ branch; Minkowski field defined on x2^2 + x3^2 > t^2",
    )

    entries["hopf"] = CatalogEntry(
        key="hopf",
        description="mu = -q2/qt1: the Hopf congruence (surface w3 = 0)",
        conditions=("alpha", "hermitian", "sfr", "hm-euclid4", "hm-minkowski4",
                    "cxhm", "shear"),
        surface=TwistorSurface.make("hopf", [((0, 0, 0, 1), 1.0)]),
        mu=hopf_mu(),
        u_m4=robinson_u_m4(0.0),
        notes="restricts to -q2/conj(q1) on R^4 and -i q2/(x1+t) on M^4",
    )

    entries["robinson:1"] = CatalogEntry(
        key="robinson:1",
        description="mu = -q2/(qt1 + s), s = 1: Robinson congruence (Villarceau circles)",
        conditions=("alpha", "hermitian", "sfr", "hm-euclid4", "hm-minkowski4",
                    "cxhm", "hyperbolic", "orthogonality", "shear"),
        surface=robinson_surface(1.0),
        mu=robinson_mu(1.0),
        phi=robinson_phi(1.0),
        u_m4=robinson_u_m4(1.0),
        chart_family="linear",
        boxes={"alpha": (SliceKind.C4, ((0.2, 0.9),) * 4)},
        notes="s > 0: twistor off N^5; twist is nonzero",
    )

    entries["quadric-radial"] = CatalogEntry(
        key="quadric-radial",
        description="surface w0 w3 - w1 w2: radial foliation, phi_a = mu for all a",
        conditions=("alpha", "hermitian", "sfr", "hm-euclid4", "hm-minkowski4",
                    "cxhm", "hc3", "hyperbolic", "orthogonality", "shear"),
        surface=TwistorSurface.make("quadric-radial",
                                    [((1, 0, 0, 1), 1.0), ((0, 1, 1, 0), -1.0)]),
        mu=quadric_radial_mu(BranchSign.PLUS),
        phi=quadric_radial_mu(BranchSign.PLUS),
        f3=quadric_radial_mu(BranchSign.PLUS),
        chart_family="quadric-radial",
        u_m4=radial_u(BranchSign.MINUS),
        notes="the + root of the (q1 - qt1) form equals kerr_field branch MINUS "
              "and projects to U = -x/|x|",
    )

    entries["quadric-circles"] = CatalogEntry(
        key="quadric-circles",
        description="surface w0 w3 + w1 w2: circle foliation, involutes, "
                    "boundary morphism -i x1 + sqrt(x0^2 + x2^2 + x3^2)",
        conditions=("alpha", "hermitian", "sfr", "hm-euclid4", "hm-minkowski4",
                    "cxhm", "hc3", "hyperbolic", "orthogonality", "shear"),
        surface=TwistorSurface.make("quadric-circles",
                                    [((1, 0, 0, 1), 1.0), ((0, 1, 1, 0), 1.0)]),
        mu=quadric_circles_mu(BranchSign.PLUS),
        phi=-I * X1 + sqrt(X0 ** 2 + X2 ** 2 + X3 ** 2),
        f3=circles_f(BranchSign.PLUS),
        chart_family="quadric-circles",
        u_m4=circles_u_m4(BranchSign.PLUS),
        trace=_circles_trace(),
        boxes={"sfr": (SliceKind.M4, _CONE_BOX),
               "hm-minkowski4": (SliceKind.M4, _CONE_BOX),
               "shear": (SliceKind.M4, _CONE_BOX),
               "hc3": (SliceKind.R3, ((0.3, 1.2), (0.5, 1.2), (0.5, 1.2)))},
        notes="branches on the cone x2^2 + x3^2 = t^2 on M^4",
    )

    entries["quadric-coaxal"] = CatalogEntry(
        key="quadric-coaxal",
        description="surface w0 w1 + w2 w3: rotationally symmetric foliation by coaxal circles",
        conditions=("alpha", "hermitian", "sfr", "hm-euclid4", "hm-minkowski4",
                    "cxhm", "hc3", "hyperbolic", "orthogonality"),
        surface=TwistorSurface.make("quadric-coaxal",
                                    [((1, 1, 0, 0), 1.0), ((0, 0, 1, 1), 1.0)]),
        mu=quadric_coaxal_mu(BranchSign.PLUS),
        phi=coaxal_f(BranchSign.PLUS),
        f3=coaxal_f(BranchSign.PLUS),
        chart_family="quadric-coaxal",
        trace=_coaxal_trace(),
        boxes={"sfr": (SliceKind.M4, ((0.1, 0.4), (0.6, 1.2), (0.3, 1.0), (0.3, 1.0))),
               "hm-minkowski4": (SliceKind.M4, ((0.1, 0.4), (0.6, 1.2), (0.3, 1.0), (0.3, 1.0)))},
        notes="branch circles |q1|^2 + |q2|^2 = 1, q1 q2 = 0 avoided by the boxes",
    )

    return entries


_CATALOG = _build_catalog()

CATALOG_KEYS = tuple(_CATALOG.keys())


def get_entry(key: str) -> CatalogEntry:
    if key in _CATALOG:
        return _CATALOG[key]
    name, _, arg = key.partition(":")
    if name == "robinson" and arg:
        s = float(arg)
        base = _CATALOG["robinson:1"]
        return CatalogEntry(
            key=key,
            description=f"Robinson congruence with s = {s:g}",
            conditions=base.conditions,
            surface=robinson_surface(s),
            mu=robinson_mu(s),
            u_m4=robinson_u_m4(s),
            chart_family="linear",
            boxes=base.boxes,
            notes="parametrized variant",
        )
    if name == "bunch" and arg:
        c = float(arg)
        return CatalogEntry(
            key=key,
            description=f"bunch foliation with c = {c:g}",
            conditions=("hc3",),
            f3=bunch_f(c),
            notes="parametrized variant",
        )
    raise KeyError(f"unknown catalog key {key!r}")


def named_surface(key: str) -> TwistorSurface:
    """Surfaces addressable by key, including the degenerate 'parallel'
    surface w1 = 0 used by the solver tests."""
    if key == "parallel":
        return TwistorSurface.make("parallel", [((0, 1, 0, 0), 1.0)])
    name, _, arg = key.partition(":")
    if name == "robinson":
        return robinson_surface(float(arg) if arg else 1.0)
    entry = get_entry(key)
    if entry.surface is None:
        raise KeyError(f"catalog entry {key!r} has no twistor surface")
    return entry.surface


# -- condition runners -------------------------------------------------------------

def verify_entry(entry: CatalogEntry, condition: str, samples: int = 500,
                 seed: int = DEFAULT_SEED, tol: float | None = None) -> ResidualReport:
    """Run one residual certificate for a catalog entry."""
    sampler = entry.sampler(condition, samples, seed)
    if condition == "hc3":
        if entry.f3 is None:
            raise ValueError(f"{entry.key} has no R^3 function")
        return check_hc3(entry.f3, sampler, tol)
    if condition == "alpha":
        return check_alpha(_need_mu(entry), sampler, tol)
    if condition == "hermitian":
        return check_hermitian(_need_mu(entry), sampler, tol)
    if condition == "sfr":
        return check_sfr(_need_mu(entry), sampler, tol)
    if condition == "hm-euclid4":
        return check_harmonic_morphism(_field_for_hm(entry), "euclid4", sampler, tol)
    if condition == "hm-minkowski4":
        return check_harmonic_morphism(_field_for_hm(entry), "minkowski4", sampler, tol)
    if condition == "cxhm":
        return check_harmonic_morphism(_field_for_hm(entry), "complex4", sampler, tol)
    if condition == "hyperbolic":
        if entry.phi is None:
            raise ValueError(f"{entry.key} has no hyperbolic candidate")
        return check_hyperbolic_hm(entry.phi, sampler, a0=0.0, tol=tol)
    if condition == "orthogonality":
        if entry.phi is None:
            raise ValueError(f"{entry.key} has no hyperbolic candidate")
        return check_boundary_orthogonality(entry.phi, sampler, tol)
    if condition == "shear":
        if entry.u_m4 is None:
            raise ValueError(f"{entry.key} has no Minkowski tangent field")
        return check_shear(entry.u_m4, sampler, tol)
    raise ValueError(f"unknown condition {condition!r}")


def _need_mu(entry: CatalogEntry) -> FieldExpr:
    if entry.mu is None:
        raise ValueError(f"{entry.key} has no mu field")
    return entry.mu


def _field_for_hm(entry: CatalogEntry) -> FieldExpr:
    if entry.mu is not None:
        return entry.mu
    if entry.f3 is not None:
        return entry.f3
    raise ValueError(f"{entry.key} has no field to test")


def verify_all(entry: CatalogEntry, samples: int = 500, seed: int = DEFAULT_SEED,
               tol: float | None = None) -> Dict[str, ResidualReport]:
    return {c: verify_entry(entry, c, samples, seed, tol) for c in entry.conditions}
