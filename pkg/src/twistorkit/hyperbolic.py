"""Contact-form machinery for hyperbolic harmonic morphisms: the
translated holomorphic contact form, its pullback along surface charts,
the superminimality ODE, and the boundary-value construction for the
catalog surface families.

A chart is a holomorphic map (zeta, eta) -> [w0, w1, w2, w3] into a
twistor surface, written with expression coordinates x0 = zeta, x1 = eta.
With theta_z = Theta_a(d/dzeta) and theta_e = Theta_a(d/deta), a function
zt(zeta, eta) solves the superminimality equation when

    theta_z * d(zt)/d(eta) - theta_e * d(zt)/d(zeta) = 0,

and phi_a(p) = zt(zeta(p), eta(p)) is then hyperbolic harmonic off the
boundary slice R3_a.  The solver is a verified lookup of closed forms for
the four catalog families; every solution it returns is certified against
the ODE residual at runtime, so a wrong table entry cannot pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import tolerances
from .coords import Point4C, SliceKind, SliceSpec
from .fieldexpr import (
    BranchSign,
    FieldExpr,
    Q1,
    Q2,
    QT1,
    QT2,
    SingularPoint,
    diff,
    eval_value,
    exp,
    log,
    sqrt,
    subs,
)
from .kerr import TwistorSurface, surface_contains
from .residuals import SamplerSpec, ResidualReport, run_check

ZETA = FieldExpr.coord(0)
ETA = FieldExpr.coord(1)


@dataclass(frozen=True)
class SurfaceChart:
    """Closed-form chart of a twistor surface together with the incidence
    solutions zeta(p), eta(p) on C^4 (branch already baked in)."""

    family: str
    surface: TwistorSurface
    components: Tuple[FieldExpr, FieldExpr, FieldExpr, FieldExpr]
    zeta_of_p: FieldExpr
    eta_of_p: FieldExpr
    param: float = 0.0  # the linear family's s; unused elsewhere


class UnsupportedFamily(Exception):
    pass


def theta_pullback(chart: SurfaceChart, a0: complex) -> Tuple[FieldExpr, FieldExpr]:
    """(Theta_a(d/dzeta), Theta_a(d/deta)) as expressions in the chart
    coordinates, from

    Theta_a = -2 a0 (w1 dw0 - w0 dw1) + w1 dw2 - w2 dw1 - w0 dw3 + w3 dw0.
    """
    w0, w1, w2, w3 = chart.components
    out = []
    for var in (0, 1):
        d = lambda e: diff(e, var)
        coeff = (
            FieldExpr.const(-2 * complex(a0)) * (w1 * d(w0) - w0 * d(w1))
            + w1 * d(w2) - w2 * d(w1) - w0 * d(w3) + w3 * d(w0)
        )
        out.append(coeff)
    return out[0], out[1]


@dataclass
class PhiSolution:
    chart: SurfaceChart
    a0: complex
    zeta_tilde: FieldExpr       # in chart coordinates
    phi: FieldExpr              # composed onto C^4
    branch: BranchSign


def _zeta_tilde_table(chart: SurfaceChart, a0: complex) -> FieldExpr:
    fam = chart.family
    a0 = complex(a0)
    if fam == "linear":
        s = chart.param
        return (FieldExpr.const(2 * a0) - ETA + FieldExpr.const(s)) / ZETA
    if fam == "quadric-radial":
        return ZETA
    if fam == "quadric-circles":
        if a0 == 0:
            return ZETA
        return ZETA - FieldExpr.const(a0) * log(ETA)
    if fam == "quadric-coaxal":
        if a0 == 0:
            return ZETA
        r2 = a0 * a0 + 1.0
        if abs(r2) < 1e-12:
            # branch point of the generic closed form: the exponential limit
            return ZETA * exp(FieldExpr.const(-2 * a0) / (ETA + FieldExpr.const(a0)))
        R = np.sqrt(complex(r2))
        k = -a0 / R
        return ZETA * exp(
            FieldExpr.const(k)
            * (log(ETA + FieldExpr.const(a0 + R)) - log(ETA + FieldExpr.const(a0 - R)))
        )
    raise UnsupportedFamily(f"no closed form for chart family {fam!r}")


def ode_residual_expr(chart: SurfaceChart, a0: complex,
                      zeta_tilde: FieldExpr) -> FieldExpr:
    th_z, th_e = theta_pullback(chart, a0)
    return th_z * diff(zeta_tilde, 1) - th_e * diff(zeta_tilde, 0)


def chart_sampler(box_z, box_e, samples=500, seed=42) -> SamplerSpec:
    """Sampler over chart coordinates, carried by the first two parameters
    of a C4 slice (the other two are pinned to 0)."""
    return SamplerSpec(
        SliceSpec(SliceKind.C4),
        (tuple(box_z), tuple(box_e), (0.0, 0.0), (0.0, 0.0)),
        samples=samples,
        seed=seed,
    )


def ode_residual_report(sol: PhiSolution, sampler: SamplerSpec,
                        tol: float | None = None) -> ResidualReport:
    res = ode_residual_expr(sol.chart, sol.a0, sol.zeta_tilde)
    slc = sampler.slc

    def fn(u):
        return [eval_value(res, slc, u, sol.branch)]

    return run_check("superminimal-ode", sampler, fn, tol)


def solve_superminimal(chart: SurfaceChart, a0: complex,
                       branch: BranchSign = BranchSign.PLUS,
                       certify_samples: int = 40) -> PhiSolution:
    """Look up the closed-form solution for the catalog family and certify
    it against the superminimality ODE before returning.
    """
    zt = _zeta_tilde_table(chart, a0)
    residual = ode_residual_expr(chart, a0, zt)
    sampler = chart_sampler((0.4, 1.1), (0.4, 1.1), samples=certify_samples, seed=11)
    rng = np.random.default_rng(sampler.seed)
    worst = 0.0
    accepted = 0
    while accepted < certify_samples:
        u = sampler.draw(rng)
        try:
            v = eval_value(residual, sampler.slc, u, branch)
        except SingularPoint:
            continue
        accepted += 1
        worst = max(worst, abs(v))
    if worst > tolerances.TAU_ALG:
        raise UnsupportedFamily(
            f"table solution for {chart.family!r} fails the ODE certificate "
            f"(residual {worst:.3e})"
        )
    phi = subs(zt, {0: chart.zeta_of_p, 1: chart.eta_of_p})
    return PhiSolution(chart=chart, a0=complex(a0), zeta_tilde=zt, phi=phi,
                       branch=branch)


def compose_phi(sol: PhiSolution) -> FieldExpr:
    return sol.phi


def boundary_slice(sol: PhiSolution) -> SliceSpec:
    """The R3 slice x0 = a0 carrying the boundary values of phi_a."""
    return SliceSpec(SliceKind.R3, Point4C(complex(sol.a0), 0, 0, 0))


def restrict_boundary(sol: PhiSolution) -> Tuple[FieldExpr, SliceSpec]:
    """phi_a together with the boundary slice it restricts to; evaluate the
    expression on that slice to get the horizontally conformal f."""
    return sol.phi, boundary_slice(sol)


def offslice_spec(sol: PhiSolution) -> SliceSpec:
    """The R4 slice through (a0, 0, 0, 0) on which phi_a is hyperbolic
    harmonic away from the boundary."""
    return SliceSpec(SliceKind.R4, Point4C(complex(sol.a0), 0, 0, 0))


def chart_on_surface_residual(chart: SurfaceChart, samples: int = 50,
                              seed: int = 5) -> float:
    """Max |psi(chart(zeta, eta))| over random chart points (sanity check
    that the parametrization lands on the surface)."""
    slc = SliceSpec(SliceKind.C4)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u = np.zeros(4, dtype=complex)
        u[:2] = rng.uniform(0.3, 1.2, 2) + 1j * rng.uniform(0.3, 1.2, 2)
        w = np.array([eval_value(c, slc, u) for c in chart.components])
        _, res = surface_contains(chart.surface, w, tol=np.inf)
        worst = max(worst, res)
    return worst


# -- the four catalog charts -----------------------------------------------------

def linear_chart(s: float) -> SurfaceChart:
    """psi = s w1 + w3, chart (zeta, eta) -> [1, zeta, eta, -s zeta]."""
    surface = TwistorSurface.make(
        f"robinson:{s:g}", [((0, 1, 0, 0), s), ((0, 0, 0, 1), 1.0)]
    )
    comps = (
        FieldExpr.const(1.0),
        ZETA,
        ETA,
        FieldExpr.const(-s) * ZETA,
    )
    den = QT1 + FieldExpr.const(s)
    zeta_p = -(Q2 / den)
    eta_p = (Q1 * QT1 + Q2 * QT2 + Q1 * FieldExpr.const(s)) / den
    return SurfaceChart("linear", surface, comps, zeta_p, eta_p, param=float(s))


def radial_chart(branch: BranchSign = BranchSign.PLUS) -> SurfaceChart:
    """psi = w0 w3 - w1 w2, chart [1, zeta, eta, zeta eta]; zeta(p) is the
    mu of the surface, so phi_a = mu for every a."""
    surface = TwistorSurface.make(
        "quadric-radial", [((1, 0, 0, 1), 1.0), ((0, 1, 1, 0), -1.0)]
    )
    comps = (FieldExpr.const(1.0), ZETA, ETA, ZETA * ETA)
    disc = (Q1 - QT1) ** 2 - FieldExpr.const(4) * Q2 * QT2
    root = sqrt(disc)
    if branch is BranchSign.MINUS:
        root = -root
    zeta_p = ((Q1 - QT1) + root) / (FieldExpr.const(2) * QT2)
    eta_p = Q1 - zeta_p * QT2
    return SurfaceChart("quadric-radial", surface, comps, zeta_p, eta_p)


def circles_chart(branch: BranchSign = BranchSign.PLUS) -> SurfaceChart:
    """psi = w0 w3 + w1 w2, chart [1, eta, -zeta, zeta eta]; eta(p) is mu,
    zeta(p) = eta qt2 - q1 (= -i x1 + sqrt(x0^2 + x2^2 + x3^2) on R4)."""
    surface = TwistorSurface.make(
        "quadric-circles", [((1, 0, 0, 1), 1.0), ((0, 1, 1, 0), 1.0)]
    )
    comps = (FieldExpr.const(1.0), ETA, -ZETA, ZETA * ETA)
    disc = (Q1 + QT1) ** 2 + FieldExpr.const(4) * Q2 * QT2
    root = sqrt(disc)
    if branch is BranchSign.MINUS:
        root = -root
    eta_p = ((Q1 + QT1) + root) / (FieldExpr.const(2) * QT2)
    zeta_p = eta_p * QT2 - Q1
    return SurfaceChart("quadric-circles", surface, comps, zeta_p, eta_p)


def coaxal_chart(branch: BranchSign = BranchSign.PLUS) -> SurfaceChart:
    """psi = w0 w1 + w2 w3, chart [1, zeta eta, -eta, zeta]."""
    surface = TwistorSurface.make(
        "quadric-coaxal", [((1, 1, 0, 0), 1.0), ((0, 0, 1, 1), 1.0)]
    )
    comps = (FieldExpr.const(1.0), ZETA * ETA, -ETA, ZETA)
    one = FieldExpr.const(1.0)
    big = one + Q1 * QT1 + Q2 * QT2
    disc = big ** 2 - FieldExpr.const(4) * Q2 * QT2
    root = sqrt(disc)
    if branch is BranchSign.MINUS:
        root = -root
    zeta_p = (big + root) / (FieldExpr.const(2) * QT2)
    eta_p = (zeta_p - Q2) / (zeta_p * QT1)
    return SurfaceChart("quadric-coaxal", surface, comps, zeta_p, eta_p)


def chart_for(family: str, branch: BranchSign = BranchSign.PLUS,
              s: float = 1.0) -> SurfaceChart:
    if family == "linear" or family.startswith("robinson"):
        if family.startswith("robinson:"):
            s = float(family.split(":", 1)[1])
        return linear_chart(s)
    if family == "quadric-radial":
        return radial_chart(branch)
    if family == "quadric-circles":
        return circles_chart(branch)
    if family == "quadric-coaxal":
        return coaxal_chart(branch)
    raise UnsupportedFamily(family)
