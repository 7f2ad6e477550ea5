import json

import numpy as np
import pytest

from twistorkit.catalog import named_surface
from twistorkit.coords import Point4C, SliceKind, SliceSpec, to_null
from twistorkit.fieldexpr import BranchSign, eval_value
from twistorkit.kerr import (
    DegenerateAtPoint,
    TwistorSurface,
    UnsupportedDegree,
    kerr_eval,
    kerr_eval_all,
    kerr_field,
    kerr_pair_residual,
    substitute_linear,
    surface_contains,
    surfaces_proportional,
    transform_surface,
)
from twistorkit.twistor import iota

C4 = SliceSpec(SliceKind.C4)


def _mu_of(pair):
    w0, w1 = pair
    return w1 / w0


def test_surface_validation():
    with pytest.raises(ValueError):
        TwistorSurface.make("bad", [((1, 0, 0, 0), 1.0), ((1, 1, 0, 0), 1.0)])
    with pytest.raises(ValueError):
        TwistorSurface.make("zero", [((1, 0, 0, 0), 1.0), ((1, 0, 0, 0), -1.0)])
    s = TwistorSurface.make("dup", [((0, 0, 0, 1), 1.0), ((0, 0, 0, 1), 2.0)])
    assert s.monomials == (((0, 0, 0, 1), 3.0 + 0j),)


def test_json_round_trip():
    s = named_surface("quadric-coaxal")
    back = TwistorSurface.from_json(json.loads(json.dumps(s.to_json())))
    assert back == s
    with pytest.raises(ValueError):
        TwistorSurface.from_json({"name": "x", "degree": 3,
                                  "monomials": [{"e": [0, 0, 0, 1], "c": [1, 0]}]})


def test_kerr_w3_gives_hopf():
    s = named_surface("hopf")
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = Point4C.of(rng.uniform(0.3, 1.2, 4).astype(complex))
        n = to_null(p)
        pair = kerr_eval(s, p)
        assert _mu_of(pair) == pytest.approx(-n.q2 / n.qt1)


def test_kerr_w1_parallel():
    s = named_surface("parallel")
    pair = kerr_eval(s, Point4C(0.5, 0.25, 0.75, 1.0))
    assert _mu_of(pair) == 0


def test_kerr_radial_at_unit_point():
    # at (x1, x2, x3) = (0, 1, 0), t = 0 the two branches give i mu = +-1
    s = named_surface("quadric-radial")
    pairs = kerr_eval_all(s, Point4C(0.0, 0.0, 1.0, 0.0))
    imus = sorted((1j * _mu_of(p)).real for p in pairs)
    assert imus == pytest.approx([-1.0, 1.0])
    for p in pairs:
        assert abs((1j * _mu_of(p)).imag) < 1e-14


def test_kerr_field_matches_eval_everywhere():
    rng = np.random.default_rng(2)
    for key in ("quadric-radial", "quadric-circles", "quadric-coaxal"):
        s = named_surface(key)
        for branch in (BranchSign.PLUS, BranchSign.MINUS):
            field = kerr_field(s, branch)
            for _ in range(40):
                p = rng.uniform(0.3, 1.2, 4) + 1j * rng.uniform(0.0, 0.3, 4)
                val = eval_value(field, C4, p)
                roots = [_mu_of(q) for q in kerr_eval_all(s, Point4C.of(p))]
                assert min(abs(val - r) for r in roots) < 1e-12


def test_kerr_field_robinson_formula():
    s = named_surface("robinson:2")
    field = kerr_field(s)
    rng = np.random.default_rng(3)
    for _ in range(30):
        p = rng.uniform(0.3, 1.2, 4).astype(complex)
        n = to_null(Point4C.of(p))
        assert eval_value(field, C4, p) == pytest.approx(-n.q2 / (n.qt1 + 2.0))


def test_kerr_roots_lie_on_surface():
    rng = np.random.default_rng(4)
    for key in ("hopf", "robinson:1", "quadric-radial", "quadric-circles",
                "quadric-coaxal"):
        s = named_surface(key)
        for _ in range(25):
            p = Point4C.of(rng.uniform(0.25, 1.3, 4).astype(complex))
            for pair in kerr_eval_all(s, p):
                assert kerr_pair_residual(s, p, pair) < 1e-11
                ok, _ = surface_contains(s, iota(p, pair).array())
                assert ok


def test_surface_contains_examples():
    s = named_surface("hopf")  # psi = w3
    ok, _ = surface_contains(s, [1, 0, 5, 0])
    assert ok
    bad, res = surface_contains(s, [0, 0, 0, 1])
    assert not bad and res == pytest.approx(1.0)


def test_degenerate_at_point():
    # psi = w0 w3 - w1 w2 reduces to q2 + mu(qt1 - q1) + mu^2 qt2;
    # at the origin every coefficient vanishes
    s = named_surface("quadric-radial")
    with pytest.raises(DegenerateAtPoint):
        kerr_eval(s, Point4C(0, 0, 0, 0))


def test_double_root_detected():
    # radial discriminant -4(x1^2+x2^2+x3^2) vanishes on the x0-axis
    s = named_surface("quadric-radial")
    with pytest.raises(DegenerateAtPoint):
        kerr_eval(s, Point4C(1.0, 0, 0, 0))


def test_circles_branch_locus_is_the_cone():
    """The discriminant of psi = w0 w3 + w1 w2 on Minkowski slices is
    4(x2^2 + x3^2 - t^2): the solver degenerates exactly on the cone."""
    s = named_surface("quadric-circles")
    rng = np.random.default_rng(41)
    for _ in range(20):
        x1 = rng.uniform(-1, 1)
        phi = rng.uniform(0, 2 * np.pi)
        t = rng.uniform(0.3, 1.0)
        on_cone = Point4C(-1j * t, x1, t * np.cos(phi), t * np.sin(phi))
        with pytest.raises(DegenerateAtPoint):
            kerr_eval(s, on_cone)
        off_cone = Point4C(-1j * t, x1, 1.5 * t * np.cos(phi), 1.5 * t * np.sin(phi))
        kerr_eval(s, off_cone)  # fine away from the cone


def test_unsupported_degree_closed_form():
    s = TwistorSurface.make("cubic", [((0, 0, 0, 3), 1.0)])
    with pytest.raises(UnsupportedDegree):
        kerr_field(s)


def test_high_degree_roots_still_work_pointwise():
    s = TwistorSurface.make("cubic", [((0, 0, 0, 3), 1.0), ((3, 0, 0, 0), 1.0)])
    p = Point4C(0.5, 0.25, 0.75, 0.1)
    pairs = kerr_eval_all(s, p)
    assert len(pairs) == 3
    for pair in pairs:
        assert kerr_pair_residual(s, p, pair) < 1e-10


def test_root_at_infinity():
    # psi = w0 w2 reduces to q1 w0^2 - qt2 w0 w1: degree 2 with the mu^2
    # coefficient structurally absent, so one root escapes to [0, 1]
    s = TwistorSurface.make("w0w2", [((1, 0, 1, 0), 1.0)])
    p = Point4C(0.5, 0.1, 0.3, 0.2)
    n = to_null(p)
    pairs = kerr_eval_all(s, p)
    assert len(pairs) == 2
    infinite = [q for q in pairs if abs(q[0]) == 0]
    finite = [q for q in pairs if abs(q[0]) > 0]
    assert len(infinite) == 1 and len(finite) == 1
    assert _mu_of(finite[0]) == pytest.approx(n.q1 / n.qt2)


def test_transform_surface_cxsame():
    theta = np.exp(1j * np.pi / 4)
    P = np.diag([theta, 1j * theta, 1j * theta, theta])
    moved = transform_surface(named_surface("quadric-radial"), P)
    same, defect = surfaces_proportional(moved, named_surface("quadric-circles"))
    assert same, defect


def test_substitute_linear_identity():
    s = named_surface("quadric-coaxal")
    same, defect = surfaces_proportional(substitute_linear(s, np.eye(4)), s)
    assert same and defect < 1e-14


def test_surface_canonical_order_and_hash():
    a = TwistorSurface.make("s", [((0, 0, 1, 1), 2.0), ((1, 1, 0, 0), 1.0)])
    b = TwistorSurface.make("s", [((1, 1, 0, 0), 1.0), ((0, 0, 1, 1), 2.0)])
    assert a == b
    assert hash(a) == hash(b)
    assert [e for e, _ in a.monomials] == sorted(e for e, _ in a.monomials)
