import numpy as np
import pytest

from twistorkit.catalog import (
    bunch_u,
    circles_u_m4,
    get_entry,
    hopf_mu,
    quadric_radial_mu,
    radial_u,
)
from twistorkit.coords import (
    Point4C,
    SliceKind,
    SliceSpec,
    metric_pair,
    stereo,
    stereo_inv,
)
from twistorkit.fieldexpr import FieldExpr, eval_value
from twistorkit.residuals import congruence_tensors
from twistorkit.unify import (
    UField,
    extend_from_slice,
    mu_to_frame,
    alpha_plane_basis,
    project_to_slice,
    span_distance,
)

M4 = SliceSpec(SliceKind.M4)


def _t_slice(t):
    return SliceSpec(SliceKind.R3, Point4C(-1j * t, 0, 0, 0))


def test_frame_mu_zero():
    fr = mu_to_frame([1, 0])
    assert np.allclose(fr.U, [1, 0, 0])
    J_std = np.zeros((4, 4))
    J_std[1, 0] = J_std[3, 2] = 1
    J_std[0, 1] = J_std[2, 3] = -1
    assert np.allclose(fr.J, J_std)


def test_frame_mu_minus_i():
    fr = mu_to_frame([1, -1j])  # u = i mu = 1
    assert np.allclose(fr.U, [0, 1, 0])
    E = (fr.e2 + 1j * fr.e3)[1:]
    assert np.allclose(E, [-1, 0, 1j])


def test_frame_mu_infinity():
    fr = mu_to_frame([0, 1])
    assert np.allclose(fr.U, [-1, 0, 0])


def test_frame_invariants_random():
    rng = np.random.default_rng(21)
    for _ in range(100):
        pair = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        fr = mu_to_frame(pair)
        E = np.stack([fr.e0, fr.e1, fr.e2, fr.e3])
        assert np.max(np.abs(E @ E.T - np.eye(4))) < 1e-13
        assert np.linalg.det(E.T) == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(fr.J @ fr.J + np.eye(4))) < 1e-13
        assert np.max(np.abs(fr.J.T @ fr.J - np.eye(4))) < 1e-13
        # alpha-plane span equals the null-coordinate basis span
        assert span_distance(fr.alpha_basis, fr.plane_basis) < 1e-12
        # both spanners are null and mutually orthogonal for g^C
        for v in fr.alpha_basis:
            assert abs(np.sum(v * v)) < 1e-12
        assert abs(np.sum(fr.alpha_basis[0] * fr.alpha_basis[1])) < 1e-12
        # U = stereo_inv(i mu)
        if abs(pair[0]) > 1e-6:
            assert np.allclose(fr.U, stereo_inv(1j * pair[1] / pair[0]), atol=1e-12)


def test_alpha_plane_basis_vectors_null():
    rng = np.random.default_rng(22)
    for _ in range(20):
        pair = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        basis = alpha_plane_basis(pair)
        for v in basis:
            assert abs(metric_pair("complex4", v, v)) < 1e-13
        assert abs(metric_pair("complex4", basis[0], basis[1])) < 1e-13


def test_project_hopf_gives_bunch():
    """The Minkowski Hopf congruence projects onto the slice t = c as the
    bunch foliation with x1 shifted by c."""
    mu = hopf_mu()
    for c in (0.0, 0.7):
        uf = project_to_slice(mu, _t_slice(c))
        bunch = bunch_u(c)
        slc0 = SliceSpec(SliceKind.R3)
        rng = np.random.default_rng(23)
        for _ in range(20):
            x = rng.uniform(0.3, 1.2, 3)
            expected = np.array([
                eval_value(comp, slc0, x.astype(complex)).real for comp in bunch
            ])
            assert np.allclose(uf(x), expected, atol=1e-12)


def test_project_quadric_radial():
    mu = quadric_radial_mu()
    uf = project_to_slice(mu, _t_slice(0.4))
    rng = np.random.default_rng(24)
    for _ in range(20):
        x = rng.uniform(0.3, 1.2, 3)
        assert np.allclose(uf(x), -x / np.linalg.norm(x), atol=1e-12)


def test_project_constant_mu():
    uf = project_to_slice(FieldExpr.const(0.0), _t_slice(0.0))
    assert np.allclose(uf([0.5, 0.6, 0.7]), [1, 0, 0])


def _transported_circle_field(t, x, sign=1.0):
    """Independent reference for the transported circle tangent:
    U = (0, t x2 - r x3, r x2 + t x3)/rho^2, r = sqrt(rho^2 - t^2)."""
    rho2 = x[1] ** 2 + x[2] ** 2
    r = sign * np.sqrt(rho2 - t ** 2)
    return np.array([0.0, (t * x[1] - r * x[2]) / rho2, (r * x[1] + t * x[2]) / rho2])


def test_extend_identity_at_t0():
    uf = UField.from_components(circles_u_m4(), _t_slice(0.0))
    x = np.array([0.2, 0.9, 0.4])
    U, foot = extend_from_slice(uf, 0.0, x)
    assert np.allclose(foot, x)
    assert np.allclose(U, uf(x))


def test_extend_circles_matches_transported_field():
    uf = UField.from_components(circles_u_m4(), _t_slice(0.0))
    # worked sample point: query (t, x) = (1, (0, 2, 0))
    U, foot = extend_from_slice(uf, 1.0, [0.0, 2.0, 0.0])
    assert np.allclose(U, _transported_circle_field(1.0, np.array([0.0, 2.0, 0.0])), atol=1e-10)
    rng = np.random.default_rng(25)
    for _ in range(15):
        t = rng.uniform(-0.6, 0.6)
        x = np.concatenate([rng.uniform(-0.5, 0.5, 1), rng.uniform(0.8, 1.6, 2)])
        U, foot = extend_from_slice(uf, t, x)
        assert np.allclose(U, _transported_circle_field(t, x), atol=1e-10)


def test_extend_no_preimage_inside_cone():
    from twistorkit.unify import NoPreimage

    uf = UField.from_components(circles_u_m4(), _t_slice(0.0))
    # inside x2^2 + x3^2 < t^2 no backward null ray reaches the slice
    with pytest.raises(NoPreimage):
        extend_from_slice(uf, 1.0, [0.0, 0.3, 0.0])


def test_extend_radial_t_independent():
    uf = UField.from_components(radial_u(), _t_slice(0.0))
    x = np.array([0.5, 0.8, 0.3])
    for t in (0.0, 0.4, -0.7):
        U, foot = extend_from_slice(uf, t, x)
        assert np.allclose(U, x / np.linalg.norm(x), atol=1e-10)


def test_extend_then_project_round_trip():
    uf = UField.from_components(circles_u_m4(), _t_slice(0.0))
    rng = np.random.default_rng(26)
    for _ in range(10):
        x = np.concatenate([rng.uniform(-0.4, 0.4, 1), rng.uniform(0.8, 1.5, 2)])
        U, foot = extend_from_slice(uf, 0.0, x)
        assert np.allclose(foot, x, atol=1e-10)
        assert np.allclose(U, uf(x), atol=1e-10)


def test_extended_congruence_shear_free_along_rays():
    u_exprs = circles_u_m4()
    x0 = np.array([0.1, 1.0, 0.9])
    uf0 = UField.from_components(u_exprs, _t_slice(0.0))
    U0 = uf0(x0)
    for T_ray in (0.0, 0.3, -0.3, 0.7, -0.7):
        pt = np.concatenate([[T_ray], x0 + T_ray * U0])
        ct = congruence_tensors(u_exprs, M4, pt)
        assert ct.shear_norm <= 1e-9


def test_extend_from_first_integral_matches_components():
    entry = get_entry("circles")
    slc = _t_slice(0.0)
    uf_f = UField.from_first_integral(entry.f3, slc)
    uf_c = UField.from_components(circles_u_m4(), slc)
    rng = np.random.default_rng(27)
    for _ in range(10):
        x = np.concatenate([rng.uniform(-0.5, 0.5, 1), rng.uniform(0.6, 1.3, 2)])
        a = uf_f(x)
        b = uf_c(x)
        # orientation convention of grad f1 x grad f2 may flip the sign
        assert min(np.linalg.norm(a - b), np.linalg.norm(a + b)) < 1e-10
