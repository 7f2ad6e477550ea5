"""Twistor surfaces, shear-free ray congruences, conformal foliations and
hyperbolic harmonic morphisms, numerically certified.

The library mechanizes a web of classical correspondences: complex
hypersurfaces of CP^3 cut out, through the Kerr equation, fields mu whose
restrictions to the real, Minkowski and R^3 slices of C^4 are Hermitian
structures, shear-free ray congruences and conformal foliations by curves.
Every defining PDE ships with a sampled residual certificate, the worked
examples live in a catalog, and the same data feeds a leaf tracer and a
boundary-value construction for hyperbolic harmonic morphisms.
"""

from .coords import (
    INFINITY,
    NullCoords,
    Point4C,
    QClass,
    QMatrix,
    SliceKind,
    SliceSpec,
    classify_qmatrix,
    from_null,
    metric_pair,
    slice_point,
    stereo,
    stereo_inv,
    to_null,
)
from .fieldexpr import (
    BranchSign,
    FieldExpr,
    JetC2,
    SingularPoint,
    eval_jet,
    eval_value,
    grad_square,
    laplacian,
    parse_expr,
)
from .kerr import TwistorSurface, kerr_eval, kerr_eval_all, kerr_field, surface_contains
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
    congruence_tensors,
    sfr_from_hm,
)
from .twistor import TwistorPoint, embed_j, in_N5, incidence, iota, pi_a, to_xi
from .unify import UField, extend_from_slice, mu_to_frame, project_to_slice
from .groups import BlockMatrix4, act_cp3, is_sl2h, is_su4h, mobius, named_matrix, wedge_square
from .hyperbolic import chart_for, compose_phi, restrict_boundary, solve_superminimal, theta_pullback
from .catalog import CATALOG_KEYS, get_entry, named_surface, verify_entry

__version__ = "0.1.0"
