import math

import numpy as np
import pytest

from flexcurv.catalog import bump_flex, cap, curved_flex_catalog, paraboloid, plane, verification_catalog
from flexcurv.errors import PreconditionError
from flexcurv.flex import FlexField, rigid_motion_flex
from flexcurv.geometry import (
    projected_volume,
    surface_area,
    total_gauss_curvature,
    total_mean_curvature,
    unit_normal,
)
from flexcurv.quadrature import BoundaryQuadratureSpec, Disk, QuadratureSpec
from flexcurv.variation import (
    MField,
    direct_line_coefficients,
    invariant_sweep,
    m_field,
    normal_velocity,
    printed_line_coefficients,
    printed_line_integral,
    tol_fd,
    variation_finite_difference,
    variation_line_integral,
    variation_report,
    variation_surface_integral,
)

Q = QuadratureSpec(64)
QB = BoundaryQuadratureSpec(64)
PAIRS = verification_catalog() + curved_flex_catalog()
PAIR_IDS = [p.label for p in PAIRS]


# -- normal velocity and m ------------------------------------------------------------


def test_normal_velocity_of_vertical_field_on_plane():
    u, v = np.array([0.2, 0.7]), np.array([0.4, 0.1])
    nv = normal_velocity(plane(), FlexField.parse("0,0,u^2*v+v^3"), u, v)
    assert np.allclose(nv, [-(2 * u * v), -(u**2 + 3 * v**2), 0 * u], atol=1e-15)


@pytest.mark.parametrize("patch", [plane(), paraboloid(), cap(1.0, 0.5)], ids=lambda p: p.describe())
def test_translation_does_not_rotate_normal(patch):
    u, v = patch.domain.sample_points(5)
    assert np.max(np.abs(normal_velocity(patch, rigid_motion_flex(patch, a=(1, -2, 3)), u, v))) == 0.0


def test_rotation_about_z_fixes_plane_normal():
    u, v = plane().domain.sample_points(5)
    assert np.max(np.abs(normal_velocity(plane(), rigid_motion_flex(plane(), b=(0, 0, 1)), u, v))) == 0.0


def test_m_of_linear_height():
    m = m_field(plane(), FlexField.parse("0,0,u"))
    assert np.allclose(m(0.3, 0.6), [0.0, 1.0, 0.0], atol=1e-15)


def test_m_of_vertical_field_on_plane():
    m = m_field(plane(), FlexField.parse("0,0,u^3+u*v^2"))
    u, v = 0.4, 0.9
    zu, zv = 3 * u**2 + v**2, 2 * u * v
    assert np.allclose(m(u, v), [-zv, zu, 0.0], atol=1e-15)


def test_m_of_rotation_is_tangential_part_of_axis():
    p = paraboloid()
    b = np.array([0.3, -0.7, 1.0])
    m = m_field(p, rigid_motion_flex(p, b=b))
    u, v = p.domain.random_points(np.random.default_rng(4), 50)
    n = unit_normal(p, u, v)
    expected = -b[:, None] + (b @ n) * n
    assert np.allclose(m(u, v), expected, atol=1e-14)


def test_m_vanishes_for_rotation_about_normal():
    p = paraboloid()
    # at the vertex the normal is e3
    m = m_field(p, rigid_motion_flex(p, b=(0, 0, 2.5)))
    assert np.allclose(m(0.0, 0.0), 0.0, atol=1e-15)


@pytest.mark.parametrize("pair", PAIRS, ids=PAIR_IDS)
def test_m_is_tangential(pair):
    u, v = pair.patch.domain.random_points(np.random.default_rng(8), 1000)
    m = m_field(pair.patch, pair.flex)
    assert np.max(np.abs(np.einsum("i...,i...->...", m(u, v), unit_normal(pair.patch, u, v)))) <= 1e-10


@pytest.mark.parametrize("pair", PAIRS, ids=PAIR_IDS)
def test_expanded_m_matches_definition(pair):
    u, v = pair.patch.domain.random_points(np.random.default_rng(9), 200)
    assert MField(pair.patch, pair.flex).route_discrepancy(u, v) <= 1e-12


def test_m_field_requires_a_flex():
    with pytest.raises(PreconditionError):
        m_field(plane(), FlexField.parse("u,0,0"))


# -- the three routes -------------------------------------------------------------------


def test_hand_value_all_routes():
    flex = FlexField.parse("0,0,u^2+v^2")
    assert abs(variation_surface_integral(plane(), flex, Q) - 2.0) <= 1e-10
    assert abs(variation_line_integral(plane(), flex, QB) - 2.0) <= 1e-10
    assert abs(variation_finite_difference(plane(), flex, Q, 1e-3) - 2.0) <= 1e-5


def test_harmonic_height_gives_zero():
    flex = FlexField.parse("0,0,u^2-v^2")
    for patch in (plane(), plane(Disk(0.2, -0.1, 0.7))):
        assert abs(variation_surface_integral(patch, flex, Q)) <= 1e-14
        assert abs(variation_line_integral(patch, flex, QB)) <= 1e-12


@pytest.mark.parametrize("patch", [plane(), paraboloid(), cap(1.0, 0.5)], ids=lambda p: p.describe())
def test_rigid_motion_variation_is_zero(patch):
    flex = rigid_motion_flex(patch, (0.4, -1.0, 0.6), (0.9, 0.2, -0.5))
    assert abs(variation_surface_integral(patch, flex, Q)) <= 1e-10
    assert abs(variation_line_integral(patch, flex, QB)) <= 1e-10
    assert abs(variation_finite_difference(patch, flex, Q)) <= 1e-9


@pytest.mark.parametrize("patch", [plane(), plane(Disk(0.0, 0.0, 0.8))], ids=["square", "disk"])
def test_compactly_supported_flex(patch):
    flex = bump_flex(patch.domain)
    assert abs(variation_line_integral(patch, flex, QB)) <= 1e-12
    assert abs(variation_surface_integral(patch, flex, Q)) <= 1e-8


@pytest.mark.parametrize("pair", PAIRS, ids=PAIR_IDS)
def test_surface_and_line_routes_agree(pair):
    assert abs(variation_surface_integral(pair.patch, pair.flex, Q) - variation_line_integral(pair.patch, pair.flex, QB)) <= 1e-8


@pytest.mark.parametrize("pair", PAIRS, ids=PAIR_IDS)
def test_finite_difference_agrees(pair):
    rep = variation_report(pair.patch, pair.flex, Q, QB)
    assert rep.disc_sf <= tol_fd(1e-3)
    assert rep.passed


def test_curved_flexes_have_nonzero_variation():
    # guards against the catalog only exercising zero variations on curved patches
    values = [variation_surface_integral(p.patch, p.flex, Q) for p in curved_flex_catalog()]
    assert all(abs(x) > 1e-2 for x in values)


def test_variation_scales_with_flex():
    pair = PAIRS[2]
    base = variation_report(pair.patch, pair.flex, Q, QB)
    tripled = variation_report(pair.patch, pair.flex.scaled(3.0), Q, QB)
    assert tripled.h_surface == pytest.approx(3 * base.h_surface, abs=1e-12)
    assert tripled.h_line == pytest.approx(3 * base.h_line, abs=1e-12)
    assert tripled.h_fd == pytest.approx(3 * base.h_fd, abs=1e-8)


def test_variation_is_additive():
    p = plane()
    v1 = FlexField.parse("0,0,u*v+u^3")
    v2 = rigid_motion_flex(p, (0.1, 0.2, 0.3), (0.5, -0.5, 1.0)) + FlexField.parse("0,0,exp(u)*v^2")
    r1, r2 = variation_report(p, v1, Q, QB), variation_report(p, v2, Q, QB)
    r12 = variation_report(p, v1 + v2, Q, QB)
    for key in ("h_surface", "h_line", "h_fd"):
        assert abs(getattr(r12, key) - getattr(r1, key) - getattr(r2, key)) <= 1e-9


def test_rigid_report_on_paraboloid():
    p = paraboloid()
    rep = variation_report(p, rigid_motion_flex(p, (1, 2, 3), (0.3, -0.7, 1.0)), Q, QB)
    assert rep.passed
    assert abs(rep.h_surface) <= 1e-10
    assert abs(rep.h_line) <= 1e-10
    assert abs(rep.h_fd) <= 1e-9


def test_non_flex_rejected_by_every_route():
    flex = FlexField.parse("u,0,0")
    for route in (
        lambda: variation_surface_integral(plane(), flex, Q),
        lambda: variation_line_integral(plane(), flex, QB),
        lambda: variation_finite_difference(plane(), flex, Q),
        lambda: variation_report(plane(), flex),
    ):
        with pytest.raises(PreconditionError):
            route()


def test_fd_error_is_second_order():
    pair = PAIRS[2]
    exact = variation_surface_integral(pair.patch, pair.flex, Q)
    hs = (1e-2, 5e-3, 2.5e-3)
    errs = [variation_finite_difference(pair.patch, pair.flex, Q, h, use_richardson=False) - exact for h in hs]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert ratios == pytest.approx([4.0, 4.0], rel=0.02)


def test_report_serialization_keys():
    d = variation_report(plane(), FlexField.parse("0,0,u^2"), Q, QB, erratum_probe=True).to_dict()
    for key in ("h_surface", "h_line", "h_fd", "disc_sl", "disc_sf", "disc_lf", "pass", "h_line_printed"):
        assert key in d


# -- the alternative boundary integrand ----------------------------------------------------


def test_printed_and_direct_coefficients_differ_in_du_sign():
    p = paraboloid()
    flex = curved_flex_catalog()[0].flex
    u, v = p.domain.random_points(np.random.default_rng(0), 30)
    (Pp, Qp), (Pd, Qd) = printed_line_coefficients(p, flex, u, v), direct_line_coefficients(p, flex, u, v)
    assert np.allclose(Qp, Qd, atol=1e-14)
    f_u = u
    zeta_v = -2 * v
    assert np.allclose(Pp - Pd, 2 * (1 + f_u**2) * zeta_v, atol=1e-13)


def test_printed_integrand_disagrees_on_hand_example():
    flex = FlexField.parse("0,0,u^2+v^2")
    assert printed_line_integral(plane(), flex, QB) == pytest.approx(0.0, abs=1e-14)
    assert variation_line_integral(plane(), flex, QB) == pytest.approx(2.0, abs=1e-14)


def test_printed_integrand_agrees_when_zeta_v_vanishes():
    # with zeta = u^2 the differing term 2 (1 + f_u^2) zeta_v is identically zero
    flex = FlexField.parse("0,0,u^2")
    rep = variation_report(plane(), flex, Q, QB, erratum_probe=True)
    assert rep.h_line_printed == pytest.approx(rep.h_line, abs=1e-14)


# -- sweep --------------------------------------------------------------------------------


def test_sweep_at_zero_matches_undeformed():
    p = cap(1.0, 0.5)
    rows = invariant_sweep(p, rigid_motion_flex(p, b=(0, 0, 1)), [0.0], Q)
    r = rows[0]
    assert r.total_mean_curvature == total_mean_curvature(p, Q)
    assert r.area == surface_area(p, Q)
    assert r.volume == projected_volume(p, Q)
    assert r.total_gauss_curvature == total_gauss_curvature(p, Q)


def test_horizontal_translation_sweep_is_constant():
    p = paraboloid()
    rows = invariant_sweep(p, rigid_motion_flex(p, a=(1.0, -0.5, 0.0)), [-0.1, 0.0, 0.1], Q)
    for col in ("total_mean_curvature", "area", "volume", "total_gauss_curvature"):
        vals = [getattr(r, col) for r in rows]
        assert max(vals) - min(vals) <= 1e-12, col


def test_rotation_sweep_changes_only_at_second_order():
    # x + t (b x x) is not a rigid motion; it stretches by sqrt(1 + t^2 |b|^2)
    p = paraboloid()
    ts = [-0.02, -0.01, 0.0, 0.01, 0.02]
    H = np.array([r.total_mean_curvature for r in invariant_sweep(p, rigid_motion_flex(p, b=(0.3, -0.7, 1.0)), ts, Q)])
    c = np.polyfit(ts, H, 4)[::-1]
    assert abs(c[1]) <= 1e-9
    assert abs(c[2]) > 1e-3


def test_sweep_slope_matches_variation():
    p, flex = plane(), FlexField.parse("0,0,u^2+v^2")
    t = np.linspace(-0.1, 0.1, 9)
    H = np.array([r.total_mean_curvature for r in invariant_sweep(p, flex, t, Q)])
    cubic = np.polyfit(t, H, 3)[::-1]
    assert abs(cubic[1] - 2.0) <= 1e-3
    # a quadratic fit absorbs the odd t^3 term into its slope: bias c3 * sum(t^4) / sum(t^2)
    quad = np.polyfit(t, H, 2)[::-1]
    bias = cubic[3] * np.sum(t**4) / np.sum(t**2)
    assert quad[1] == pytest.approx(cubic[1] + bias, abs=1e-6)


def test_sweep_marks_singular_rows():
    # the sweep does not require a flex; xi = -u collapses the u direction at t = 1
    p = plane()
    flex = FlexField.parse("-u,0,0")
    rows = invariant_sweep(p, flex, [0.5, 1.0], QuadratureSpec(8))
    assert rows[0].status == "ok"
    assert rows[1].status.startswith("irregular")
    assert math.isnan(rows[1].total_mean_curvature)
