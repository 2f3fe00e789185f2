import math

import numpy as np
import pytest

from flexcurv.catalog import cap, curved_flex_catalog, dome, paraboloid, plane, saddle, verification_catalog
from flexcurv.errors import NumericalDomainError
from flexcurv.expr import ScalarField2
from flexcurv.flex import FlexField, rigid_motion_flex
from flexcurv.geometry import (
    MongePatch,
    ParamPatch,
    RegularityError,
    check_regular,
    circle,
    first_variation_of_length,
    fundamental_forms,
    gauss_curvature,
    mean_curvature,
    polyline,
    principal_curvatures,
    quadratic_bezier,
    segment,
    surface_area,
    total_mean_curvature,
    unit_normal,
)
from flexcurv.quadrature import Disk, QuadratureSpec, Rectangle

Q64 = QuadratureSpec(64)
CAP_VALUE = 2 * math.pi * (1 - math.sqrt(3) / 2)


def monge(src, domain=Rectangle(-1, 1, -1, 1)):
    return MongePatch(ScalarField2.parse(src), domain)


def test_plane_normal():
    n = unit_normal(monge("0"), np.array([0.1, 0.7]), np.array([-0.3, 0.2]))
    assert np.array_equal(n, [[0, 0], [0, 0], [1, 1]])


def test_tilted_plane_normal():
    n = unit_normal(monge("u"), 0.3, 0.4)
    assert np.allclose(n, np.array([-1, 0, 1]) / math.sqrt(2), atol=1e-15)


def test_paraboloid_normal_at_vertex():
    assert np.array_equal(unit_normal(paraboloid(), 0.0, 0.0), [0.0, 0.0, 1.0])


@pytest.mark.parametrize(
    "src, expected", [("0", 0.0), ("u*v", 0.0), ("(u^2+v^2)/2", 1.0)]
)
def test_mean_curvature_at_origin(src, expected):
    assert mean_curvature(monge(src), 0.0, 0.0) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    "src, expected", [("0", (0.0, 0.0)), ("u*v", (1.0, -1.0)), ("(u^2+v^2)/2", (1.0, 1.0))]
)
def test_principal_curvatures_at_origin(src, expected):
    k1, k2 = principal_curvatures(monge(src), 0.0, 0.0)
    assert (k1, k2) == pytest.approx(expected, abs=1e-15)


def test_sphere_curvature_signs():
    # bowl opens upward, so the upward normal points to the centre
    assert mean_curvature(cap(1.0, 0.5), 0.1, 0.2) == pytest.approx(1.0, abs=1e-14)
    assert gauss_curvature(cap(1.0, 0.5), 0.1, 0.2) == pytest.approx(1.0, abs=1e-14)
    assert mean_curvature(dome(1.0, 0.5), 0.1, 0.2) == pytest.approx(-1.0, abs=1e-14)


SURFACES = [plane(), paraboloid(), saddle(), cap(1.0, 0.5), monge("exp(u)*cos(v)/3")]


@pytest.mark.parametrize("patch", SURFACES, ids=lambda p: p.describe())
def test_principal_mean_equals_mean_curvature(patch):
    u, v = patch.domain.random_points(np.random.default_rng(5), 1000)
    k1, k2 = principal_curvatures(patch, u, v)
    assert np.max(np.abs((k1 + k2) / 2 - mean_curvature(patch, u, v))) <= 1e-12


@pytest.mark.parametrize("patch", SURFACES, ids=lambda p: p.describe())
def test_monge_matches_general_forms(patch):
    u, v = patch.domain.random_points(np.random.default_rng(6), 200)
    general = patch.as_param_patch()
    assert np.allclose(mean_curvature(general, u, v), mean_curvature(patch, u, v), atol=1e-12)
    assert np.allclose(gauss_curvature(general, u, v), gauss_curvature(patch, u, v), atol=1e-12)
    assert np.allclose(unit_normal(general, u, v), unit_normal(patch, u, v), atol=1e-14)


def test_plane_total_mean_curvature_is_zero():
    assert total_mean_curvature(plane(), Q64) == 0.0
    assert total_mean_curvature(plane(Disk(0.3, 0.1, 2.0)), Q64) == 0.0


def test_cap_total_mean_curvature():
    assert abs(total_mean_curvature(cap(1.0, 0.5), Q64) - CAP_VALUE) <= 1e-9


def test_larger_cap_total_mean_curvature():
    assert abs(total_mean_curvature(cap(2.0, 1.0), Q64) - 2 * math.pi * (2 - math.sqrt(3))) <= 1e-9


def test_dome_has_opposite_sign():
    assert abs(total_mean_curvature(dome(1.0, 0.5), Q64) + CAP_VALUE) <= 1e-9


def test_cap_area_closed_form():
    assert surface_area(cap(1.0, 0.5), Q64) == pytest.approx(2 * math.pi * (1 - math.sqrt(0.75)), abs=1e-12)


@pytest.mark.parametrize("lam", [2.0, 0.5, 3.0])
def test_scaling_homogeneity(lam):
    p = MongePatch(ScalarField2.parse("u^2/3+u*v/5+v^3/7"), Rectangle(-0.5, 0.5, 0.0, 1.0))
    # surface scaled by lam: lam * f(u/lam, v/lam) over the scaled domain
    scaled = MongePatch(
        ScalarField2.parse(f"{lam}*((u/{lam})^2/3+(u/{lam})*(v/{lam})/5+(v/{lam})^3/7)"),
        p.domain.scaled(lam),
    )
    base = total_mean_curvature(p, Q64)
    assert abs(total_mean_curvature(scaled, Q64) - lam * base) <= 1e-9 * abs(lam * base)


def test_cap_scaling_doubles():
    base = total_mean_curvature(cap(1.0, 0.5), Q64)
    assert abs(total_mean_curvature(cap(2.0, 1.0), Q64) - 2 * base) <= 1e-9 * 2 * base


def test_fundamental_forms_of_plane():
    ff = fundamental_forms(plane(), 0.5, 0.5)
    assert (ff.E, ff.F, ff.G, ff.L, ff.M, ff.N) == (1.0, 0.0, 1.0, 0.0, 0.0, 0.0)


def test_degenerate_parametrization_raises():
    x = ScalarField2.parse("u+v")
    p = ParamPatch(x, x, ScalarField2.parse("0"), Rectangle(0, 1, 0, 1))
    with pytest.raises(RegularityError) as info:
        check_regular(p, QuadratureSpec(4))
    assert isinstance(info.value, NumericalDomainError)
    assert info.value.point is not None


# -- first variation of length ----------------------------------------------------


def test_stretch_field_lengthens_segment():
    p = plane()
    flex = FlexField.parse("u,0,0")
    assert first_variation_of_length(p, segment((0, 0), (1, 0)), flex) == pytest.approx(1.0, abs=1e-14)


def test_vertical_field_on_plane_preserves_length():
    p = plane()
    flex = FlexField.parse("0,0,sin(3*u)*v^2+u^4")
    curve = quadratic_bezier((0.1, 0.1), (0.9, 0.2), (0.4, 0.8))
    assert first_variation_of_length(p, curve, flex) == 0.0


@pytest.mark.parametrize("patch", [plane(), paraboloid(), saddle(), cap(1.0, 0.5)], ids=lambda p: p.describe())
def test_rigid_motion_preserves_length(patch):
    flex = rigid_motion_flex(patch, (0.3, -1.0, 2.0), (0.4, 0.9, -0.6))
    c = circle((0.0, 0.0), 0.3) if isinstance(patch.domain, Disk) else polyline([(0.1, 0.1), (0.6, 0.2), (0.3, 0.7)])
    assert abs(first_variation_of_length(patch, c, flex)) <= 1e-12


def _random_curve(rng, domain):
    pts = domain.random_points(rng, 3)
    return quadratic_bezier(*zip(*pts))


PAIRS = verification_catalog() + curved_flex_catalog()


@pytest.mark.parametrize("pair", PAIRS, ids=lambda pr: pr.label)
def test_flexes_are_length_stationary(pair):
    rng = np.random.default_rng(17)
    d = pair.patch.domain
    shrink = d.scaled(0.9) if isinstance(d, Disk) else d
    for _ in range(20):
        assert abs(first_variation_of_length(pair.patch, _random_curve(rng, shrink), pair.flex, nodes=128)) <= 1e-8


def test_zero_speed_curve_raises():
    with pytest.raises(NumericalDomainError):
        first_variation_of_length(plane(), segment((0.5, 0.5), (0.5, 0.5)), FlexField.parse("0,0,u"))
