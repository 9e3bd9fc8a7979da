import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riemann_examples.curve import CurvePoint, Lambda, continue_sheet, principal_w
from riemann_examples.errors import SingularPoint
from riemann_examples.reference import catenoid_integrand
from riemann_examples.weierstrass import (
    BASE_POINT,
    Normalization,
    PeriodVector,
    companion_cycle_vertices,
    cycle_real_period,
    gauss_map,
    immerse,
    immerse_grid,
    integrate,
    make_sheeted_path,
    metric_factor,
    normalization_scale,
    path_integral,
    period_vectors,
    phi,
    route_vertices,
    sheet_connection,
    translation_cycle_vertices,
    vertical_end_spacing,
)



# ---------------------------------------------------------------------------
# pointwise data
# ---------------------------------------------------------------------------

def test_phi_vanishing_first_component_at_unit_real():
    lam = Lambda(4.0)
    w = principal_w(1.0, lam)     # rhs(1) = -3.75, so w = i sqrt(3.75)
    assert w == pytest.approx(1j * math.sqrt(3.75))
    val = phi(CurvePoint(1.0, w, lam), Normalization.raw(lam)).components
    assert val[0] == pytest.approx(0.0)
    assert val[2] == pytest.approx(-2j / math.sqrt(3.75))


def test_paper_normalization_at_lambda_one_is_identity():
    lam = Lambda(1.0)
    assert normalization_scale(Normalization.paper(lam)) == 1.0
    assert normalization_scale(Normalization.raw(lam)) == 1.0


def test_normalization_scale_symmetry():
    # the normalized family always rescales by the larger of sqrt(lam), 1/sqrt(lam)
    assert normalization_scale(Normalization.paper(Lambda(4.0))) == pytest.approx(2.0)
    assert normalization_scale(Normalization.paper(Lambda(0.25))) == pytest.approx(2.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.3, 3.0), st.floats(-3.1, 3.1), st.booleans())
def test_null_identity(lv, rho, ang, flip):
    lam = Lambda(lv)
    z = rho * complex(math.cos(ang), math.sin(ang))
    if min(abs(z - b) for b in (0.0, lv, -1.0 / lv)) < 1e-6:
        return
    w = principal_w(z, lam) * (-1 if flip else 1)
    val = phi(CurvePoint(z, w, lam), Normalization.paper(lam))
    assert val.null_residual < 1e-9


def test_phi_singular_points():
    lam = Lambda(2.0)
    with pytest.raises(SingularPoint):
        phi(CurvePoint(2.0, 0.0, lam), Normalization.raw(lam))


def test_gauss_map_values():
    assert np.allclose(gauss_map(0.0 + 0.0j), [0.0, 0.0, -1.0])
    assert gauss_map(np.exp(0.7j))[2] == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(gauss_map(1j), [0.0, 1.0, 0.0])
    lam = Lambda(2.0)
    assert np.allclose(gauss_map(CurvePoint(1j, principal_w(1j, lam), lam)), [0, 1, 0])


def test_metric_factor():
    lam = Lambda(1.0)
    p = CurvePoint(1j, principal_w(1j, lam), lam)
    assert abs(p.w) ** 2 == pytest.approx(2.0)
    assert metric_factor(p, Normalization.raw(lam)) == pytest.approx(0.5)
    # depends on |w| only: sheet partners agree
    assert metric_factor(p.sheet_partner, Normalization.raw(lam)) == pytest.approx(0.5)
    # blows up toward a branch point
    z_near = lam.value + 1e-5
    q = CurvePoint(z_near, principal_w(z_near, lam), lam)
    assert metric_factor(q, Normalization.raw(lam)) > 1e3


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def test_constant_path_integrates_to_zero():
    lam = Lambda(2.0)
    path = continue_sheet([0.5 + 0.5j], principal_w(0.5 + 0.5j, lam), lam)
    assert np.allclose(integrate(path, Normalization.raw(lam)), 0.0)


def test_catenoid_cross_check_third_coordinate():
    # closed form x3 = 2 ln|z| for the degenerate catenoid data, checked
    # against quadrature along the real segment 1 -> e
    lam = Lambda(0.5)
    verts = np.linspace(1.0, math.e, 7).astype(complex)
    path = continue_sheet(verts, principal_w(1.0, lam), lam)
    val = path_integral(path, lambda z, w: catenoid_integrand(z)).real
    assert val[2] == pytest.approx(2.0, abs=1e-12)


def test_reversed_path_negates_integral():
    lam = Lambda(2.0)
    verts = [1.0, 1.5 + 1.0j, 0.5 + 2.0j]
    path = continue_sheet(verts, principal_w(1.0, lam), lam)
    norm = Normalization.paper(lam)
    fwd = integrate(path, norm)
    bwd = integrate(path.reversed(), norm)
    assert np.allclose(fwd, -bwd, atol=1e-10)


def test_homotopic_routes_agree():
    lam = Lambda(2.0)
    norm = Normalization.paper(lam)
    target = 0.7 * np.exp(2.2j)
    direct = immerse(lam, norm, [target])[0].position
    # alternate class-0 route: sweep first, then radial
    from riemann_examples.weierstrass import _angular_leg, _radial_leg
    verts = [BASE_POINT] + _angular_leg(1.0, 0.0, 2.2, lam) + _radial_leg(1.0, 0.7, 2.2, lam)
    verts[-1] = target
    path, ss, se = make_sheeted_path(verts, lam)
    alt = integrate(path, norm, singular_start=ss, singular_end=se)
    assert np.linalg.norm(direct - alt) < 1e-9


def test_null_homotopic_loop_vanishes():
    lam = Lambda(2.0)
    norm = Normalization.paper(lam)
    taus = np.linspace(0.0, 2.0 * math.pi, 97)
    verts = 2.0 + 2.0j + 0.7 * np.exp(1j * taus)
    path = continue_sheet(verts, principal_w(verts[0], lam), lam)
    assert np.linalg.norm(integrate(path, norm)) < 1e-9


# ---------------------------------------------------------------------------
# periods
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("lv", [0.2, 1.0, 5.0])
def test_period_structure(lv):
    lam = Lambda(lv)
    pv = period_vectors(lam, Normalization.paper(lam))
    t_norm = np.linalg.norm(pv.translation)
    assert t_norm > 0
    assert np.linalg.norm(pv.companion) < 1e-6 * t_norm


def test_translation_third_component_is_twice_end_spacing_for_large_lam():
    lam = Lambda(100.0)
    norm = Normalization.paper(lam)
    pv = period_vectors(lam, norm)
    spacing = vertical_end_spacing(lam, norm)
    assert pv.translation[2] == pytest.approx(2.0 * spacing, abs=1e-8)


def test_period_vector_invariant_enforced():
    with pytest.raises(ValueError):
        PeriodVector(np.array([1.0, 0.0, 0.0]), np.array([0.1, 0.0, 0.0]))
    with pytest.raises(ValueError):
        PeriodVector(np.zeros(3), np.zeros(3))


def test_period_lattice_composition():
    # two translation circuits and one companion circuit integrate to 2T
    lam = Lambda(2.0)
    norm = Normalization.paper(lam)
    pv = period_vectors(lam, norm)
    t = cycle_real_period(translation_cycle_vertices(lam), lam, norm)
    c = cycle_real_period(companion_cycle_vertices(lam), lam, norm)
    assert np.linalg.norm((2.0 * t + c) - 2.0 * pv.translation) < 1e-8


@pytest.mark.parametrize("lv", [0.5, 1.0, 3.0])
def test_winding_adds_translation(lv):
    lam = Lambda(lv)
    norm = Normalization.paper(lam)
    pv = period_vectors(lam, norm)
    p0 = immerse(lam, norm, [2j])[0].position
    p1 = immerse(lam, norm, [2j], winding=1)[0].position
    assert np.linalg.norm((p1 - p0) - pv.translation) < 1e-8


# ---------------------------------------------------------------------------
# immersion
# ---------------------------------------------------------------------------

def test_base_point_maps_to_origin():
    lam = Lambda(2.0)
    sp = immerse(lam, Normalization.paper(lam), [1.0 + 0.0j])[0]
    assert np.allclose(sp.position, 0.0)


def test_sheet_connection_lies_in_symmetry_locus():
    # the two base-point lifts are mirror partners for lam > 1 (offset along
    # x2) and line-flip partners for lam < 1 (offset in the x1-x3 plane)
    v_hi = sheet_connection(3.0, Normalization.paper(3.0))
    assert abs(v_hi[0]) < 1e-10 and abs(v_hi[2]) < 1e-10 and abs(v_hi[1]) > 1.0
    v_lo = sheet_connection(0.3, Normalization.paper(0.3))
    assert abs(v_lo[1]) < 1e-10 and np.linalg.norm(v_lo) > 1.0
    assert np.allclose(sheet_connection(1.0, Normalization.paper(1.0)), 0.0)


def test_line_images_are_colinear():
    from riemann_examples.analysis import line_fit_residual
    for lv in (0.5, 2.0):
        lam = Lambda(lv)
        norm = Normalization.paper(lam)
        ts = np.linspace(0.15, 0.95, 9) * min(lv, 1.0)
        pts = [sp.position for sp in immerse(lam, norm, ts.astype(complex))]
        assert line_fit_residual(pts) < 1e-7
        # second line family: t <= -1/lam
        ts2 = -np.linspace(1.25, 3.0, 9) / lv
        pts2 = [sp.position for sp in immerse(lam, norm, ts2.astype(complex))]
        assert line_fit_residual(pts2) < 1e-7


def test_planar_geodesics_are_coplanar_with_x2_normal():
    from riemann_examples.analysis import plane_fit
    for lv in (0.5, 2.0):
        lam = Lambda(lv)
        norm = Normalization.paper(lam)
        ts = np.linspace(1.3, 3.5, 9) * max(lv, 1.0)
        pts = np.array([sp.position for sp in immerse(lam, norm, ts.astype(complex))])
        normal, _, dev = plane_fit(pts)
        span = np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))
        assert dev / span < 1e-7
        assert abs(abs(normal[1]) - 1.0) < 1e-7
        ts2 = -np.linspace(0.2, 0.9, 9) / lv
        pts2 = np.array([sp.position for sp in immerse(lam, norm, ts2.astype(complex))])
        normal2, _, dev2 = plane_fit(pts2)
        span2 = np.linalg.norm(pts2.max(axis=0) - pts2.min(axis=0))
        assert dev2 / span2 < 1e-7
        assert abs(abs(normal2[1]) - 1.0) < 1e-7


def test_grid_immersion_matches_per_target_immersion():
    for lv in (0.5, 1.0, 2.0):
        lam = Lambda(lv)
        norm = Normalization.paper(lam)
        grid = immerse_grid(lam, norm, r_min=0.1, r_max=10.0, n_rad=8, n_ang=16)
        for i, j in [(0, 0), (3, 5), (7, 15), (4, 8)]:
            z = grid.z[i, j]
            sp = immerse(lam, norm, [z])[0]
            if abs(sp.source.w - grid.w[i, j]) > 1e-8 * (1.0 + abs(grid.w[i, j])):
                sp = immerse(lam, norm, [z], sheet_sign=-1)[0]
            assert np.linalg.norm(sp.position - grid.positions[i, j]) < 1e-9


def test_conformality_of_immersion():
    # discrete first fundamental form vs the metric coefficient; the
    # immersion integrand is twice the (g, eta) data, so positions realize
    # four times the metric coefficient, at second order in the step
    lam = Lambda(2.0)
    norm = Normalization.paper(lam)

    def one_sided_error(h):
        errs = []
        for z0 in (0.8 + 0.6j, -1.2 + 0.9j, 0.3 - 1.1j):
            p0, pp, pm = (sp.position for sp in immerse(
                lam, norm, [z0, z0 + h, z0 - h]))
            e_disc = (np.linalg.norm(pp - pm) / (2.0 * h)) ** 2
            w0 = immerse(lam, norm, [z0])[0].source.w
            e_true = 4.0 * metric_factor(CurvePoint(z0, w0, lam), norm)
            errs.append(abs(e_disc - e_true) / e_true)
        return max(errs)

    e1, e2 = one_sided_error(1e-2), one_sided_error(5e-3)
    order = math.log2(e1 / e2) / math.log2(2.0)
    assert order >= 1.8


def test_end_spacing_orientation_and_fixed_spacing_normalization():
    lam = Lambda(5.0)
    norm = Normalization.paper(lam)
    from riemann_examples.weierstrass import upper_semicircle_vertices
    verts = upper_semicircle_vertices()
    path, ss, se = make_sheeted_path(verts, lam)
    fwd = integrate(path, norm, singular_start=ss, singular_end=se)
    bwd = integrate(path.reversed(), norm, singular_start=se, singular_end=ss)
    assert fwd[2] == pytest.approx(-bwd[2], abs=1e-10)

    spacing = vertical_end_spacing(lam, Normalization.spacing(lam))
    assert spacing == pytest.approx(2.0 * math.pi, abs=1e-9)


def test_route_is_deterministic():
    lam = Lambda(0.5)
    v1 = route_vertices(0.3 * np.exp(1.1j), lam)
    v2 = route_vertices(0.3 * np.exp(1.1j), lam)
    assert np.array_equal(np.asarray(v1), np.asarray(v2))


def test_route_blocked_inside_branch_guard():
    from riemann_examples.curve import delta_branch
    from riemann_examples.errors import PathBlocked
    lam = Lambda(2.0)
    target = 2.0 + 0.2 * delta_branch(lam)
    with pytest.raises(PathBlocked):
        route_vertices(target, lam)
    with pytest.raises(SingularPoint):
        route_vertices(0.0 + 0.0j, lam)
