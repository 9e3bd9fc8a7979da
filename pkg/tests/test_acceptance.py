"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to see them inline)."""

import math

import numpy as np

from riemann_examples.curve import Lambda, principal_w
from riemann_examples.analysis import (
    CurvatureGrid,
    abs_gauss_curvature,
    foliation_slices,
    line_fit_residual,
    max_center_curvature,
    plane_fit,
    verify_curvature_bound,
)
from riemann_examples.limits import (
    Annulus,
    ClipRegion,
    catenoid_decomposition_residuals,
    catenoid_limit_sweep,
    conjugate_check,
    end_spacing,
    helicoid_decomposition_residuals,
    helicoid_limit_sweep,
)
from riemann_examples.mesh import build_mesh, export
from riemann_examples.reference import (
    catenoid_integrand,
    catenoid_point,
    helicoid_integrand,
    helicoid_point,
)
from riemann_examples.weierstrass import (
    Normalization,
    immerse,
    immerse_grid,
    path_integral,
    period_vectors,
    route_vertices,
)
from riemann_examples.curve import continue_sheet

from conftest import curve_samples


def report(tag: str, passed: bool, detail: str = ""):
    print(f"ACCEPTANCE {tag}: {'PASS' if passed else 'FAIL'}  {detail}")
    assert passed, f"{tag} failed: {detail}"


def test_criterion_01_curvature_value_identity():
    worst = 0.0
    for lv in (0.1, 0.5, 1.0, 2.0, 10.0):
        lam = Lambda(lv)
        raw = Normalization.raw(lam)
        paper = Normalization.paper(lam)
        expect_raw = lv + 1.0 / lv
        expect_paper = 1.0 + lv * lv if lv < 1.0 else 1.0 + 1.0 / (lv * lv)
        for z in (1j, -1j):
            worst = max(worst, abs(abs_gauss_curvature(z, lam, raw) - expect_raw) / expect_raw)
            worst = max(worst, abs(abs_gauss_curvature(z, lam, paper) - expect_paper) / expect_paper)
    report("01 curvature-value-identity", worst < 1e-10, f"max rel err {worst:.2e}")


def test_criterion_02_universal_curvature_bound():
    grid = CurvatureGrid(r_min=1e-3, r_max=1e3, n_rad=512, n_ang=512)
    worst_max = 0.0
    worst_sharp = 0.0
    worst_loc = 0.0
    for lv in np.logspace(-3.0, 3.0, 9):
        rep = verify_curvature_bound(Lambda(float(lv)), grid)
        worst_max = max(worst_max, rep.max_abs_k)
        worst_sharp = max(worst_sharp, rep.refined_max)
        cell = math.hypot(math.log(1e6) / 511, 2.0 * math.pi / 512)
        dist = min(abs(rep.refined_argmax - 1j), abs(rep.refined_argmax + 1j))
        worst_loc = max(worst_loc, dist / cell)
    ok = worst_max <= 4.0 and worst_sharp <= 2.0 + 1e-3 and worst_loc <= 1.0
    report("02 universal-curvature-bound", ok,
           f"grid max {worst_max:.6f} <= 4, refined {worst_sharp:.6f} <= 2.001, "
           f"argmax within {worst_loc:.3f} cells of +-i")


def test_criterion_03_period_structure():
    worst_companion = 0.0
    worst_loop = 0.0
    for lv in (0.2, 1.0, 5.0):
        lam = Lambda(lv)
        norm = Normalization.paper(lam)
        pv = period_vectors(lam, norm)
        worst_companion = max(worst_companion,
                              float(np.linalg.norm(pv.companion) /
                                    np.linalg.norm(pv.translation)))
        p0 = immerse(lam, norm, [2j])[0].position
        p1 = immerse(lam, norm, [2j], winding=1)[0].position
        worst_loop = max(worst_loop, float(np.linalg.norm((p1 - p0) - pv.translation)))
    ok = worst_companion < 1e-6 and worst_loop < 1e-8
    report("03 period-structure", ok,
           f"|companion|/|T| {worst_companion:.2e}, loop-vs-T {worst_loop:.2e}")


def test_criterion_04_end_spacing():
    gaps = []
    for lv in (10.0, 100.0, 1000.0):
        lam = Lambda(lv)
        gaps.append(abs(end_spacing(lam, Normalization.paper(lam)) - 2.0 * math.pi))
    ok = gaps[-1] < 0.01 * 2.0 * math.pi and gaps[0] > gaps[1] > gaps[2]
    report("04 end-spacing", ok,
           f"|spacing - 2pi| = {[f'{g:.2e}' for g in gaps]} (decreasing, last within 1%)")


def test_criterion_05_catenoid_limit():
    annulus = Annulus(L=10.0, n_rad=24, n_ang=48)
    clip = ClipRegion("ball", 5.0)
    rep = catenoid_limit_sweep([0.1, 0.01, 0.001], annulus, clip)
    # absolute threshold frozen from the first oracle run of this sweep
    # (0.00632 on this grid), with a factor-two margin
    ok = rep.is_strictly_decreasing() and rep.deviations[-1] < 0.013
    report("05 catenoid-limit", ok,
           f"deviations {[f'{d:.4f}' for d in rep.deviations]}, final < 0.013")


def test_criterion_06_helicoid_limit():
    annulus = Annulus(L=10.0, n_rad=24, n_ang=48)
    clip = ClipRegion("ball", 5.0)
    rep = helicoid_limit_sweep([10.0, 100.0, 1000.0], annulus, clip)
    # frozen from the first oracle run (0.00639), factor-two margin
    ok = rep.is_strictly_decreasing() and rep.deviations[-1] < 0.013
    report("06 helicoid-limit", ok,
           f"deviations {[f'{d:.4f}' for d in rep.deviations]}, final < 0.013")


def test_criterion_07_conjugacy_identity():
    worst = 0.0
    for lv in (0.3, 1.0, 3.0):
        lam = Lambda(lv)
        rep = conjugate_check(lam, curve_samples(lam, 100, seed=21))
        worst = max(worst, rep.max_residual)
    report("07 conjugacy-identity", worst < 1e-10, f"max residual {worst:.2e}")


def test_criterion_08_symmetry_and_foliation(grids_lambda1):
    lam1 = Lambda(1.0)
    norm1 = Normalization.paper(lam1)

    # line colinearity and planar-geodesic coplanarity
    worst_line = 0.0
    worst_plane = 0.0
    for lv in (0.5, 1.0, 2.0):
        lam = Lambda(lv)
        norm = Normalization.paper(lam)
        ts = np.linspace(0.15, 0.95, 9) * min(lv, 1.0)
        pts = [sp.position for sp in immerse(lam, norm, ts.astype(complex))]
        worst_line = max(worst_line, line_fit_residual(pts))
        tg = np.linspace(1.3, 3.5, 9) * max(lv, 1.0)
        pg = np.array([sp.position for sp in immerse(lam, norm, tg.astype(complex))])
        normal, _, dev = plane_fit(pg)
        span = float(np.linalg.norm(pg.max(axis=0) - pg.min(axis=0)))
        worst_plane = max(worst_plane, dev / span, abs(abs(normal[1]) - 1.0))

    # level circles at 20 interior heights for lam = 1
    spacing = end_spacing(lam1, norm1)
    heights = spacing * np.linspace(0.15, 0.85, 20)
    slices = foliation_slices(grids_lambda1, heights)
    worst_fit = max(s.residual / s.radius for s in slices)
    all_circles = all(s.kind == "circle" for s in slices)

    # radius growth and center-curve flattening along lam
    radii = []
    curvatures = []
    for lv in (1.0, 3.0, 10.0, 30.0):
        lam = Lambda(lv)
        norm = Normalization.paper(lam)
        grids = [immerse_grid(lam, norm, r_min=0.1, r_max=10.0, n_rad=20,
                              n_ang=40, sheet_sign=s, closed=True) for s in (+1, -1)]
        sp0 = end_spacing(lam, norm)
        base_h = float(immerse(lam, norm, [0.5 * min(lv, 1.0) + 0j])[0].position[2])
        sl = foliation_slices(grids, base_h + sp0 * np.linspace(0.25, 0.75, 7))
        radii.append(sl[3].radius)
        curvatures.append(max_center_curvature(sl))
    trend_ok = (all(b > a for a, b in zip(radii[:-1], radii[1:])) and
                all(b < a for a, b in zip(curvatures[:-1], curvatures[1:])))

    ok = (worst_line < 1e-7 and worst_plane < 1e-7 and worst_fit < 1e-6
          and all_circles and trend_ok)
    report("08 symmetry-and-foliation", ok,
           f"line {worst_line:.2e}, plane {worst_plane:.2e}, circle fit "
           f"{worst_fit:.2e}, radii {[f'{r:.1f}' for r in radii]}, "
           f"center curvature {[f'{c:.4f}' for c in curvatures]}")


def test_criterion_09_decomposition_identities():
    rng = np.random.default_rng(17)
    rho = np.exp(rng.uniform(math.log(0.11), math.log(9.0), 50))
    targets = rho * np.exp(1j * rng.uniform(-3.0, 3.0, 50))
    r_cat = float(catenoid_decomposition_residuals(0.01, targets).max())
    r_hel = float(helicoid_decomposition_residuals(100.0, targets).max())
    ok = r_cat < 1e-8 and r_hel < 1e-8
    report("09 decomposition-identities", ok,
           f"catenoid split {r_cat:.2e}, helicoid split {r_hel:.2e}")


def test_criterion_10_infrastructure(tmp_path):
    lam = Lambda(2.0)
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(200):
        z = math.exp(rng.uniform(math.log(0.11), math.log(9.0))) * \
            np.exp(1j * rng.uniform(-3.0, 3.0))
        verts = np.asarray(route_vertices(complex(z), lam), dtype=complex)
        path = continue_sheet(verts, principal_w(verts[0], lam), lam)
        cat = path_integral(path, lambda zz, ww: catenoid_integrand(zz)).real
        hel = -path_integral(path, lambda zz, ww: helicoid_integrand(zz)).real
        worst = max(worst, float(np.linalg.norm(cat - catenoid_point(z))))
        worst = max(worst, float(np.linalg.norm(hel - helicoid_point(z, 0))))

    mesh_bytes = []
    for name in ("m1.ply", "m2.ply"):
        mesh = build_mesh(lam, Normalization.paper(lam), n_rad=8, n_ang=16,
                          r_min=0.1, r_max=10.0)
        p = tmp_path / name
        export(mesh, "ply", p)
        mesh_bytes.append(p.read_bytes())
    deterministic = mesh_bytes[0] == mesh_bytes[1]

    ok = worst < 1e-8 and deterministic
    report("10 infrastructure", ok,
           f"closed-form vs quadrature {worst:.2e}, deterministic export {deterministic}")
