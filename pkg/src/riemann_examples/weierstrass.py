"""Weierstrass representation of the Riemann minimal examples.

The surface data on the double cover is g = z, eta = s dz / (z w), giving the
integrand vector

    Phi(z, w) = s * ( (1 - z^2)/(z w),  i (1 + z^2)/(z w),  2/w )

whose real contour integral from the base point z0 = 1 immerses the cover
into R^3.  The scale s is 1 for the raw family, sqrt(lam) (lam >= 1) or
1/sqrt(lam) (lam <= 1) for the normalized family whose limits are the
catenoid and helicoid, or is derived so that the vertical distance between
adjacent planar ends is exactly 2*pi.

Integration is adaptive Gauss-Kronrod on sheeted polylines.  Square-root
singular endpoints (paths that start or end at a finite branch point, which
happens for every path at lam = 1 where the base point is a branch point)
are handled by the substitution u^2 = z - z_branch.
"""

from __future__ import annotations

import cmath
import enum
import functools
import heapq
import math
from dataclasses import dataclass

import numpy as np

from .curve import (
    BranchDeparture,
    CurvePoint,
    Lambda,
    SheetedPath,
    as_lambda,
    branch_points,
    continue_sheet,
    curve_rhs,
    delta_branch,
    principal_w,
    sheeted_path_from_branch,
)
from .errors import PathBlocked, QuadratureFailure, SingularPoint

#: Base point of every immersion.
BASE_POINT = 1.0 + 0.0j

#: Default absolute quadrature tolerance per unit of path length.
TOL_PER_UNIT = 1e-10

#: Panel cap of the adaptive refinement, per path segment.
MAX_PANELS = 1 << 16


# ---------------------------------------------------------------------------
# normalizations
# ---------------------------------------------------------------------------

class NormalizationKind(str, enum.Enum):
    UNNORMALIZED = "raw"
    PAPER = "paper"
    FIXED_VERTICAL_SPACING = "spacing"


@dataclass(frozen=True)
class Normalization:
    """Selects the scale s multiplying eta."""

    kind: NormalizationKind
    lam: Lambda

    def __post_init__(self):
        object.__setattr__(self, "kind", NormalizationKind(self.kind))
        object.__setattr__(self, "lam", as_lambda(self.lam))

    @classmethod
    def raw(cls, lam) -> "Normalization":
        return cls(NormalizationKind.UNNORMALIZED, as_lambda(lam))

    @classmethod
    def paper(cls, lam) -> "Normalization":
        return cls(NormalizationKind.PAPER, as_lambda(lam))

    @classmethod
    def spacing(cls, lam) -> "Normalization":
        return cls(NormalizationKind.FIXED_VERTICAL_SPACING, as_lambda(lam))


def normalization_scale(norm: Normalization) -> float:
    """The factor s applied to eta (hence to the whole immersion)."""
    lv = norm.lam.value
    if norm.kind is NormalizationKind.UNNORMALIZED:
        return 1.0
    if norm.kind is NormalizationKind.PAPER:
        return math.sqrt(lv) if lv >= 1.0 else 1.0 / math.sqrt(lv)
    return _fixed_spacing_scale(lv)


@functools.lru_cache(maxsize=256)
def _fixed_spacing_scale(lam_value: float) -> float:
    raw = raw_end_spacing(Lambda(lam_value))
    if raw == 0.0:
        raise QuadratureFailure("raw end spacing vanished; cannot derive spacing scale")
    return 2.0 * math.pi / raw


# ---------------------------------------------------------------------------
# pointwise data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiValue:
    """Integrand vector at one point of the cover."""

    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=complex)
        if c.shape != (3,):
            raise ValueError("PhiValue holds exactly three complex components")
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    @property
    def null_residual(self) -> float:
        """Relative size of phi1^2 + phi2^2 + phi3^2 (zero for valid data)."""
        c = self.components
        return float(abs(np.sum(c * c)) / max(np.sum(np.abs(c) ** 2), 1e-300))


def phi_components(z, w, norm: Normalization):
    """Vectorized integrand; z, w may be scalars or equal-shaped arrays."""
    s = normalization_scale(norm)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    zw = z * w
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.stack([
            s * (1.0 - z * z) / zw,
            s * 1j * (1.0 + z * z) / zw,
            s * 2.0 / w,
        ])
    return out


def phi(point: CurvePoint, norm: Normalization) -> PhiValue:
    if point.w == 0 or point.z == 0:
        raise SingularPoint(f"integrand singular at (z, w) = ({point.z}, {point.w})")
    return PhiValue(phi_components(point.z, point.w, norm))


def unit_normal(z):
    """Stereographic unit normal of the Gauss map g = z; vectorized."""
    z = np.asarray(z, dtype=complex)
    d = 1.0 + np.abs(z) ** 2
    n = np.stack([2.0 * z.real, 2.0 * z.imag, np.abs(z) ** 2 - 1.0], axis=-1)
    return n / d[..., None]


def gauss_map(point):
    """Unit normal at a curve point (only z enters; both sheets share it)."""
    z = point.z if isinstance(point, CurvePoint) else point
    return unit_normal(z)


def metric_factor(point: CurvePoint, norm: Normalization) -> float:
    """Coefficient of |dz|^2 in the induced metric of the (g, eta) data,
    s^2 (1 + |z|^2)^2 / (4 |z|^2 |w|^2).

    Note the immersion integrand used here carries an extra factor 2 relative
    to the (g, eta) convention behind this formula, so immersed positions
    realize 4x this coefficient.
    """
    if point.w == 0 or point.z == 0:
        raise SingularPoint("metric factor singular at w = 0 or z = 0")
    s = normalization_scale(norm)
    az2 = abs(point.z) ** 2
    return s * s * (1.0 + az2) ** 2 / (4.0 * az2 * abs(point.w) ** 2)


# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15 panels
# ---------------------------------------------------------------------------

_K15_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_K15_WEIGHTS = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_G7_WEIGHTS = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])


def _gk_panel(f, a: float, b: float):
    h = 0.5 * (b - a)
    x = 0.5 * (a + b) + h * _K15_NODES
    y = np.asarray(f(x))
    if not np.all(np.isfinite(y)):
        raise QuadratureFailure(f"non-finite integrand values on [{a}, {b}]")
    k = h * (y @ _K15_WEIGHTS)
    g = h * (y[..., 1::2] @ _G7_WEIGHTS)
    return k, float(np.max(np.abs(k - g)))


def _adaptive_vec(f, a: float, b: float, tol: float):
    """Adaptive bisection of GK panels for a vector-valued complex integrand."""
    val, err = _gk_panel(f, a, b)
    if err <= tol:
        return val
    counter = 0
    panels = [(-err, a, counter, b, val)]
    total_err = err
    n_panels = 1
    while total_err > tol:
        if n_panels >= MAX_PANELS:
            raise QuadratureFailure(
                f"tolerance {tol:.2e} not reached with {n_panels} panels "
                f"(error estimate {total_err:.2e})"
            )
        neg_err, a0, _, b0, _ = heapq.heappop(panels)
        m = 0.5 * (a0 + b0)
        v1, e1 = _gk_panel(f, a0, m)
        v2, e2 = _gk_panel(f, m, b0)
        counter += 1
        heapq.heappush(panels, (-e1, a0, counter, m, v1))
        counter += 1
        heapq.heappush(panels, (-e2, m, counter, b0, v2))
        total_err += e1 + e2 + neg_err
        n_panels += 1
    ordered = sorted(panels, key=lambda p: p[1])
    return np.sum([p[4] for p in ordered], axis=0)


def _nearest_roots(roots, refs):
    """Vectorized choice between +-roots, whichever is closer to refs."""
    flip = np.abs(roots - refs) > np.abs(roots + refs)
    return np.where(flip, -roots, roots)


# ---------------------------------------------------------------------------
# path integrals
# ---------------------------------------------------------------------------

def _segment_integral(fn, za, wa, zb, wb, lam: Lambda, tol: float):
    dz = zb - za
    dw = wb - wa

    def f(t):
        z = za + t * dz
        ref = wa + t * dw
        w = _nearest_roots(np.sqrt(curve_rhs(z, lam).astype(complex)), ref)
        return fn(z, w) * dz

    return _adaptive_vec(f, 0.0, 1.0, tol)


def _branch_w_table(b, direction, u_max, w_far, lam: Lambda, levels: int = 60):
    """Geometric table of continued w values along z = b + u^2 * direction,
    stepping from the regular end down toward the branch point."""
    us = u_max * 0.5 ** np.arange(levels + 1)
    ws = np.empty(levels + 1, dtype=complex)
    ws[0] = w_far
    for k in range(1, levels + 1):
        z = b + us[k] ** 2 * direction
        r = cmath.sqrt(curve_rhs(z, lam))
        ws[k] = r if abs(r - ws[k - 1]) <= abs(r + ws[k - 1]) else -r
    return us, ws


def _branch_segment_integral(fn, b, z_far, w_far, lam: Lambda, tol: float):
    """Integral of fn(z, w) dz from the branch point b to z_far, via u^2 = z - b."""
    span = z_far - b
    length = abs(span)
    direction = span / length
    u_max = math.sqrt(length)
    us, ws = _branch_w_table(b, direction, u_max, w_far, lam)

    def f(u):
        u = np.asarray(u)
        z = b + (u * u) * direction
        roots = np.sqrt(curve_rhs(z, lam).astype(complex))
        idx = np.clip(np.floor(np.log2(u_max / np.maximum(u, 1e-300))).astype(int),
                      0, len(us) - 1)
        refs = ws[idx] * (u / us[idx])
        w = _nearest_roots(roots, refs)
        return fn(z, w) * (2.0 * u * direction)

    return _adaptive_vec(f, 0.0, u_max, tol)


def _assert_branch_endpoint(z, w, lam: Lambda, which: str):
    tol = 1e-9 * max(1.0, lam.value, 1.0 / lam.value)
    bset = branch_points(lam).finite
    if min(abs(z - b) for b in bset) > tol or abs(w) > tol:
        raise ValueError(f"path {which} flagged singular but is not at a branch point")


def path_integral(path: SheetedPath, fn, *, tol_per_unit: float = TOL_PER_UNIT,
                  singular_start: bool = False, singular_end: bool = False):
    """Contour integral of fn(z, w) dz along a sheeted path.

    fn must be vectorized: given equal-length arrays z, w it returns an array
    of shape (..., len(z)).  Singular endpoint flags request the square-root
    substitution for a first/last vertex sitting at a finite branch point.
    """
    verts = path.vertices
    ws = path.w_values
    lam = path.lam
    n = len(verts)
    total = np.zeros(3, dtype=complex)
    if n < 2:
        return total
    i0, i1 = 0, n - 1
    if singular_start:
        _assert_branch_endpoint(verts[0], ws[0], lam, "start")
        tol = tol_per_unit * max(abs(verts[1] - verts[0]), 1e-6)
        total += _branch_segment_integral(fn, verts[0], verts[1], ws[1], lam, tol)
        i0 = 1
    if singular_end:
        _assert_branch_endpoint(verts[-1], ws[-1], lam, "end")
        tol = tol_per_unit * max(abs(verts[-1] - verts[-2]), 1e-6)
        total -= _branch_segment_integral(fn, verts[-1], verts[-2], ws[-2], lam, tol)
        i1 = n - 2
    for i in range(i0, i1):
        za, zb = verts[i], verts[i + 1]
        if za == zb:
            continue
        tol = tol_per_unit * abs(zb - za)
        total += _segment_integral(fn, za, ws[i], zb, ws[i + 1], lam, tol)
    return total


def weierstrass_integrand(norm: Normalization):
    def fn(z, w):
        return phi_components(z, w, norm)
    return fn


def integrate(path: SheetedPath, norm: Normalization, *,
              singular_start: bool = False, singular_end: bool = False,
              tol_per_unit: float = TOL_PER_UNIT) -> np.ndarray:
    """Real part of the Weierstrass contour integral along the path."""
    val = path_integral(path, weierstrass_integrand(norm),
                        tol_per_unit=tol_per_unit,
                        singular_start=singular_start, singular_end=singular_end)
    return val.real.copy()


# ---------------------------------------------------------------------------
# path construction
# ---------------------------------------------------------------------------

def make_sheeted_path(vertices, lam, *, w_start=None, sheet_sign: int = +1):
    """Build a SheetedPath, detecting branch-point endpoints.

    Returns (path, singular_start, singular_end).  A first vertex at a finite
    branch point is seeded by the departure germ selected by sheet_sign; a
    last vertex at a branch point is stored with w = 0 and must be integrated
    with the singular_end flag.
    """
    lam = as_lambda(lam)
    verts = np.asarray(vertices, dtype=complex)
    keep = np.ones(len(verts), dtype=bool)
    keep[1:] = verts[1:] != verts[:-1]
    verts = verts[keep]
    bset = branch_points(lam).finite
    tol0 = 1e-12 * max(1.0, lam.value, 1.0 / lam.value)

    def branch_at(z):
        for b in bset:
            if abs(z - b) <= tol0:
                return b
        return None

    b_start = branch_at(verts[0]) if len(verts) > 1 else None
    b_end = branch_at(verts[-1]) if len(verts) > 1 else None

    if b_start is not None:
        dep = BranchDeparture(b_start, lam, sign=sheet_sign)
        body = verts[:-1] if b_end is not None else verts
        path = sheeted_path_from_branch(body, dep)
    else:
        w0 = complex(w_start) if w_start is not None else sheet_sign * principal_w(verts[0], lam)
        body = verts[:-1] if b_end is not None else verts
        path = continue_sheet(body, w0, lam)
    if b_end is not None:
        path = SheetedPath(np.append(path.vertices, b_end),
                           np.append(path.w_values, 0.0j), lam)
    return path, b_start is not None, b_end is not None


def _detour_radius(b: complex, lam: Lambda) -> float:
    others = [p for p in branch_points(lam).finite if abs(p - b) > 0]
    gap = min(abs(b - p) for p in others)
    r = gap / 8.0
    if r < 4.0 * delta_branch(lam):
        raise PathBlocked(f"branch points too crowded near {b} for a safe detour")
    return r


def _radial_leg(r_from: float, r_to: float, angle: float, lam: Lambda):
    """Vertices (excluding the start) of a radial run at a fixed angle,
    detouring over any branch point sitting strictly inside the run.

    Detour entry and exit points may overshoot the run's endpoints; the leg
    then returns to its endpoint along the ray, which no longer crosses the
    branch point.
    """
    if r_from == r_to:
        return []
    direction = cmath.exp(1j * angle)
    lo, hi = sorted((r_from, r_to))
    eps = delta_branch(lam)
    crossings = []
    for b in branch_points(lam).finite:
        if abs(b) == 0.0:
            continue
        if abs(cmath.exp(1j * cmath.phase(b)) - direction) > 1e-9:
            continue
        rb = abs(b)
        if lo + eps < rb < hi - eps:
            crossings.append((rb, _detour_radius(b, lam)))
    crossings.sort(reverse=bool(r_from > r_to))
    out = []
    sgn = 1.0 if r_to > r_from else -1.0
    for rb, rdet in crossings:
        out.append((rb - sgn * rdet) * direction)
        taus = np.linspace(0.0, math.pi, 9) if sgn < 0 else np.linspace(math.pi, 0.0, 9)
        for tau in taus[1:-1]:
            out.append(rb * direction + rdet * direction * cmath.exp(1j * tau))
        out.append((rb + sgn * rdet) * direction)
    out.append(r_to * direction)
    return out


def _angular_leg(radius: float, a_from: float, a_to: float, lam: Lambda,
                 max_step: float = math.pi / 32.0):
    """Chords on the circle |z| = radius from a_from to a_to (excluding start)."""
    if a_from == a_to:
        return []
    n = max(1, math.ceil(abs(a_to - a_from) / max_step))
    angles = np.linspace(a_from, a_to, n + 1)[1:]
    pts = [radius * cmath.exp(1j * a) for a in angles]
    guard = 2.0 * delta_branch(lam)
    for b in branch_points(lam).finite:
        if abs(abs(b) - radius) < guard:
            ab = cmath.phase(b)
            crossings = [a for a in angles if min(abs(a - ab), abs(a - ab - 2 * math.pi),
                                                  abs(a - ab + 2 * math.pi)) < max_step]
            if crossings and min(abs(radius * cmath.exp(1j * a) - b) for a in crossings) < guard:
                raise PathBlocked(f"angular leg at radius {radius} passes branch point {b}")
    return pts


def route_vertices(target: complex, lam, *, winding: int = 0,
                   max_step: float = math.pi / 32.0):
    """Deterministic polyline from the base point to the target.

    Radial run along the positive real axis, then an angular sweep at the
    target radius; optional extra full circuits about the origin are inserted
    at a branch-safe radius.  The winding about the origin of the returned
    route is exactly `winding`.
    """
    lam = as_lambda(lam)
    target = complex(target)
    rho = abs(target)
    if rho == 0.0:
        raise SingularPoint("targets at the puncture z = 0 are not immersible")
    dmin = min(abs(target - b) for b in branch_points(lam).finite)
    scale = max(1.0, lam.value, 1.0 / lam.value)
    if dmin > 1e-12 * scale and dmin < delta_branch(lam):
        raise PathBlocked(f"target {target} inside the branch guard disk")
    phi_t = cmath.phase(target)
    # if the angular sweep would start inside a branch detour disk, sweep at a
    # redirected radius and finish with a radial run at the target's angle
    rho_mid = rho
    if phi_t != 0.0:
        for b in branch_points(lam).finite:
            rb = abs(b)
            if rb == 0.0 or abs(cmath.phase(b)) > 1e-9:
                continue
            rdet = _detour_radius(b, lam)
            if abs(rho - rb) < rdet:
                side = 1.0 if 1.0 >= rb else -1.0
                rho_mid = rb + side * 1.5 * rdet
    verts = [BASE_POINT]
    if winding != 0:
        # insert |winding| circuits of the translation cycle: it encloses the
        # two branch points 0 and -1/lam, so the lift closes and each circuit
        # shifts the image by exactly one period
        lv = lam.value
        center = -0.5 / lv
        radius = 0.5 * (lv + 1.0 / lv)
        verts += _radial_leg(1.0, 0.5 * lv, 0.0, lam)
        sgn = 1.0 if winding > 0 else -1.0
        taus = np.linspace(0.0, sgn * 2.0 * math.pi, 129)[1:]
        for _ in range(abs(winding)):
            verts += [center + radius * cmath.exp(1j * t) for t in taus]
        verts += _radial_leg(0.5 * lv, rho_mid, 0.0, lam)
    else:
        verts += _radial_leg(1.0, rho_mid, 0.0, lam)
    verts += _angular_leg(rho_mid, 0.0, phi_t, lam, max_step)
    if rho_mid != rho:
        verts += _radial_leg(rho_mid, rho, phi_t, lam)
    verts[-1] = target
    return verts


@functools.lru_cache(maxsize=256)
def _sheet_connection_cached(norm: Normalization) -> tuple:
    lam = norm.lam
    lv = lam.value
    if abs(curve_rhs(BASE_POINT, lam)) < 1e-12:
        return (0.0, 0.0, 0.0)
    r = 0.5 * lv
    p0 = lv - r if lv > 1.0 else lv + r
    verts = [BASE_POINT] + _radial_leg(1.0, p0, 0.0, lam)
    start = math.pi if p0 < lv else 0.0
    taus = np.linspace(start, start + 2.0 * math.pi, 65)
    verts += [lv + r * cmath.exp(1j * t) for t in taus[1:]]
    verts += _radial_leg(p0, 1.0, 0.0, lam)
    w0 = principal_w(BASE_POINT, lam)
    path = continue_sheet(verts, w0, lam)
    if abs(path.w_values[-1] + w0) > 1e-9 * (1.0 + abs(w0)):
        raise QuadratureFailure("sheet-connecting loop did not flip the root")
    return tuple(float(x) for x in integrate(path, norm))


def sheet_connection(lam, norm: Normalization) -> np.ndarray:
    """Image of the second base-point lift (1, -w0), integrating from (1, w0).

    The two lifts of the base point are joined on the cover by a loop about
    one branch point; its real integral is the fixed offset between the raw
    integrals seeded at +w0 and at -w0.  Anchoring the -w0 sheet by this
    vector places both sheets on the same copy of the surface (at lam = 1
    the base point is a branch point, both seeds coincide, and the offset
    vanishes).
    """
    lam = as_lambda(lam)
    if norm.lam != lam:
        raise ValueError("normalization was built for a different family parameter")
    return np.array(_sheet_connection_cached(norm))


@dataclass(frozen=True)
class SurfacePoint:
    """An immersed position together with its source point on the cover."""

    position: np.ndarray
    source: CurvePoint

    def __post_init__(self):
        p = np.asarray(self.position, dtype=float)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            raise ValueError("position must be a finite 3-vector")
        p.setflags(write=False)
        object.__setattr__(self, "position", p)


def immerse(lam, norm: Normalization, targets, *, sheet_seed=None,
            sheet_sign: int = +1, winding: int = 0) -> list[SurfacePoint]:
    """Immerse targets by integrating from the base point z0 = 1.

    The sheet is seeded by sheet_seed (a w value at the base point) or, when
    absent, by sheet_sign times the principal square root.  At lam = 1 the
    base point is itself a branch point and sheet_sign selects the departure
    germ instead.  Routes have winding number `winding` about the origin.
    """
    lam = as_lambda(lam)
    singular_base = abs(curve_rhs(BASE_POINT, lam)) < 1e-12
    offset = np.zeros(3)
    seed = sheet_seed
    if not singular_base:
        w_plus = principal_w(BASE_POINT, lam)
        if seed is None:
            seed = sheet_sign * w_plus
        if abs(seed + w_plus) < abs(seed - w_plus):
            # the -w0 lift of the base point sits one branch-connecting
            # integral away; anchor its sheet there so both sheets share
            # one copy of the surface
            offset = sheet_connection(lam, norm)
    out = []
    for target in targets:
        target = complex(target)
        if target == BASE_POINT and winding == 0 and not singular_base:
            out.append(SurfacePoint(offset, CurvePoint(BASE_POINT, seed, lam)))
            continue
        verts = route_vertices(target, lam, winding=winding)
        path, ss, se = make_sheeted_path(verts, lam, w_start=seed,
                                         sheet_sign=sheet_sign)
        pos = offset + integrate(path, norm, singular_start=ss, singular_end=se)
        out.append(SurfacePoint(pos, path.end))
    return out


# ---------------------------------------------------------------------------
# periods
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodVector:
    """Real period of the translation cycle and of the companion cycle."""

    translation: np.ndarray
    companion: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.translation, dtype=float)
        c = np.asarray(self.companion, dtype=float)
        t.setflags(write=False)
        c.setflags(write=False)
        nt = float(np.linalg.norm(t))
        if nt <= 0.0:
            raise ValueError("translation period must be nonzero")
        if float(np.linalg.norm(c)) >= 1e-6 * nt:
            raise ValueError("companion cycle period is not negligible against |T|")
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "companion", c)


def translation_cycle_vertices(lam, n: int = 256):
    """Circle about -1/(2 lam) of radius (lam + 1/lam)/2: encloses the branch
    points 0 and -1/lam, whose lift closes after one circuit."""
    lv = as_lambda(lam).value
    center = -0.5 / lv
    radius = 0.5 * (lv + 1.0 / lv)
    taus = np.linspace(0.0, 2.0 * math.pi, n + 1)
    return center + radius * np.exp(1j * taus)


def companion_cycle_vertices(lam, n: int = 256):
    """Circle about lam/2 of radius (lam + 1/lam)/2: encloses exactly 0 and lam."""
    lv = as_lambda(lam).value
    center = 0.5 * lv
    radius = 0.5 * (lv + 1.0 / lv)
    taus = np.linspace(0.0, 2.0 * math.pi, n + 1)
    return center + radius * np.exp(1j * taus)


def cycle_real_period(vertices, lam, norm: Normalization, *, sheet_sign: int = +1):
    """Real period of the lifted cycle; verifies that the lift closes."""
    lam = as_lambda(lam)
    w0 = sheet_sign * principal_w(vertices[0], lam)
    path = continue_sheet(vertices, w0, lam)
    closure = abs(path.w_values[-1] - w0)
    if closure > 1e-7 * (1.0 + abs(w0)):
        raise QuadratureFailure(
            f"cycle lift failed to close (|w_end - w_start| = {closure:.3e}); "
            "the cycle encloses an odd number of branch points"
        )
    return integrate(path, norm)


@functools.lru_cache(maxsize=256)
def _period_vectors_cached(norm: Normalization) -> PeriodVector:
    lam = norm.lam
    t = cycle_real_period(translation_cycle_vertices(lam), lam, norm)
    c = cycle_real_period(companion_cycle_vertices(lam), lam, norm)
    return PeriodVector(t, c)


def period_vectors(lam, norm: Normalization) -> PeriodVector:
    lam = as_lambda(lam)
    if norm.lam != lam:
        raise ValueError("normalization was built for a different family parameter")
    return _period_vectors_cached(norm)


# ---------------------------------------------------------------------------
# end spacing (shared with the limits module)
# ---------------------------------------------------------------------------

def upper_semicircle_vertices(n: int = 96):
    """The path z = exp(i t), t in [0, pi], from +1 to -1."""
    return np.exp(1j * np.linspace(0.0, math.pi, n + 1))


def vertical_end_spacing(lam, norm: Normalization, *, sheet_sign: int = +1) -> float:
    """Third component of the Weierstrass integral along the lifted upper unit
    semicircle: the vertical distance between adjacent planar ends."""
    lam = as_lambda(lam)
    verts = upper_semicircle_vertices()
    path, ss, se = make_sheeted_path(verts, lam, sheet_sign=sheet_sign)
    return float(integrate(path, norm, singular_start=ss, singular_end=se)[2])


def raw_end_spacing(lam) -> float:
    lam = as_lambda(lam)
    return vertical_end_spacing(lam, Normalization.raw(lam))


# ---------------------------------------------------------------------------
# grid immersion (shared by sweeps, foliation slicing, meshing)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridImmersion:
    """Immersion of a log-polar grid on one sheet of the cover.

    Rows are angular chains continued eastward from the column at the most
    western angle; every vertex position is the Weierstrass integral along
    the chain path from the base point (winding 0 for open grids).  `angles`
    holds the continued angle of each column, so angles[j] is also the
    correct helicoid branch argument for column j.
    """

    lam: Lambda
    norm: Normalization
    sheet_sign: int
    radii: np.ndarray
    angles: np.ndarray
    z: np.ndarray
    w: np.ndarray
    positions: np.ndarray
    closed: bool

    @property
    def n_rad(self) -> int:
        return len(self.radii)

    @property
    def n_col(self) -> int:
        return len(self.angles)

    def flat_points(self):
        """(z, position) pairs flattened, excluding the duplicated seam column."""
        stop = self.n_col - 1 if self.closed else self.n_col
        return self.z[:, :stop].ravel(), self.positions[:, :stop].reshape(-1, 3)


def _half_offset_radii(r_min: float, r_max: float, n_rad: int, lam: Lambda):
    step = (math.log(r_max) - math.log(r_min)) / n_rad
    radii = np.exp(math.log(r_min) + (np.arange(n_rad) + 0.5) * step)
    # keep every ring clear of the branch moduli lam and 1/lam
    for _ in range(4):
        bad = False
        for m in (lam.value, 1.0 / lam.value):
            if np.min(np.abs(radii - m)) < max(0.02 * step * m, 4.0 * delta_branch(lam)):
                bad = True
        if not bad:
            return radii
        radii = radii * math.exp(0.137 * step)
    raise PathBlocked("could not place grid radii clear of the branch moduli")


def _edge_value(fn, za, wa, zb, lam: Lambda):
    path = continue_sheet([za, zb], wa, lam)
    val = path_integral(path, fn)
    return val.real, path.w_values[-1]


def immerse_grid(lam, norm: Normalization, *, r_min: float, r_max: float,
                 n_rad: int, n_ang: int, sheet_sign: int = +1,
                 closed: bool = False) -> GridImmersion:
    """Immerse a half-offset log-polar grid by continuation along grid chains.

    The grid avoids the real axis (angles are offset by half a step) and the
    branch moduli (radii are shifted if a ring lands on one).  With
    closed=True an extra seam column at western angle + 2 pi is appended;
    for parameter bands where the full circuit is a translation period the
    seam column sits exactly one period from the first column.
    """
    lam = as_lambda(lam)
    if n_ang % 2 != 0 or n_ang < 8 or n_rad < 2:
        raise ValueError("need even n_ang >= 8 and n_rad >= 2")
    radii = _half_offset_radii(r_min, r_max, n_rad, lam)
    dtheta = 2.0 * math.pi / n_ang
    angles = -math.pi + (np.arange(n_ang + (1 if closed else 0)) + 0.5) * dtheta
    fn = weierstrass_integrand(norm)

    # stem: base point -> (radius 1, western angle) -> (r_0, western angle)
    theta_w = angles[0]
    stem = [BASE_POINT]
    stem += _angular_leg(1.0, 0.0, theta_w, lam)
    stem += _radial_leg(1.0, radii[0], theta_w, lam)
    stem_path, ss, _ = make_sheeted_path(stem, lam, sheet_sign=sheet_sign)
    base_pos = path_integral(stem_path, fn, singular_start=ss).real
    if sheet_sign < 0 and not ss:
        base_pos = base_pos + sheet_connection(lam, norm)
    base_w = stem_path.w_values[-1]

    n_col = n_ang + (1 if closed else 0)
    zs = radii[:, None] * np.exp(1j * angles[None, :])
    ws = np.zeros((n_rad, n_col), dtype=complex)
    pos = np.zeros((n_rad, n_col, 3))

    # western column, by radial continuation
    ws[0, 0] = base_w
    pos[0, 0] = base_pos
    for i in range(1, n_rad):
        val, wb = _edge_value(fn, zs[i - 1, 0], ws[i - 1, 0], zs[i, 0], lam)
        pos[i, 0] = pos[i - 1, 0] + val
        ws[i, 0] = wb
    # rows, by eastward angular continuation
    for i in range(n_rad):
        for j in range(1, n_col):
            val, wb = _edge_value(fn, zs[i, j - 1], ws[i, j - 1], zs[i, j], lam)
            pos[i, j] = pos[i, j - 1] + val
            ws[i, j] = wb

    for arr in (radii, angles, zs, ws, pos):
        arr.setflags(write=False)
    return GridImmersion(lam=lam, norm=norm, sheet_sign=sheet_sign, radii=radii,
                         angles=angles, z=zs, w=ws, positions=pos, closed=closed)


@dataclass(frozen=True)
class RadialEdgeAlignment:
    """Continuation-aligned upper neighbour of every radial grid edge.

    Continuing from vertex (i, j) of the grid with sheet sign s to the next
    ring lands on vertex (i+1, j) of the grid with sheet sign `sheet[s][i, j]`
    translated by `period_k[s][i, j]` periods.  Away from the (at most two)
    ring pairs that straddle a branch modulus the alignment is trivial: the
    own grid with no period offset.
    """

    sheet: dict
    period_k: dict


def radial_edge_alignment(grid_plus: GridImmersion,
                          grid_minus: GridImmersion) -> RadialEdgeAlignment:
    """Empirical radial-edge alignment for a pair of sheet grids.

    Rows whose radius interval straddles a branch modulus have their edges
    continued explicitly and matched (by root value and by position modulo
    the translation period) against both grids; a failed match raises.
    """
    grids = {+1: grid_plus, -1: grid_minus}
    lam = grid_plus.lam
    t_vec = period_vectors(lam, grid_plus.norm).translation
    radii = grid_plus.radii
    bands = [i for i in range(len(radii) - 1)
             if any(radii[i] < m < radii[i + 1]
                    for m in (lam.value, 1.0 / lam.value))]
    sheet = {s: np.full((g.n_rad - 1, g.n_col), s, dtype=int)
             for s, g in grids.items()}
    period_k = {s: np.zeros((g.n_rad - 1, g.n_col), dtype=int)
                for s, g in grids.items()}
    fn = weierstrass_integrand(grid_plus.norm)
    for s, g in grids.items():
        for i in bands:
            for j in range(g.n_col):
                val, w_end = _edge_value(fn, g.z[i, j], g.w[i, j], g.z[i + 1, j], lam)
                end = g.positions[i, j] + val
                tol = 1e-6 * max(1.0, float(np.linalg.norm(end)))
                hit = None
                for s2, g2 in grids.items():
                    if abs(g2.w[i + 1, j] - w_end) > 1e-6 * (1.0 + abs(w_end)):
                        continue
                    for k in range(-2, 3):
                        if np.linalg.norm(end - (g2.positions[i + 1, j] + k * t_vec)) < tol:
                            hit = (s2, k)
                if hit is None:
                    raise QuadratureFailure(
                        f"radial edge ({i}, {j}) of sheet {s} matched no grid vertex"
                    )
                sheet[s][i, j], period_k[s][i, j] = hit
    return RadialEdgeAlignment(sheet=sheet, period_k=period_k)
