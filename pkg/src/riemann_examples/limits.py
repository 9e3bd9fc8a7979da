"""Degeneration of the normalized family: catenoid and helicoid limits.

For lam < 1 the normalized immersion splits as catenoid plus a correction
whose integrand carries the factor

    f0(z) = z / (sqrt(lam) w(z)) - 1
          = sqrt(z)/sqrt((z - lam)(lam z + 1)) - 1   (matched branches),

and for lam > 1 as helicoid plus a correction with

    f_inf(z) = 1 - i sqrt(lam) z / w(z)
             = 1 - sqrt(z)/sqrt((1 - z/lam)(z + 1/lam)).

Writing the factors through the continued curve root w fixes their branches
by continuation from z = 1, where both vanish as lam degenerates.  Both
factors tend to zero uniformly on a fixed annulus, which drives the sup
deviation sweeps implemented here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import CurvePoint, Lambda, as_lambda, branch_points, principal_w
from .errors import BranchAmbiguity, PathBlocked
from .reference import (
    ReferenceKind,
    catenoid_integrand,
    catenoid_point,
    helicoid_integrand,
    helicoid_point_continued,
)
from .weierstrass import (
    GridImmersion,
    Normalization,
    immerse,
    immerse_grid,
    integrate,
    make_sheeted_path,
    normalization_scale,
    path_integral,
    phi_components,
    route_vertices,
    unit_normal,
    vertical_end_spacing,
)
from . import errors as _errors


# ---------------------------------------------------------------------------
# correction factors
# ---------------------------------------------------------------------------

def _continued_w(z: complex, lam: Lambda) -> complex:
    """Curve root at z continued from the principal seed at the base point."""
    try:
        verts = route_vertices(z, lam)
        path, singular_start, _ = make_sheeted_path(verts, lam)
        if singular_start:
            raise BranchAmbiguity("correction factors are undefined at lam = 1")
        return complex(path.w_values[-1])
    except _errors.AmbiguousSheet as exc:
        raise BranchAmbiguity(str(exc)) from exc


def f0(z, lam) -> complex:
    """Catenoid-side correction factor, branch continued from z = 1."""
    lam = as_lambda(lam)
    if lam.value >= 1.0:
        raise ValueError("f0 is the lam < 1 correction factor")
    w = _continued_w(complex(z), lam)
    return complex(z) / (math.sqrt(lam.value) * w) - 1.0


def f_inf(z, lam) -> complex:
    """Helicoid-side correction factor, branch continued from z = 1."""
    lam = as_lambda(lam)
    if lam.value <= 1.0:
        raise ValueError("f_inf is the lam > 1 correction factor")
    w = _continued_w(complex(z), lam)
    return 1.0 - 1j * math.sqrt(lam.value) * complex(z) / w


def f0_on_grid(grid: GridImmersion):
    """f0 over a grid immersion, using its already-continued roots."""
    lv = grid.lam.value
    return grid.z / (math.sqrt(lv) * grid.w) - 1.0


def f_inf_on_grid(grid: GridImmersion):
    lv = grid.lam.value
    return 1.0 - 1j * math.sqrt(lv) * grid.z / grid.w


# ---------------------------------------------------------------------------
# domains and reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Annulus:
    """The ring 1/L < |z| < L with a sampling resolution."""

    L: float
    n_rad: int = 24
    n_ang: int = 48

    def __post_init__(self):
        if not self.L > 1.0:
            raise ValueError("annulus parameter L must exceed 1")
        if self.n_rad < 8 or self.n_ang < 8:
            raise ValueError("annulus resolutions must be at least 8")

    def grid(self, lam, norm: Normalization, sheet_sign: int = +1) -> GridImmersion:
        return immerse_grid(lam, norm, r_min=1.0 / self.L, r_max=self.L,
                            n_rad=self.n_rad, n_ang=self.n_ang,
                            sheet_sign=sheet_sign, closed=False)


@dataclass(frozen=True)
class ClipRegion:
    """Ball about the origin or horizontal slab |x3| <= r."""

    kind: str
    r: float

    def __post_init__(self):
        if self.kind not in ("ball", "slab"):
            raise ValueError("clip kind must be 'ball' or 'slab'")
        if not self.r > 0:
            raise ValueError("clip radius must be positive")

    def contains(self, positions) -> np.ndarray:
        p = np.asarray(positions, dtype=float)
        if self.kind == "ball":
            return np.linalg.norm(p, axis=-1) <= self.r
        return np.abs(p[..., 2]) <= self.r


@dataclass(frozen=True)
class ConvergenceReport:
    lambdas: tuple
    deviations: tuple
    reference: str
    annulus: Annulus
    clip: ClipRegion
    sheet_sign: int = +1
    extras: dict = field(default_factory=dict)

    def is_strictly_decreasing(self) -> bool:
        d = self.deviations
        return all(b < a for a, b in zip(d[:-1], d[1:]))


# ---------------------------------------------------------------------------
# convergence sweeps
# ---------------------------------------------------------------------------

def _clipped(mask, values):
    if not np.any(mask):
        raise PathBlocked("clip region contains no sampled surface points")
    return values[mask]


def catenoid_limit_sweep(lambdas, annulus: Annulus, clip: ClipRegion,
                         sheet_sign: int = +1) -> ConvergenceReport:
    """Sup deviation of the normalized immersion from the catenoid, per lam.

    The immersed sheet is the component of the annulus preimage picked by
    sheet_sign; positions are clipped before the sup is taken.
    """
    lambdas = tuple(float(x) for x in lambdas)
    if any(x >= 1.0 for x in lambdas):
        raise ValueError("catenoid sweeps take lam < 1")
    deviations = []
    spacings = []
    for lv in lambdas:
        lam = Lambda(lv)
        norm = Normalization.paper(lam)
        grid = annulus.grid(lam, norm, sheet_sign)
        z, pos = grid.flat_points()
        mask = clip.contains(pos)
        dev = np.linalg.norm(pos - catenoid_point(z), axis=-1)
        deviations.append(float(np.max(_clipped(mask, dev))))
        spacings.append(vertical_end_spacing(lam, norm))
    return ConvergenceReport(lambdas=lambdas, deviations=tuple(deviations),
                             reference=ReferenceKind.CATENOID.value,
                             annulus=annulus, clip=clip, sheet_sign=sheet_sign,
                             extras={"end_spacing": tuple(spacings)})


def helicoid_limit_sweep(lambdas, annulus: Annulus, clip: ClipRegion,
                         max_winding: int = 4, sheet_sign: int = +1) -> ConvergenceReport:
    """Sup deviation from the helicoid, with the helicoid branch matched to
    each sample's continued path argument."""
    lambdas = tuple(float(x) for x in lambdas)
    if any(x <= 1.0 for x in lambdas):
        raise ValueError("helicoid sweeps take lam > 1")
    if max_winding < 1:
        raise ValueError("max_winding must be at least 1")
    deviations = []
    spacings = []
    for lv in lambdas:
        lam = Lambda(lv)
        norm = Normalization.paper(lam)
        grid = annulus.grid(lam, norm, sheet_sign)
        z, pos = grid.flat_points()
        theta = np.broadcast_to(grid.angles[None, :], grid.z.shape)
        stop = grid.n_col - 1 if grid.closed else grid.n_col
        theta = theta[:, :stop].ravel()
        if np.max(np.abs(theta)) > 2.0 * math.pi * max_winding:
            raise PathBlocked("sample windings exceed max_winding")
        ref = helicoid_point_continued(z, theta)
        mask = clip.contains(pos)
        dev = np.linalg.norm(pos - ref, axis=-1)
        deviations.append(float(np.max(_clipped(mask, dev))))
        spacings.append(vertical_end_spacing(lam, norm))
    return ConvergenceReport(lambdas=lambdas, deviations=tuple(deviations),
                             reference=ReferenceKind.HELICOID.value,
                             annulus=annulus, clip=clip, sheet_sign=sheet_sign,
                             extras={"end_spacing": tuple(spacings),
                                     "max_winding": max_winding})


def end_spacing(lam, norm: Normalization, sheet_sign: int = +1) -> float:
    """Vertical distance between adjacent planar ends: the third component of
    the Weierstrass integral along the lifted upper unit semicircle."""
    return vertical_end_spacing(lam, norm, sheet_sign=sheet_sign)


# ---------------------------------------------------------------------------
# decomposition identities
# ---------------------------------------------------------------------------

def catenoid_decomposition_residuals(lam, targets) -> np.ndarray:
    """|immersion - (catenoid + correction integral)| per target, lam < 1.

    Both sides are integrated along the same sheeted route, the correction
    integrand being f0(z) times the catenoid integrand with f0 evaluated
    from the continued curve root.
    """
    lam = as_lambda(lam)
    if lam.value >= 1.0:
        raise ValueError("the catenoid decomposition applies for lam < 1")
    norm = Normalization.paper(lam)
    root_lam = math.sqrt(lam.value)

    def corr(z, w):
        factor = z / (root_lam * w) - 1.0
        return factor * catenoid_integrand(z)

    out = []
    for target in targets:
        verts = route_vertices(complex(target), lam)
        path, ss, se = make_sheeted_path(verts, lam)
        lhs = integrate(path, norm, singular_start=ss, singular_end=se)
        rhs = catenoid_point(complex(target)) + path_integral(
            path, corr, singular_start=ss, singular_end=se).real
        out.append(float(np.linalg.norm(lhs - rhs)))
    return np.array(out)


def helicoid_decomposition_residuals(lam, targets) -> np.ndarray:
    """|immersion - (helicoid + correction integral)| per target, lam > 1."""
    lam = as_lambda(lam)
    if lam.value <= 1.0:
        raise ValueError("the helicoid decomposition applies for lam > 1")
    norm = Normalization.paper(lam)
    root_lam = math.sqrt(lam.value)

    def corr(z, w):
        factor = 1.0 - 1j * root_lam * z / w
        return factor * helicoid_integrand(z)

    out = []
    for target in targets:
        verts = route_vertices(complex(target), lam)
        path, ss, se = make_sheeted_path(verts, lam)
        lhs = integrate(path, norm, singular_start=ss, singular_end=se)
        rhs = helicoid_point_continued(complex(target), np.angle(complex(target))) + \
            path_integral(path, corr, singular_start=ss, singular_end=se).real
        out.append(float(np.linalg.norm(lhs - rhs)))
    return np.array(out)


# ---------------------------------------------------------------------------
# conjugacy
# ---------------------------------------------------------------------------

_CONJ_DIAG = np.array([-1.0, -1.0, 1.0])


@dataclass(frozen=True)
class ConjugacyReport:
    lam: Lambda
    residuals: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if len(self.residuals) else 0.0


def conjugate_check(lam, samples) -> ConjugacyReport:
    """Pointwise conjugacy identity between the normalized families at lam
    and 1/lam.

    For (z, w) on the lam-curve, the mapped point (-z, i w) lies on the
    (1/lam)-curve, and the conjugated integrand i * Phi_lam, transported by
    dz -> -dz', equals diag(-1, -1, 1) applied to the integrand of the
    (1/lam)-family at the mapped point.  Residuals are relative.
    """
    lam = as_lambda(lam)
    norm = Normalization.paper(lam)
    norm_recip = Normalization.paper(lam.reciprocal)
    res = []
    for p in samples:
        p = p if isinstance(p, CurvePoint) else CurvePoint(p, principal_w(p, lam), lam)
        mapped = CurvePoint(-p.z, 1j * p.w, lam.reciprocal)
        lhs = -1j * phi_components(p.z, p.w, norm)
        rhs = _CONJ_DIAG * phi_components(mapped.z, mapped.w, norm_recip)
        scale = max(float(np.max(np.abs(lhs))), 1e-300)
        res.append(float(np.max(np.abs(lhs - rhs))) / scale)
    return ConjugacyReport(lam=lam, residuals=np.array(res))


def conjugate_branch_points(lam) -> tuple:
    """Images of the finite branch points under z -> -z: the branch set of
    the reciprocal-parameter curve."""
    lam = as_lambda(lam)
    mapped = tuple(-b for b in branch_points(lam).finite)
    expected = branch_points(lam.reciprocal).finite
    return mapped, expected


# ---------------------------------------------------------------------------
# plane-limit experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneLimitReport:
    lambdas: tuple
    plane_deviations: tuple          # distance to best free plane, clipped
    horizontal_deviations: tuple     # distance to best horizontal plane, off-neck
    vertical_normal_fractions: tuple
    waist_radii: tuple
    clip: ClipRegion
    extras: dict = field(default_factory=dict)

    def is_strictly_decreasing(self) -> bool:
        d = self.plane_deviations
        return all(b < a for a, b in zip(d[:-1], d[1:]))


def plane_limit_experiment(lambdas, annulus: Annulus | None = None,
                           clip: ClipRegion | None = None) -> PlaneLimitReport:
    """Planarity trends of the spacing-normalized family along lam -> 0.

    With the vertical end spacing pinned to 2*pi the surface in a fixed
    ambient ball flattens onto a single plane; the report carries the sup
    distance to the best-fit plane over the clipped sample, the distance to
    the best horizontal plane away from the waist, the fraction of clipped
    samples with a near-vertical normal, and the waist radius.
    """
    from .analysis import plane_fit  # local import to keep module layering flat

    annulus = annulus or Annulus(L=10.0, n_rad=24, n_ang=48)
    clip = clip or ClipRegion("ball", 4.0 * math.pi)
    lambdas = tuple(float(x) for x in lambdas)
    if any(x >= 1.0 for x in lambdas):
        raise ValueError("the plane-limit sweep runs lam -> 0")

    plane_devs, horiz_devs, vert_fracs, waists = [], [], [], []
    for lv in lambdas:
        lam = Lambda(lv)
        norm = Normalization.spacing(lam)

        # the piece of surface inside the fixed clip ball shrinks in the
        # parameter plane as the spacing normalization blows up; sample a
        # base-point window sized so its image just fills the ball
        def reach(rho: float) -> float:
            sp = immerse(lam, norm, [complex(1.0 + rho)])[0]
            return float(np.linalg.norm(sp.position))

        rho_max = 0.4
        while rho_max > 1e-8 and reach(rho_max) > clip.r:
            rho_max *= 0.5
        rhos = rho_max * np.exp(np.linspace(math.log(0.02), 0.0, 10))
        thetas = np.linspace(0.0, 2.0 * math.pi, 17)[:-1] + 0.05
        targets = (1.0 + rhos[:, None] * np.exp(1j * thetas[None, :])).ravel()
        pts = immerse(lam, norm, targets)
        pos = np.array([p.position for p in pts])
        mask = clip.contains(pos)
        if mask.sum() < 8:
            raise PathBlocked(f"too few clipped samples at lam = {lv}")
        _, _, dev = plane_fit(pos[mask])
        plane_devs.append(dev)

        normals = unit_normal(targets[mask])
        vert = np.minimum(np.linalg.norm(normals - np.array([0, 0, 1.0]), axis=-1),
                          np.linalg.norm(normals + np.array([0, 0, 1.0]), axis=-1))
        vert_fracs.append(float(np.mean(vert < 1e-2)))

        # global quantities over the full annulus
        grid = annulus.grid(lam, norm)
        z, gpos = grid.flat_points()
        off_neck = np.abs(np.log(np.abs(z))) > 0.5
        sel = gpos[off_neck]
        h = float(np.median(sel[:, 2]))
        horiz_devs.append(float(np.max(np.abs(sel[:, 2] - h))))

        rows = grid.positions[..., :2]
        centroids = rows.mean(axis=1, keepdims=True)
        waists.append(float(np.min(np.linalg.norm(rows - centroids, axis=-1).mean(axis=1))))
    return PlaneLimitReport(
        lambdas=lambdas, plane_deviations=tuple(plane_devs),
        horizontal_deviations=tuple(horiz_devs),
        vertical_normal_fractions=tuple(vert_fracs),
        waist_radii=tuple(waists), clip=clip,
        extras={"normalization": "spacing",
                "spacing_scales": tuple(normalization_scale(Normalization.spacing(Lambda(x)))
                                        for x in lambdas)},
    )
