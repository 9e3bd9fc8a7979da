"""The branched double cover  w^2 = z (z - lam) (z + 1/lam).

For each family parameter lam > 0 this curve is a twice-punctured torus
presented as a two-sheeted cover of the punctured z-plane, branched at
0, lam, -1/lam (and at infinity).  Everything downstream integrates along
paths on the cover, so the central service of this module is deterministic
analytic continuation of w along polylines in the z-plane: nearest-root
selection with adaptive bisection, no global branch-cut bookkeeping.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousSheet, BranchTooClose

#: |w^2 - rhs| <= CURVE_TOL * (1 + |z|)^3 is required of every curve point.
CURVE_TOL = 1e-10

#: Depth cap for the sign-disambiguating bisection in continue_sheet.
MAX_BISECTION_DEPTH = 40


@dataclass(frozen=True)
class Lambda:
    """Family parameter, a finite positive real."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not (math.isfinite(v) and v > 0.0):
            raise ValueError(f"family parameter must be finite and > 0, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def reciprocal(self) -> "Lambda":
        return Lambda(1.0 / self.value)


def as_lambda(lam) -> Lambda:
    return lam if isinstance(lam, Lambda) else Lambda(float(lam))


def curve_rhs(z, lam):
    """Right-hand side z (z - lam) (z + 1/lam); accepts scalars or arrays."""
    lv = as_lambda(lam).value
    return z * (z - lv) * (z + 1.0 / lv)


def curve_rhs_derivative(z, lam):
    """d/dz of the right-hand side, used to seed departures from branch points."""
    lv = as_lambda(lam).value
    c = lv - 1.0 / lv
    return 3.0 * z * z - 2.0 * c * z - 1.0


@dataclass(frozen=True)
class BranchPoints:
    """Finite branch points, plus a flag for the odd-order point at infinity."""

    finite: tuple
    at_infinity: bool = True


def branch_points(lam) -> BranchPoints:
    lv = as_lambda(lam).value
    return BranchPoints(finite=(0.0 + 0.0j, complex(lv), complex(-1.0 / lv)))


def delta_branch(lam) -> float:
    """Protective radius around branch points for ordinary (non-endpoint) paths."""
    lv = as_lambda(lam).value
    return 1e-6 * max(1.0, lv, 1.0 / lv)


def branch_distance(z, lam) -> float:
    """Distance from z to the nearest finite branch point."""
    pts = branch_points(lam).finite
    if np.ndim(z) == 0:
        return min(abs(z - b) for b in pts)
    z = np.asarray(z)
    return np.min([np.abs(z - b) for b in pts], axis=0)


def principal_w(z, lam):
    """Principal square root of the curve polynomial.

    Used only to seed a sheet at a base point; everywhere else the sheet is
    defined by continuation.
    """
    rhs = curve_rhs(z, lam)
    if np.ndim(rhs) == 0:
        return cmath.sqrt(rhs)
    return np.sqrt(rhs.astype(complex))


@dataclass(frozen=True)
class CurvePoint:
    """A point (z, w) on the cover with its family parameter."""

    z: complex
    w: complex
    lam: Lambda

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "lam", as_lambda(self.lam))
        resid = abs(self.w * self.w - curve_rhs(self.z, self.lam))
        if not resid <= CURVE_TOL * (1.0 + abs(self.z)) ** 3:
            raise ValueError(
                f"(z, w) = ({self.z}, {self.w}) is not on the curve for "
                f"lam = {self.lam.value} (residual {resid:.3e})"
            )

    @property
    def sheet_partner(self) -> "CurvePoint":
        return CurvePoint(self.z, -self.w, self.lam)


@dataclass(frozen=True)
class SheetedPath:
    """A polyline in the z-plane with a continuously continued w per vertex.

    Consecutive (z, w) pairs always satisfy the strict sign-separation
    |w_{i+1} - w_i| < |w_{i+1} + w_i|, so the sheet is unambiguous along
    every segment.
    """

    vertices: np.ndarray
    w_values: np.ndarray
    lam: Lambda

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex)
        w = np.asarray(self.w_values, dtype=complex)
        if v.shape != w.shape or v.ndim != 1 or v.size < 1:
            raise ValueError("vertices and w_values must be equal-length 1-d arrays")
        v.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "w_values", w)
        object.__setattr__(self, "lam", as_lambda(self.lam))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def start(self) -> CurvePoint:
        return CurvePoint(self.vertices[0], self.w_values[0], self.lam)

    @property
    def end(self) -> CurvePoint:
        return CurvePoint(self.vertices[-1], self.w_values[-1], self.lam)

    def reversed(self) -> "SheetedPath":
        return SheetedPath(self.vertices[::-1].copy(), self.w_values[::-1].copy(), self.lam)

    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.vertices))))


def _nearest_root(w_ref: complex, rhs_root: complex) -> complex:
    """Of the two square roots +-rhs_root, the one closer to w_ref."""
    return rhs_root if abs(rhs_root - w_ref) <= abs(-rhs_root - w_ref) else -rhs_root


def _continue_segment(z0, w0, z1, lam, depth, out_z, out_w, guard):
    """Append the continuation of (z0, w0) to z1, bisecting while the sign
    choice is not clearly separated (|dw| < 0.5 |w0 + w1|)."""
    if depth > MAX_BISECTION_DEPTH:
        raise AmbiguousSheet(
            f"sign choice unresolved after {MAX_BISECTION_DEPTH} bisections near z = {z1}"
        )
    guard(z1)
    w1 = _nearest_root(w0, cmath.sqrt(curve_rhs(z1, lam)))
    if abs(w1 - w0) < 0.5 * abs(w1 + w0):
        out_z.append(z1)
        out_w.append(w1)
        return w1
    zm = 0.5 * (z0 + z1)
    wm = _continue_segment(z0, w0, zm, lam, depth + 1, out_z, out_w, guard)
    return _continue_segment(zm, wm, z1, lam, depth + 1, out_z, out_w, guard)


def continue_sheet(path_vertices, w_start, lam) -> SheetedPath:
    """Analytically continue w along a polyline by nearest-root selection.

    Segments are subdivided adaptively until each step's sign choice is
    unambiguous; the returned path contains the refined vertex list.

    Raises BranchTooClose if any (refined) vertex falls inside the
    protective disk of a finite branch point, and AmbiguousSheet if the
    bisection depth cap is hit.
    """
    lam = as_lambda(lam)
    verts = [complex(v) for v in np.asarray(path_vertices, dtype=complex)]
    if len(verts) < 1:
        raise ValueError("path must contain at least one vertex")
    w0 = complex(w_start)
    resid = abs(w0 * w0 - curve_rhs(verts[0], lam))
    if not resid <= CURVE_TOL * (1.0 + abs(verts[0])) ** 3:
        raise ValueError(f"w_start does not satisfy the curve equation (residual {resid:.3e})")

    delta = delta_branch(lam)
    bpts = branch_points(lam).finite

    def guard(z):
        for b in bpts:
            if abs(z - b) < delta:
                raise BranchTooClose(f"vertex {z} within {delta:.1e} of branch point {b}")

    guard(verts[0])
    out_z = [verts[0]]
    out_w = [w0]
    w = w0
    for z_prev, z_next in zip(verts[:-1], verts[1:]):
        if z_next == z_prev:
            continue
        w = _continue_segment(z_prev, w, z_next, lam, 0, out_z, out_w, guard)
    return SheetedPath(np.array(out_z), np.array(out_w), lam)


@dataclass(frozen=True)
class BranchDeparture:
    """Germ of w on a punctured neighbourhood of a finite branch point.

    Near a finite branch point b the curve behaves like
    w ~ sign * sqrt(p'(b)) * sqrt(z - b), both square roots principal, which
    fixes one continuous sheet germ for every departure direction (the only
    seam of the convention is the half-line where z - b is a negative real,
    pinned by the principal branch).  `sign` selects between the two sheets
    meeting at b.
    """

    branch_point: complex
    lam: Lambda = field(repr=False)
    sign: int = +1

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise ValueError("sign must be +1 or -1")

    def germ_reference(self, z: complex) -> complex:
        return self.sign * cmath.sqrt(
            curve_rhs_derivative(self.branch_point, self.lam)
        ) * cmath.sqrt(z - self.branch_point)

    def w_at(self, z: complex) -> complex:
        """The root selected by the germ, valid while the linearisation of
        the curve polynomial dominates (|z - b| << branch gap)."""
        return _nearest_root(self.germ_reference(z), cmath.sqrt(curve_rhs(z, self.lam)))


def sheeted_path_from_branch(path_vertices, departure: BranchDeparture) -> SheetedPath:
    """Continuation of a path whose first vertex *is* a finite branch point.

    The first step is seeded by the departure germ; w = 0 is recorded at the
    branch vertex itself.  The remainder of the path is continued normally.
    """
    lam = departure.lam
    verts = [complex(v) for v in np.asarray(path_vertices, dtype=complex)]
    if len(verts) < 2:
        raise ValueError("a branch-seeded path needs at least two vertices")
    b = complex(departure.branch_point)
    if abs(verts[0] - b) > CURVE_TOL:
        raise ValueError("first vertex must coincide with the departure branch point")
    # Walk in toward the branch point so the germ's linearisation is valid.
    step = verts[1] - b
    gap = min(abs(b - p) for p in branch_points(lam).finite if abs(b - p) > CURVE_TOL)
    t = min(1.0, 0.01 * gap / abs(step))
    z_near = b + t * step
    w_near = departure.w_at(z_near)
    tail = continue_sheet([z_near] + verts[1:], w_near, lam)
    verts_out = np.concatenate(([b], tail.vertices))
    w_out = np.concatenate(([0.0j], tail.w_values))
    return SheetedPath(verts_out, w_out, lam)
