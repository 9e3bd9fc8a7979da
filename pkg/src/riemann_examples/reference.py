"""Closed-form catenoid and helicoid used as limit oracles.

Both come from their surface data integrated from the base point z0 = 1:

    catenoid:  g = z, eta = dz/z^2   ->  C(z) = (Re(-z - 1/z) + 2, -Im(z - 1/z), 2 ln|z|)
    helicoid:  g = z, eta = i dz/z^2 ->  H(z) = (-Im(z + 1/z), Re(z - 1/z), 2 arg z)

with the helicoid's arg continued along the integration path, so an extra
`branch` circuits about the origin add 4*pi*branch to the height.  The
catenoid's axis is the vertical line through (2, 0): the base point pins the
parametrization, not the axis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularPoint


class ReferenceKind(str, enum.Enum):
    CATENOID = "catenoid"
    HELICOID = "helicoid"


@dataclass(frozen=True)
class ReferenceSurface:
    kind: ReferenceKind
    branch_of_log: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ReferenceKind(self.kind))
        if self.kind is ReferenceKind.CATENOID and self.branch_of_log != 0:
            raise ValueError("the catenoid is single-valued; branch_of_log must be 0")

    def point(self, z, branch: int | None = None):
        if self.kind is ReferenceKind.CATENOID:
            return catenoid_point(z)
        return helicoid_point(z, self.branch_of_log if branch is None else branch)


#: The catenoid's axis passes through this horizontal point.
CATENOID_AXIS = np.array([2.0, 0.0])


def catenoid_point(z):
    """Catenoid position at parameter z; vectorized, singular only at z = 0."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise SingularPoint("catenoid parametrization is singular at z = 0")
    x1 = (-z - 1.0 / z).real + 2.0
    x2 = -(z - 1.0 / z).imag
    x3 = 2.0 * np.log(np.abs(z))
    return np.stack([x1, x2, x3], axis=-1)


def helicoid_point(z, branch: int = 0):
    """Helicoid position at parameter z on the given log branch; vectorized.

    The height is 2*(arg z + 2 pi branch) with arg the principal argument, so
    consecutive branches differ by the vertical translation (0, 0, 4 pi).
    The image of the positive real axis is the horizontal line x1 = x3 = 0.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise SingularPoint("helicoid parametrization is singular at z = 0")
    x1 = -(z + 1.0 / z).imag
    x2 = (z - 1.0 / z).real
    x3 = 2.0 * (np.angle(z) + 2.0 * math.pi * branch)
    return np.stack([x1, x2, x3], axis=-1)


def helicoid_point_continued(z, continued_angle):
    """Helicoid position with an explicitly continued argument (used to match
    immersion paths whose sweep leaves the principal branch)."""
    z = np.asarray(z, dtype=complex)
    x1 = -(z + 1.0 / z).imag
    x2 = (z - 1.0 / z).real
    x3 = 2.0 * np.asarray(continued_angle, dtype=float)
    return np.stack([x1, x2, x3], axis=-1)


def catenoid_integrand(z, w=None):
    """Weierstrass integrand of the catenoid data (w is ignored; the catenoid
    lives over the plane, not the double cover)."""
    z = np.asarray(z, dtype=complex)
    z2 = z * z
    return np.stack([(1.0 - z2) / z2, 1j * (1.0 + z2) / z2, 2.0 / z])


def helicoid_integrand(z, w=None):
    """Weierstrass integrand whose real integral from 1, negated, is the
    helicoid; equals i times the catenoid integrand."""
    return 1j * catenoid_integrand(z)


def deviation_field(points, immersed, kind, branch: int = 0) -> float:
    """Sup-norm distance between immersed positions and the reference surface
    sampled at the same parameters."""
    points = np.asarray(points, dtype=complex)
    immersed = np.asarray(immersed, dtype=float)
    if immersed.shape != points.shape + (3,):
        raise ValueError(
            f"length mismatch: {len(points)} parameters vs {immersed.shape} positions"
        )
    ref = ReferenceSurface(kind, branch_of_log=branch).point(points)
    if len(points) == 0:
        return 0.0
    return float(np.max(np.linalg.norm(immersed - ref, axis=-1)))
