"""Triangulated meshes of the immersed surface and ASCII export.

One fundamental-domain mesh covers both sheets of the cover over a trimmed
annulus, built from the two closed grid immersions.  Cell assembly follows
the sheet alignment of radial edges: for the single row pair straddling a
branch modulus, cells past the branch crossing take their upper corners
from the other sheet's grid, so triangles never bridge the two sheets
incorrectly near a branch point.  Further copies are exact translates by
the period vector T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import abs_gauss_curvature
from .curve import as_lambda
from .errors import RiemannFamilyError
from .weierstrass import (
    GridImmersion,
    Normalization,
    immerse_grid,
    period_vectors,
    radial_edge_alignment,
    unit_normal,
)

#: Decimal precision used for all exported floats; round-trips doubles exactly.
EXPORT_DIGITS = 17


@dataclass(frozen=True)
class MeshProvenance:
    lam: float
    normalization: str
    sheet_convention: str
    r_min: float
    r_max: float
    n_rad: int
    n_ang: int
    copies: int


@dataclass(frozen=True)
class SurfaceMesh:
    vertices: np.ndarray      # (n, 3) float
    triangles: np.ndarray     # (m, 3) int, counterclockwise in grid orientation
    normals: np.ndarray       # (n, 3) unit
    abs_curvature: np.ndarray  # (n,)
    provenance: MeshProvenance

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        t = np.asarray(self.triangles, dtype=np.int64)
        n = np.asarray(self.normals, dtype=float)
        k = np.asarray(self.abs_curvature, dtype=float)
        if len(t) and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("triangle indices out of range")
        if len(n):
            bad = np.abs(np.linalg.norm(n, axis=1) - 1.0) > 1e-9
            if bad.any():
                raise ValueError("normals must be unit length")
        for arr in (v, t, n, k):
            arr.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        object.__setattr__(self, "normals", n)
        object.__setattr__(self, "abs_curvature", k)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)


def triangle_areas(mesh: SurfaceMesh) -> np.ndarray:
    v = mesh.vertices
    t = mesh.triangles
    a, b, c = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def euler_characteristic(mesh: SurfaceMesh) -> int:
    edges = set()
    for tri in mesh.triangles:
        for e in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            edges.add((min(e), max(e)))
    return mesh.n_vertices - len(edges) + mesh.n_triangles


def build_mesh(lam, norm: Normalization, *, n_rad: int = 48, n_ang: int = 96,
               copies: int = 1, r_min: float = 1.0 / 40.0, r_max: float = 40.0,
               min_triangle_area: float = 1e-12) -> SurfaceMesh:
    """Mesh of `copies` fundamental domains of the immersed surface.

    Quad cells follow the continuation alignment of their radial edges, so
    cells in the ring pair straddling a branch modulus take their upper
    corners from the other sheet's grid (and, where the alignment carries a
    period offset, from a translated duplicate vertex).  Ends are trimmed at
    |z| in [r_min, r_max]; the second and later copies reuse the first
    copy's immersion values translated by multiples of the period vector,
    exactly.
    """
    lam = as_lambda(lam)
    if copies < 1:
        raise ValueError("copies must be at least 1")
    grids = {s: immerse_grid(lam, norm, r_min=r_min, r_max=r_max, n_rad=n_rad,
                             n_ang=n_ang, sheet_sign=s, closed=True)
             for s in (+1, -1)}
    alignment = radial_edge_alignment(grids[+1], grids[-1])
    t_vec = period_vectors(lam, norm).translation
    block_size = grids[+1].positions.shape[0] * grids[+1].positions.shape[1]
    block = {+1: 0, -1: block_size}
    vert_list = [grids[+1].positions.reshape(-1, 3), grids[-1].positions.reshape(-1, 3)]
    z_list = [grids[+1].z.ravel(), grids[-1].z.ravel()]
    n_col = grids[+1].n_col
    extra = {}

    def vid(s: int, i: int, j: int, k: int) -> int:
        base = block[s] + i * n_col + j
        if k == 0:
            return base
        key = (s, i, j, k)
        if key not in extra:
            g = grids[s]
            vert_list.append((g.positions[i, j] + k * t_vec)[None, :])
            z_list.append(np.array([g.z[i, j]]))
            extra[key] = 2 * block_size + len(extra)
        return extra[key]

    tris = []
    for s in (+1, -1):
        g = grids[s]
        for i in range(g.n_rad - 1):
            for c in range(n_col - 1):
                s_w, k_w = alignment.sheet[s][i, c], alignment.period_k[s][i, c]
                s_e, k_e = alignment.sheet[s][i, c + 1], alignment.period_k[s][i, c + 1]
                a = vid(s, i, c, 0)
                b = vid(s, i, c + 1, 0)
                cc = vid(s_e, i + 1, c + 1, k_e)
                d = vid(s_w, i + 1, c, k_w)
                tris.append((a, b, cc))
                tris.append((a, cc, d))
    tris = np.asarray(tris, dtype=np.int64)
    verts = np.concatenate(vert_list)
    zflat = np.concatenate(z_list)

    normals = unit_normal(zflat)
    curv = abs_gauss_curvature(zflat, lam, norm)

    if copies > 1:
        t_vec = period_vectors(lam, norm).translation
        all_verts = [verts + k * t_vec for k in range(copies)]
        all_tris = [tris + k * len(verts) for k in range(copies)]
        verts = np.concatenate(all_verts)
        tris = np.concatenate(all_tris)
        normals = np.tile(normals, (copies, 1))
        curv = np.tile(curv, copies)

    mesh = SurfaceMesh(
        vertices=verts, triangles=tris, normals=normals, abs_curvature=curv,
        provenance=MeshProvenance(
            lam=lam.value, normalization=norm.kind.value,
            sheet_convention="principal root at z0 = 1 (departure germ at lam = 1)",
            r_min=r_min, r_max=r_max, n_rad=n_rad, n_ang=n_ang, copies=copies,
        ),
    )
    areas = triangle_areas(mesh)
    if len(areas) and float(areas.min()) <= min_triangle_area:
        raise RiemannFamilyError(
            f"degenerate triangle (area {areas.min():.3e}) in mesh at lam = {lam.value}"
        )
    return mesh


def seam_offsets(grid_plus: GridImmersion, grid_minus: GridImmersion):
    """Per-row offsets between each grid's seam column and the start column it
    continues onto (same sheet or the other, whichever root matches).

    The returned array holds, for every row of each grid, the residual after
    subtracting the best integer multiple (in -2..2) of the translation
    period; a correctly tiling mesh has residuals at quadrature level.
    """
    t_vec = period_vectors(grid_plus.lam, grid_plus.norm).translation
    out = []
    grids = {+1: grid_plus, -1: grid_minus}
    for s, g in grids.items():
        for i in range(g.n_rad):
            w_end = g.w[i, -1]
            candidates = []
            for s2, g2 in grids.items():
                dw = abs(g2.w[i, 0] - w_end)
                candidates.append((dw, s2))
            _, s_match = min(candidates)
            start = grids[s_match].positions[i, 0]
            end = g.positions[i, -1]
            best = min(
                float(np.linalg.norm(end - (start + k * t_vec)))
                for k in range(-2, 3)
            )
            out.append(best)
    return np.array(out)


# ---------------------------------------------------------------------------
# ASCII export / import
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), f".{EXPORT_DIGITS}g")


def export(mesh: SurfaceMesh, fmt: str, path) -> None:
    """Write the mesh as ASCII OBJ (v/vn/f) or PLY 1.0 (with |K| as quality).

    Output is deterministic: identical meshes produce byte-identical files.
    """
    fmt = fmt.lower()
    if fmt == "obj":
        text = _to_obj(mesh)
    elif fmt == "ply":
        text = _to_ply(mesh)
    else:
        raise ValueError(f"unsupported mesh format {fmt!r} (use 'obj' or 'ply')")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def _to_obj(mesh: SurfaceMesh) -> str:
    lines = ["# riemann-examples surface mesh"]
    for v in mesh.vertices:
        lines.append(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}")
    for n in mesh.normals:
        lines.append(f"vn {_fmt(n[0])} {_fmt(n[1])} {_fmt(n[2])}")
    for t in mesh.triangles:
        a, b, c = t + 1
        lines.append(f"f {a}//{a} {b}//{b} {c}//{c}")
    return "\n".join(lines) + "\n"


def _to_ply(mesh: SurfaceMesh) -> str:
    lines = [
        "ply",
        "format ascii 1.0",
        "comment riemann-examples surface mesh",
        f"element vertex {mesh.n_vertices}",
        "property double x",
        "property double y",
        "property double z",
        "property double nx",
        "property double ny",
        "property double nz",
        "property double quality",
        f"element face {mesh.n_triangles}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    for v, n, k in zip(mesh.vertices, mesh.normals, mesh.abs_curvature):
        lines.append(" ".join(_fmt(x) for x in (*v, *n, k)))
    for t in mesh.triangles:
        lines.append(f"3 {t[0]} {t[1]} {t[2]}")
    return "\n".join(lines) + "\n"


def load_obj(path) -> SurfaceMesh:
    verts, norms, tris = [], [], []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "vn":
                norms.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                tris.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
    return SurfaceMesh(
        vertices=np.array(verts).reshape(-1, 3),
        triangles=np.array(tris, dtype=np.int64).reshape(-1, 3),
        normals=np.array(norms).reshape(-1, 3),
        abs_curvature=np.zeros(len(verts)),
        provenance=MeshProvenance(lam=float("nan"), normalization="unknown",
                                  sheet_convention="unknown", r_min=0.0, r_max=0.0,
                                  n_rad=0, n_ang=0, copies=0),
    )


def load_ply(path) -> SurfaceMesh:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    n_vert = n_face = 0
    body_at = 0
    for k, line in enumerate(lines):
        if line.startswith("element vertex"):
            n_vert = int(line.split()[-1])
        elif line.startswith("element face"):
            n_face = int(line.split()[-1])
        elif line == "end_header":
            body_at = k + 1
            break
    vert_rows = [list(map(float, ln.split())) for ln in lines[body_at:body_at + n_vert]]
    face_rows = [list(map(int, ln.split()))[1:4]
                 for ln in lines[body_at + n_vert:body_at + n_vert + n_face]]
    data = np.array(vert_rows).reshape(-1, 7)
    return SurfaceMesh(
        vertices=data[:, 0:3], triangles=np.array(face_rows, dtype=np.int64).reshape(-1, 3),
        normals=data[:, 3:6], abs_curvature=data[:, 6],
        provenance=MeshProvenance(lam=float("nan"), normalization="unknown",
                                  sheet_convention="unknown", r_min=0.0, r_max=0.0,
                                  n_rad=0, n_ang=0, copies=0),
    )
