"""Voxel substrate: surface voxelization, solid fill, part splitting, slicing.

Conventions used throughout:

* occupancy lives on a cubic lattice of ``R`` cells per axis, stored as a
  boolean array indexed ``occ[x, y, z]``; the linear bit order is x-fastest,
  then y, then z (``occ.flatten(order="F")``);
* voxel ``(i, j, k)`` spans the half-open world box
  ``origin + [i, i+1) * voxel_size`` per axis, so geometry lying exactly on
  a shared face belongs to the upper cell only — a plane never occupies two
  slabs;
* connectivity is 6-neighborhood everywhere (flood fill, closedness claims).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError

DEFAULT_RESOLUTION = 64

# Outward-facing quad corners for each of the 6 face directions, as offsets
# from the voxel's min corner. Winding is counter-clockwise seen from outside.
_FACE_QUADS = {
    (-1, 0, 0): ((0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0)),
    (1, 0, 0): ((1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)),
    (0, -1, 0): ((0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)),
    (0, 1, 0): ((0, 1, 0), (0, 1, 1), (1, 1, 1), (1, 1, 0)),
    (0, 0, -1): ((0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0)),
    (0, 0, 1): ((0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)),
}


def frozen_array(array, dtype) -> np.ndarray:
    """Contiguous read-only view; copies rather than freeze a caller's array."""
    out = np.ascontiguousarray(np.asarray(array, dtype=dtype))
    if out is array and out.flags.writeable:
        out = out.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TriangleMesh:
    """Indexed triangle soup with optional per-face part labels (meters)."""

    vertices: np.ndarray  # (V, 3) float64
    faces: np.ndarray  # (F, 3) int
    face_part_label: np.ndarray | None = None  # (F,) int, labels >= 0

    def __post_init__(self):
        v = frozen_array(self.vertices, np.float64)
        f = frozen_array(self.faces, np.intp).reshape(-1, 3)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        if self.face_part_label is not None:
            lab = frozen_array(self.face_part_label, np.intp)
            if lab.shape[0] != self.faces.shape[0]:
                raise InvalidInputError("face_part_label length != face count")
            object.__setattr__(self, "face_part_label", lab)
        if self.faces.size and self.faces.max(initial=0) >= len(v):
            raise InvalidInputError("face index out of range")
        if v.size and not np.isfinite(v).all():
            raise InvalidInputError("non-finite vertex coordinate")

    @property
    def is_empty(self) -> bool:
        return self.faces.shape[0] == 0

    def triangle(self, i: int) -> np.ndarray:
        return self.vertices[self.faces[i]]


@dataclass(frozen=True)
class VoxelGrid:
    """Dense binary occupancy over an R-per-axis cubic lattice."""

    resolution: int
    occupancy: np.ndarray  # (R, R, R) bool, indexed [x, y, z]
    origin_m: tuple[float, float, float] = (0.0, 0.0, 0.0)
    voxel_size_m: float = 1.0

    def __post_init__(self):
        if self.resolution < 2:
            raise InvalidInputError("resolution must be >= 2")
        if not self.voxel_size_m > 0:
            raise InvalidInputError("voxel_size_m must be positive")
        occ = frozen_array(self.occupancy, bool)
        if occ.shape != (self.resolution,) * 3:
            raise InvalidInputError(
                f"occupancy shape {occ.shape} != R^3 for R={self.resolution}"
            )
        object.__setattr__(self, "occupancy", occ)
        object.__setattr__(
            self, "origin_m", tuple(float(c) for c in self.origin_m)
        )

    def count(self) -> int:
        return int(self.occupancy.sum())

    def same_lattice(self, other: "VoxelGrid") -> bool:
        return (
            self.resolution == other.resolution
            and np.array_equal(self.occupancy, other.occupancy)
        )

    def with_occupancy(self, occ: np.ndarray) -> "VoxelGrid":
        return VoxelGrid(self.resolution, occ, self.origin_m, self.voxel_size_m)

    def voxel_centers(self) -> np.ndarray:
        """World-space centers of occupied voxels, (N, 3)."""
        idx = np.argwhere(self.occupancy).astype(np.float64)
        return np.asarray(self.origin_m) + (idx + 0.5) * self.voxel_size_m


@dataclass(frozen=True)
class PartGrid:
    """A VoxelGrid restricted to one labelled part."""

    part_id: int
    grid: VoxelGrid


@dataclass(frozen=True)
class SliceMask:
    """One z-slice of occupancy; bits indexed [x, y], row-major x-fastest."""

    bits: np.ndarray  # (R, R) bool, indexed [x, y]

    def __post_init__(self):
        b = frozen_array(self.bits, bool)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise InvalidInputError("slice mask must be square")
        object.__setattr__(self, "bits", b)

    @property
    def resolution(self) -> int:
        return self.bits.shape[0]

    def linear(self) -> np.ndarray:
        """Bits in row-major order: x fastest, then y."""
        return self.bits.flatten(order="F")

    @staticmethod
    def from_linear(bits: np.ndarray, resolution: int) -> "SliceMask":
        return SliceMask(np.asarray(bits, dtype=bool).reshape(
            (resolution, resolution), order="F"))


def _triangle_box_overlaps(tri: np.ndarray, mins: np.ndarray,
                           half: np.ndarray) -> np.ndarray:
    """Vectorized SAT test of one triangle against N axis-aligned boxes.

    ``mins`` is (N, 3) box min corners, ``half`` the common (3,) half extent.
    Boxes are half-open on their max faces: a triangle lying entirely in the
    plane of a shared face overlaps only the box whose min face it is.
    """
    centers = mins + half
    v = tri[None, :, :] - centers[:, None, :]  # (N, 3verts, 3)

    e = np.stack([tri[1] - tri[0], tri[2] - tri[1], tri[0] - tri[2]])

    # Box axes, half-open on the max side: tmin < +h and tmax >= -h.
    tmin = v.min(axis=1)
    tmax = v.max(axis=1)
    ok = np.all((tmax >= -half) & (tmin < half), axis=1)
    if not ok.any():
        return ok

    # 9 edge cross products + triangle normal, closed comparisons.
    axes = np.empty((10, 3))
    for i, ax in enumerate(np.eye(3)):
        axes[3 * i: 3 * i + 3] = np.cross(ax, e)
    axes[9] = np.cross(e[0], e[1])
    proj = v @ axes.T  # (N, 3verts, 10)
    r = np.abs(axes) @ half  # (10,)
    pmin = proj.min(axis=1)
    pmax = proj.max(axis=1)
    ok &= np.all((pmax >= -r) & (pmin <= r), axis=1)
    return ok


def voxelize_surface(mesh: TriangleMesh,
                     resolution: int = DEFAULT_RESOLUTION) -> VoxelGrid:
    """Mark every voxel whose box intersects some triangle of ``mesh``.

    The lattice is centered on the mesh bounding box with
    ``voxel_size = longest AABB edge / (resolution - 2)``, which leaves one
    voxel of padding on every side. The size carries a 1e-9 relative
    inflation so bounding-box faces never sit exactly on lattice planes;
    without it the padding shell would be at the mercy of rounding.
    """
    if mesh.is_empty:
        raise InvalidInputError("cannot voxelize an empty mesh")
    if resolution < 2:
        raise InvalidInputError("resolution must be >= 2")

    used = mesh.vertices[np.unique(mesh.faces)]
    lo = used.min(axis=0)
    hi = used.max(axis=0)
    longest = float((hi - lo).max())
    if longest <= 0.0:
        raise InvalidInputError("mesh bounding box is degenerate (a point)")

    voxel_size = longest / (resolution - 2) * (1.0 + 1e-9)
    center = (lo + hi) / 2.0
    origin = center - (resolution * voxel_size) / 2.0

    occ = np.zeros((resolution,) * 3, dtype=bool)
    half = np.full(3, voxel_size / 2.0)
    for fi in range(mesh.faces.shape[0]):
        tri = mesh.triangle(fi)
        tlo = np.floor((tri.min(axis=0) - origin) / voxel_size).astype(int)
        thi = np.floor((tri.max(axis=0) - origin) / voxel_size).astype(int)
        tlo = np.clip(tlo, 0, resolution - 1)
        thi = np.clip(thi, 0, resolution - 1)
        xs, ys, zs = [np.arange(a, b + 1) for a, b in zip(tlo, thi)]
        gx, gy, gz = np.meshgrid(xs, ys, zs, indexing="ij")
        idx = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)
        if idx.size == 0:
            continue
        mins = origin + idx * voxel_size
        hits = _triangle_box_overlaps(tri, mins, half)
        if hits.any():
            h = idx[hits]
            occ[h[:, 0], h[:, 1], h[:, 2]] = True

    return VoxelGrid(resolution, occ, tuple(origin), voxel_size)


def fill_solid(grid: VoxelGrid) -> VoxelGrid:
    """Fill every empty region not 6-connected to the grid boundary."""
    filled = ndimage.binary_fill_holes(grid.occupancy)
    return grid.with_occupancy(filled)


def _point_triangle_sqdist(points: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Squared distance from each point (N, 3) to one triangle (3, 3).

    Minimum over the three clamped edge segments and, where the plane
    projection falls inside the triangle, the plane distance. Degenerate
    triangles fall back to their edges.
    """
    a, b, c = tri
    best = np.full(len(points), np.inf)

    for p0, p1 in ((a, b), (b, c), (c, a)):
        e = p1 - p0
        ee = float(e @ e)
        if ee > 0.0:
            t = np.clip(((points - p0) @ e) / ee, 0.0, 1.0)
        else:
            t = np.zeros(len(points))
        diff = points - (p0 + np.outer(t, e))
        np.minimum(best, np.einsum("ij,ij->i", diff, diff), out=best)

    n = np.cross(b - a, c - a)
    nn = float(n @ n)
    if nn > 0.0:
        signed = (points - a) @ n
        proj = points - np.outer(signed / nn, n)
        v0, v1, v2 = b - a, c - a, proj - a
        d00, d01, d11 = v0 @ v0, v0 @ v1, v1 @ v1
        denom = d00 * d11 - d01 * d01
        if denom != 0.0:
            v = (d11 * (v2 @ v0) - d01 * (v2 @ v1)) / denom
            w = (d00 * (v2 @ v1) - d01 * (v2 @ v0)) / denom
            inside = (v >= 0.0) & (w >= 0.0) & (v + w <= 1.0)
            plane_sq = signed * signed / nn
            best = np.where(inside & (plane_sq < best), plane_sq, best)
    return best


def split_parts(grid: VoxelGrid, mesh: TriangleMesh) -> list[PartGrid]:
    """Assign each occupied voxel to the part of its nearest labelled triangle.

    Distances are taken from voxel centers; exact ties go to the lowest
    part id. Every label present on the mesh yields one PartGrid (possibly
    empty), and the returned list is sorted by part id.
    """
    if mesh.face_part_label is None:
        raise InvalidInputError("mesh carries no face part labels")

    labels = np.unique(mesh.face_part_label)
    idx = np.argwhere(grid.occupancy)
    centers = np.asarray(grid.origin_m) + (idx + 0.5) * grid.voxel_size_m

    best = np.full(len(centers), np.inf)
    owner = np.full(len(centers), -1, dtype=np.intp)
    for label in labels:  # ascending: strict < keeps the lowest id on ties
        for fi in np.flatnonzero(mesh.face_part_label == label):
            d = _point_triangle_sqdist(centers, mesh.triangle(fi))
            closer = d < best
            best[closer] = d[closer]
            owner[closer] = label

    parts = []
    for label in labels:
        occ = np.zeros_like(grid.occupancy)
        sel = idx[owner == label]
        occ[sel[:, 0], sel[:, 1], sel[:, 2]] = True
        parts.append(PartGrid(int(label), grid.with_occupancy(occ)))
    return parts


def slice_z(part: PartGrid) -> list[SliceMask]:
    """All R z-slices of a part, ordered z = 0 .. R-1."""
    occ = part.grid.occupancy
    return [SliceMask(occ[:, :, z]) for z in range(part.grid.resolution)]


def stack_slices(masks: list[SliceMask], grid_like: VoxelGrid | None = None,
                 part_id: int = 0) -> PartGrid:
    """Inverse of slice_z: rebuild a PartGrid from an ordered mask list."""
    occ = np.stack([m.bits for m in masks], axis=2)
    if grid_like is not None:
        return PartGrid(part_id, grid_like.with_occupancy(occ))
    return PartGrid(part_id, VoxelGrid(occ.shape[0], occ))


def exposed_face_count(part: PartGrid) -> int:
    """Count voxel faces whose 6-neighbor is empty or out of bounds."""
    occ = part.grid.occupancy
    total = 0
    for axis in range(3):
        for sign in (-1, 1):
            neighbor = np.zeros_like(occ)
            src = [slice(None)] * 3
            dst = [slice(None)] * 3
            if sign < 0:
                src[axis] = slice(None, -1)
                dst[axis] = slice(1, None)
            else:
                src[axis] = slice(1, None)
                dst[axis] = slice(None, -1)
            neighbor[tuple(dst)] = occ[tuple(src)]
            total += int((occ & ~neighbor).sum())
    return total


def extract_boundary_mesh(part: PartGrid) -> TriangleMesh:
    """Emit two triangles per exposed voxel face, in world coordinates.

    Vertices are shared through a corner map, and windings face outward.
    The result is closed (every edge on exactly two triangles) for
    6-connected solids free of diagonal edge contacts.
    """
    grid = part.grid
    occ = grid.occupancy
    if not occ.any():
        raise InvalidInputError(f"part {part.part_id} has no occupied voxels")

    origin = np.asarray(grid.origin_m)
    size = grid.voxel_size_m
    R = grid.resolution

    corner_index: dict[tuple[int, int, int], int] = {}
    vertices: list[tuple[int, int, int]] = []
    faces: list[tuple[int, int, int]] = []

    def vid(cx: int, cy: int, cz: int) -> int:
        key = (cx, cy, cz)
        i = corner_index.get(key)
        if i is None:
            i = len(vertices)
            corner_index[key] = i
            vertices.append(key)
        return i

    for x, y, z in np.argwhere(occ):
        for (dx, dy, dz), quad in _FACE_QUADS.items():
            nx, ny, nz = x + dx, y + dy, z + dz
            if 0 <= nx < R and 0 <= ny < R and 0 <= nz < R and occ[nx, ny, nz]:
                continue
            q = [vid(x + cx, y + cy, z + cz) for cx, cy, cz in quad]
            faces.append((q[0], q[1], q[2]))
            faces.append((q[0], q[2], q[3]))

    verts = origin + np.asarray(vertices, dtype=np.float64) * size
    labels = np.full(len(faces), part.part_id, dtype=np.intp)
    return TriangleMesh(verts, np.asarray(faces, dtype=np.intp), labels)
