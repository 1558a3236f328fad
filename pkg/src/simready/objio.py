"""File interchange: ASCII OBJ subset and the grid debug dump.

OBJ subset: ``v x y z`` vertices, ``f`` faces (fan-triangulated when more
than three indices, ``v/vt/vn`` references reduced to the vertex index),
and ``g part_<id>`` group headers carrying part labels for following faces.

Grid dump: one line of ``0``/``1`` characters per z-slice (row-major,
x-fastest) with a blank line between consecutive slices. The dump records
occupancy only; world anchoring is not preserved.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .voxel import TriangleMesh, VoxelGrid

_PART_GROUP = re.compile(r"^part_(\d+)$")


def load_obj(path: str | Path) -> TriangleMesh:
    """Read the OBJ subset; labels attach only if any group header is seen."""
    vertices: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    labels: list[int] = []
    current_label = 0
    saw_group = False

    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        tag = tokens[0]
        if tag == "v":
            if len(tokens) < 4:
                raise InvalidInputError(f"{path}:{lineno}: malformed vertex")
            vertices.append(tuple(float(t) for t in tokens[1:4]))
        elif tag == "f":
            idx = []
            for t in tokens[1:]:
                head = t.split("/")[0]
                i = int(head)
                idx.append(i - 1 if i > 0 else len(vertices) + i)
            if len(idx) < 3:
                raise InvalidInputError(f"{path}:{lineno}: face needs 3 indices")
            for k in range(1, len(idx) - 1):  # fan triangulation
                faces.append((idx[0], idx[k], idx[k + 1]))
                labels.append(current_label)
        elif tag == "g" and len(tokens) > 1:
            m = _PART_GROUP.match(tokens[1])
            if m:
                current_label = int(m.group(1))
                saw_group = True
        # other tags (vn, vt, usemtl, o, s, ...) are ignored

    if not faces:
        raise InvalidInputError(f"{path}: no faces")
    return TriangleMesh(
        np.asarray(vertices, dtype=np.float64),
        np.asarray(faces, dtype=np.intp),
        np.asarray(labels, dtype=np.intp) if saw_group else None,
    )


def dump_obj(mesh: TriangleMesh) -> str:
    """Serialize a mesh; faces grouped by part label when labels exist."""
    out = []
    for v in mesh.vertices:
        out.append(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}")
    if mesh.face_part_label is None:
        for f in mesh.faces:
            out.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    else:
        order = np.argsort(mesh.face_part_label, kind="stable")
        last = None
        for fi in order:
            label = int(mesh.face_part_label[fi])
            if label != last:
                out.append(f"g part_{label}")
                last = label
            f = mesh.faces[fi]
            out.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    return "\n".join(out) + "\n"


def save_obj(mesh: TriangleMesh, path: str | Path) -> None:
    Path(path).write_text(dump_obj(mesh))


def dump_grid(grid: VoxelGrid) -> str:
    """Grid debug dump: one 0/1 line per z-slice, blank line between slices."""
    R = grid.resolution
    lines = []
    for z in range(R):
        bits = grid.occupancy[:, :, z].flatten(order="F")
        lines.append("".join("1" if b else "0" for b in bits))
    return "\n\n".join(lines) + "\n"


def parse_grid(text: str) -> VoxelGrid:
    """Parse a grid debug dump back into a lattice-anchored VoxelGrid."""
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise InvalidInputError("grid dump contains no slices")
    R = len(rows)
    slices = []
    for z, row in enumerate(rows):
        if len(row) != R * R or set(row) - {"0", "1"}:
            raise InvalidInputError(
                f"slice {z}: expected {R * R} binary characters, got {len(row)}"
            )
        bits = np.frombuffer(row.encode(), dtype=np.uint8) == ord("1")
        slices.append(bits.reshape((R, R), order="F"))
    return VoxelGrid(R, np.stack(slices, axis=2))


def load_grid(path: str | Path) -> VoxelGrid:
    return parse_grid(Path(path).read_text())


def save_grid(grid: VoxelGrid, path: str | Path) -> None:
    Path(path).write_text(dump_grid(grid))
