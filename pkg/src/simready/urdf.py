"""URDF export: one link per part, one joint per parent-child edge.

Geometry is decoded from each part's code, meshed, and scaled per axis so
the asset's voxel bounding box spans exactly ``scale_m``, centered on the
asset frame origin. Masses come from voxel counts at the material density;
inertia tensors are the exact second moments of the voxel solid about the
part centroid. Link order follows part ids and joint order child ids, so
the document is byte-stable for a given asset.

URDF has no deformable primitive, so deformable assets export with fixed
joints and their mechanical attributes ride in a ``physics.json`` sidecar
(written for every asset).
"""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .asset import JointKind, PhysicalAsset, validate
from .codec import decode_part
from .errors import ExportError
from .objio import dump_obj
from .voxel import PartGrid, TriangleMesh, VoxelGrid, extract_boundary_mesh

_URDF_JOINT_TYPE = {
    JointKind.FIXED: "fixed",
    JointKind.REVOLUTE: "revolute",
    JointKind.PRISMATIC: "prismatic",
    JointKind.CONTINUOUS: "continuous",
}

# URDF requires effort/velocity on limited joints; fixed defaults keep the
# document deterministic.
_LIMIT_EFFORT = 100.0
_LIMIT_VELOCITY = 1.0


@dataclass(frozen=True)
class UrdfBundle:
    document: str
    urdf_path: Path
    mesh_files: tuple[Path, ...]
    sidecar_path: Path


def _fmt(v: float) -> str:
    return repr(float(v))


def _fmt3(v) -> str:
    return " ".join(_fmt(c) for c in v)


def _decode_parts(asset: PhysicalAsset) -> dict[int, PartGrid]:
    grids = {}
    for part in asset.parts:
        grid = decode_part(part.geometry, part_id=part.id)
        if grid.grid.count() == 0:
            raise ExportError("geometry decodes to zero voxels", part.id)
        grids[part.id] = grid
    return grids


def _voxel_inertia(idx: np.ndarray, scale: np.ndarray,
                   voxel_mass: float) -> tuple[np.ndarray, np.ndarray]:
    """Centroid and inertia tensor of equal-mass voxel boxes at ``idx``."""
    centers = (idx + 0.5) * scale  # asset-frame, pre-centering offset applied by caller
    centroid = centers.mean(axis=0)
    d = centers - centroid
    n = len(idx)
    sx, sy, sz = scale
    # per-box own inertia (solid box about its center)
    own = voxel_mass / 12.0 * np.array([sy * sy + sz * sz,
                                        sx * sx + sz * sz,
                                        sx * sx + sy * sy])
    ixx = voxel_mass * np.sum(d[:, 1] ** 2 + d[:, 2] ** 2) + n * own[0]
    iyy = voxel_mass * np.sum(d[:, 0] ** 2 + d[:, 2] ** 2) + n * own[1]
    izz = voxel_mass * np.sum(d[:, 0] ** 2 + d[:, 1] ** 2) + n * own[2]
    ixy = -voxel_mass * np.sum(d[:, 0] * d[:, 1])
    ixz = -voxel_mass * np.sum(d[:, 0] * d[:, 2])
    iyz = -voxel_mass * np.sum(d[:, 1] * d[:, 2])
    return centroid, np.array([ixx, iyy, izz, ixy, ixz, iyz])


def export_urdf(asset: PhysicalAsset, out_dir: str | Path,
                name: str = "asset") -> UrdfBundle:
    """Write ``<name>.urdf``, one OBJ per part and the physics sidecar."""
    violations = validate(asset)
    if violations:
        v = violations[0]
        raise ExportError(f"invalid asset: {v}", v.part_id)

    grids = _decode_parts(asset)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    # per-axis world scale: voxel AABB of the union spans exactly scale_m
    all_idx = np.vstack([np.argwhere(g.grid.occupancy)
                         for g in grids.values()])
    lo = all_idx.min(axis=0).astype(np.float64)
    hi = all_idx.max(axis=0).astype(np.float64) + 1.0
    extent_vox = hi - lo
    scale = np.asarray(asset.scale_m) / extent_vox
    center = (lo + hi) / 2.0 * scale  # asset-frame offset of the AABB center
    voxel_volume = float(scale.prod())

    # accumulated joint translations: link frames sit at their joint origins
    cum: dict[int, np.ndarray] = {}
    for part in sorted(asset.parts, key=lambda p: p.id):
        if part.parent is None:
            cum[part.id] = np.zeros(3)
    # children may precede parents in id order only if the tree is unordered;
    # resolve by walking until every part is placed
    pending = [p for p in asset.parts if p.parent is not None]
    while pending:
        rest = []
        for part in pending:
            if part.parent in cum:
                cum[part.id] = np.asarray(part.joint.origin_m)
            else:
                rest.append(part)
        if len(rest) == len(pending):
            raise ExportError("joint tree cannot be ordered")
        pending = rest

    mesh_files: list[Path] = []
    link_xml: list[str] = []
    for part in sorted(asset.parts, key=lambda p: p.id):
        grid = grids[part.id]
        idx = np.argwhere(grid.grid.occupancy)
        mesh = extract_boundary_mesh(grid)
        world_verts = mesh.vertices * scale - center
        mesh_out = TriangleMesh(world_verts, mesh.faces, mesh.face_part_label)
        mesh_path = out_dir / f"part_{part.id}.obj"
        mesh_path.write_text(dump_obj(mesh_out))
        mesh_files.append(mesh_path)

        voxel_mass = part.material.density * voxel_volume
        mass = voxel_mass * len(idx)
        centroid, inertia = _voxel_inertia(idx.astype(np.float64), scale,
                                           voxel_mass)
        centroid -= center
        link_origin = cum[part.id]
        mesh_xyz = -link_origin
        inertial_xyz = centroid - link_origin

        link_xml.append(f'  <link name="link_{part.id}">')
        link_xml.append("    <inertial>")
        link_xml.append(f'      <origin xyz="{_fmt3(inertial_xyz)}" rpy="0 0 0"/>')
        link_xml.append(f'      <mass value="{_fmt(mass)}"/>')
        link_xml.append(
            f'      <inertia ixx="{_fmt(inertia[0])}" iyy="{_fmt(inertia[1])}"'
            f' izz="{_fmt(inertia[2])}" ixy="{_fmt(inertia[3])}"'
            f' ixz="{_fmt(inertia[4])}" iyz="{_fmt(inertia[5])}"/>')
        link_xml.append("    </inertial>")
        for tag in ("visual", "collision"):
            link_xml.append(f"    <{tag}>")
            link_xml.append(f'      <origin xyz="{_fmt3(mesh_xyz)}" rpy="0 0 0"/>')
            link_xml.append("      <geometry>")
            link_xml.append(f'        <mesh filename="part_{part.id}.obj"/>')
            link_xml.append("      </geometry>")
            link_xml.append(f"    </{tag}>")
        link_xml.append("  </link>")

    joint_xml: list[str] = []
    for part in sorted(asset.parts, key=lambda p: p.id):
        if part.parent is None:
            continue
        j = part.joint
        xyz = np.asarray(j.origin_m) - cum[part.parent]
        joint_xml.append(f'  <joint name="joint_{part.id}"'
                         f' type="{_URDF_JOINT_TYPE[j.kind]}">')
        joint_xml.append(f'    <origin xyz="{_fmt3(xyz)}" rpy="0 0 0"/>')
        joint_xml.append(f'    <parent link="link_{part.parent}"/>')
        joint_xml.append(f'    <child link="link_{part.id}"/>')
        if j.kind is not JointKind.FIXED:
            joint_xml.append(f'    <axis xyz="{_fmt3(j.axis)}"/>')
        if j.kind in (JointKind.REVOLUTE, JointKind.PRISMATIC):
            joint_xml.append(
                f'    <limit lower="{_fmt(j.limit_lower)}"'
                f' upper="{_fmt(j.limit_upper)}"'
                f' effort="{_fmt(_LIMIT_EFFORT)}"'
                f' velocity="{_fmt(_LIMIT_VELOCITY)}"/>')
        joint_xml.append("  </joint>")

    document = "\n".join(
        ['<?xml version="1.0"?>', f'<robot name="{name}">']
        + link_xml + joint_xml + ["</robot>"]) + "\n"

    urdf_path = out_dir / f"{name}.urdf"
    urdf_path.write_text(document)

    sidecar = {
        "deformable": asset.deformable,
        "category": asset.category,
        "scale_m": list(asset.scale_m),
        "parts": [
            {
                "id": p.id,
                "name": p.name,
                "material": {
                    "name": p.material.name,
                    "density": p.material.density,
                    "youngs_modulus": p.material.youngs_modulus,
                    "poisson_ratio": p.material.poisson_ratio,
                },
                "affordance": p.affordance,
            }
            for p in sorted(asset.parts, key=lambda p: p.id)
        ],
    }
    sidecar_path = out_dir / "physics.json"
    sidecar_path.write_text(json.dumps(sidecar, indent=2) + "\n")

    return UrdfBundle(document, urdf_path, tuple(mesh_files), sidecar_path)


def validate_urdf(document: str, base_dir: str | Path | None = None) -> list[str]:
    """Structural checks on a URDF document; returns violations as data.

    ``base_dir`` enables mesh-file resolvability checks.
    """
    out: list[str] = []
    try:
        root = ET.fromstring(document)
    except ET.ParseError as err:
        return [f"not well-formed XML: {err}"]
    if root.tag != "robot":
        return [f"root element is <{root.tag}>, expected <robot>"]

    links = root.findall("link")
    joints = root.findall("joint")
    link_names = [l.get("name") for l in links]
    if len(set(link_names)) != len(link_names):
        out.append("duplicate link names")
    known = set(link_names)

    children = set()
    edges = []
    for j in joints:
        name = j.get("name", "?")
        parent = j.find("parent")
        child = j.find("child")
        if parent is None or child is None:
            out.append(f"joint {name}: missing parent or child")
            continue
        p, c = parent.get("link"), child.get("link")
        for end, link in (("parent", p), ("child", c)):
            if link not in known:
                out.append(f"joint {name}: {end} link {link!r} undefined")
        if c in children:
            out.append(f"link {c} is the child of more than one joint")
        children.add(c)
        edges.append((p, c))

        jtype = j.get("type")
        if jtype not in ("fixed", "revolute", "prismatic", "continuous"):
            out.append(f"joint {name}: unknown type {jtype!r}")
        if jtype in ("revolute", "prismatic", "continuous"):
            axis = j.find("axis")
            if axis is None:
                out.append(f"joint {name}: missing axis")
            else:
                try:
                    vals = [float(v) for v in axis.get("xyz", "").split()]
                    norm = math.sqrt(sum(v * v for v in vals))
                except ValueError:
                    vals, norm = [], 0.0
                if len(vals) != 3 or abs(norm - 1.0) > 1e-6:
                    out.append(f"joint {name}: axis is not a unit vector")
        if jtype in ("revolute", "prismatic"):
            limit = j.find("limit")
            if limit is None:
                out.append(f"joint {name}: missing limit")
            else:
                lo = float(limit.get("lower", "nan"))
                hi = float(limit.get("upper", "nan"))
                if not (lo <= hi):
                    out.append(f"joint {name}: lower > upper")

    roots = [n for n in link_names if n not in children]
    if len(roots) != 1:
        out.append(f"expected exactly one root link, found {len(roots)}")
    elif links:
        reach = {roots[0]}
        grew = True
        while grew:
            grew = False
            for p, c in edges:
                if p in reach and c not in reach:
                    reach.add(c)
                    grew = True
        for n in link_names:
            if n not in reach:
                out.append(f"link {n} unreachable from root")

    if base_dir is not None:
        base = Path(base_dir)
        for mesh in root.iter("mesh"):
            fname = mesh.get("filename", "")
            if not (base / fname).exists():
                out.append(f"mesh file {fname!r} not found")
    return out
