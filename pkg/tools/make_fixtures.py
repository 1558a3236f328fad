#!/usr/bin/env python3
"""Regenerate the shipped fixture corpus under fixtures/.

Deterministic: rerunning produces byte-identical files. The invalid assets
are written with a .asset.reject suffix so the roundtrip command skips
them while the validation tests can still read them.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from simready.asset import (  # noqa: E402
    JointKind, JointSpec, MaterialSpec, PartSpec, PhysicalAsset,
    serialize_asset,
)
from simready.bench import response_to_mapping, JudgeResponse  # noqa: E402
from simready.codec import encode_part, serialize_part  # noqa: E402
from simready.objio import dump_grid, dump_obj  # noqa: E402
from simready.voxel import PartGrid, TriangleMesh, VoxelGrid  # noqa: E402

R = 64

OAK = MaterialSpec("oak", 700.0, 1.1e10, 0.3)
STEEL = MaterialSpec("steel", 7850.0, 2e11, 0.29)
PLASTIC = MaterialSpec("abs_plastic", 1050.0, 2.3e9, 0.35)
RUBBER = MaterialSpec("rubber", 1100.0, 50000000.0, 0.48)
FOAM = MaterialSpec("pu_foam", 90.0, 50000.0, 0.2)
GLASS = MaterialSpec("glass", 2500.0, 7e10, 0.22)


def box(x0, x1, y0, y1, z0, z1, resolution=R):
    occ = np.zeros((resolution,) * 3, dtype=bool)
    occ[x0:x1, y0:y1, z0:z1] = True
    return occ


def cylinder_z(cx, cy, radius, z0, z1, resolution=R):
    occ = np.zeros((resolution,) * 3, dtype=bool)
    ax = np.arange(resolution) + 0.5
    dx, dy = np.meshgrid(ax - cx, ax - cy, indexing="ij")
    disk = dx * dx + dy * dy <= radius * radius
    occ[:, :, z0:z1] = disk[:, :, None]
    return occ


def cylinder_y(cx, cz, radius, y0, y1, resolution=R):
    occ = np.zeros((resolution,) * 3, dtype=bool)
    ax = np.arange(resolution) + 0.5
    dx, dz = np.meshgrid(ax - cx, ax - cz, indexing="ij")
    disk = dx * dx + dz * dz <= radius * radius
    occ[:, y0:y1, :] = disk[:, None, :]
    return occ


def sphere(cx, cy, cz, radius, resolution=R):
    occ = np.zeros((resolution,) * 3, dtype=bool)
    ax = np.arange(resolution) + 0.5
    dx, dy, dz = np.meshgrid(ax - cx, ax - cy, ax - cz, indexing="ij")
    occ = dx * dx + dy * dy + dz * dz <= radius * radius
    return occ


def code(occ):
    return encode_part(PartGrid(0, VoxelGrid(occ.shape[0], occ)))


def part(pid, name, desc, parent, material, affordance, joint, occ):
    return PartSpec(pid, name, desc, parent, material, affordance, joint,
                    code(occ))


def fixed(origin=(0.0, 0.0, 0.0)):
    return JointSpec(JointKind.FIXED, origin)


def revolute(origin, axis, lo, hi):
    return JointSpec(JointKind.REVOLUTE, origin, axis, lo, hi)


def prismatic(origin, axis, lo, hi):
    return JointSpec(JointKind.PRISMATIC, origin, axis, lo, hi)


def continuous(origin, axis):
    return JointSpec(JointKind.CONTINUOUS, origin, axis)


def build_assets() -> dict[str, PhysicalAsset]:
    assets = {}

    assets["cabinet"] = PhysicalAsset(
        "cabinet", "single-door storage cabinet", (0.6, 0.45, 1.2), False, (
            part(0, "body", "carcass with an open front", None, OAK, 0.15,
                 fixed(), box(8, 52, 16, 56, 4, 60)),
            part(1, "door", "hinged front door with no handle", 0, OAK, 0.85,
                 revolute((0.28, -0.11, 0.0), (0.0, 0.0, 1.0), -1.57, 0.0),
                 box(8, 52, 12, 16, 4, 60)),
        ))

    assets["drawer_unit"] = PhysicalAsset(
        "drawer unit", "two-drawer bedside unit", (0.45, 0.5, 0.6), False, (
            part(0, "body", "outer shell", None, OAK, 0.1,
                 fixed(), box(6, 58, 20, 60, 4, 60)),
            part(1, "upper_drawer", "top sliding drawer", 0, PLASTIC, 0.9,
                 prismatic((0.0, -0.05, 0.12), (0.0, -1.0, 0.0), 0.0, 0.4),
                 box(10, 54, 8, 20, 34, 56)),
            part(2, "lower_drawer", "bottom sliding drawer", 0, PLASTIC, 0.8,
                 prismatic((0.0, -0.05, -0.12), (0.0, -1.0, 0.0), 0.0, 0.4),
                 box(10, 54, 8, 20, 8, 30)),
        ))

    assets["scissors"] = PhysicalAsset(
        "scissors", "office scissors with plastic grips",
        (0.02, 0.06, 0.18), False, (
            part(0, "pivot", "riveted pivot pin", None, STEEL, 0.2,
                 fixed(), cylinder_z(32, 32, 4.0, 28, 36)),
            part(1, "blade_a", "upper cutting blade with grip", 0, STEEL, 0.7,
                 revolute((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), -0.6, 0.6),
                 box(28, 36, 36, 62, 30, 34)),
            part(2, "blade_b", "lower cutting blade with grip", 0, STEEL, 0.7,
                 revolute((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), -0.6, 0.6),
                 box(28, 36, 2, 28, 30, 34)),
        ))

    assets["cart"] = PhysicalAsset(
        "hand cart", "flatbed cart on four wheels", (0.9, 0.6, 0.5), False, (
            part(0, "bed", "load platform", None, STEEL, 0.3,
                 fixed(), box(4, 60, 4, 60, 28, 36)),
            part(1, "wheel_fl", "front-left wheel", 0, RUBBER, 0.4,
                 continuous((-0.3, 0.2, -0.15), (0.0, 1.0, 0.0)),
                 cylinder_y(12, 14, 8.0, 6, 14)),
            part(2, "wheel_fr", "front-right wheel", 0, RUBBER, 0.4,
                 continuous((0.3, 0.2, -0.15), (0.0, 1.0, 0.0)),
                 cylinder_y(52, 14, 8.0, 6, 14)),
            part(3, "wheel_rl", "rear-left wheel", 0, RUBBER, 0.4,
                 continuous((-0.3, -0.2, -0.15), (0.0, 1.0, 0.0)),
                 cylinder_y(12, 14, 8.0, 50, 58)),
            part(4, "wheel_rr", "rear-right wheel", 0, RUBBER, 0.4,
                 continuous((0.3, -0.2, -0.15), (0.0, 1.0, 0.0)),
                 cylinder_y(52, 14, 8.0, 50, 58)),
        ))

    assets["table"] = PhysicalAsset(
        "table", "rectangular four-leg dining table",
        (1.6, 0.9, 0.75), False, (
            part(0, "top", "table top slab", None, OAK, 0.6,
                 fixed(), box(2, 62, 2, 62, 56, 62)),
            part(1, "leg_a", "leg at the first corner", 0, OAK, 0.1,
                 fixed(), box(4, 10, 4, 10, 2, 56)),
            part(2, "leg_b", "leg at the second corner", 0, OAK, 0.1,
                 fixed(), box(54, 60, 4, 10, 2, 56)),
            part(3, "leg_c", "leg at the third corner", 0, OAK, 0.1,
                 fixed(), box(4, 10, 54, 60, 2, 56)),
            part(4, "leg_d", "leg at the fourth corner", 0, OAK, 0.1,
                 fixed(), box(54, 60, 54, 60, 2, 56)),
        ))

    assets["laptop"] = PhysicalAsset(
        "laptop", "clamshell laptop computer", (0.33, 0.23, 0.25), False, (
            part(0, "base", "keyboard deck and mainboard", None, PLASTIC, 0.8,
                 fixed(), box(4, 60, 4, 60, 2, 8)),
            part(1, "lid", "screen lid on the rear hinge", 0, PLASTIC, 0.9,
                 revolute((0.0, 0.11, 0.01), (1.0, 0.0, 0.0), 0.0, 2.1),
                 box(4, 60, 56, 60, 8, 62)),
        ))

    assets["pillow"] = PhysicalAsset(
        "pillow", "soft foam seat pillow", (0.5, 0.4, 0.12), True, (
            part(0, "cushion", "single deformable cushion body", None, FOAM,
                 0.95, fixed(), box(4, 60, 8, 56, 24, 40)),
        ))

    assets["ball"] = PhysicalAsset(
        "ball", "solid rubber play ball", (0.24, 0.24, 0.24), False, (
            part(0, "body", "homogeneous rubber sphere", None, RUBBER, 0.9,
                 fixed(), sphere(32, 32, 32, 28.0)),
        ))

    assets["robot_arm"] = PhysicalAsset(
        "robot arm", "three-link tabletop manipulator",
        (0.3, 0.3, 0.8), False, (
            part(0, "base", "weighted cylindrical base", None, STEEL, 0.2,
                 fixed(), cylinder_z(32, 32, 14.0, 2, 12)),
            part(1, "link_1", "shoulder link", 0, STEEL, 0.4,
                 revolute((0.0, 0.0, -0.25), (0.0, 0.0, 1.0), -3.0, 3.0),
                 cylinder_z(32, 32, 7.0, 12, 34)),
            part(2, "link_2", "elbow link", 1, STEEL, 0.5,
                 revolute((0.0, 0.0, 0.05), (0.0, 1.0, 0.0), -2.0, 2.0),
                 cylinder_z(32, 32, 5.0, 34, 52)),
            part(3, "gripper", "parallel gripper head", 2, PLASTIC, 0.95,
                 revolute((0.0, 0.0, 0.3), (0.0, 1.0, 0.0), -1.5, 1.5),
                 box(26, 38, 26, 38, 52, 62)),
        ))

    shelf_parts = [
        part(0, "frame", "outer frame and back panel", None, OAK, 0.1,
             fixed(), box(4, 8, 8, 56, 2, 62) | box(56, 60, 8, 56, 2, 62)
             | box(4, 60, 52, 56, 2, 62)),
    ]
    for i in range(5):
        z0 = 4 + i * 12
        shelf_parts.append(
            part(1 + i, f"shelf_{i}", f"fixed shelf number {i}", 0, OAK, 0.5,
                 fixed(), box(8, 56, 8, 52, z0, z0 + 4)))
    shelf_parts.append(
        part(6, "door_left", "left glass door", 0, GLASS, 0.8,
             revolute((-0.25, -0.2, 0.0), (0.0, 0.0, 1.0), -1.4, 0.0),
             box(8, 30, 4, 8, 4, 60)))
    shelf_parts.append(
        part(7, "door_right", "right glass door", 0, GLASS, 0.8,
             revolute((0.25, -0.2, 0.0), (0.0, 0.0, 1.0), 0.0, 1.4),
             box(34, 56, 4, 8, 4, 60)))
    assets["bookshelf"] = PhysicalAsset(
        "bookshelf", "glass-door bookshelf with five shelves",
        (0.8, 0.35, 1.9), False, tuple(shelf_parts))

    return assets


def build_invalid(valid_text: str) -> dict[str, str]:
    """Mutations of a valid asset text, each breaking one named invariant."""
    out = {}
    out["poisson_out_of_range"] = valid_text.replace(
        "material.poisson_ratio: 0.3\n", "material.poisson_ratio: 0.7\n", 1)
    out["affordance_out_of_range"] = valid_text.replace(
        "affordance: 0.85\n", "affordance: 1.5\n", 1)
    out["negative_scale"] = valid_text.replace(
        "scale_m: 0.6 0.45 1.2", "scale_m: -0.6 0.45 1.2")
    out["limits_reversed"] = valid_text.replace(
        "joint.limit_lower: -1.57\n  joint.limit_upper: 0.0\n",
        "joint.limit_lower: 0.5\n  joint.limit_upper: -0.5\n")
    out["zero_axis"] = valid_text.replace(
        "joint.axis: 0.0 0.0 1.0\n  joint.limit_lower",
        "joint.axis: 0.0 0.0 0.0\n  joint.limit_lower")
    out["self_parent"] = valid_text.replace("parent: 0\n", "parent: 1\n", 1)
    out["cycle_no_root"] = valid_text.replace("parent: none\n", "parent: 1\n", 1)
    out["unknown_parent"] = valid_text.replace("parent: 0\n", "parent: 9\n", 1)
    return out


def cube_obj() -> str:
    verts = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
             (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]
    faces = [(0, 2, 1), (0, 3, 2), (4, 5, 6), (4, 6, 7),
             (0, 1, 5), (0, 5, 4), (2, 3, 7), (2, 7, 6),
             (0, 4, 7), (0, 7, 3), (1, 2, 6), (1, 6, 5)]
    mesh = TriangleMesh(np.asarray(verts, dtype=float),
                        np.asarray(faces, dtype=np.intp))
    return dump_obj(mesh)


def two_part_obj() -> str:
    verts = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
             (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]
    faces = [(0, 2, 1), (0, 3, 2), (4, 5, 6), (4, 6, 7),
             (0, 1, 5), (0, 5, 4), (2, 3, 7), (2, 7, 6),
             (0, 4, 7), (0, 7, 3), (1, 2, 6), (1, 6, 5)]
    base = np.asarray(verts, dtype=float)
    all_verts = np.vstack([base, base + (2.5, 0.0, 0.0)])
    all_faces = np.vstack([np.asarray(faces), np.asarray(faces) + 8])
    labels = np.array([0] * 12 + [1] * 12)
    return dump_obj(TriangleMesh(all_verts, all_faces, labels))


JUDGE_VALUES = {
    "cabinet": (0.82, 78.0, 4, 1.25, 72.0, 68.0, 74.0, 85.0, 78.0, 83.0, 41.0),
    "drawer_unit": (0.79, 74.0, 4, 0.65, 69.0, 66.0, 70.0, 82.0, 74.0, 80.0, 38.0),
    "scissors": (0.71, 66.0, 3, 0.2, 58.0, 54.0, 62.0, 75.0, 66.0, 71.0, 30.0),
    "cart": (0.76, 70.0, 4, 1.0, 64.0, 60.0, 66.0, 79.0, 70.0, 76.0, 34.0),
    "table": (0.84, 80.0, 5, 1.7, 74.0, 70.0, 76.0, 87.0, 80.0, 85.0, 43.0),
    "laptop": (0.8, 76.0, 4, 0.36, 70.0, 67.0, 72.0, 84.0, 76.0, 81.0, 40.0),
    "pillow": (0.74, 68.0, 3, 0.55, 62.0, 58.0, 64.0, 77.0, 68.0, 73.0, 32.0),
    "ball": (0.86, 82.0, 5, 0.25, 76.0, 73.0, 78.0, 89.0, 82.0, 87.0, 45.0),
    "robot_arm": (0.77, 72.0, 4, 0.85, 66.0, 62.0, 68.0, 80.0, 72.0, 78.0, 36.0),
    "bookshelf": (0.81, 77.0, 4, 2.05, 71.0, 67.0, 73.0, 84.0, 77.0, 82.0, 40.0),
}


def judge_response(asset_id: str) -> dict:
    clip, c3d, vq, dim, ff, wd, aff, pp, re_, gc, desc = JUDGE_VALUES[asset_id]
    return response_to_mapping(JudgeResponse(
        asset_id=asset_id, clip=clip, consistency_3d=c3d, visual_quality=vq,
        judged_max_dim_m=dim, freefall=ff, waterdrop=wd, affordance=aff,
        prior_part=pp, revealed_entity=re_, global_coherence=gc,
        description=desc))


METHODS = ("ours", "baseline_a", "baseline_b", "retrieval", "graph_diff")
DIM_BASE = {
    "clip": (0.80, 0.74, 0.66, 0.58, 0.50),
    "consistency_3d": (82.0, 75.0, 66.0, 58.0, 50.0),
    "visual_quality": (90.0, 84.0, 77.0, 69.0, 60.0),
    "scale": (85.0, 78.0, 70.0, 61.0, 52.0),
    "material": (72.0, 66.0, 59.0, 51.0, 42.0),
    "affordance": (76.0, 70.0, 63.0, 55.0, 46.0),
    "kinematics": (88.0, 81.0, 73.0, 64.0, 54.0),
    "description": (64.0, 58.0, 51.0, 43.0, 34.0),
}
# human geometry scores swap ranks (1,2) and (4,5): sum d^2 = 4 -> rho = 0.8
GEOMETRY_HUMAN = {"clip": (0.74, 0.80, 0.66, 0.50, 0.58)}


def score_csv(table: dict[str, tuple]) -> str:
    lines = ["method,dimension,score"]
    for dim, values in table.items():
        for method, value in zip(METHODS, values):
            lines.append(f"{method},{dim},{value}")
    return "\n".join(lines) + "\n"


def main() -> None:
    fixtures = ROOT / "fixtures"
    for sub in ("assets", "invalid", "grids", "codes", "judges", "align",
                "meshes"):
        (fixtures / sub).mkdir(parents=True, exist_ok=True)

    assets = build_assets()
    for name, asset in assets.items():
        (fixtures / "assets" / f"{name}.asset.txt").write_text(
            serialize_asset(asset))
    print(f"wrote {len(assets)} assets")

    cabinet_text = serialize_asset(assets["cabinet"])
    for name, text in build_invalid(cabinet_text).items():
        assert text != cabinet_text, f"mutation {name} did not apply"
        (fixtures / "invalid" / f"{name}.asset.reject").write_text(text)
    print("wrote invalid assets")

    # grids: constant-cross-section prism (stats fixture), blob, centered cube
    prism = cylinder_z(32, 32, 12.0, 0, 64)
    (fixtures / "grids" / "prism64.grid.txt").write_text(
        dump_grid(VoxelGrid(64, prism)))
    rng = np.random.default_rng(2024)
    blob = np.zeros((16, 16, 16), dtype=bool)
    blob[8, 8, 8] = True
    cells = [(8, 8, 8)]
    while len(cells) < 300:
        x, y, z = cells[rng.integers(len(cells))]
        step = ((1, 0, 0), (-1, 0, 0), (0, 1, 0),
                (0, -1, 0), (0, 0, 1), (0, 0, -1))[rng.integers(6)]
        n = (x + step[0], y + step[1], z + step[2])
        if all(0 <= c < 16 for c in n) and not blob[n]:
            blob[n] = True
            cells.append(n)
    (fixtures / "grids" / "blob16.grid.txt").write_text(
        dump_grid(VoxelGrid(16, blob)))
    cube_in_64 = box(24, 40, 24, 40, 24, 40)
    (fixtures / "grids" / "cube16_in_64.grid.txt").write_text(
        dump_grid(VoxelGrid(64, cube_in_64)))

    for name, occ, res in (("prism64", prism, 64), ("blob16", blob, 16),
                           ("cube16_in_64", cube_in_64, 64)):
        text = serialize_part(encode_part(PartGrid(0, VoxelGrid(res, occ))))
        (fixtures / "codes" / f"{name}.code.txt").write_text(text + "\n")
    print("wrote grids and codes")

    for asset_id in assets:
        (fixtures / "judges" / f"{asset_id}.json").write_text(
            json.dumps(judge_response(asset_id), indent=2) + "\n")
    print("wrote judge responses")

    (fixtures / "align" / "bench_scores.csv").write_text(score_csv(DIM_BASE))
    human = dict(DIM_BASE)
    human.update(GEOMETRY_HUMAN)
    (fixtures / "align" / "human_scores.csv").write_text(score_csv(human))
    print("wrote alignment tables")

    (fixtures / "meshes" / "cube.obj").write_text(cube_obj())
    (fixtures / "meshes" / "two_parts.obj").write_text(two_part_obj())
    print("wrote meshes")


if __name__ == "__main__":
    main()
