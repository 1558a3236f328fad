"""Command-line surface for dataset builders and evaluators.

Exit codes: 0 success, 1 validation or data failure, 2 usage error.
Machine output goes to stdout or the requested files; diagnostics to
stderr. The default grid resolution is 64 and can be overridden with the
``SIMREADY_RES`` environment variable or per-command ``--res``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import codec, metrics, objio, report, urdf, voxel
from .asset import asset_to_mapping, parse_asset, serialize_asset
from .errors import SimreadyError

TOKEN_BUDGET = 16384


def _default_resolution() -> int:
    value = os.environ.get("SIMREADY_RES")
    return int(value) if value else voxel.DEFAULT_RESOLUTION


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load_grid_for(path: Path, resolution: int, solid: bool) -> voxel.VoxelGrid:
    if path.suffix.lower() == ".obj":
        grid = voxel.voxelize_surface(objio.load_obj(path), resolution)
    else:
        grid = objio.load_grid(path)
    if solid:
        grid = voxel.fill_solid(grid)
    return grid


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_voxelize(args) -> int:
    grid = _load_grid_for(Path(args.mesh), args.res, args.solid)
    _write_or_print(objio.dump_grid(grid), args.out)
    return 0


def cmd_encode(args) -> int:
    grid = _load_grid_for(Path(args.input), args.res, args.solid)
    code = codec.encode_part(voxel.PartGrid(0, grid))
    _write_or_print(codec.serialize_part(code) + "\n", args.out)
    return 0


def cmd_decode(args) -> int:
    code = codec.parse_part(Path(args.code).read_text().strip())
    part = codec.decode_part(code)
    out = Path(args.out)
    if out.suffix.lower() == ".obj":
        mesh = voxel.extract_boundary_mesh(part)
        out.write_text(objio.dump_obj(mesh))
    else:
        out.write_text(objio.dump_grid(part.grid))
    return 0


def _roundtrip_one(path: Path, resolution: int) -> str | None:
    """None when the file survives its round trip, else the failure reason."""
    text = path.read_text()
    if path.suffix.lower() == ".obj":
        grid = voxel.voxelize_surface(objio.load_obj(path), resolution)
        part = voxel.PartGrid(0, grid)
        back = codec.decode_part(codec.encode_part(part))
        if not np.array_equal(back.grid.occupancy, grid.occupancy):
            return "voxel occupancy changed under encode/decode"
        return None
    if text.startswith("ASSET"):
        if serialize_asset(parse_asset(text)) != text:
            return "asset text is not canonical"
        return None
    if text.lstrip().startswith("P"):
        code = codec.parse_part(text.strip())
        if codec.serialize_part(code) != text.strip():
            return "code text is not canonical"
        codec.decode_part(code)  # must decode cleanly
        return None
    grid = objio.parse_grid(text)
    part = voxel.PartGrid(0, grid)
    code = codec.encode_part(part)
    back = codec.decode_part(codec.parse_part(codec.serialize_part(code)))
    if not np.array_equal(back.grid.occupancy, grid.occupancy):
        return "grid occupancy changed under encode/decode"
    return None


def cmd_roundtrip(args) -> int:
    root = Path(args.path)
    if root.is_dir():
        files = sorted(p for p in root.rglob("*")
                       if p.is_file() and p.suffix.lower() in
                       (".obj", ".txt", ".grid", ".code", ".asset"))
    else:
        files = [root]
    if not files:
        return _fail(f"no round-trippable files under {root}")
    failures = 0
    for path in files:
        try:
            reason = _roundtrip_one(path, args.res)
        except SimreadyError as err:
            reason = str(err)
        if reason is None:
            print(f"OK {path}")
        else:
            failures += 1
            print(f"FAIL {path}: {reason}", file=sys.stderr)
    return 1 if failures else 0


def cmd_tokens(args) -> int:
    for path in args.files:
        count = codec.token_count(Path(path).read_text())
        print(f"{path}={count}" if len(args.files) > 1 else count)
    return 0


def cmd_stats(args) -> int:
    over_budget = False
    all_stats = []
    labels = []
    for code_path in args.codes:
        path = Path(code_path)
        stats = codec.stats_of_text(path.read_text())
        all_stats.append(stats)
        labels.append(path.stem)
        print(f"file={path}")
        sys.stdout.write(codec.stats_report(stats, args.budget))
        if stats.token_count > args.budget:
            over_budget = True
    if args.fig:
        report.render_stats_figure(labels, all_stats, args.fig)
    return 1 if over_budget else 0


def _asset_stem(path: Path) -> str:
    return path.name.removesuffix(".txt").removesuffix(".asset")


def cmd_export_urdf(args) -> int:
    asset = parse_asset(Path(args.asset).read_text())
    bundle = urdf.export_urdf(asset, args.out, name=_asset_stem(Path(args.asset)))
    violations = urdf.validate_urdf(bundle.document, args.out)
    for v in violations:
        print(f"warning: {v}", file=sys.stderr)
    print(bundle.urdf_path)
    return 1 if violations else 0


def cmd_eval_geometry(args) -> int:
    pred = objio.load_obj(Path(args.pred))
    gt = objio.load_obj(Path(args.gt))
    # same seed on both sides: identical meshes score an exact zero
    a = metrics.normalize_unit_cube(
        metrics.sample_points(pred, args.samples, args.seed))
    b = metrics.normalize_unit_cube(
        metrics.sample_points(gt, args.samples, args.seed))
    cd = metrics.chamfer_distance(a, b)
    fs = metrics.fscore(a, b, args.tau)
    result = metrics.MetricResult(cd_times_1e3=cd * 1e3, fscore_times_1e2=fs)
    print(f"samples={args.samples}")
    print(f"seed={args.seed}")
    print(f"tau={args.tau}")
    sys.stdout.write(metrics.metric_report(result))
    return 0


def cmd_eval_physical(args) -> int:
    pred = parse_asset(Path(args.pred).read_text())
    gt = parse_asset(Path(args.gt).read_text())
    result_scale = metrics.scale_mse(pred.scale_m, gt.scale_m)
    print(f"scale_mse={result_scale:.9g}")

    pred_joints = {p.id: p.joint for p in pred.parts if p.parent is not None}
    gt_joints = {p.id: p.joint for p in gt.parts if p.parent is not None}
    shared = sorted(set(pred_joints) & set(gt_joints))
    print(f"joints_compared={len(shared)}")
    composites = []
    for pid in shared:
        err = metrics.kinematic_error(pred_joints[pid], gt_joints[pid])
        composites.append(err.composite)
        print(f"joint_{pid}_position_mse={err.position_mse:.9g}")
        print(f"joint_{pid}_direction_err={err.direction_err:.9g}")
        print(f"joint_{pid}_type_err={err.type_err:.0f}")
        print(f"joint_{pid}_limit_mse={err.limit_mse:.9g}")
        print(f"joint_{pid}_composite={err.composite:.9g}")
    if composites:
        print(f"kinematic_composite_mean="
              f"{sum(composites) / len(composites):.9g}")
    return 0


def _parse_weights(text: str) -> tuple[float, float, float]:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise ValueError("expected three comma-separated weights")
    return tuple(parts)


def cmd_bench_aggregate(args) -> int:
    responses = []
    for path in sorted(Path(args.responses).glob("*.json")):
        responses.extend(bench_mod.load_judge_responses(path))
    assets = {}
    for path in sorted(Path(args.assets).glob("*.asset.txt")):
        assets[_asset_stem(path)] = parse_asset(path.read_text())
    weights = _parse_weights(args.kin_weights)
    bench_report = bench_mod.aggregate_report(responses, assets, weights)

    sys.stdout.write(bench_mod.report_text(bench_report))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(bench_mod.report_csv(bench_report))
        (out / "report.txt").write_text(bench_mod.report_text(bench_report))
        (out / "summary.csv").write_text(
            bench_mod.method_summary_csv(bench_report, args.method))
        report.render_bench_figure(bench_report, out / "report.png")
    return 0


def cmd_bench_align(args) -> int:
    bench_table = bench_mod.parse_score_csv(Path(args.report).read_text())
    human_table = bench_mod.parse_score_csv(Path(args.human).read_text())
    stats = bench_mod.alignment_from_tables(bench_table, human_table)
    if not stats:
        return _fail("no dimension has two methods scored in both tables")
    lines = []
    for dim, (rho, r) in stats.items():
        print(f"{dim}_spearman_rho={rho:.6f}")
        print(f"{dim}_pearson_r={r:.6f}")
        lines.append(f"{dim},{rho:.6f},{r:.6f}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "alignment.csv").write_text(
            "dimension,spearman_rho,pearson_r\n" + "\n".join(lines) + "\n")
        pairs = {}
        for dim in stats:
            methods = sorted(set(bench_table[dim]) & set(human_table[dim]))
            pairs[dim] = ([bench_table[dim][m] for m in methods],
                          [human_table[dim][m] for m in methods])
        report.render_alignment_figure(pairs, stats, out / "alignment.png")
    return 0


def cmd_asset_json(args) -> int:
    asset = parse_asset(Path(args.asset).read_text())
    print(json.dumps(asset_to_mapping(asset), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simready",
        description="Simulation-ready asset toolkit: voxel codec, URDF "
                    "export, evaluation metrics and benchmark scoring.")
    sub = parser.add_subparsers(dest="command", required=True)
    res_kw = dict(type=int, default=_default_resolution(),
                  help="grid resolution per axis (default %(default)s)")

    p = sub.add_parser("voxelize", help="voxelize an OBJ mesh to a grid dump")
    p.add_argument("mesh")
    p.add_argument("--res", **res_kw)
    p.add_argument("--solid", action="store_true",
                   help="flood-fill enclosed space after voxelization")
    p.add_argument("-o", "--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_voxelize)

    p = sub.add_parser("encode", help="encode a grid dump or OBJ to a code")
    p.add_argument("input")
    p.add_argument("--res", **res_kw)
    p.add_argument("--solid", action="store_true")
    p.add_argument("-o", "--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a code to a grid dump or OBJ")
    p.add_argument("code")
    p.add_argument("-o", "--out", required=True,
                   help=".obj for a boundary mesh, anything else for a dump")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("roundtrip",
                       help="verify encode/decode round trips; nonzero exit "
                            "on any mismatch")
    p.add_argument("path", help="file or directory of fixtures")
    p.add_argument("--res", **res_kw)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("tokens",
                       help="proxy token count of text files (whitespace "
                            "and | separate tokens)")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_tokens)

    p = sub.add_parser("stats", help="token accounting for code files")
    p.add_argument("codes", nargs="+")
    p.add_argument("--budget", type=int, default=TOKEN_BUDGET,
                   help="token budget to check against (default %(default)s)")
    p.add_argument("--fig", help="write a token-count comparison figure")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export-urdf", help="export an asset to URDF + meshes")
    p.add_argument("asset")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.set_defaults(func=cmd_export_urdf)

    p = sub.add_parser("eval-geometry",
                       help="Chamfer distance and F-score between two OBJs")
    p.add_argument("pred")
    p.add_argument("gt")
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=float, default=metrics.DEFAULT_FSCORE_TAU)
    p.set_defaults(func=cmd_eval_geometry)

    p = sub.add_parser("eval-physical",
                       help="scale and kinematic errors between two assets")
    p.add_argument("pred")
    p.add_argument("gt")
    p.set_defaults(func=cmd_eval_physical)

    p = sub.add_parser("bench-aggregate",
                       help="aggregate judge responses into a bench report")
    p.add_argument("responses", help="directory of judge response JSON files")
    p.add_argument("assets", help="directory of *.asset.txt files")
    p.add_argument("--kin-weights", default="0.4,0.2,0.4",
                   help="kinematics component weights (default %(default)s)")
    p.add_argument("--method", default="method",
                   help="method name recorded in summary.csv")
    p.add_argument("-o", "--out",
                   help="directory for report.csv/report.txt/report.png")
    p.set_defaults(func=cmd_bench_aggregate)

    p = sub.add_parser("bench-align",
                       help="correlate a benchmark score table with human "
                            "scores")
    p.add_argument("report", help="CSV of method,dimension,score")
    p.add_argument("human", help="CSV of method,dimension,score")
    p.add_argument("-o", "--out",
                   help="directory for alignment.csv/alignment.png")
    p.set_defaults(func=cmd_bench_align)

    p = sub.add_parser("asset-json",
                       help="print a parsed asset as a JSON mapping")
    p.add_argument("asset")
    p.set_defaults(func=cmd_asset_json)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SimreadyError as err:
        # the [Category] tag lets wrappers rebuild typed errors
        print(f"error[{type(err).__name__}]: {err}", file=sys.stderr)
        return 1
    except FileNotFoundError as err:
        return _fail(f"{err.filename}: file not found")
    except ValueError as err:
        return _fail(str(err))


if __name__ == "__main__":
    sys.exit(main())
