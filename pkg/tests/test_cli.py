import json
from pathlib import Path

import numpy as np
import pytest

from simready.cli import main
from simready.objio import load_grid, load_obj

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRoundtrip:
    def test_fixture_corpus_exits_zero(self, capsys):
        code, out, err = run(capsys, "roundtrip", FIXTURES)
        assert code == 0, err
        assert "FAIL" not in err
        assert out.count("OK ") >= 15

    def test_mismatch_detected(self, capsys, tmp_path):
        bad = tmp_path / "bad.code.txt"
        bad.write_text("P4|E|E|E")  # depth 3 != 4: cannot decode
        code, out, err = run(capsys, "roundtrip", bad)
        assert code == 1
        assert "FAIL" in err


class TestTokens:
    def test_single_file_prints_bare_count(self, capsys, tmp_path):
        f = tmp_path / "code.txt"
        f.write_text("P4|E|E")
        code, out, _ = run(capsys, "tokens", f)
        assert code == 0
        assert out.strip() == "3"

    def test_multiple_files_keyed(self, capsys, tmp_path):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        a.write_text("P4|E|E")
        b.write_text("P4|T 0 4 12|D0 16")
        code, out, _ = run(capsys, "tokens", a, b)
        assert code == 0
        assert f"{a}=3" in out and f"{b}=7" in out


class TestStats:
    def test_prism_layer_mix(self, capsys):
        code, out, _ = run(capsys, "stats",
                           FIXTURES / "codes" / "prism64.code.txt")
        assert code == 0
        assert "template_count=1" in out
        assert "delta_count=63" in out
        assert "within_budget=true" in out

    def test_budget_exceeded_exit(self, capsys):
        code, out, _ = run(capsys, "stats", "--budget", "10",
                           FIXTURES / "codes" / "prism64.code.txt")
        assert code == 1
        assert "within_budget=false" in out

    def test_figure_written(self, capsys, tmp_path):
        fig = tmp_path / "tokens.png"
        code, _, _ = run(capsys, "stats", "--fig", fig,
                         FIXTURES / "codes" / "prism64.code.txt",
                         FIXTURES / "codes" / "blob16.code.txt")
        assert code == 0
        assert fig.exists() and fig.stat().st_size > 0


class TestCodecCommands:
    def test_encode_decode_grid(self, capsys, tmp_path):
        code_file = tmp_path / "out.code.txt"
        grid_file = tmp_path / "back.grid.txt"
        src = FIXTURES / "grids" / "blob16.grid.txt"
        assert run(capsys, "encode", src, "-o", code_file)[0] == 0
        assert run(capsys, "decode", code_file, "-o", grid_file)[0] == 0
        assert np.array_equal(load_grid(src).occupancy,
                              load_grid(grid_file).occupancy)

    def test_encode_obj(self, capsys, tmp_path):
        out = tmp_path / "cube.code.txt"
        code, _, _ = run(capsys, "encode", FIXTURES / "meshes" / "cube.obj",
                         "--res", "16", "--solid", "-o", out)
        assert code == 0
        assert out.read_text().startswith("P16|")

    def test_decode_to_obj(self, capsys, tmp_path):
        mesh_file = tmp_path / "decoded.obj"
        code, _, _ = run(capsys, "decode",
                         FIXTURES / "codes" / "blob16.code.txt",
                         "-o", mesh_file)
        assert code == 0
        mesh = load_obj(mesh_file)
        assert mesh.faces.shape[0] > 0

    def test_voxelize_stdout(self, capsys):
        code, out, _ = run(capsys, "voxelize", FIXTURES / "meshes" / "cube.obj",
                           "--res", "8")
        assert code == 0
        lines = [l for l in out.splitlines() if l.strip()]
        assert len(lines) == 8
        assert set("".join(lines)) <= {"0", "1"}

    def test_res_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("SIMREADY_RES", "8")
        code, out, _ = run(capsys, "voxelize", FIXTURES / "meshes" / "cube.obj")
        assert code == 0
        assert len([l for l in out.splitlines() if l.strip()]) == 8


class TestEval:
    def test_geometry_self_comparison(self, capsys):
        cube = FIXTURES / "meshes" / "cube.obj"
        code, out, _ = run(capsys, "eval-geometry", cube, cube,
                           "--samples", "512", "--seed", "7")
        assert code == 0
        assert "cd_x1e3=0.000000" in out
        assert "fscore=100.0000" in out

    def test_geometry_deterministic(self, capsys):
        cube = FIXTURES / "meshes" / "cube.obj"
        _, out1, _ = run(capsys, "eval-geometry", cube, cube, "--samples", "256")
        _, out2, _ = run(capsys, "eval-geometry", cube, cube, "--samples", "256")
        assert out1 == out2

    def test_physical(self, capsys):
        pred = FIXTURES / "assets" / "cabinet.asset.txt"
        code, out, _ = run(capsys, "eval-physical", pred, pred)
        assert code == 0
        assert "scale_mse=0" in out
        assert "joint_1_composite=0" in out


class TestUrdfCommand:
    def test_export_fixture(self, capsys, tmp_path):
        code, out, err = run(capsys, "export-urdf",
                             FIXTURES / "assets" / "cabinet.asset.txt",
                             "-o", tmp_path)
        assert code == 0, err
        assert (tmp_path / "cabinet.urdf").exists()
        assert (tmp_path / "physics.json").exists()
        assert (tmp_path / "part_0.obj").exists()


class TestBenchCommands:
    def test_aggregate_writes_report_and_figure(self, capsys, tmp_path):
        code, out, err = run(capsys, "bench-aggregate",
                             FIXTURES / "judges", FIXTURES / "assets",
                             "--method", "ours", "-o", tmp_path)
        assert code == 0, err
        assert "kinematics weights" in out
        for name in ("report.csv", "report.txt", "report.png", "summary.csv"):
            assert (tmp_path / name).exists()
        csv_text = (tmp_path / "report.csv").read_text()
        assert csv_text.splitlines()[0].startswith("asset_id,clip")
        assert "mean," in csv_text

    def test_aggregate_custom_weights(self, capsys):
        code, out, _ = run(capsys, "bench-aggregate",
                           FIXTURES / "judges", FIXTURES / "assets",
                           "--kin-weights", "1,0,0")
        assert code == 0
        assert "prior_part=1" in out

    def test_align(self, capsys, tmp_path):
        code, out, err = run(capsys, "bench-align",
                             FIXTURES / "align" / "bench_scores.csv",
                             FIXTURES / "align" / "human_scores.csv",
                             "-o", tmp_path)
        assert code == 0, err
        assert "clip_spearman_rho=0.800000" in out
        assert "material_spearman_rho=1.000000" in out
        assert (tmp_path / "alignment.csv").exists()
        assert (tmp_path / "alignment.png").exists()


class TestAssetJson:
    def test_mapping_output(self, capsys):
        code, out, _ = run(capsys, "asset-json",
                           FIXTURES / "assets" / "laptop.asset.txt")
        assert code == 0
        data = json.loads(out)
        assert data["category"] == "laptop"
        assert data["parts"][1]["joint"]["kind"] == "REVOLUTE"


class TestErrors:
    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "stats", "no_such_file.code.txt")
        assert code == 1
        assert "error" in err

    def test_usage_error_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["stats"])  # missing required argument
        assert exc.value.code == 2

    def test_invalid_asset_rejected(self, capsys):
        code, _, err = run(
            capsys, "export-urdf",
            FIXTURES / "invalid" / "poisson_out_of_range.asset.reject",
            "-o", "/tmp/should_not_matter")
        assert code == 1
        assert "poisson" in err
