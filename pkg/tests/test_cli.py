"""Command line behaviour: exit codes, output files, probe CSV contract.

Everything goes through ``udfmesh.cli.main`` in-process so the tests stay
fast; subprocess behaviour is identical because the entry point only wraps
``main`` in ``sys.exit``.
"""

from __future__ import annotations

import json

import numpy as np
import pytest

from udfmesh.cli import main
from udfmesh.meshio import load_mesh, save_mesh
from udfmesh.primitives import make_sphere_mesh


def run(*argv):
    return main(list(argv))


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run("--version")
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("udfmesh ")


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run()
    assert exc.value.code == 2


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run("extract", "--field", "analytic:sphere:0.5", "--out", "x.obj",
            "--bogus-flag")
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# probe
# ---------------------------------------------------------------------------


def test_probe_prints_csv_rows(capsys):
    assert run("probe", "--field", "analytic:sphere:0.5", "1,0,0", "0,0,0") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "1,0,0,0.5,1,0,0"
    # the sphere centre is the degenerate point: distance = radius, zero grad
    assert lines[1] == "0,0,0,0.5,0,0,0"


def test_probe_reads_points_file(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    pts.write_text("0.25,0,0\n0,0.75,0\n")
    assert run("probe", "--field", "analytic:sphere:0.5", "--file", str(pts)) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    assert lines[0].split(",")[3] == "0.25"
    assert lines[1].split(",")[3] == "0.25"


def test_probe_without_points_fails(capsys):
    assert run("probe", "--field", "analytic:sphere:0.5") == 1
    assert "no probe points" in capsys.readouterr().err


def test_probe_malformed_point_fails(capsys):
    assert run("probe", "--field", "analytic:sphere:0.5", "1,2") == 1
    assert "not of the form x,y,z" in capsys.readouterr().err


def test_probe_bad_field_spec_fails(capsys):
    assert run("probe", "--field", "bogus:thing", "0,0,0") == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "bogus" in err


# ---------------------------------------------------------------------------
# extract
# ---------------------------------------------------------------------------


def test_extract_writes_mesh_report_and_cells(tmp_path, capsys):
    out = tmp_path / "sphere.obj"
    report = tmp_path / "report.json"
    cells = tmp_path / "cells.jsonl"
    code = run("extract", "--field", "analytic:sphere:0.5", "--out", str(out),
               "--max-depth", "5", "--seed", "3",
               "--report", str(report), "--cells", str(cells), "--quiet")
    assert code == 0
    verts, tris = load_mesh(str(out))
    assert len(verts) > 0 and len(tris) > 0
    assert np.max(np.abs(np.linalg.norm(verts, axis=1) - 0.5)) < 2.0 / 2**5

    data = json.loads(report.read_text())
    assert data["schema_version"] == 1
    assert data["seed"] == 3
    assert data["config"]["max_depth"] == 5
    assert data["mesh"]["boundary_edges"] == 0
    assert data["octree"]["leaves"] == len(cells.read_text().splitlines())


def test_extract_ply_output(tmp_path):
    out = tmp_path / "sphere.ply"
    assert run("extract", "--field", "analytic:sphere:0.5", "--out", str(out),
               "--max-depth", "4", "--quiet") == 0
    assert out.read_bytes().startswith(b"ply\n")
    verts, _ = load_mesh(str(out))
    assert len(verts) > 0


def test_extract_is_deterministic(tmp_path):
    args = ("extract", "--field", "analytic:box:0.4:0.3:0.2", "--max-depth", "5",
            "--quiet")
    a, b = tmp_path / "a.obj", tmp_path / "b.obj"
    ra, rb = tmp_path / "a.json", tmp_path / "b.json"
    assert run(*args, "--out", str(a), "--report", str(ra)) == 0
    assert run(*args, "--out", str(b), "--report", str(rb)) == 0
    assert a.read_bytes() == b.read_bytes()
    assert ra.read_bytes() == rb.read_bytes()


def test_extract_empty_result_warns_but_succeeds(tmp_path, capsys):
    # plane z = 5 lies outside the [-1, 1]^3 domain: nothing to extract
    out = tmp_path / "empty.obj"
    assert run("extract", "--field", "analytic:plane:5", "--out", str(out),
               "--quiet") == 0
    assert "empty mesh" in capsys.readouterr().err
    # the file is written (so downstream tooling sees a result), just empty
    assert "v " not in out.read_text()


def test_extract_bad_field_spec_fails(tmp_path, capsys):
    assert run("extract", "--field", "analytic:sphere:-1", "--out",
               str(tmp_path / "x.obj")) == 1
    assert capsys.readouterr().err.startswith("error:")
    assert not (tmp_path / "x.obj").exists()


def test_extract_missing_weights_file_fails(tmp_path, capsys):
    missing = tmp_path / "nope.udfw"
    assert run("extract", "--field", f"mlp:{missing}", "--out",
               str(tmp_path / "x.obj")) == 1
    assert str(missing) in capsys.readouterr().err


def test_extract_unwritable_output_fails_without_partial_file(tmp_path, capsys):
    out = tmp_path / "no_such_dir" / "x.obj"
    assert run("extract", "--field", "analytic:sphere:0.5", "--out", str(out),
               "--max-depth", "4", "--quiet") == 1
    assert capsys.readouterr().err.startswith("error:")
    assert list(tmp_path.iterdir()) == []


def test_extract_rejects_bad_config_values(tmp_path, capsys):
    assert run("extract", "--field", "analytic:sphere:0.5", "--out",
               str(tmp_path / "x.obj"), "--max-depth", "99") == 1
    assert "max_depth" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def test_eval_identity(tmp_path, capsys):
    verts, faces = make_sphere_mesh(radius=0.5, n_lat=12, n_lon=24)
    path = tmp_path / "m.obj"
    save_mesh(str(path), verts, faces)
    json_out = tmp_path / "metrics.json"
    assert run("eval", str(path), str(path), "--samples", "2000",
               "--json", str(json_out)) == 0
    out = capsys.readouterr().out
    assert "f_score       100.000000 %" in out
    data = json.loads(json_out.read_text())
    assert data["chamfer"] < 1e-30
    assert data["sample_count"] == 2000


def test_eval_missing_file_fails(tmp_path, capsys):
    verts, faces = make_sphere_mesh(radius=0.5, n_lat=8, n_lon=16)
    path = tmp_path / "m.obj"
    save_mesh(str(path), verts, faces)
    missing = tmp_path / "absent.obj"
    assert run("eval", str(missing), str(path)) == 1
    assert str(missing) in capsys.readouterr().err
