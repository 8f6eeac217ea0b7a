import json

import pytest

from bm_distance import equidistant
from bm_distance.certify import EXTREMAL_3D_MATRIX
from bm_distance.codec import encode_matrix
from bm_distance.errors import Degenerate
from bm_distance.exact import QMatrix
from main import dispatch


def _run(capsys, *argv):
    code = dispatch([*argv, "--no-manifest"])
    out, err = capsys.readouterr()
    return code, out, err


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


# ── certify ───────────────────────────────────────────────────────────────────

def test_certify_exit_codes(capsys, nice_json):
    code, out, _ = _run(capsys, "certify", "--matrix", str(nice_json), "--r", "5/9")
    assert code == 0
    assert json.loads(out)["ratio"] == "9/5"

    code, out, _ = _run(capsys, "certify", "--matrix", str(nice_json), "--r", "3/5")
    assert code == 1
    payload = json.loads(out)
    assert payload["error"] == "CertificationFailure"
    assert payload["witness"]["inclusion"] == "inner"

    code, out, err = _run(capsys, "certify", "--matrix", str(nice_json), "--r", "0/1")
    assert code == 2
    assert out == "" and "positive" in err


def test_usage_errors_exit_two(capsys, nice_json, tmp_path):
    assert _run(capsys, "certify", "--matrix", str(nice_json), "--r", "0.5")[0] == 2
    assert _run(capsys, "no-such-command")[0] == 2
    assert _run(capsys, "certify", "--matrix", str(tmp_path / "missing.json"), "--r", "1/2")[0] == 2
    singular = _write(tmp_path, "singular.json", [[1, 2], [2, 4]])
    code, _, err = _run(capsys, "certify", "--matrix", str(singular), "--r", "1/2")
    assert code == 2 and "SingularMatrix" in err


# ── manifests ─────────────────────────────────────────────────────────────────

def test_manifest_is_written(capsys, nice_json, tmp_path):
    mdir = tmp_path / "manifests"
    code = dispatch(["certify", "--matrix", str(nice_json), "--r", "5/9", "--manifest-dir", str(mdir)])
    capsys.readouterr()
    assert code == 0
    (path,) = list(mdir.glob("certify_*.json"))
    manifest = json.loads(path.read_text())
    assert manifest["exit_code"] == 0
    assert manifest["arguments"]["r"] == "5/9"
    assert manifest["outcome"] == {"ratio": "9/5"}
    assert str(nice_json) in manifest["input_hashes"]
    assert len(manifest["output_hash"]) == 64


def test_randomised_commands_record_their_seed(capsys, tmp_path):
    mdir = tmp_path / "m"
    dispatch(["lemma2d", "--trials", "3", "--manifest-dir", str(mdir)])
    capsys.readouterr()
    (path,) = list(mdir.glob("lemma2d_*.json"))
    assert json.loads(path.read_text())["seeds"] == [0]


# ── the remaining subcommands ─────────────────────────────────────────────────

def test_enum_nice(capsys, tmp_path):
    out_dir = tmp_path / "nice"
    code, out, _ = _run(capsys, "enum-nice", "--out", str(out_dir))
    assert code == 0
    assert json.loads(out) == {"count": 192, "all_certified": True, "out": str(out_dir)}
    index = json.loads((out_dir / "manifest.json").read_text())
    assert index["count"] == 192 and len(list(out_dir.glob("nice_*.json"))) == 192
    first = json.loads((out_dir / "nice_000.json").read_text())
    assert first["ratio"] == "9/5" and first["claim3d"]["occupied_cubes"] == 6


def test_asym(capsys, tmp_path):
    tri = _write(tmp_path, "tri.json", {"vertices": [[0, 2], [-3, -1], [3, -1]]})
    code, out, _ = _run(capsys, "asym", "--polygon", str(tri))
    assert code == 0
    payload = json.loads(out)
    assert payload["as"] == "2/1" and payload["center"] == ["0/1", "0/1"] and payload["contacts"] == 3

    # the emitted body carries both representations and reads back in
    body = _write(tmp_path, "body.json", payload["body"])
    assert len(payload["body"]["halfspaces"]) == 3
    code, out, _ = _run(capsys, "asym", "--polygon", str(body))
    assert code == 0 and json.loads(out)["as"] == "2/1"


def test_asym_with_both_representations(capsys, tmp_path):
    octa = _write(tmp_path, "octa.json", {
        "n": 3,
        "vertices": [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
        "halfspaces": [{"normal": [a, b, c], "offset": "1/1"} for a in (1, -1) for b in (1, -1) for c in (1, -1)],
    })
    code, out, _ = _run(capsys, "asym", "--polygon", str(octa))
    assert code == 0
    assert json.loads(out)["as"] == "1/1"


def test_pentagon(capsys):
    code, out, _ = _run(capsys, "pentagon", "--r", "9/5", "--k", "1/3")
    assert code == 0
    assert out.splitlines()[0] == "0/1 2/1"
    assert len(out.splitlines()) == 5
    code, out, _ = _run(capsys, "pentagon", "--r", "9/5", "--k", "1/3", "--json")
    assert json.loads(out)["conditions"]["all_hold"] is True
    assert _run(capsys, "pentagon", "--r", "3/2", "--k", "1/3")[0] == 2


def test_equidist(capsys, tmp_path):
    code, out, _ = _run(capsys, "equidist", "--r", "9/5", "--k", "1/3", "--standard", "square")
    assert code == 0
    assert json.loads(out)["inclusions"] == {"K in L0": True, "L0 in K'": True}
    hexa = _write(tmp_path, "hex.json", {"vertices": [[1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1]]})
    assert _run(capsys, "equidist", "--r", "9/5", "--k", "1/3", "--body", str(hexa))[0] == 0
    tri = _write(tmp_path, "tri.json", {"vertices": [[0, 2], [-3, -1], [3, -1]]})
    assert _run(capsys, "equidist", "--r", "9/5", "--k", "1/3", "--body", str(tri))[0] == 2


def test_equidist_sweep(capsys, tmp_path):
    grid = tmp_path / "grid.toml"
    grid.write_text('r = ["9/5", "15/8"]\nk_per_r = 2\nbodies = ["square", "hexagon"]\nrandom_bodies = 1\nseed = 3\n')
    out_csv = tmp_path / "sweep.csv"
    code, out, _ = _run(capsys, "equidist-sweep", "--grid", str(grid), "--out", str(out_csv))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "r,k,body,verdict,as,detail"
    assert len(lines) == 1 + 2 * 2 * 3
    assert all(",certified," in line for line in lines[1:])
    assert out_csv.read_text() == out.rstrip("\n") + "\n"


def test_sweep_grid_rejects_floats(capsys, tmp_path):
    grid = tmp_path / "grid.toml"
    grid.write_text("r = [1.8]\n")
    assert _run(capsys, "equidist-sweep", "--grid", str(grid))[0] == 2


def test_sweep_rows_that_raise_fail_the_run(capsys, tmp_path, monkeypatch):
    def collinear(params, body):
        raise Degenerate("all vertices are collinear")

    monkeypatch.setattr(equidistant, "certify_equidistance", collinear)
    grid = tmp_path / "grid.toml"
    grid.write_text('r = ["9/5"]\nk = ["1/3"]\nbodies = ["square", "hexagon"]\n')
    mdir = tmp_path / "m"
    code = dispatch(["equidist-sweep", "--grid", str(grid), "--jobs", "1", "--manifest-dir", str(mdir)])
    out, _ = capsys.readouterr()
    assert code == 1
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 2 and all(",error,,Degenerate: " in r for r in rows)
    (path,) = list(mdir.glob("equidist-sweep_*.json"))
    assert json.loads(path.read_text())["outcome"] == {"rows": 2, "failed": 0, "errors": 2}


def test_lemma2d(capsys):
    code, out, _ = _run(capsys, "lemma2d", "--trials", "4", "--seed", "1")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0].startswith("seed,verdict,p,q,")
    assert len(rows) == 5 and all(",one-per-corner," in r for r in rows[1:])

    code, out, _ = _run(capsys, "lemma2d", "--r", "1/2", "--find-counterexample", "--attempts", "2000")
    assert code == 0
    assert json.loads(out)["found"] is True


def test_claim3d(capsys, tmp_path, nice_json):
    code, out, _ = _run(capsys, "claim3d", "--matrix", str(nice_json))
    assert code == 0 and json.loads(out)["occupied_cubes"] == 6
    ident = _write(tmp_path, "id.json", encode_matrix(QMatrix.identity(3)))
    code, out, _ = _run(capsys, "claim3d", "--matrix", str(ident))
    assert code == 1 and json.loads(out)["error"] == "PreconditionViolated"


def test_search_and_report(capsys, tmp_path):
    cfg = tmp_path / "search.toml"
    cfg.write_text("n = 2\nrestarts = 4\nmax_iters = 500\nseed = 5\n")
    code, out, err = _run(capsys, "search", "--config", str(cfg))
    assert code == 0
    report = json.loads(out)
    assert report["n"] == 2 and report["seed"] == 5
    assert "exact ratio" in err

    code, out, _ = _run(capsys, "report", "--dims", "2", "--restarts", "4", "--max-iters", "500")
    assert code == 0
    assert out.splitlines()[0].startswith("| n | best exact ratio |")
    assert out.splitlines()[2].startswith("| 2 |")
