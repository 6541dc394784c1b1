import json

import numpy as np
import pytest

from isqfn.cli import main
from isqfn.grid import ScalarField, VectorField, make_grid, read_fields, read_scalar, write_fields
from isqfn.harness import gaussian_input
from isqfn.testbank import read_bank


def _json_tail(out):
    return json.loads(out[out.index("{"):])


@pytest.fixture
def files(tmp_path):
    g = make_grid(1, 4.0, 128)
    write_fields(tmp_path / "F.bin", gaussian_input(g, 2, 0))
    write_fields(tmp_path / "b.bin", ScalarField(g, np.log(g.radius())))
    write_fields(tmp_path / "w.bin", ScalarField(g, g.radius() ** -0.5))
    return tmp_path


def test_bank_build(files, capsys):
    out = files / "bank.bin"
    assert main(["bank", "build", "--gamma", "0.5", "--size", "4", "--out", str(out)]) == 0
    assert len(read_bank(out)) == 4
    assert _json_tail(capsys.readouterr().out)["size"] == 4


def test_sqfn_and_commutator(files):
    bank = files / "bank.bin"
    main(["bank", "build", "--gamma", "0.5", "--size", "3", "--out", str(bank)])
    assert main(["sqfn", "--input", str(files / "F.bin"), "--bank", str(bank), "--scales", "6", "--out", str(files / "S.bin")]) == 0
    S = read_scalar(files / "S.bin")
    assert S.grid == make_grid(1, 4.0, 128) and S.values.max() > 0
    args = ["sqfn", "commutator", "--input", str(files / "F.bin"), "--b", str(files / "b.bin"), "--scales", "6", "--size", "3", "--out", str(files / "T.bin")]
    assert main(args) == 0
    assert read_fields(files / "T.bin").J == 1


def test_norm_kinds(files, capsys):
    for kind in ("lp", "weak", "luxemburg", "amalgam", "amalgam-weak", "amalgam-llogl"):
        args = ["norm", "--kind", kind, "--p", "1", "--alpha", "1", "--q", "4", "--w", str(files / "w.bin"), "--mu", "1", "--input", str(files / "F.bin")]
        assert main(args) == 0
        out = capsys.readouterr().out
        value = float(out.splitlines()[0])
        assert value > 0 and _json_tail(out)["value"] == value
    main(["norm", "--kind", "amalgam", "--p", "2", "--alpha", "2", "--input", str(files / "F.bin")])
    assert "curve" in _json_tail(capsys.readouterr().out)


def test_csv_input(tmp_path, capsys):
    p = tmp_path / "f.csv"
    np.savetxt(p, np.ones(64))
    assert main(["norm", "--kind", "lp", "--p", "1", "--input", str(p), "--extent", "2"]) == 0
    assert float(capsys.readouterr().out.splitlines()[0]) == pytest.approx(4.0)


def test_weights_and_bmo(files, capsys):
    assert main(["weights", "ap", "--p", "1", "--weight", str(files / "w.bin"), "--family", "centers:8,radii:4"]) == 0
    assert float(capsys.readouterr().out.splitlines()[0]) > 1
    assert main(["bmo", "seminorm", "--b", str(files / "b.bin")]) == 0
    assert _json_tail(capsys.readouterr().out)["seminorm"] > 0
    assert main(["bmo", "growth", "--b", str(files / "b.bin"), "--radius", "0.1", "--levels", "3"]) == 0
    assert len(_json_tail(capsys.readouterr().out)["values"]) == 3
    assert main(["bmo", "expnorm", "--b", str(files / "b.bin"), "--radius", "0.5"]) == 0
    assert _json_tail(capsys.readouterr().out)["expnorm"] > 0


def test_czd(files, capsys):
    g = make_grid(1, 4.0, 128)
    rng = np.random.default_rng(0)
    F = VectorField(g, rng.standard_cauchy((3, 128)) * (rng.random((3, 128)) < 0.1))
    write_fields(files / "V.bin", F)
    sigma = 2 * F.l2().values.mean()
    assert main(["czd", "--input", str(files / "V.bin"), "--sigma", str(sigma), "--verify"]) == 0
    out = _json_tail(capsys.readouterr().out)
    assert out["report"]["passed"] and len(out["lines"]) == len(out["cubes"])
    assert main(["czd", "--input", str(files / "V.bin"), "--sigma", str(sigma / 100)]) == 2


def test_verify_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    body = "theorem = strong\np = 2\nalpha = 2\nq = 4\nN = 128\nbank.size = 3\ncone.scales = 6\nseeds = 0:2\n"
    cfg.write_text(body + "ceiling = 100\n")
    assert main(["verify", "--scenario", str(cfg), "--out", str(tmp_path / "rep")]) == 0
    assert (tmp_path / "rep" / "s.json").exists() and (tmp_path / "rep" / "s.csv").exists()
    assert "PASS ceiling" in capsys.readouterr().out
    cfg.write_text(body + "ceiling = 1e-9\n")
    assert main(["verify", "--scenario", str(cfg), "--out", str(tmp_path / "rep")]) == 1
