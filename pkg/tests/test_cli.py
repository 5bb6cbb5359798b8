import json

import pytest

from grunsky_bounds.cli import main


def run(capsys, *argv):
    with pytest.raises(SystemExit) as e:
        main(list(argv))
    out = capsys.readouterr()
    return e.value.code, out.out, out.err


def test_verify_f3(capsys):
    code, out, _ = run(capsys, "verify", "f3", "--tol", "1e-10")
    assert code == 0
    line = next(l for l in out.splitlines() if l.startswith("max_hi:"))
    assert line.split()[1].startswith("1.674896577")


def test_verify_unknown(capsys):
    code, _, err = run(capsys, "verify", "nosuch")
    assert code == 64
    assert "unknown bound id" in err


def test_verify_budget(capsys):
    code, out, _ = run(capsys, "verify", "f6", "--max-boxes", "10")
    assert code == 2
    assert "status: budget_exhausted" in out


def test_verify_json_and_out(tmp_path, capsys):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "a5_a2zero", "--json", "--out", str(dest))
    assert code == 0 and out == ""
    d = json.loads(dest.read_text())
    assert d["passed"] is True
    assert d["enclosure"]["max_lo"] <= d["closed_form"] <= d["enclosure"]["max_hi"] + 1e-12
    assert "wall_time" not in d


def test_verify_timing(capsys):
    code, out, _ = run(capsys, "verify", "f1", "--timing")
    assert code == 0 and "wall_time:" in out


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify-all")
    assert code == 0
    rows = [l for l in out.splitlines() if l.endswith(("PASS", "FAIL")) and not l.startswith(("check", "result"))]
    assert len(rows) == 11
    assert all(r.endswith("PASS") for r in rows)
    assert out.rstrip().endswith("result: PASS")


def test_sample_odd(capsys):
    argv = ("sample", "--scenario", "odd_a5a3", "--n", "100000", "--seed", "42")
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert "violations: 0" in out
    line = next(l for l in out.splitlines() if l.startswith("objective a5_minus_a3"))
    observed = float(line.split("observed_max=")[1].split()[0])
    assert observed <= 0.7559289460184545
    code2, out2, _ = run(capsys, *argv)
    assert (code2, out2) == (code, out)


def test_sample_bogus(capsys):
    code, _, _ = run(capsys, "sample", "--scenario", "bogus")
    assert code == 64


def test_sample_missing_scenario(capsys):
    code, _, _ = run(capsys, "sample")
    assert code == 64


def test_identities_small_n(capsys):
    code, out, _ = run(capsys, "identities", "--n", "1")
    rows = {l.split()[0]: l for l in out.splitlines() if "max_residual=" in l}
    assert len(rows) == 16
    assert "a = (2, 3, 4, 5)" in rows["koebe_coefficients"]
    assert rows["f6_stationary_residual"].split()[3] == "PASS"
    # the -w15^2 reduction of H3(1) is checked honestly against the general route
    # and disagrees; every other identity holds
    failing = [k for k, l in rows.items() if " FAIL " in l]
    assert failing == ["h3_a3zero_reduced_vs_general"]
    assert code == 1


def test_grid_f1(capsys):
    code, out, _ = run(capsys, "grid", "f1", "--resolution", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,f1"
    vals = [tuple(map(float, l.split(","))) for l in lines[1:]]
    assert [v[0] for v in vals] == [0.0, 0.25, 0.5]
    assert vals[0][1] == pytest.approx(0.8, abs=1e-15)
    assert vals[1][1] == pytest.approx(1.0219425719346233, abs=1e-14)
    assert vals[2][1] == pytest.approx(0.82796447300922726, abs=1e-14)


def test_grid_f6_corners(capsys):
    code, out, _ = run(capsys, "grid", "f6", "--resolution", "2")
    assert code == 0
    pts = [tuple(map(float, l.split(",")[:2])) for l in out.splitlines()[1:]]
    # the corner (1, 1/sqrt3) lies outside D1
    assert len(pts) == 3
    assert {(x, y > 0) for x, y in pts} == {(0.0, False), (0.0, True), (1.0, False)}


def test_grid_unknown(capsys):
    code, _, _ = run(capsys, "grid", "zzz")
    assert code == 64


def test_grid_bad_resolution(capsys):
    code, _, _ = run(capsys, "grid", "f1", "--resolution", "1")
    assert code == 64
