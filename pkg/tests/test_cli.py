import csv
import json
from pathlib import Path

import numpy as np
import pytest

from ccmkdv.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_params_single(capsys):
    code, out, _ = run(["params", "--rho", "1,1", "--alpha", "2,1", "--im", "1"], capsys)
    assert code == 0
    assert "0.8811181717481656" in out


def test_params_two_json(capsys):
    code, out, _ = run(["params", "--rho", "2,1", "--alpha", "2.3,1.5", "--im", "1", "--im2", "2",
                        "--format", "json"], capsys)
    assert code == 0
    pts = json.loads(out)["points"]
    assert [round(p["p"][0], 2) for p in pts] == [1.53, 1.5]
    assert all(abs(p["residual"]) < 1e-12 for p in pts)


def test_params_no_root(capsys):
    code, _, err = run(["params", "--rho", "0.01,0.01", "--alpha", "2,1", "--im", "1"], capsys)
    assert code == 2
    assert "no admissible" in err


def test_params_range(capsys):
    code, out, _ = run(["params", "--rho", "1,1", "--alpha", "2,1", "--im-range=-2,2,5", "--format", "json"], capsys)
    assert code == 0
    assert len(json.loads(out)["points"]) == 5


@pytest.mark.parametrize("argv", [
    ["params", "--rho", "1", "--alpha", "2,1", "--im", "1"],
    ["params", "--rho", "1,1", "--alpha", "2,1"],
    ["params", "--rho", "1,1", "--alpha", "2,1", "--im", "x"],
    ["params", "--rho", "1,1", "--alpha", "2,1", "--im-range=0,1,1.5"],
    ["eval", "--grid", "nonsense"],
    ["verify", "--suite", "bogus"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv, capsys):
    code = None
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code in (64, 65)
    if argv and argv[0] != "eval":
        assert code == 64


def test_eval_csv(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code, _, err = run(["eval", "--config", str(CONFIGS / "rounded_n1.yaml"), "--grid=-10:10:5,-5:5:3",
                        "--out", str(out)], capsys)
    assert code == 0
    assert "min |f|" in err
    raw = out.read_bytes()
    assert b"\r\n" not in raw
    lines = raw.decode().splitlines()
    assert lines[0].startswith("# gnuplot")
    rows = list(csv.reader(lines[1:]))
    assert rows[0] == ["x", "t", "re_u1", "im_u1", "abs_u1", "re_u2", "im_u2", "abs_u2", "abs_f"]
    data = np.array(rows[1:], dtype=float)
    assert data.shape == (15, 9)
    # t-major, then x
    assert list(data[:5, 1]) == [-5] * 5 and list(data[:5, 0]) == [-10, -5, 0, 5, 10]
    np.testing.assert_allclose(np.hypot(data[:, 2], data[:, 3]), data[:, 4], rtol=1e-15)
    # full round-trip precision
    assert all("%.17g" % float(v) == v for row in rows[1:] for v in row)


def test_eval_one_dip_per_component(tmp_path, capsys):
    out = tmp_path / "f.csv"
    run(["eval", "--config", str(CONFIGS / "rounded_n1.yaml"), "--grid=-10:10:401,0:0:2", "--out", str(out)], capsys)
    data = np.loadtxt(out, delimiter=",", skiprows=2)[:401]
    for col in (4, 7):
        a = data[:, col]
        interior = (a[1:-1] < a[:-2]) & (a[1:-1] < a[2:])
        assert interior.sum() == 1
    # different depths because the carrier wavenumbers differ
    assert abs(data[:, 4].min() - data[:, 7].min()) > 0.05


def test_eval_json_and_background(capsys):
    code, out, _ = run(["eval", "--rho", "1,2", "--alpha", "1,2", "--grid=-1:1:3,0:1:2", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    data = np.array(doc["rows"])
    np.testing.assert_allclose(data[:, 4], 1)
    np.testing.assert_allclose(data[:, 7], 2)


def test_eval_reports_singular_rows(capsys):
    # default phase with Im p > 0: f has a real zero; place a grid point on it
    p = 0.8811181717481656
    x0 = np.log(p) / (2 * p)  # |C| = 1/p
    code, _, err = run(["eval", "--rho", "1,1", "--alpha", "2,1", f"--p={p}+1i", f"--grid={x0}:{x0 + 1}:2,0:0:2"],
                       capsys)
    assert code == 0
    assert "near-singular" in err


def test_eval_bad_output_path(capsys):
    code, _, err = run(["eval", "--config", str(CONFIGS / "rounded_n1.yaml"), "--grid=-1:1:2,0:1:2",
                        "--out", "/nonexistent/dir/x.csv"], capsys)
    assert code == 65
    assert "/nonexistent/dir/x.csv" in err


def test_verify_exact(capsys):
    code, out, _ = run(["verify", "--config", str(CONFIGS / "exact_n1.yaml")], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"]
    suites = [r["suite"] for r in doc["reports"]]
    assert suites == ["bilinear-a", "bilinear-b", "bilinear-c", "toda", "pde", "conjugacy", "evolve"]
    for r in doc["reports"]:
        assert r["relative"] < (1e-4 if r["suite"] == "evolve" else 1e-9)


def test_verify_single_suite(capsys):
    code, out, _ = run(["verify", "--config", str(CONFIGS / "exact_n1.yaml"), "--suite", "conjugacy"], capsys)
    assert code == 0
    assert len(json.loads(out)["reports"]) == 1


def test_verify_rounded_needs_flag(capsys):
    code, out, err = run(["verify", "--config", str(CONFIGS / "rounded_n1.yaml"), "--suite", "bilinear-c"], capsys)
    assert code == 1
    rep = json.loads(out)["reports"][0]
    assert 1e-4 < rep["relative"] < 1e-1
    assert "reduction condition" in rep["note"]
    assert "FAIL bilinear-c" in err
    code, out, _ = run(["verify", "--config", str(CONFIGS / "rounded_n1.yaml"), "--suite", "bilinear-c",
                        "--paper-rounded"], capsys)
    assert code == 0


def test_verify_negative_control(capsys):
    p = 0.8811181717481656 * 1.1
    code, out, _ = run(["verify", "--config", str(CONFIGS / "exact_n1.yaml"), f"--p={p}-1i", "--unchecked",
                        "--suite", "bilinear-c,pde"], capsys)
    assert code == 1
    assert all(r["relative"] > 1e-2 for r in json.loads(out)["reports"])


def test_verify_invalid_config(capsys):
    code, _, err = run(["verify", "--rho", "1,1", "--alpha", "2,1", "--p=0.5+1i"], capsys)
    assert code == 65
    assert "reduction" in err


def test_verify_roundtrip_bit_identical(tmp_path, capsys):
    saved = tmp_path / "saved.yaml"
    argv = ["--suite", "bilinear-c,pde,toda", "--points", "123", "--seed", "7"]
    code, first, _ = run(["verify", "--config", str(CONFIGS / "exact_n2.yaml"), "--save-config", str(saved)] + argv,
                         capsys)
    assert code == 0
    code, second, _ = run(["verify", "--config", str(saved)] + argv, capsys)
    assert first == second


def test_asym(capsys):
    code, out, _ = run(["asym", "--config", str(CONFIGS / "rounded_n2.yaml"), "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    for j in range(2):
        assert abs(abs(doc["spatial_shift"][j]) - abs(doc["predicted_shift"][j])) < 1e-12
        assert abs(abs(doc["measured_shift"][j]) - abs(doc["predicted_shift"][j])) < 1e-4
        # signed: the predicted shift must agree with the tracked dips, not just in size
        assert abs(doc["spatial_shift"][j] - doc["measured_shift"][j]) < 1e-4
    assert doc["measured_shift"][0] * doc["measured_shift"][1] < 0
    assert max(doc["asymptotic_residual"].values()) < 1e-6


def test_asym_text(capsys):
    code, out, _ = run(["asym", "--config", str(CONFIGS / "rounded_n2.yaml")], capsys)
    assert code == 0
    assert "M " in out and "soliton 2" in out


def test_asym_wrong_n(capsys):
    code, _, _ = run(["asym", "--config", str(CONFIGS / "exact_n1.yaml")], capsys)
    assert code == 65


def test_asym_coincident(capsys):
    code, _, err = run(["asym", "--config", str(CONFIGS / "rounded_n2.yaml"), "--p=1.53+1i", "--p=1.53-1i"], capsys)
    assert code == 65
    assert "coincide" in err
