from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest

from kerninterp.cli import main
from kerninterp.geometry import (
    Domain,
    SPHERE_METRIC,
    PointSet,
    fibonacci_sphere,
    generate_points,
    save_points_csv,
)
from kerninterp.interpolation import evaluate, load_interpolant_csv


STUDY_ARGS = [
    "study",
    "--domain",
    "sphere2",
    "--kernel",
    "powerlaw:tau=2,N_max=40",
    "--target",
    "zonal:beta=5,seed=7",
    "--levels",
    "30,60,120",
    "--grid",
    "800",
    "--candidates",
    "2000",
]


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_help_exits_zero(capsys):
    code, out, _ = _run(capsys, ["--help"])
    assert code == 0
    for sub in ("study", "interp", "power", "pseudo"):
        assert sub in out


def test_study_help_documents_grammar(capsys):
    code, out, _ = _run(capsys, ["study", "--help"])
    assert code == 0
    assert "powerlaw:tau=2" in out
    assert "zonal:beta=5" in out
    assert "pseudo-l2(s)" in out


def test_flag_errors_exit_one_not_two(capsys):
    code, _, _ = _run(capsys, ["study", "--no-such-flag"])
    assert code == 1
    code, _, _ = _run(capsys, ["study"])  # missing required flags
    assert code == 1


def test_bad_kernel_head_named_in_error(capsys):
    argv = list(STUDY_ARGS)
    argv[argv.index("powerlaw:tau=2,N_max=40")] = "powrlaw:tau=2"
    code, _, err = _run(capsys, argv)
    assert code == 1
    assert "powrlaw" in err


def test_unknown_kernel_key_rejected(capsys):
    argv = list(STUDY_ARGS)
    argv[argv.index("powerlaw:tau=2,N_max=40")] = "powerlaw:tau=2,bogus=1"
    code, _, err = _run(capsys, argv)
    assert code == 1
    assert "bogus" in err


def test_unknown_target_key_rejected(capsys):
    argv = list(STUDY_ARGS)
    argv[argv.index("zonal:beta=5,seed=7")] = "zonal:beta=5,gamma=1"
    code, _, err = _run(capsys, argv)
    assert code == 1
    assert "gamma" in err


def test_dump_config_is_json_and_skips_the_run(capsys):
    code, out, _ = _run(capsys, STUDY_ARGS + ["--dump-config"])
    assert code == 0
    doc = json.loads(out)
    assert doc["kernel"]["N_max"] == 40
    assert doc["target"]["beta"] == 5.0
    assert doc["levels"] == [30, 60, 120]


def test_study_output_byte_identical(capsys):
    code1, out1, _ = _run(capsys, STUDY_ARGS)
    code2, out2, _ = _run(capsys, STUDY_ARGS)
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.startswith("level,n_points,h,cond,metric:sup")


def test_study_json_format(capsys):
    code, out, _ = _run(capsys, STUDY_ARGS + ["--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    assert len(doc["rows"]) == 3
    assert "sup" in doc["predicted"]


def test_study_writes_file(tmp_path, capsys):
    out_path = tmp_path / "report.csv"
    code, out, _ = _run(capsys, STUDY_ARGS + ["--out", str(out_path)])
    assert code == 0
    assert out == ""
    assert out_path.read_text().startswith("level,")


def test_assert_rates_synthetic_fixture_passes(capsys):
    argv = list(STUDY_ARGS) + ["--metrics", "synthetic(2)", "--assert-rates"]
    code, _, err = _run(capsys, argv)
    assert code == 0
    assert "rate check failed" not in err


def test_assert_rates_failure_exits_two(capsys):
    argv = list(STUDY_ARGS) + [
        "--metrics",
        "synthetic(2)",
        "--assert-rates",
        "--rate-tol",
        "-1",
    ]
    code, _, err = _run(capsys, argv)
    assert code == 2
    assert "rate check failed" in err


def _write_euclid_data(path, n=9):
    xs = np.linspace(0.0, 1.0, n)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x0", "value"])
        for x in xs:
            writer.writerow([repr(float(x)), repr(math.sin(3.0 * x))])
    return xs


def test_interp_round_trip(tmp_path, capsys):
    data = tmp_path / "data.csv"
    xs = _write_euclid_data(data)
    out = tmp_path / "coef.csv"
    code, _, err = _run(
        capsys,
        [
            "interp",
            "--kernel",
            "matern:m=1,s=2,rho=0.3,d=1",
            "--data",
            str(data),
            "--out",
            str(out),
        ],
    )
    assert code == 0, err
    assert out.exists() and (tmp_path / "coef.json").exists()
    S = load_interpolant_csv(out)
    got = evaluate(S, xs[:, None])
    np.testing.assert_allclose(got, np.sin(3.0 * xs), atol=1e-9)


def test_interp_single_point_coefficient(tmp_path, capsys):
    data = tmp_path / "one.csv"
    data.write_text("x0,value\n0.5,3.0\n")
    out = tmp_path / "one_out.csv"
    code, _, _ = _run(
        capsys,
        ["interp", "--kernel", "matern:m=1,s=2,rho=0.3,d=1", "--data", str(data), "--out", str(out)],
    )
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x0", "alpha"]
    # phi(0) = 1 for the exponential-decay profile, so alpha = value
    assert float(rows[1][1]) == pytest.approx(3.0, rel=1e-12)


def test_interp_missing_value_column(tmp_path, capsys):
    data = tmp_path / "bad.csv"
    data.write_text("x0\n0.5\n")
    out = tmp_path / "never.csv"
    code, _, err = _run(
        capsys,
        ["interp", "--kernel", "matern:m=1,s=2,rho=0.3,d=1", "--data", str(data), "--out", str(out)],
    )
    assert code == 1
    assert "value" in err
    assert not out.exists()


def test_power_zeros_at_centers(tmp_path, capsys):
    centers = PointSet(coords_matrix=np.array([[0.0], [1.0]]), metric="euclidean")
    cpath = tmp_path / "centers.csv"
    save_points_csv(centers, cpath)
    code, out, _ = _run(
        capsys,
        [
            "power",
            "--kernel",
            "matern:m=1,s=2,rho=0.3,d=1",
            "--domain",
            "box:0,1",
            "--centers",
            str(cpath),
            "--grid",
            "5",
        ],
    )
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["x0", "power"]
    values = {float(r[0]): float(r[1]) for r in rows[1:]}
    assert values[0.0] <= 1e-5
    assert values[1.0] <= 1e-5
    assert values[0.5] > 0.0


def test_power_empty_centers_constant(capsys):
    code, out, _ = _run(
        capsys,
        [
            "power",
            "--kernel",
            "matern:m=1,s=2,rho=0.3,d=1",
            "--domain",
            "box:0,1",
            "--grid",
            "5",
        ],
    )
    assert code == 0
    rows = list(csv.reader(out.splitlines()))[1:]
    # phi(0) = 1, so the no-information power level is 1 everywhere
    assert all(float(r[1]) == 1.0 for r in rows)


def _make_sphere_interpolant(tmp_path, capsys, n=25):
    pts = fibonacci_sphere(n)
    data = tmp_path / "sdata.csv"
    with open(data, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x0", "x1", "x2", "value"])
        for p in pts:
            writer.writerow([repr(float(v)) for v in p] + [repr(float(p[2] ** 2))])
    out = tmp_path / "sph.csv"
    code, _, err = _run(
        capsys,
        ["interp", "--kernel", "powerlaw:tau=2,N_max=30", "--data", str(data), "--out", str(out)],
    )
    assert code == 0, err
    return out


def test_pseudo_identity_reproduces_interpolant(tmp_path, capsys):
    interp_path = _make_sphere_interpolant(tmp_path, capsys)
    code, out, _ = _run(
        capsys,
        ["pseudo", "--interpolant", str(interp_path), "--symbol", "identity", "--grid", "40"],
    )
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["x0", "x1", "x2", "value"]
    S = load_interpolant_csv(interp_path)
    grid = fibonacci_sphere(40)
    expected = evaluate(S, grid)
    got = np.array([float(r[3]) for r in rows[1:]])
    np.testing.assert_allclose(got, expected, atol=1e-10)


def test_pseudo_power_symbol_runs(tmp_path, capsys):
    interp_path = _make_sphere_interpolant(tmp_path, capsys)
    code, out, _ = _run(
        capsys,
        ["pseudo", "--interpolant", str(interp_path), "--symbol", "s=0.5", "--grid", "16"],
    )
    assert code == 0
    assert len(out.splitlines()) == 17


def test_pseudo_rejects_euclid_interpolant(tmp_path, capsys):
    data = tmp_path / "d.csv"
    _write_euclid_data(data)
    out = tmp_path / "c.csv"
    _run(capsys, ["interp", "--kernel", "matern:m=1,s=2,rho=0.3,d=1", "--data", str(data), "--out", str(out)])
    code, _, err = _run(
        capsys, ["pseudo", "--interpolant", str(out), "--symbol", "identity"]
    )
    assert code == 1
    assert "sphere" in err


def test_cli_csv_reread_by_own_readers(tmp_path, capsys):
    # every CSV the driver writes comes back through the package readers
    dom = Domain.sphere(2)
    ps = generate_points(dom, "fibonacci-sphere", 12, 0)
    cpath = tmp_path / "c.csv"
    save_points_csv(ps, cpath)
    code, out, _ = _run(
        capsys,
        [
            "power",
            "--kernel",
            "powerlaw:tau=2,N_max=30",
            "--domain",
            "sphere2",
            "--centers",
            str(cpath),
            "--grid",
            "50",
        ],
    )
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    coords = np.array([[float(v) for v in r[:3]] for r in rows[1:]])
    back = PointSet(coords_matrix=coords, metric=SPHERE_METRIC)
    assert len(back) == 50
