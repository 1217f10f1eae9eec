import json

import pytest

from bek.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, SWEEP_COLUMNS, main
from bek.witness import SQRT5

FAST = ["--starts", "2", "--max-iters", "60"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == EXIT_OK
    assert "FAIL" not in out


@pytest.mark.parametrize("fault", ["h-sign", "n-scale"])
def test_verify_fault_injection(capsys, fault):
    code, out, _ = run(capsys, "verify", "--inject-fault", fault)
    assert code == EXIT_FAIL
    assert "[FAIL]" in out


def test_verify_h_sign_names_orthogonality(capsys):
    code, out, _ = run(capsys, "verify", "--inject-fault", "h-sign", "--json")
    report = json.loads(out)
    assert code == EXIT_FAIL and not report["passed"]
    assert "pentagon orthogonality" in report["failed"]
    bad = next(c for c in report["checks"] if c["name"] == "pentagon orthogonality")
    assert bad["residual"] > bad["tolerance"]


def test_verify_json_residuals(capsys):
    code, out, _ = run(capsys, "--json", "verify")
    report = json.loads(out)
    assert code == EXIT_OK and report["passed"]
    assert all(c["residual"] <= c["tolerance"] for c in report["checks"])


def test_criteria_werner(capsys):
    code, out, _ = run(capsys, "criteria", "werner", "--lambda", "2", "--json")
    d = json.loads(out)
    assert code == EXIT_OK
    assert d["npt"] and d["min_pt_eigenvalue"] == pytest.approx(-1 / 15, abs=1e-12)
    assert d["reduction_ok"]


def test_criteria_pent_and_product(capsys):
    d = json.loads(run(capsys, "criteria", "pent", "--json")[1])
    assert not d["npt"] and d["ppt_invariant"]
    d = json.loads(run(capsys, "criteria", "product", "--lambda", "2", "--json")[1])
    assert d["npt"] and d["reduction_ok"]
    d = json.loads(run(capsys, "criteria", "flagged", "--lambda", "2", "--json")[1])
    assert d["min_pt_eigenvalue"] == pytest.approx(-1 / 30, abs=1e-12)


@pytest.mark.parametrize("argv", [["criteria", "werner"], ["criteria", "werner", "--lambda", "0.2"]])
def test_criteria_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and "error" in err


def test_witness_raw_and_normalized(capsys):
    d = json.loads(run(capsys, "witness", "--lambda", "2", "--json")[1])
    assert d["value"] == pytest.approx(2 * SQRT5 - 4.5, abs=1e-12)
    assert d["verdict"] == "distillable"
    d = json.loads(run(capsys, "witness", "--lambda", "2", "--normalized", "--json")[1])
    assert d["value"] == pytest.approx((2 * SQRT5 - 4.5) / (15 * (9.5 + SQRT5)), abs=1e-14)
    d = json.loads(run(capsys, "witness", "--lambda", "2.34", "--json")[1])
    assert d["value"] > 0 and d["verdict"] == "not detected"


def test_witness_human_matches_json(capsys):
    human = run(capsys, "witness", "--lambda", "2.2")[1]
    d = json.loads(run(capsys, "witness", "--lambda", "2.2", "--json")[1])
    assert f"{d['value']:.17g}" in human
    assert "verdict: distillable" in human


def test_witness_usage_error(capsys):
    assert run(capsys, "witness", "--lambda", "0.1")[0] == EXIT_USAGE
    assert run(capsys, "witness", "--lambda", "0.3", "--normalized")[0] == EXIT_USAGE


def test_sweep_writes_csv_and_manifest(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    argv = ["sweep", "--b-min", "0.18", "--b-max", "1/5", "--steps", "3", "--out", str(out), *FAST]
    assert run(capsys, *argv)[0] == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert len(lines) == 4
    assert lines[-1].startswith("0.20000000000000001,2,")
    manifest = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
    assert manifest["command"] == "sweep" and manifest["rng_seed"] == 20011
    assert manifest["parameters"]["b_max"] == "1/5"
    first = out.read_bytes()
    assert run(capsys, *argv)[0] == EXIT_OK
    assert out.read_bytes() == first


@pytest.mark.parametrize("lo,hi,steps", [("1/6", "0.2", "3"), ("0.19", "0.18", "3"),
                                         ("0.18", "0.21", "3"), ("0.18", "0.2", "1")])
def test_sweep_usage_errors(capsys, tmp_path, lo, hi, steps):
    argv = ["sweep", "--b-min", lo, "--b-max", hi, "--steps", steps,
            "--out", str(tmp_path / "x.csv"), *FAST]
    assert run(capsys, *argv)[0] == EXIT_USAGE
    assert not (tmp_path / "x.csv").exists()


def test_search_single_copy(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    code, out, _ = run(capsys, "search", "--n", "1", "--lambda", "2", "--certificate", str(cert),
                       "--json", *FAST)
    d = json.loads(out)
    assert code == EXIT_OK
    assert d["min_value"] >= -1e-9 and d["verdict"] == "no negativity found"
    c = json.loads(cert.read_text())
    assert c["layout"] == [[3, "A"], [3, "B"]]
    assert len(c["amplitudes"]) == 18
    assert sum(x * x for x in c["amplitudes"]) == pytest.approx(1, abs=1e-12)


def test_search_below_threshold_finds_negativity(capsys):
    human = run(capsys, "search", "--n", "1", "--lambda", "1", *FAST)[1]
    assert "verdict: negativity found" in human


@pytest.mark.parametrize("argv", [["--n", "4", "--lambda", "2"], ["--n", "1", "--lambda", "0.3"]])
def test_search_usage_errors(capsys, argv):
    assert run(capsys, "search", *argv)[0] == EXIT_USAGE


def test_unknown_command_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
