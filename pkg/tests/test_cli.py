import json
import pathlib

import pytest

from psucentre import cli, pipeline
from psucentre.cli import EXIT_BUDGET, EXIT_CHECK, EXIT_OK, EXIT_USAGE, RunConfig, main, run

from helpers import normalize_report

GOLDEN = pathlib.Path(__file__).parent / "golden"


def invoke(argv, tmp_path, capsys):
    out = tmp_path / "out.json"
    code = main(list(argv) + ["--out", str(out)])
    err = capsys.readouterr().err
    return code, json.loads(out.read_text()), err


# -- golden reports -------------------------------------------------------------------

@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_report_matches_golden(q):
    report, code = run(RunConfig(mode="report", qs=[q], threads=1))
    assert code == EXIT_OK
    want = json.loads((GOLDEN / f"report_q{q}.json").read_text())
    got = json.loads(cli.dumps(normalize_report(report)))
    assert got == want


@pytest.mark.parametrize("q,principal,n_blocks", [(3, [13, 12, 4, 0], None), (4, [21, 20, 5, 0], 2),
                                                  (5, [13, 12, 2, 0], None)])
def test_golden_reports_carry_known_profiles(q, principal, n_blocks):
    run_ = json.loads((GOLDEN / f"report_q{q}.json").read_text())["runs"][0]
    assert run_["centre_g"]["principal_profile"] == principal
    if n_blocks:
        assert run_["centre_g"]["n_blocks"] == n_blocks
        assert run_["centre_g"]["dim"] == 22
    assert run_["centre_n"]["loewy_profile"] == list(pipeline.closed_profile(q))
    assert all(run_["checks"].values()) and run_["failed_checks"] == []


def test_report_is_deterministic_apart_from_timestamp():
    a, _ = run(RunConfig(mode="report", qs=[2, 3], threads=1))
    b, _ = run(RunConfig(mode="report", qs=[2, 3], threads=2))
    assert set(a) - set(normalize_report(a)) == {"timestamp"}
    a.pop("timestamp"), b.pop("timestamp")
    assert cli.dumps(a) == cli.dumps(b)


# -- modes -----------------------------------------------------------------------------

def test_analyze_n_q4(tmp_path, capsys):
    code, rep, _ = invoke(["analyze-n", "--p", "2", "--r", "2"], tmp_path, capsys)
    assert code == EXIT_OK
    assert rep["schema"] == 1 and rep["mode"] == "analyze-n"
    assert rep["centre_n"]["loewy_profile"] == [21, 20, 4, 0]
    assert rep["normalizer"]["order"] == 960
    assert rep["metadata"]["q"] == 4 and rep["metadata"]["gamma"] == 1


def test_analyze_g_q4(tmp_path, capsys):
    code, rep, _ = invoke(["analyze-g", "--p", "2", "--r", "2"], tmp_path, capsys)
    assert code == EXIT_OK
    c = rep["centre_g"]
    assert c["loewy_profile"] == [22, 20, 5, 0] and c["n_blocks"] == 2
    assert c["principal_profile"] == [21, 20, 5, 0]
    assert rep["group"]["order"] == 62400


def test_field_info(tmp_path, capsys):
    code, rep, _ = invoke(["field-info", "--p", "3", "--r", "1"], tmp_path, capsys)
    assert code == EXIT_OK
    assert rep["field"]["order"] == 9 and rep["field"]["gamma"] == 1
    assert rep["field"]["coset_counts"]["MOD_GAMMA"] == 8


def test_closed_form_q64_without_enumeration(tmp_path, capsys):
    code, rep, _ = invoke(["closed-form", "--q", "64"], tmp_path, capsys)
    assert code == EXIT_OK
    assert rep["closed_form"]["n_labels"] == 4161
    assert rep["closed_form"]["group_order"] == 64**3 * (64**2 - 1)
    assert rep["checks"]["closed_form_augmentation"]


def test_closed_form_csv(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, rep, _ = invoke(["closed-form", "--q", "3", "--csv", str(path)], tmp_path, capsys)
    assert code == EXIT_OK
    lines = path.read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    assert len(header) == 13 and lines[len(header)] == "i,j,k,m"
    assert len(lines) - len(header) - 1 == rep["closed_form"]["table_nnz"]


def test_closed_form_rejects_wrong_p(capsys):
    assert main(["closed-form", "--q", "4", "--p", "3"]) == EXIT_USAGE
    assert "does not divide" in capsys.readouterr().err


def test_dump_constants(tmp_path, capsys):
    path = tmp_path / "m.csv"
    code, rep, _ = invoke(["analyze-n", "--p", "3", "--r", "1", "--dump-constants", str(path)], tmp_path, capsys)
    assert code == EXIT_OK
    lines = path.read_text().splitlines()
    assert sum(l.startswith("#") for l in lines) == rep["normalizer"]["n_classes"]
    assert "i,j,k,m" in lines


def test_crosscheck_mode(tmp_path, capsys):
    code, rep, _ = invoke(["crosscheck", "--p", "5", "--r", "1"], tmp_path, capsys)
    assert code == EXIT_OK and rep["crosscheck"]["match"]
    assert rep["checks"]["psi_cube_fact"]


def test_tensor_mode(tmp_path, capsys):
    code, rep, _ = invoke(["tensor", "--p", "2", "--r", "2"], tmp_path, capsys)
    assert code == EXIT_OK
    t = rep["tensor"]
    assert t["predicted_B"] == [4, 5] and t["predicted_b"] == [4, 4] and t["distinguishable"]


def test_usage_errors(capsys):
    assert main(["field-info", "--p", "4", "--r", "1"]) == EXIT_USAGE
    with pytest.raises(SystemExit):
        main(["nonsense"])
    with pytest.raises(SystemExit):
        main(["report", "--q", "6"])


# -- exit-code contract ----------------------------------------------------------------

def test_budget_exceeded_keeps_closed_form_only(tmp_path, capsys):
    code, rep, err = invoke(["analyze-g", "--p", "2", "--r", "3"], tmp_path, capsys)
    assert code == EXIT_BUDGET
    assert "budget exceeded" in err and "--allow-big" in err
    assert set(rep) <= {"schema", "mode", "timestamp", "metadata", "closed_form", "checks",
                        "budget_exceeded", "failed_checks"}
    assert rep["closed_form"]["n_labels"] == 27
    assert rep["checks"] and all(k.startswith("closed_form_") for k in rep["checks"])


def test_budget_flag_applies_to_normalizer(tmp_path, capsys):
    code, rep, _ = invoke(["analyze-n", "--p", "2", "--r", "2", "--budget", "100"], tmp_path, capsys)
    assert code == EXIT_BUDGET and "centre_n" not in rep


def test_failed_check_is_named(tmp_path, capsys, monkeypatch):
    real = pipeline.crosscheck

    def broken(F, threads=None):
        part = real(F, threads=threads)
        part["checks"]["crosscheck_match"] = False
        return part

    monkeypatch.setattr(pipeline, "crosscheck", broken)
    code, rep, err = invoke(["crosscheck", "--p", "2", "--r", "1"], tmp_path, capsys)
    assert code == EXIT_CHECK
    assert rep["failed_checks"] == ["crosscheck_match"] and "crosscheck_match" in err


def test_report_names_failures_per_q(monkeypatch):
    real = pipeline.crosscheck

    def broken(F, threads=None):
        part = real(F, threads=threads)
        part["checks"]["crosscheck_match"] = F.q != 3
        return part

    monkeypatch.setattr(pipeline, "crosscheck", broken)
    report, code = run(RunConfig(mode="report", qs=[2, 3], threads=1))
    assert code == EXIT_CHECK and report["failed_checks"] == ["q=3:crosscheck_match"]


def test_assertion_failure_exit_code(monkeypatch):
    def boom(*a, **k):
        raise AssertionError("tensor identity broke")

    monkeypatch.setattr(pipeline, "analyze_n", boom)
    report, code = run(RunConfig(mode="analyze-n", p=2, r=1))
    assert code == EXIT_CHECK and "tensor identity broke" in report["failed_checks"][0]


# -- configuration ----------------------------------------------------------------------

def test_thread_env_and_flag(monkeypatch):
    ap = cli.build_parser()
    monkeypatch.setenv("PSUCENTRE_THREADS", "3")
    assert cli.config_from_args(ap.parse_args(["analyze-n", "--p", "2", "--r", "1"])).threads == 3
    ns = ap.parse_args(["analyze-n", "--p", "2", "--r", "1", "--threads", "2"])
    assert cli.config_from_args(ns).threads == 2


def test_allow_big_raises_budget():
    ap = cli.build_parser()
    cfg = cli.config_from_args(ap.parse_args(["analyze-g", "--p", "2", "--r", "3", "--allow-big"]))
    assert cfg.budget == cli.BIG_BUDGET and cfg.progress
    assert cli.config_from_args(ap.parse_args(["analyze-g", "--p", "2", "--r", "3"])).budget == cli.DEFAULT_BUDGET


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(mode="bogus").validate()
    with pytest.raises(ValueError):
        RunConfig(mode="field-info", p=6, r=1).validate()
    with pytest.raises(ValueError):
        RunConfig(mode="field-info", p=2, r=0).validate()


def test_stdout_when_no_out(capsys):
    assert main(["field-info", "--p", "2", "--r", "1"]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["field"]["q"] == 2


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "psucentre", "field-info", "--p", "2", "--r", "1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["metadata"]["q"] == 2
