import csv
import json
import subprocess
import sys

import pytest

from icg import cli


def call(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_reaches_critical(tmp_path, capsys):
    code, out, err = call(capsys, "solve", "--problem", "iq-shared-min", "--variant", "dy", "--seed", "7",
                          "--out-dir", str(tmp_path), "--tag", "t")
    assert code == 0, err
    assert "status Critical" in out
    run_dir = tmp_path / "t"
    rec = json.loads((run_dir / "runs" / "iq-shared-min_dy_seed7.json").read_text())
    assert rec["status"] == "Critical" and rec["seed"] == 7
    trace = (run_dir / "runs" / "iq-shared-min_dy_seed7.trace.jsonl").read_text().splitlines()
    assert json.loads(trace[-1])["xi"] > -1e-6
    assert json.loads((run_dir / "config.json").read_text())["variant"] == "dy"


def test_rho_not_below_sigma_is_usage_error(tmp_path, capsys):
    code, out, err = call(capsys, "solve", "--rho", "0.5", "--sigma", "0.1", "--out-dir", str(tmp_path))
    assert code == 1
    assert err.startswith("ERROR:usage")
    assert not any(tmp_path.iterdir())


def test_unknown_problem_and_variant(tmp_path, capsys):
    code, _, err = call(capsys, "solve", "--problem", "nope", "--out-dir", str(tmp_path))
    assert code == 1 and err.startswith("ERROR:problem")
    code, _, err = call(capsys, "bench", "--variants", "hs", "--out-dir", str(tmp_path))
    assert code == 1 and err.startswith("ERROR:usage")
    code, _, err = call(capsys, "bench", "--seeds", "5..2", "--out-dir", str(tmp_path))
    assert code == 1 and err.startswith("ERROR:usage")


def test_missing_subcommand_and_bad_flag(capsys):
    assert call(capsys)[0] == 1
    code, _, err = call(capsys, "solve", "--bogus")
    assert code == 1 and err.startswith("ERROR:usage")


def test_solver_failure_exit_code(tmp_path, capsys, monkeypatch):
    def boom(*a, **k):
        raise FloatingPointError("overflow")
    monkeypatch.setattr(cli.cg, "run", boom)
    code, _, err = call(capsys, "solve", "--out-dir", str(tmp_path))
    assert code == 2 and err.startswith("ERROR:solver")


def printed_config(out):
    return json.loads(out[:out.index("}") + 1])


def test_defaults_match_reference_protocol(tmp_path, capsys):
    code, out, _ = call(capsys, "solve", "--print-config", "--out-dir", str(tmp_path))
    assert code == 0
    conf = printed_config(out)
    assert conf["rho"] == 0.001 and conf["sigma"] == 0.1 and conf["eps"] == 1e-6
    assert conf["wolfe"] == "strong" and conf["max_iter"] == 10000
    cfg = cli.solver_config(conf, "mdy")
    assert cfg.variant.zeta == 1.03
    assert [cli.cg.variant(v).scale for v in ("fr", "cd", "dy")] == [0.98, 0.89, 0.81]


def test_config_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# shared settings\nsigma = 0.2\nseed = 3\neps=1e-5\n", encoding="utf-8")
    monkeypatch.setenv("ICG_SEED", "11")
    code, out, _ = call(capsys, "solve", "--config-file", str(cfg), "--eps", "1e-7", "--print-config",
                        "--out-dir", str(tmp_path))
    assert code == 0
    conf = printed_config(out)
    assert conf["sigma"] == 0.2      # file over default
    assert conf["seed"] == 3         # file over environment
    assert conf["eps"] == 1e-7       # flag over file


def test_env_seed_overrides_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ICG_SEED", "11")
    code, out, _ = call(capsys, "solve", "--print-config", "--out-dir", str(tmp_path))
    assert code == 0 and printed_config(out)["seed"] == 11
    code, out, _ = call(capsys, "solve", "--seed", "2", "--print-config", "--out-dir", str(tmp_path))
    assert printed_config(out)["seed"] == 2


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("colour = blue\n", encoding="utf-8")
    code, _, err = call(capsys, "solve", "--config-file", str(cfg), "--out-dir", str(tmp_path))
    assert code == 1 and err.startswith("ERROR:usage")


def test_bench_then_profile(tmp_path, capsys):
    code, _, err = call(capsys, "bench", "--problems", "iq-convex-2,deg-real-sd", "--variants", "sd,mdy",
                        "--seeds", "0..2", "--out-dir", str(tmp_path), "--tag", "b")
    assert code == 0, err
    run_dir = tmp_path / "b"
    with open(run_dir / "runs.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12 and all(r["status"] == "Critical" for r in rows)
    assert (run_dir / "summary.csv").is_file()
    assert len(list((run_dir / "runs").glob("*.json"))) == 12
    assert b"\r\n" not in (run_dir / "runs.csv").read_bytes()

    code, out, err = call(capsys, "profile", "--runs", str(run_dir / "runs.csv"))
    assert code == 0, err
    for metric in ("iterations", "cputime"):
        assert (run_dir / f"profile_{metric}.csv").is_file()
        assert json.loads((run_dir / f"profile_{metric}.json").read_text())["solvers"] == ["sd", "mdy"]


def test_profile_missing_runs(tmp_path, capsys):
    code, _, err = call(capsys, "profile", "--runs", str(tmp_path / "none.csv"))
    assert code == 1 and err.startswith("ERROR:usage")


def test_list_problems(capsys):
    code, out, _ = call(capsys, "list-problems")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 6 and lines[0].startswith("iq-convex-2\tn=2\tm=2")


@pytest.mark.parametrize("seeds,want", [("0..3", [0, 1, 2, 3]), ("4", [4]), ("1,5,9", [1, 5, 9])])
def test_parse_seeds(seeds, want):
    assert cli.parse_seeds(seeds) == want


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "icg", "list-problems"], capture_output=True, text=True)
    assert res.returncode == 0 and "deg-real-sd" in res.stdout
