import json
import math

import numpy as np
import pytest

from icg import bench as B
from icg.cg import SolverConfig


def row(problem="p", variant="s", seed=0, status="Critical", iters=1, t=0.1):
    return B.RunRow(problem, variant, seed, status, iters, t, -1e-7, 0)


def test_matrix_cardinality_and_order():
    m = B.BenchMatrix(["iq-convex-2"], ["sd"], range(3))
    recs = B.run_matrix(m)
    assert len(recs) == 3
    assert [r.seed for r in recs] == [0, 1, 2]
    assert all(r.problem == "iq-convex-2" and r.variant == "sd" for r in recs)


@pytest.mark.parametrize("kw", [dict(seeds=[]), dict(variants=[]), dict(problems=[]),
                                dict(variants=["hs"])])
def test_matrix_validation(kw):
    args = dict(problems=["iq-convex-2"], variants=["sd"], seeds=[0])
    args.update(kw)
    with pytest.raises(ValueError):
        B.BenchMatrix(**args)


def test_matrix_rejects_unknown_problem():
    with pytest.raises(KeyError):
        B.BenchMatrix(["nope"])


def strip_time(path):
    lines = path.read_text().splitlines()
    col = lines[0].split(",").index("wall_time_s")
    return [",".join(c for i, c in enumerate(ln.split(",")) if i != col) for ln in lines]


def test_parallel_runs_match_serial(tmp_path):
    m = B.BenchMatrix(["iq-convex-2", "nonconvex-hill"], ["sd", "mdy"], range(4))
    B.write_runs_csv(B.run_matrix(m, 1), tmp_path / "a.csv")
    B.write_runs_csv(B.run_matrix(m, 2), tmp_path / "b.csv")
    assert strip_time(tmp_path / "a.csv") == strip_time(tmp_path / "b.csv")


def test_runs_csv_round_trip(tmp_path):
    recs = B.run_matrix(B.BenchMatrix(["iq-shared-min"], ["fr"], range(2)))
    B.write_runs_csv(recs, tmp_path / "runs.csv")
    back = B.read_runs_csv(tmp_path / "runs.csv")
    assert back == [B.RunRow.from_record(r) for r in recs]
    assert (tmp_path / "runs.csv").read_text().splitlines()[0] == ",".join(B.RUNS_COLUMNS)


def test_solver_errors_do_not_abort(monkeypatch):
    from icg.qp import QPNotConverged

    def boom(*a, **k):
        raise QPNotConverged("stalled")
    monkeypatch.setattr(B, "run", boom)
    rec = B.run_cell("iq-convex-2", "sd", 4, SolverConfig())
    assert rec.status.value == "LineSearchFail"
    assert "stalled" in rec.error and rec.problem == "iq-convex-2"


def test_aggregate_min_mean_max():
    (cell,) = B.aggregate([row(iters=i, seed=i) for i in (0, 3, 6)])
    assert cell.iters == (0.0, 3.0, 6.0)
    assert cell.failures == 0 and cell.runs == 3


def test_aggregate_single_record():
    (cell,) = B.aggregate([row(iters=4, t=0.5)])
    assert cell.iters == (4.0, 4.0, 4.0)
    assert cell.time == (0.5, 0.5, 0.5)


def test_aggregate_excludes_failures_from_mean():
    (cell,) = B.aggregate([row(iters=2), row(iters=4, seed=1), row(iters=100, seed=2, status="MaxIter")])
    assert cell.iters == (2.0, 3.0, 4.0)
    assert cell.failures == 1


def test_aggregate_requires_records():
    with pytest.raises(ValueError):
        B.aggregate([])


def test_hand_profile():
    prof = B.profile_from_table(np.array([[10.0, 20.0], [30.0, 15.0]]), ["p1", "p2"], ["a", "b"])
    assert prof.ratios.tolist() == [[1.0, 2.0], [2.0, 1.0]]
    for s in ("a", "b"):
        assert prof.F(s, 1.0) == 0.5
        assert prof.F(s, 2.0) == 1.0
    assert prof.z.tolist() == [1.0, 2.0]


def test_single_solver_profile():
    prof = B.profile_from_table(np.array([[3.0], [7.0]]), ["p1", "p2"], ["only"])
    assert prof.ratios.tolist() == [[1.0], [1.0]]
    assert prof.F("only", 1.0) == 1.0


def test_unsolved_cell_is_infinite():
    prof = B.profile_from_table(np.array([[10.0, math.inf], [5.0, 5.0]]), ["p1", "p2"], ["a", "b"])
    assert math.isinf(prof.ratios[0, 1])
    assert max(prof.curves["b"]) == 0.5
    assert prof.F("b", 1e300) == 0.5


def test_all_zero_best_row_keeps_unit_minimum():
    r = B.performance_ratios(np.array([[0.0, 2.0]]))
    assert r.tolist() == [[1.0, 3.0]]


def test_profile_from_summary_and_files(tmp_path):
    recs = B.run_matrix(B.BenchMatrix(["iq-convex-2", "bk1-analogue"], ["sd", "fr", "cd"], range(3)))
    summary = B.aggregate(recs)
    for c in summary:
        assert c.iters[0] <= c.iters[1] <= c.iters[2]
    for metric in ("iterations", "cputime"):
        prof = B.performance_profile(summary, metric)
        assert np.all(np.min(prof.ratios, axis=1) == 1.0)
        for curve in prof.curves.values():
            assert np.all(np.diff(curve) >= 0) and curve.max() <= 1.0
        csv_path, json_path = B.write_profile(prof, tmp_path)
        doc = json.loads(json_path.read_text())
        assert doc["metric"] == metric and doc["solvers"] == ["sd", "fr", "cd"]
        assert csv_path.read_text().splitlines()[0] == "z,sd,fr,cd"
    B.write_summary_csv(summary, tmp_path / "summary.csv")
    assert (tmp_path / "summary.csv").read_text().splitlines()[0] == ",".join(B.SUMMARY_COLUMNS)
