import numpy as np
import pytest

from icg.qp import (NumericalBreakdown, QPInstance, QPSolver, Status, dump_instance, kkt_residuals,
                    load_instance, solve)
from icg.subproblem import LinearizationData, build_qp


def random_psd_instance(rng, d, p):
    B = rng.normal(size=(d, max(1, d // 2)))
    Q = B @ B.T
    A = rng.normal(size=(p, d))
    z0 = rng.normal(size=d)
    b = A @ z0 + rng.uniform(0, 1, p)   # z0 strictly feasible
    c = rng.normal(size=d)
    # keep it bounded: a box around the origin
    A = np.vstack([A, np.eye(d), -np.eye(d)])
    b = np.concatenate([b, np.full(d, 10.0), np.full(d, 10.0)])
    return QPInstance(Q, c, A, b)


def test_unconstrained():
    sol = solve(QPInstance(np.eye(1), [-2.0], np.zeros((0, 1)), []))
    assert sol.status is Status.SOLVED
    assert sol.z == pytest.approx([2.0], abs=1e-12)
    assert sol.objective == pytest.approx(-2.0, abs=1e-12)


def test_active_bound():
    sol = solve(QPInstance(np.eye(1), [-2.0], [[1.0]], [1.0]))
    assert sol.status is Status.SOLVED
    assert sol.z == pytest.approx([1.0], abs=1e-9)
    assert sol.objective == pytest.approx(-1.5, abs=1e-9)
    assert sol.duals == pytest.approx([1.0], abs=1e-9)


def test_direction_instance_recovers_negative_gradient():
    # one objective, degenerate gH-gradient g = (1, 2): s = 2g, w = 0
    inst = build_qp(LinearizationData([[2.0, 4.0]], [[0.0, 0.0]]))
    sol = solve(inst)
    assert sol.status is Status.SOLVED
    assert sol.z[:2] == pytest.approx([-1.0, -2.0], abs=1e-8)


@pytest.mark.parametrize("seed", range(15))
def test_kkt_conditions_on_random_instances(seed):
    rng = np.random.default_rng(seed)
    inst = random_psd_instance(rng, d=int(rng.integers(2, 8)), p=int(rng.integers(1, 6)))
    tol = 1e-9
    sol = solve(inst, tol=tol)
    assert sol.status is Status.SOLVED
    prim, stat, comp = kkt_residuals(inst, sol.z, sol.duals)
    scale = 1 + max(np.abs(inst.c).max(), np.abs(inst.b).max())
    assert prim <= tol * scale
    assert stat <= tol * scale
    assert comp <= tol * (1 + abs(sol.objective))
    assert np.all(sol.duals >= -tol)
    assert sol.objective == pytest.approx(0.5 * sol.z @ inst.Q @ sol.z + inst.c @ sol.z, abs=1e-12)
    # Lagrangian at (z, duals) does not exceed the primal objective
    lagr = sol.objective + sol.duals @ (inst.A @ sol.z - inst.b)
    assert lagr <= sol.objective + tol


@pytest.mark.parametrize("seed", range(10))
def test_direction_qp_kkt(seed):
    rng = np.random.default_rng(100 + seed)
    m, n = int(rng.integers(1, 4)), int(rng.integers(1, 6))
    inst = build_qp(LinearizationData(rng.uniform(-5, 5, (m, n)), rng.uniform(0, 2, (m, n))))
    sol = solve(inst)
    assert sol.status is Status.SOLVED
    prim, stat, _ = kkt_residuals(inst, sol.z, sol.duals)
    assert prim <= 1e-8 and stat <= 1e-8
    # the tau multipliers sum to 1/2
    assert 2 * sol.duals[:m].sum() == pytest.approx(1.0, abs=1e-8)


def test_deterministic():
    rng = np.random.default_rng(7)
    inst = random_psd_instance(rng, 6, 4)
    a, b = QPSolver().solve(inst), QPSolver().solve(inst)
    assert np.array_equal(a.z, b.z) and np.array_equal(a.duals, b.duals)
    assert a.objective == b.objective and a.iterations == b.iterations


def test_tighter_tolerance_is_consistent():
    rng = np.random.default_rng(11)
    inst = random_psd_instance(rng, 5, 5)
    loose = solve(inst, tol=1e-6)
    tight = solve(inst, tol=1e-7)
    assert abs(loose.objective - tight.objective) <= 1e-6


def test_psd_degenerate_block_is_fine():
    # objective ignores the second variable entirely
    Q = np.diag([1.0, 0.0])
    inst = QPInstance(Q, [0.0, 1.0], [[0.0, -1.0], [1.0, 1.0]], [0.0, 3.0])
    sol = solve(inst)
    assert sol.status is Status.SOLVED
    assert sol.z[1] == pytest.approx(0.0, abs=1e-8)
    assert sol.objective == pytest.approx(0.0, abs=1e-8)


def test_infeasible_is_reported():
    inst = QPInstance(np.eye(1), [0.0], [[1.0], [-1.0]], [-1.0, -1.0])   # z <= -1 and z >= 1
    sol = QPSolver().solve(inst, max_iter=2000)
    assert sol.status is Status.INFEASIBLE


def test_non_finite_data():
    with pytest.raises(NumericalBreakdown):
        solve(QPInstance(np.eye(1), [np.nan], [[1.0]], [1.0]))


def test_rejects_asymmetric_q():
    with pytest.raises(ValueError):
        QPInstance([[1.0, 1.0], [0.0, 1.0]], [0.0, 0.0], np.zeros((0, 2)), [])


def test_dump_round_trip(tmp_path):
    inst = build_qp(LinearizationData([[1.0, -2.0], [0.5, 0.25]], [[0.1, 0.0], [0.3, 1.0]]))
    path = tmp_path / "qp.txt"
    dump_instance(inst, path)
    back = load_instance(path)
    for name in "QcAb":
        assert np.array_equal(getattr(back, name), getattr(inst, name))
    assert path.read_text().startswith("# Q 5 5\n")
