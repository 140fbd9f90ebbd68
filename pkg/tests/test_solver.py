import numpy as np
import pytest

from cyclesearch.builder import (
    ConicProgram,
    LinearConstraint,
    build_cycle_problem,
    lower_to_conic,
)
from cyclesearch.function_classes import SmoothConvex
from cyclesearch.methods import heavy_ball, nesterov
from cyclesearch.solver import SolverOptions, certify, solve

from planted import planted_sdp


def _con(A, b, sense="=", a=None, tag="c"):
    p = 0 if a is None else len(a)
    return LinearConstraint(np.asarray(A, float), np.zeros(p) if a is None else np.asarray(a, float), b, sense, tag)


def test_min_trace_with_fixed_corner():
    A1 = np.zeros((2, 2))
    A1[0, 0] = 1.0
    prog = ConicProgram(2, 0, np.eye(2), np.zeros(0), [_con(A1, 1.0)])
    sol = solve(prog)
    assert sol.status == "Optimal"
    assert sol.primal_objective == pytest.approx(1.0, abs=1e-7)
    assert sol.G[0, 0] == pytest.approx(1.0, abs=1e-6)
    assert abs(sol.G[0, 1]) < 1e-6


def test_min_x_off_diagonal_one():
    # min x s.t. [[x, 1], [1, x]] PSD; optimum x = 1.
    A_off = np.array([[0.0, 0.5], [0.5, 0.0]])
    A_diag = np.diag([1.0, -1.0])
    C = np.zeros((2, 2))
    C[0, 0] = 1.0
    prog = ConicProgram(
        2, 0, C, np.zeros(0), [_con(A_off, 1.0), _con(A_diag, 0.0)]
    )
    sol = solve(prog)
    assert sol.status == "Optimal"
    assert sol.primal_objective == pytest.approx(1.0, abs=1e-6)


def test_inequalities_and_free_variables():
    # min f subject to f >= 3 (via G-free row) and a PSD block that is inert.
    prog = ConicProgram(
        1,
        1,
        np.zeros((1, 1)),
        np.array([1.0]),
        [
            _con(np.zeros((1, 1)), 3.0, ">=", a=[1.0]),
            _con(np.eye(1), 1.0, ">=", a=[0.0]),
        ],
    )
    sol = solve(prog)
    assert sol.status == "Optimal"
    assert sol.primal_objective == pytest.approx(3.0, abs=1e-6)
    assert sol.F[0] == pytest.approx(3.0, abs=1e-6)


def test_structurally_empty_problem_rejected():
    prog = ConicProgram(1, 0, np.eye(1), np.zeros(0), [])
    with pytest.raises(ValueError, match="no constraints"):
        solve(prog)


@pytest.mark.parametrize("seed", range(8))
def test_planted_solutions_recovered(seed):
    n = 5 + 4 * seed
    m = 10 + 25 * seed
    p = seed
    prog, opt = planted_sdp(n, m, p, ineq_fraction=0.5, seed=seed)
    sol = solve(prog)
    assert sol.status == "Optimal"
    assert abs(sol.primal_objective - opt) / max(1.0, abs(opt)) < 1e-7
    report = certify(sol, prog)
    assert report.max_violation < 1e-6
    assert report.duality_gap < 1e-6 * (1 + abs(opt))


def test_certify_flags_perturbed_solution():
    prog, _ = planted_sdp(6, 12, 0, seed=3)
    sol = solve(prog)
    clean = certify(sol, prog)
    assert clean.max_violation < 1e-6
    sol.G[0, 0] += 1e-3
    dirty = certify(sol, prog)
    assert dirty.max_violation > 1e-4
    assert dirty.violated(1e-5)


def test_certify_zero_matrix_reports_normalization():
    lowered = lower_to_conic(build_cycle_problem(heavy_ball(0.5, 0.2), SmoothConvex(1.0), 2))
    sol = solve(lowered.program)
    sol.G = np.zeros_like(sol.G)
    sol.F = np.zeros_like(sol.F)
    report = certify(sol, lowered.program)
    assert "normalization" in report.violated(1e-6)


def test_weak_duality_along_iterations():
    lowered = lower_to_conic(build_cycle_problem(heavy_ball(1.0, 0.0), SmoothConvex(1.0), 4))
    sol = solve(lowered.program)
    assert sol.status == "Optimal"
    for entry in sol.log:
        assert entry["pobj"] >= entry["dobj"] - 1e-9 * (1 + abs(entry["pobj"]))


def test_mu_decreases_on_accepted_steps():
    prog, _ = planted_sdp(10, 40, 3, seed=5)
    sol = solve(prog)
    mus = [entry["mu"] for entry in sol.log]
    stalled = [entry["stalled"] for entry in sol.log]
    for k in range(len(mus) - 1):
        if not stalled[k]:
            assert mus[k + 1] <= 0.99 * mus[k] + 1e-16


def test_scaling_equivariance():
    """Scaling all rows and the rhs by t > 0 leaves the solution alone."""
    prog, opt = planted_sdp(7, 18, 2, seed=9)
    t = 37.5
    scaled = ConicProgram(
        prog.psd_dim,
        prog.free_dim,
        prog.C,
        prog.c,
        [
            LinearConstraint(t * con.A, t * con.a, t * con.b, con.sense, con.tag)
            for con in prog.constraints
        ],
    )
    sol_a, sol_b = solve(prog), solve(scaled)
    assert sol_a.status == sol_b.status == "Optimal"
    assert sol_a.primal_objective == pytest.approx(sol_b.primal_objective, rel=1e-6)
    assert np.allclose(sol_a.G, sol_b.G, atol=1e-5 * (1 + np.abs(sol_a.G).max()))


def test_determinism():
    lowered = lower_to_conic(build_cycle_problem(nesterov(1.2, 0.5), SmoothConvex(1.0), 3))
    a, b = solve(lowered.program), solve(lowered.program)
    assert a.primal_objective == b.primal_objective
    assert a.iterations == b.iterations
    assert np.array_equal(a.G, b.G)


def test_primal_infeasible_detected():
    # X11 = -1 is impossible for a PSD matrix.
    A = np.zeros((2, 2))
    A[0, 0] = 1.0
    prog = ConicProgram(2, 0, np.eye(2), np.zeros(0), [_con(A, -1.0)])
    sol = solve(prog)
    assert sol.status == "PrimalInfeasible"


def test_dual_infeasible_detected():
    # min -tr(X) with only an inert constraint: unbounded below.
    A = np.zeros((2, 2))
    A[0, 1] = A[1, 0] = 0.5
    prog = ConicProgram(2, 0, -np.eye(2), np.zeros(0), [_con(A, 0.0)])
    sol = solve(prog)
    assert sol.status == "DualInfeasible"


def test_iteration_log_stream():
    lines = []
    lowered = lower_to_conic(build_cycle_problem(heavy_ball(1.0, 0.0), SmoothConvex(1.0), 2))
    solve(lowered.program, SolverOptions(log_fn=lines.append))
    assert len(lines) >= 3
    assert all("mu" in ln and "gap" in ln for ln in lines)


def test_solution_invariants_on_cycle_problem():
    lowered = lower_to_conic(
        build_cycle_problem(heavy_ball(1 / 9, 4 / 9), SmoothConvex(25.0), 3)
    )
    sol = solve(lowered.program)
    assert sol.status == "Optimal"
    assert np.allclose(sol.G, sol.G.T, atol=1e-12)
    opts = SolverOptions()
    assert sol.relative_gap <= opts.gap_tol
    assert sol.primal_residual <= opts.feas_tol
    eigs = np.linalg.eigvalsh(sol.G)
    assert eigs[0] >= -10 * opts.feas_tol * max(1.0, float(np.abs(sol.G).max()))
