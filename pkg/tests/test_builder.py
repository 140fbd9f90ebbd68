import numpy as np
import pytest

from cyclesearch.symbolic import evaluate
from cyclesearch.function_classes import (
    CocoerciveOperator,
    MonotoneOperator,
    SmoothConvex,
    SmoothStronglyConvex,
)
from cyclesearch.methods import (
    FunctionOracle,
    heavy_ball,
    inexact_gradient,
    nesterov,
    simulate,
    three_operator_splitting,
)
from cyclesearch.builder import (
    StructurallyInfeasibleError,
    build_cycle_problem,
    lower_to_conic,
)

TOS_CLASSES = {
    "A": MonotoneOperator(),
    "B": CocoerciveOperator(1.0),
    "f": SmoothConvex(1.0),
}


def test_hb_k2_structure():
    problem = build_cycle_problem(heavy_ball(0.2, 0.4), SmoothConvex(1.0), 2)
    assert len(problem.iterates) == 4                       # x0..x3
    fam = problem.families["f"]
    assert len(fam.records) == 3                            # oracles at x0..x2
    assert problem.ctx.value_dim == 3
    interp = [te for te in problem.inequalities if te.tag.startswith("interp")]
    assert len(interp) == 6                                 # ordered pairs of 3
    assert problem.ctx.basis_dim == 2 + 3                   # x0, x1 free + gradients


def test_hb_k3_psd_dim_after_substitution():
    lowered = lower_to_conic(build_cycle_problem(heavy_ball(0.2, 0.4), SmoothConvex(1.0), 3))
    # Free x0, x1 plus one gradient at each of x0..x3.
    assert lowered.program.psd_dim == 6
    assert lowered.program.free_dim == 4


def test_gd_order_one_objective_is_single_term():
    problem = build_cycle_problem(inexact_gradient(0.7, 0.0), SmoothConvex(1.0), 2)
    # Order 1: the score has the single term ||x0 - x2||^2.
    obj = problem.objective
    x0, x2 = problem.iterates[0], problem.iterates[2]
    from cyclesearch.symbolic import norm_sq

    assert obj.quad == norm_sq(x0 - x2).quad


def test_igd_adds_one_inexactness_row_per_step():
    problem = build_cycle_problem(inexact_gradient(0.7, 0.3), SmoothConvex(1.0), 2)
    side = [te for te in problem.inequalities if te.tag.startswith("inexact")]
    assert len(side) == 2


def test_tos_structure():
    K = 2
    problem = build_cycle_problem(three_operator_splitting(0.9, 1.1, 0.9), TOS_CLASSES, K)
    assert problem.ctx.basis_dim == 1 + 3 * K               # w0 plus (x, g, y) per step
    for name in ("A", "B", "f"):
        assert len(problem.families[name].records) == K
    lowered = lower_to_conic(problem)
    assert len(lowered.program.gauge_directions) == 3


def test_k_validation():
    with pytest.raises(ValueError, match=">= 2"):
        build_cycle_problem(heavy_ball(0.1, 0.1), SmoothConvex(1.0), 1)


def test_multi_family_requires_mapping():
    with pytest.raises(ValueError, match="mapping"):
        build_cycle_problem(three_operator_splitting(1.0, 1.0, 1.0), SmoothConvex(1.0), 2)
    with pytest.raises(ValueError, match="no class bound"):
        build_cycle_problem(
            three_operator_splitting(1.0, 1.0, 1.0), {"f": SmoothConvex(1.0)}, 2
        )


def test_structural_infeasibility_zero_step():
    with pytest.raises(StructurallyInfeasibleError):
        lower_to_conic(build_cycle_problem(inexact_gradient(0.0, 0.5), SmoothConvex(1.0), 2))


def test_objective_round_trip_evaluation():
    problem = build_cycle_problem(nesterov(0.8, 0.4), SmoothConvex(1.0), 3)
    lowered = lower_to_conic(problem)
    rng = np.random.default_rng(3)
    n, p = lowered.program.psd_dim, lowered.program.free_dim
    B = rng.normal(size=(n, n + 1))
    G = B @ B.T
    F = rng.normal(size=p)
    direct = evaluate(problem.objective, G, F)
    lowered_val = lowered.program.objective_value(G, F)
    assert direct == pytest.approx(lowered_val, rel=1e-12)
    for te, con in zip(
        [t for t in problem.inequalities], lowered.program.constraints[1:]
    ):
        lhs = float(np.tensordot(con.A, G)) + float(con.a @ F)
        assert evaluate(te.expr, G, F) == pytest.approx(lhs - (con.b - 0.0), rel=1e-10, abs=1e-10)


def _witness_from_trajectory(method, K, init, grad, value):
    """Realize a feasibility witness: run the method explicitly, scale the
    trajectory to unit first-step separation, and fill (G, F)."""
    problem = build_cycle_problem(method, SmoothConvex(1.0), K)
    oracle = FunctionOracle(gradient=grad, value=value)
    traj = simulate(method, oracle, init, K)
    sep = float(np.linalg.norm(traj.points[1] - traj.points[0]))
    s = 1.0 / sep
    d = len(traj.points[0])
    basis = np.zeros((problem.ctx.basis_dim, d))
    ell = method.order
    for t in range(ell):
        basis[t] = s * traj.points[t]
    F = np.zeros(problem.ctx.value_dim)
    for rec in problem.families["f"].records:
        pt = rec.point.realize(basis)
        g_idx = max(rec.oracle_vector.coeffs)
        basis[g_idx] = grad(pt)
        F[rec.function_value.index] = value(pt)
    return problem, basis @ basis.T, F


def test_feasibility_witness_satisfies_every_constraint():
    """An explicit trajectory of the method on a class member, scaled to
    unit separation, satisfies the whole lowered program."""
    method = heavy_ball(0.9, 0.35)
    problem, G, F = _witness_from_trajectory(
        method,
        K=3,
        init=[[1.0, 0.0], [0.4, 0.8]],
        grad=lambda x: 0.8 * x,
        value=lambda x: 0.4 * float(x @ x),
    )
    lowered = lower_to_conic(problem)
    for con in lowered.program.constraints:
        val = float(np.tensordot(con.A, G)) + float(con.a @ F)
        if con.tag == "normalization":
            assert val == pytest.approx(1.0, abs=1e-8)
        elif con.sense == ">=":
            assert val >= con.b - 1e-8, con.tag
        else:
            assert val == pytest.approx(con.b, abs=1e-8)
    assert np.linalg.eigvalsh(G)[0] >= -1e-10


def test_objective_nonnegative_on_psd_matrices():
    lowered = lower_to_conic(build_cycle_problem(heavy_ball(0.5, 0.5), SmoothConvex(1.0), 2))
    rng = np.random.default_rng(11)
    n = lowered.program.psd_dim
    for _ in range(20):
        B = rng.normal(size=(n, n))
        G = B @ B.T
        assert float(np.tensordot(lowered.program.C, G)) >= -1e-9


def test_feasible_set_is_semicone():
    """Scaling a feasible point by t >= 1 preserves every constraint."""
    method = heavy_ball(0.9, 0.35)
    problem, G, F = _witness_from_trajectory(
        method,
        K=2,
        init=[[1.0, 0.0], [0.4, 0.8]],
        grad=lambda x: 0.8 * x,
        value=lambda x: 0.4 * float(x @ x),
    )
    lowered = lower_to_conic(problem)
    for t in (1.0, 2.5, 10.0):
        for con in lowered.program.constraints:
            val = float(np.tensordot(con.A, t * G)) + float(con.a @ (t * F))
            if con.sense == ">=":
                assert val >= con.b - 1e-8
            else:
                assert val == pytest.approx(con.b * t, abs=1e-8)


def test_gauge_vectors_annihilate_constraint_functionals():
    """Declared gauge directions produce zero rank-one functional values on
    every constraint and the objective."""
    problem = build_cycle_problem(
        three_operator_splitting(0.9, 1.1, 0.9), TOS_CLASSES, 3
    )
    lowered = lower_to_conic(problem)
    for v in lowered.program.gauge_directions:
        D = np.outer(v, v)
        assert abs(float(np.tensordot(lowered.program.C, D))) < 1e-12
        for con in lowered.program.constraints:
            assert abs(float(np.tensordot(con.A, D))) < 1e-12, con.tag


def test_smooth_strongly_convex_class_binds():
    lowered = lower_to_conic(
        build_cycle_problem(heavy_ball(1 / 9, 4 / 9), SmoothStronglyConvex(1, 25), 2)
    )
    assert lowered.index_map.families["f"].spec == SmoothStronglyConvex(1, 25)
