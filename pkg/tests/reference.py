"""External reference solves through cvxpy (test infrastructure only)."""

from __future__ import annotations

import numpy as np
import cvxpy as cvx

from cyclesearch.builder import ConicProgram


def solve_with_cvxpy(prog: ConicProgram, solver: str = "CLARABEL", tight: bool = True):
    """Optimal value of the program by an external conic solver."""
    G = cvx.Variable((prog.psd_dim, prog.psd_dim), symmetric=True)
    F = cvx.Variable(prog.free_dim) if prog.free_dim else None
    cons = [G >> 0]
    for con in prog.constraints:
        expr = cvx.trace(con.A @ G)
        if prog.free_dim:
            expr = expr + con.a @ F
        cons.append(expr == con.b if con.sense == "=" else expr >= con.b)
    obj = cvx.trace(prog.C @ G) + (prog.c @ F if prog.free_dim else 0)
    problem = cvx.Problem(cvx.Minimize(obj), cons)
    kwargs = {}
    if solver == "CLARABEL" and tight:
        kwargs = dict(tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11)
    problem.solve(solver=getattr(cvx, solver), **kwargs)
    return float(problem.value) + prog.objective_const, problem.status


def solve_sdpa_file_with_cvxpy(path) -> float:
    """Solve the SDPA dual pair from a .dat-s file; returns the value of
    the original minimization (the negative of the SDPA optimum)."""
    from cyclesearch.sdpa import read_sdpa

    b, sizes, mats = read_sdpa(path)
    m = len(b)
    blocks = []
    cons = []
    for s in sizes:
        dim = abs(s)
        if s > 0:
            Y = cvx.Variable((dim, dim), symmetric=True)
            cons.append(Y >> 0)
        else:
            y = cvx.Variable(dim, nonneg=True)
            Y = cvx.diag(y)
        blocks.append(Y)
    obj = sum(cvx.trace(mats[0][k] @ blocks[k]) for k in range(len(sizes)))
    for i in range(m):
        cons.append(
            sum(cvx.trace(mats[i + 1][k] @ blocks[k]) for k in range(len(sizes))) == b[i]
        )
    problem = cvx.Problem(cvx.Maximize(obj), cons)
    problem.solve(solver=cvx.CLARABEL, tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11)
    return -float(problem.value)
