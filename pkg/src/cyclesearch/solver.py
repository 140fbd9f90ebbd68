"""Primal-dual interior-point solver for small dense conic programs.

Solves
    min <C, X> + c.F   s.t.   <A_i, X> + a_i.F  (= or >=)  b_i,   X PSD,
with free variables F, by a path-following method on the product cone
PSD(n) x R+^q after giving every inequality a nonnegative slack:

    <A_i, X> + a_i.F - s_k = b_i,   s >= 0.

Scaling is Nesterov-Todd on both blocks, steps are Mehrotra
predictor-corrector with a 0.98 fraction-to-boundary rule, and each Newton
solve reduces to a dense Cholesky of the Schur complement (free variables
are eliminated through a small least-squares subproblem on top of it).
Everything is deterministic for fixed inputs and options.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .builder import ConicProgram

__all__ = ["SolverOptions", "ConicSolution", "ResidualReport", "solve", "certify"]


@dataclass
class SolverOptions:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iters: int = 200
    frac_to_boundary: float = 0.98
    restart_on_stall: bool = True
    log_fn: Callable[[str], None] | None = None


@dataclass
class ConicSolution:
    """Best primal-dual iterate with certified residual norms."""

    G: np.ndarray
    F: np.ndarray
    slacks: np.ndarray
    y: np.ndarray
    Z: np.ndarray
    w: np.ndarray
    primal_objective: float
    dual_objective: float
    status: str  # Optimal | PrimalInfeasible | DualInfeasible | SlowProgress | IterationLimit
    iterations: int
    primal_residual: float
    dual_residual: float
    relative_gap: float
    mu: float
    log: list[dict] = field(default_factory=list)
    restarts: int = 0


class _Workspace:
    """Problem data flattened for fast per-iteration assembly.

    ``gap_scale`` restores original objective units inside the duality-gap
    measure when the objective was normalized during presolve, so that the
    stopping test is invariant to that normalization.
    """

    gap_scale: float = 1.0

    def __init__(self, prog: ConicProgram):
        self.n = prog.psd_dim
        self.p = prog.free_dim
        self.m = len(prog.constraints)
        if self.m == 0:
            raise ValueError("structurally empty problem: no constraints")
        if self.n == 0:
            raise ValueError("empty PSD block")
        self.A = np.stack([con.A for con in prog.constraints])          # (m, n, n)
        self.A_mat = self.A.reshape(self.m, self.n * self.n)
        self.Af = (
            np.stack([con.a for con in prog.constraints])
            if self.p
            else np.zeros((self.m, 0))
        )
        self.b = np.array([con.b for con in prog.constraints])
        self.ineq_rows = np.array(
            [i for i, con in enumerate(prog.constraints) if con.sense == ">="], dtype=int
        )
        self.q = len(self.ineq_rows)
        self.C = prog.C
        self.c = prog.c
        self.obj_const = prog.objective_const
        self.b_norm = float(np.linalg.norm(self.b))
        self.data_norm = float(np.sqrt(np.linalg.norm(self.C) ** 2 + np.linalg.norm(self.c) ** 2))

    def apply_A(self, X: np.ndarray, F: np.ndarray) -> np.ndarray:
        out = self.A_mat @ X.ravel()
        if self.p:
            out += self.Af @ F
        return out

    def apply_At(self, y: np.ndarray) -> np.ndarray:
        return np.tensordot(y, self.A, axes=1)


def _nt_scaling(X: np.ndarray, Z: np.ndarray):
    """NT scaling point of the PSD block: returns (R, R_inv, lam) with
    R^-1 X R^-T = R^T Z R = diag(lam)."""
    L_x = np.linalg.cholesky(X)
    L_z = np.linalg.cholesky(Z)
    U, sig, Vt = np.linalg.svd(L_z.T @ L_x)
    sq = np.sqrt(sig)
    R = (L_x @ Vt.T) / sq
    L_x_inv = sla.solve_triangular(L_x, np.eye(X.shape[0]), lower=True)
    R_inv = (Vt * sq[:, None]) @ L_x_inv
    return R, R_inv, sig


def _step_to_boundary(lam: np.ndarray, delta_scaled: np.ndarray) -> float:
    """sup alpha with diag(lam) + alpha * delta_scaled PSD (lam > 0)."""
    scale = np.sqrt(lam)
    M = delta_scaled / np.outer(scale, scale)
    emin = float(np.linalg.eigvalsh(M)[0])
    return np.inf if emin >= -1e-18 else 1.0 / (-emin)


def _step_to_boundary_nn(lam: np.ndarray, delta_scaled: np.ndarray) -> float:
    if lam.size == 0:
        return np.inf
    ratios = delta_scaled / lam
    rmin = float(ratios.min())
    return np.inf if rmin >= -1e-18 else 1.0 / (-rmin)


def _jordan_sym(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return 0.5 * (P @ Q + Q @ P)


class _NewtonFactor:
    """Cholesky of the Schur complement M = A W A^T plus free-block handling.

    One round of iterative refinement keeps the augmented solve accurate
    when M turns ill-conditioned near the central path's end.
    """

    def __init__(self, ws: _Workspace, W: np.ndarray, d2: np.ndarray):
        m, n = ws.m, ws.n
        WAW = np.matmul(W[None, :, :], np.matmul(ws.A, W[None, :, :]))
        M = ws.A_mat @ WAW.reshape(m, n * n).T
        M = 0.5 * (M + M.T)
        if ws.q:
            M[ws.ineq_rows, ws.ineq_rows] += d2
        ridge = 0.0
        base = max(np.trace(M) / m, 1e-30)
        for _ in range(6):
            try:
                self.M_fact = sla.cho_factor(
                    M + ridge * np.eye(m) if ridge else M, lower=True
                )
                break
            except np.linalg.LinAlgError:
                ridge = base * 1e-13 if ridge == 0.0 else ridge * 100.0
        else:
            raise np.linalg.LinAlgError("Schur complement not positive definite")
        self.ws = ws
        self.M = M
        if ws.p:
            self.U = sla.cho_solve(self.M_fact, ws.Af)
            S = ws.Af.T @ self.U
            S = 0.5 * (S + S.T)
            try:
                self.S_fact = sla.cho_factor(S, lower=True)
                self.S_solve = lambda r: sla.cho_solve(self.S_fact, r)
            except np.linalg.LinAlgError:
                self.S_solve = lambda r: np.linalg.lstsq(S, r, rcond=None)[0]

    def _augmented(self, rhs: np.ndarray, r_f: np.ndarray):
        u = sla.cho_solve(self.M_fact, rhs)
        if self.ws.p:
            dF = self.S_solve(self.ws.Af.T @ u - r_f)
            dy = u - self.U @ dF
        else:
            dF = np.zeros(0)
            dy = u
        return dy, dF

    def solve(self, rhs: np.ndarray, r_f: np.ndarray):
        dy, dF = self._augmented(rhs, r_f)
        res1 = rhs - self.M @ dy - (self.ws.Af @ dF if self.ws.p else 0.0)
        res2 = r_f - self.ws.Af.T @ dy if self.ws.p else np.zeros(0)
        ey, eF = self._augmented(res1, res2)
        return dy + ey, dF + eF


def _psd_kernel(prog: ConicProgram) -> np.ndarray | None:
    """Orthonormal basis of the complement of the joint null space of C and
    every A_i, or None when that null space is trivial.

    Cycle problems have such a space: translating every point by the same
    vector changes no constraint and no score, which shows up as a common
    null direction of all data matrices.  Reducing to its complement is
    lossless and removes the degeneracy (without it the dual has no
    strictly feasible point and the path-following endgame suffers).
    """
    n = prog.psd_dim
    N = prog.C @ prog.C
    for con in prog.constraints:
        N = N + con.A @ con.A
    evals, vecs = np.linalg.eigh(N)
    lam_max = float(evals[-1])
    if lam_max <= 0:
        return None
    cand = [i for i in range(n) if evals[i] <= 1e-11 * lam_max]
    kernel = []
    mats = [prog.C] + [con.A for con in prog.constraints]
    scale = max(float(np.max(np.abs(M))) for M in mats)
    for i in cand:
        v = vecs[:, i]
        if all(float(np.max(np.abs(M @ v))) <= 1e-10 * max(scale, 1.0) for M in mats):
            kernel.append(i)
    if not kernel or len(kernel) >= n:
        return None
    keep = [i for i in range(n) if i not in kernel]
    return vecs[:, keep]


def _free_kernel(prog: ConicProgram) -> np.ndarray | None:
    """Same reduction for the free block: directions no constraint or
    objective coefficient touches (e.g. adding one constant to every
    function value of a cycle problem)."""
    p = prog.free_dim
    if p == 0:
        return None
    rows = np.vstack([prog.c] + [con.a for con in prog.constraints])
    _, svals, Vt = np.linalg.svd(rows, full_matrices=True)
    smax = float(svals[0]) if svals.size else 0.0
    if smax <= 0:
        return None
    scale = max(1.0, float(np.max(np.abs(rows))))
    kernel = []
    for i in range(p):
        if i >= len(svals) or svals[i] <= 1e-11 * smax:
            v = Vt[i]
            if float(np.max(np.abs(rows @ v))) <= 1e-10 * scale:
                kernel.append(i)
    if not kernel or len(kernel) >= p:
        return None
    keep = [i for i in range(p) if i not in kernel]
    return Vt[keep].T


def _gauge_complement(prog: ConicProgram) -> np.ndarray | None:
    """Orthonormal complement of the declared gauge directions."""
    if not prog.gauge_directions:
        return None
    V = np.stack(prog.gauge_directions).T
    U, svals, _ = np.linalg.svd(V, full_matrices=True)
    rank = int(np.sum(svals > 1e-12 * max(1.0, float(svals[0]))))
    if rank == 0 or rank >= prog.psd_dim:
        return None
    return U[:, rank:]


def _prepare(prog: ConicProgram):
    """Gauge fixing, kernel reductions, row/objective equilibration.

    Returns (prepared program, Q_psd, Q_free, row_scales, obj_scale); the
    Q factors are None when no reduction applies.
    """
    from .builder import LinearConstraint

    Q = _gauge_complement(prog)
    work = prog
    if Q is not None:
        work = ConicProgram(
            psd_dim=Q.shape[1],
            free_dim=prog.free_dim,
            C=Q.T @ prog.C @ Q,
            c=prog.c,
            constraints=[
                LinearConstraint(Q.T @ con.A @ Q, con.a, con.b, con.sense, con.tag)
                for con in prog.constraints
            ],
        )
    Qk = _psd_kernel(work)
    if Qk is not None:
        Q = Q @ Qk if Q is not None else Qk
    Qf = _free_kernel(prog)
    C = Q.T @ prog.C @ Q if Q is not None else prog.C
    c = prog.c @ Qf if Qf is not None else prog.c
    obj_scale = max(1.0, float(np.linalg.norm(C)), float(np.linalg.norm(c)) if c.size else 0.0)
    cons = []
    row_scales = np.empty(len(prog.constraints))
    for i, con in enumerate(prog.constraints):
        A = Q.T @ con.A @ Q if Q is not None else con.A
        a = con.a @ Qf if Qf is not None else con.a
        r = max(1e-8, float(np.linalg.norm(A)), float(np.linalg.norm(a)) if a.size else 0.0)
        row_scales[i] = r
        cons.append(LinearConstraint(A / r, a / r, con.b / r, con.sense, con.tag))
    prepared = ConicProgram(
        psd_dim=C.shape[0],
        free_dim=c.shape[0],
        C=C / obj_scale,
        c=c / obj_scale,
        constraints=cons,
        objective_const=0.0,
    )
    return prepared, Q, Qf, row_scales, obj_scale


def solve(prog: ConicProgram, opts: SolverOptions | None = None) -> ConicSolution:
    """Presolve (gauge fixing, kernel reduction, equilibration), iterate, map back."""
    opts = opts or SolverOptions()
    prepared, Q, Qf, row_scales, obj_scale = _prepare(prog)
    sol = _solve_full(prepared, opts, gap_scale=obj_scale)

    if Q is not None:
        sol.G = Q @ sol.G @ Q.T
    if Qf is not None:
        sol.F = Qf @ sol.F
    sol.Z = obj_scale * (Q @ sol.Z @ Q.T if Q is not None else sol.Z)
    sol.y = obj_scale * sol.y / row_scales
    ineq = [i for i, con in enumerate(prog.constraints) if con.sense == ">="]
    sol.w = obj_scale * sol.w / row_scales[ineq]
    sol.slacks = sol.slacks * row_scales[ineq]
    sol.primal_objective = float(
        np.tensordot(prog.C, sol.G) + prog.c @ sol.F + prog.objective_const
    )
    sol.dual_objective = float(
        np.array([con.b for con in prog.constraints]) @ sol.y + prog.objective_const
    )
    return sol


def _solve_full(prog: ConicProgram, opts: SolverOptions, gap_scale: float = 1.0) -> ConicSolution:
    ws = _Workspace(prog)
    ws.gap_scale = gap_scale
    n, q, m, p = ws.n, ws.q, ws.m, ws.p

    tau_p = float(np.sqrt(max(1.0, np.max(np.abs(ws.b)) if m else 1.0)))
    tau_d = float(np.sqrt(max(1.0, np.max(np.abs(ws.C)) if ws.C.size else 1.0,
                              np.max(np.abs(ws.c)) if p else 1.0)))

    best: ConicSolution | None = None
    restarts = 0
    log: list[dict] = []

    def make_solution(state, status, iters) -> ConicSolution:
        X, s, F, y, Z, w = state
        pobj = float(np.tensordot(ws.C, X) + ws.c @ F + ws.obj_const)
        dobj = float(ws.b @ y + ws.obj_const)
        pres, dres, gap, mu = _residual_norms(ws, X, s, F, y, Z, w)
        return ConicSolution(
            G=X, F=F, slacks=s, y=y, Z=Z, w=w,
            primal_objective=pobj, dual_objective=dobj,
            status=status, iterations=iters,
            primal_residual=pres, dual_residual=dres, relative_gap=gap, mu=mu,
            log=log, restarts=restarts,
        )

    scale = 1.0
    iters_total = 0
    while True:
        X = tau_p * scale * np.eye(n)
        s = tau_p * scale * np.ones(q)
        F = np.zeros(p)
        y = np.zeros(m)
        Z = tau_d * scale * np.eye(n)
        w = tau_d * scale * np.ones(q)

        state, status, iters_total = _iterate(ws, opts, (X, s, F, y, Z, w), log, iters_total)
        cand = make_solution(state, "SlowProgress" if status == "restart" else status, iters_total)
        if best is None or _merit(cand) < _merit(best):
            best = cand
        if status == "restart":
            restarts += 1
            scale = 100.0
            continue
        # Report the best iterate seen; the stopping reason of the final run
        # stands unless the best iterate meets the tolerances after all.
        if (best.primal_residual <= opts.feas_tol and best.dual_residual <= opts.feas_tol
                and best.relative_gap <= opts.gap_tol):
            best.status = "Optimal"
        elif best.status != "Optimal":
            best.status = status
        best.restarts = restarts
        return best


def _merit(sol: ConicSolution) -> float:
    return max(sol.primal_residual, sol.dual_residual, sol.relative_gap)


def _residual_norms(ws, X, s, F, y, Z, w):
    r_p = ws.b - ws.apply_A(X, F)
    if ws.q:
        r_p[ws.ineq_rows] += s
    R_d = ws.C - ws.apply_At(y) - Z
    r3 = y[ws.ineq_rows] - w if ws.q else np.zeros(0)
    r_f = ws.c - ws.Af.T @ y if ws.p else np.zeros(0)
    pres = float(np.linalg.norm(r_p)) / (1.0 + ws.b_norm)
    dres = float(
        np.sqrt(np.linalg.norm(R_d) ** 2 + np.linalg.norm(r3) ** 2 + np.linalg.norm(r_f) ** 2)
    ) / (1.0 + ws.data_norm)
    pobj = ws.gap_scale * float(np.tensordot(ws.C, X) + ws.c @ F)
    dobj = ws.gap_scale * float(ws.b @ y)
    gap = abs(pobj - dobj) / (1.0 + max(abs(pobj), abs(dobj)))
    mu = (float(np.tensordot(X, Z)) + float(s @ w)) / (ws.n + ws.q)
    return pres, dres, gap, mu


def _check_infeasibility(ws, X, s, F, y) -> str | None:
    by = float(ws.b @ y)
    ynorm = float(np.linalg.norm(y))
    if by > 1e-6 * max(1.0, ynorm):
        yh = y / by
        Zh = -ws.apply_At(yh)
        viol = -float(np.linalg.eigvalsh(Zh)[0])
        if ws.q:
            viol = max(viol, -float(np.min(yh[ws.ineq_rows])))
        if ws.p:
            viol = max(viol, float(np.max(np.abs(ws.Af.T @ yh))))
        if viol <= 1e-9 * max(1.0, float(np.linalg.norm(yh))):
            return "PrimalInfeasible"
    obj = float(np.tensordot(ws.C, X) + ws.c @ F)
    unorm = max(float(np.linalg.norm(X)), float(np.linalg.norm(F)) if ws.p else 0.0)
    if obj < -1e-6 * max(1.0, unorm):
        Xh, sh, Fh = X / -obj, s / -obj, F / -obj
        ray = ws.apply_A(Xh, Fh)
        if ws.q:
            ray[ws.ineq_rows] -= sh
        if float(np.max(np.abs(ray))) <= 1e-9 * max(1.0, float(np.linalg.norm(Xh))):
            return "DualInfeasible"
    return None


def _iterate(ws, opts, state, log, iters_done):
    """Main loop; returns (best state seen, status, total iterations)."""
    X, s, F, y, Z, w = state
    n, q = ws.n, ws.q
    stall_count = 0
    best_state = state
    best_merit = np.inf
    best_parts = np.full(3, np.inf)
    best_age = 0

    for it in range(iters_done, opts.max_iters):
        pres, dres, gap, mu = _residual_norms(ws, X, s, F, y, Z, w)
        merit = max(pres, dres, gap)
        parts = np.array([pres, dres, gap])
        if np.any(parts <= 0.9 * best_parts):
            best_age = 0
        else:
            best_age += 1
        best_parts = np.minimum(best_parts, parts)
        if merit < best_merit:
            best_merit = merit
            best_state = (X, s, F, y, Z, w)
        if opts.log_fn is not None:
            opts.log_fn(
                f"iter {it:3d}  mu {mu:9.3e}  pres {pres:9.3e}  "
                f"dres {dres:9.3e}  gap {gap:9.3e}"
            )
        log.append({"iter": it, "mu": mu, "pres": pres, "dres": dres, "gap": gap,
                    "pobj": float(np.tensordot(ws.C, X) + ws.c @ F),
                    "dobj": float(ws.b @ y), "stalled": False})

        if pres <= opts.feas_tol and dres <= opts.feas_tol and gap <= opts.gap_tol:
            return (X, s, F, y, Z, w), "Optimal", it
        verdict = _check_infeasibility(ws, X, s, F, y)
        if verdict is not None:
            return (X, s, F, y, Z, w), verdict, it
        if stall_count >= 5 or best_age >= 15:
            # No meaningful progress; hand back the best iterate.
            status = "restart" if opts.restart_on_stall and iters_done == 0 else "SlowProgress"
            return best_state, status, it

        try:
            R, R_inv, lam = _nt_scaling(X, Z)
            W = R @ R.T
            d = np.sqrt(s / w) if q else np.zeros(0)
            lam_nn = np.sqrt(s * w) if q else np.zeros(0)
            factor = _NewtonFactor(ws, W, d * d)
        except np.linalg.LinAlgError:
            status = "restart" if opts.restart_on_stall and iters_done == 0 else "SlowProgress"
            return best_state, status, it

        r_p = ws.b - ws.apply_A(X, F)
        if q:
            r_p[ws.ineq_rows] += s
        R_d = ws.C - ws.apply_At(y) - Z
        r3 = y[ws.ineq_rows] - w if q else np.zeros(0)
        r_f = ws.c - ws.Af.T @ y if ws.p else np.zeros(0)

        lam_sum = np.add.outer(lam, lam)
        WRW = W @ R_d @ W

        def newton(ds_psd, ds_nn):
            """Directions for scaled complementarity residuals (ds_psd, ds_nn)."""
            D_psd = -2.0 * ds_psd / lam_sum
            D_nn = -ds_nn / lam_nn if q else np.zeros(0)
            T1 = R @ D_psd @ R.T
            rhs = r_p - ws.A_mat @ (T1 - WRW).ravel()
            if q:
                rhs[ws.ineq_rows] += d * D_nn - (d * d) * r3
            dy, dF = factor.solve(rhs, r_f)
            dZ = R_d - ws.apply_At(dy)
            dZ = 0.5 * (dZ + dZ.T)
            dX = T1 - W @ dZ @ W
            dX = 0.5 * (dX + dX.T)
            if q:
                dw = r3 + dy[ws.ineq_rows]
                ds = d * D_nn - (d * d) * dw
            else:
                dw = np.zeros(0)
                ds = np.zeros(0)
            dX_sc = R_inv @ dX @ R_inv.T
            dX_sc = 0.5 * (dX_sc + dX_sc.T)
            dZ_sc = R.T @ dZ @ R
            dZ_sc = 0.5 * (dZ_sc + dZ_sc.T)
            return dX, ds, dF, dy, dZ, dw, dX_sc, dZ_sc, ds / d if q else ds, d * dw

        # Predictor: aim at mu = 0 with the plain linearization.
        aff = newton(np.diag(lam * lam), lam_nn * lam_nn)
        aXs, aZs, ass, aws = aff[6], aff[7], aff[8], aff[9]
        ap = min(1.0, _step_to_boundary(lam, aXs), _step_to_boundary_nn(lam_nn, ass))
        ad = min(1.0, _step_to_boundary(lam, aZs), _step_to_boundary_nn(lam_nn, aws))
        mu_aff = (
            float(np.tensordot(np.diag(lam) + ap * aXs, np.diag(lam) + ad * aZs))
            + float((lam_nn + ap * ass) @ (lam_nn + ad * aws))
        ) / (n + q)
        sigma = min(0.9, max((max(mu_aff, 0.0) / mu) ** 3, 1e-10)) if mu > 0 else 0.0

        # Corrector with Mehrotra's second-order term.
        ds_psd = np.diag(lam * lam) + _jordan_sym(aXs, aZs) - sigma * mu * np.eye(n)
        ds_nn = lam_nn * lam_nn + ass * aws - sigma * mu * np.ones(q) if q else np.zeros(0)
        cor = newton(ds_psd, ds_nn)
        dX, ds, dF, dy, dZ, dw, dXs, dZs, dss, dws = cor

        f2b = opts.frac_to_boundary
        alpha_p = min(1.0, f2b * min(_step_to_boundary(lam, dXs), _step_to_boundary_nn(lam_nn, dss)))
        alpha_d = min(1.0, f2b * min(_step_to_boundary(lam, dZs), _step_to_boundary_nn(lam_nn, dws)))
        mu_new = (
            float(np.tensordot(np.diag(lam) + alpha_p * dXs, np.diag(lam) + alpha_d * dZs))
            + float((lam_nn + alpha_p * dss) @ (lam_nn + alpha_d * dws))
        ) / (n + q)
        stalled = mu_new > 0.99 * mu and min(alpha_p, alpha_d) < 0.1
        log[-1]["alpha_p"] = alpha_p
        log[-1]["alpha_d"] = alpha_d
        log[-1]["sigma"] = sigma
        log[-1]["stalled"] = stalled
        stall_count = stall_count + 1 if stalled else 0

        # Feasibility must not regress: late-stage directions on degenerate
        # problems can be large enough for rounding to wreck the residuals.
        accepted = False
        for _ in range(4):
            Xn = X + alpha_p * dX
            Xn = 0.5 * (Xn + Xn.T)
            sn = s + alpha_p * ds
            Fn = F + alpha_p * dF
            yn = y + alpha_d * dy
            Zn = Z + alpha_d * dZ
            Zn = 0.5 * (Zn + Zn.T)
            wn = w + alpha_d * dw
            presn, dresn, _, _ = _residual_norms(ws, Xn, sn, Fn, yn, Zn, wn)
            cushion = max(1.2 * max(pres, dres), 0.05 * gap, opts.feas_tol)
            if max(presn, dresn) <= cushion:
                accepted = True
                break
            alpha_p *= 0.5
            alpha_d *= 0.5
        if not accepted:
            status = "restart" if opts.restart_on_stall and iters_done == 0 else "SlowProgress"
            return best_state, status, it
        X, s, F, y, Z, w = Xn, sn, Fn, yn, Zn, wn

    return best_state, "IterationLimit", opts.max_iters


@dataclass
class ResidualReport:
    """Constraint-by-constraint recheck, independent of solver internals."""

    tags: list[str]
    violations: np.ndarray
    min_eig_G: float
    duality_gap: float
    dual_cone_violation: float
    max_violation: float

    def violated(self, tol: float) -> list[str]:
        return [t for t, v in zip(self.tags, self.violations) if v > tol]


def certify(sol: ConicSolution, prog: ConicProgram) -> ResidualReport:
    """Recompute all residuals of a solution directly from the program data."""
    G, F, y = sol.G, sol.F, sol.y
    tags, viol = [], []
    for con in prog.constraints:
        val = float(np.tensordot(con.A, G)) + float(con.a @ F)
        v = abs(val - con.b) if con.sense == "=" else max(0.0, con.b - val)
        tags.append(con.tag)
        viol.append(v)
    eigs = np.linalg.eigvalsh(0.5 * (G + G.T))
    min_eig = float(eigs[0])
    pobj = prog.objective_value(G, F)
    dobj = float(np.array([c.b for c in prog.constraints]) @ y) + prog.objective_const
    Zd = prog.C - np.tensordot(y, np.stack([c.A for c in prog.constraints]), axes=1)
    dual_viol = max(0.0, -float(np.linalg.eigvalsh(0.5 * (Zd + Zd.T))[0]))
    for con, yi in zip(prog.constraints, y):
        if con.sense == ">=":
            dual_viol = max(dual_viol, -float(yi))
    violations = np.array(viol)
    neg_eig = max(0.0, -min_eig)
    return ResidualReport(
        tags=tags,
        violations=violations,
        min_eig_G=min_eig,
        duality_gap=abs(pobj - dobj),
        dual_cone_violation=dual_viol,
        max_violation=float(max(violations.max(initial=0.0), neg_eig)),
    )
