"""Planted-solution SDP generator: problems with a known exact optimum.

Plants a strictly complementary primal-dual pair (X*, y*, S*) with
X* S* = 0 and rank(X*) + rank(S*) = n, then reads off C, c, b so that
(X*, F*, y*) is optimal with value b . y* exactly (weak duality makes any
feasible point at least that; X* attains it).
"""

from __future__ import annotations

import numpy as np

from cyclesearch.builder import ConicProgram, LinearConstraint


def planted_sdp(
    n: int,
    m: int,
    p: int = 0,
    ineq_fraction: float = 0.5,
    seed: int = 0,
) -> tuple[ConicProgram, float]:
    """Returns (program, exact optimal value)."""
    rng = np.random.default_rng(seed)
    r = max(1, n // 2)
    V = np.linalg.qr(rng.normal(size=(n, n)))[0]
    lam_x = np.concatenate([rng.uniform(0.5, 2.0, r), np.zeros(n - r)])
    lam_s = np.concatenate([np.zeros(r), rng.uniform(0.5, 2.0, n - r)])
    X_star = V @ np.diag(lam_x) @ V.T
    S_star = V @ np.diag(lam_s) @ V.T

    y_star = rng.normal(size=m)
    n_ineq = int(ineq_fraction * m)
    senses = [">="] * n_ineq + ["="] * (m - n_ineq)
    F_star = rng.normal(size=p)
    slack = np.zeros(m)
    A_list, a_list = [], []
    for i in range(m):
        A = rng.normal(size=(n, n))
        A_list.append(0.5 * (A + A.T))
        a_list.append(rng.normal(size=p))
        if senses[i] == ">=":
            if rng.uniform() < 0.5:
                y_star[i] = abs(y_star[i])  # active constraint
            else:
                y_star[i] = 0.0
                slack[i] = rng.uniform(0.1, 1.0)  # inactive, zero multiplier

    C = sum(y_star[i] * A_list[i] for i in range(m)) + S_star
    c = (
        sum(y_star[i] * a_list[i] for i in range(m))
        if p
        else np.zeros(0)
    )
    b = np.array(
        [
            float(np.tensordot(A_list[i], X_star)) + float(a_list[i] @ F_star) - slack[i]
            for i in range(m)
        ]
    )
    constraints = [
        LinearConstraint(A_list[i], a_list[i], b[i], senses[i], f"planted[{i}]")
        for i in range(m)
    ]
    prog = ConicProgram(psd_dim=n, free_dim=p, C=C, c=np.asarray(c), constraints=constraints)
    return prog, float(b @ y_star)
