"""Stationary first-order methods as step programs.

A method is described once and consumed two ways:

* symbolically, to unroll the update relations into a Gram-lifted cycle
  problem (``symbolic_step`` against a :class:`StepWorkspace`), and
* explicitly, to run trajectories on concrete functions/operators
  (``simulate_step`` against callback oracles).

The update map never sees an iteration counter, which is what makes a
prefix equality ``x_t = x_{t+K}`` for the first ``order`` indices extend to
full periodicity of the trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from .symbolic import FunctionValue, ScalarExpr, VectorExpr
from .function_classes import relative_inexactness_constraint

__all__ = [
    "OracleFamilyDecl",
    "SymState",
    "StepWorkspace",
    "MethodSpec",
    "TrajectoryState",
    "FunctionOracle",
    "SplittingOracle",
    "heavy_ball",
    "nesterov",
    "inexact_gradient",
    "three_operator_splitting",
    "simulate",
    "check_cycle_prefix",
    "GalleryFunction",
    "gallery_f_rho",
    "recognize_tuning",
]


@dataclass(frozen=True)
class OracleFamilyDecl:
    """One oracle the method calls, to be bound to a function/operator class.

    ``at_states`` marks families whose evaluations happen at the state
    sequence itself; the problem builder then guarantees a record at every
    state the cycle criterion involves, whether or not the update formula
    reads it (the first state of a two-step momentum method is the one
    case where it does not).
    """

    name: str
    carries_values: bool
    at_states: bool


@dataclass
class SymState:
    """A state of the unrolled symbolic trajectory plus its oracle cache."""

    point: VectorExpr
    index: int
    cache: dict[str, tuple[VectorExpr, FunctionValue | None]] = field(default_factory=dict)


class StepWorkspace(Protocol):
    """What a symbolic step may do while emitting one new iterate."""

    def oracle_at(self, state: SymState, family: str) -> tuple[VectorExpr, FunctionValue | None]:
        """Oracle output at a state point, memoized per (state, family)."""

    def fresh_oracle(self, family: str, point: VectorExpr) -> tuple[VectorExpr, FunctionValue | None]:
        """Oracle output at an arbitrary point (always a new record)."""

    def fresh_vector(self, label: str) -> VectorExpr:
        """A fresh free basis vector (auxiliary direction, resolvent output)."""

    def add_record(self, family: str, point: VectorExpr, vector: VectorExpr) -> None:
        """Register a derived (point, operator value) pair with a family."""

    def add_inequality(self, expr: ScalarExpr, tag: str) -> None:
        """Add a side constraint expr >= 0."""


@dataclass(frozen=True)
class MethodSpec:
    """A stationary first-order method of a fixed order (memory length).

    ``gauge_groups`` names sets of basis-label prefixes whose columns can
    all be shifted by one common vector without changing any constraint
    value or the score (translation of the trajectory is the universal
    example).  The conic solver may fix these gauges to cut solution-set
    flat directions; declaring them is purely an accuracy aid.
    """

    name: str
    order: int
    parameters: dict[str, float]
    families: tuple[OracleFamilyDecl, ...]
    symbolic_step: Callable[[StepWorkspace, Sequence[SymState]], VectorExpr]
    simulate_step: Callable[..., tuple[np.ndarray, dict | None]]
    state_symbol: str = "x"
    gauge_groups: tuple[tuple[str, ...], ...] = (("x",),)
    notes: dict[str, str] = field(default_factory=dict)

    def family(self, name: str) -> OracleFamilyDecl:
        for fam in self.families:
            if fam.name == name:
                return fam
        raise KeyError(name)


# ---------------------------------------------------------------------------
# Explicit oracles and trajectories


@dataclass
class FunctionOracle:
    """Callbacks for gradient-based methods on an explicit function."""

    gradient: Callable[[np.ndarray], np.ndarray]
    value: Callable[[np.ndarray], float] | None = None
    direction: Callable[[np.ndarray], np.ndarray] | None = None


@dataclass
class SplittingOracle:
    """Callbacks for resolvent-based splitting on explicit operators."""

    resolvent_b: Callable[[np.ndarray, float], np.ndarray]
    resolvent_a: Callable[[np.ndarray, float], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    value: Callable[[np.ndarray], float] | None = None


@dataclass
class TrajectoryState:
    """An explicit trajectory: points plus per-step oracle logs."""

    points: list[np.ndarray]
    infos: list[dict | None]

    def __post_init__(self):
        if len(self.points) != len(self.infos):
            raise ValueError("points and infos must stay aligned")
        dims = {p.shape for p in self.points}
        if len(dims) > 1:
            raise ValueError(f"trajectory mixes dimensions: {dims}")

    @property
    def length(self) -> int:
        return len(self.points)


def simulate(method: MethodSpec, oracle, init: Sequence, T: int) -> TrajectoryState:
    """Run ``T`` steps from ``order`` initial states on explicit callbacks."""
    pts = [np.atleast_1d(np.asarray(p, dtype=float)) for p in init]
    if len(pts) != method.order:
        raise ValueError(f"{method.name} needs {method.order} initial states, got {len(pts)}")
    infos: list[dict | None] = [None] * len(pts)
    for _ in range(T):
        window = pts[-method.order:]
        new, info = method.simulate_step(oracle, window)
        pts.append(np.atleast_1d(np.asarray(new, dtype=float)))
        infos.append(info)
    return TrajectoryState(pts, infos)


def check_cycle_prefix(traj: TrajectoryState, K: int, order: int, tol: float) -> bool:
    """Prefix cycle test: max over t < order of ||x_t - x_{t+K}|| <= tol.

    For a stationary method of this order, prefix equality implies the
    whole trajectory is K-periodic.
    """
    if K < 2:
        raise ValueError(f"cycle length must be >= 2, got {K}")
    if traj.length < order + K:
        raise ValueError(
            f"trajectory of length {traj.length} too short for order {order}, K={K}"
        )
    worst = max(
        float(np.linalg.norm(traj.points[t] - traj.points[t + K])) for t in range(order)
    )
    return worst <= tol


# ---------------------------------------------------------------------------
# The four methods


def heavy_ball(gamma: float, beta: float) -> MethodSpec:
    """Momentum update x+ = x + beta (x - x_prev) - gamma * grad f(x)."""

    def sym_step(ws: StepWorkspace, window: Sequence[SymState]) -> VectorExpr:
        prev, cur = window
        g, _ = ws.oracle_at(cur, "f")
        return (1.0 + beta) * cur.point - beta * prev.point - gamma * g

    def sim_step(oracle: FunctionOracle, window):
        prev, cur = window
        g = np.asarray(oracle.gradient(cur), dtype=float)
        return (1.0 + beta) * cur - beta * prev - gamma * g, {"g": g}

    return MethodSpec(
        name="heavy-ball",
        order=2,
        parameters={"gamma": gamma, "beta": beta},
        families=(OracleFamilyDecl("f", carries_values=True, at_states=True),),
        symbolic_step=sym_step,
        simulate_step=sim_step,
    )


def nesterov(gamma: float, beta: float) -> MethodSpec:
    """Accelerated gradient in its one-sequence form:
    y+ = (1 + beta)(y - gamma grad f(y)) - beta (y_prev - gamma grad f(y_prev))."""

    def sym_step(ws: StepWorkspace, window: Sequence[SymState]) -> VectorExpr:
        prev, cur = window
        g_prev, _ = ws.oracle_at(prev, "f")
        g_cur, _ = ws.oracle_at(cur, "f")
        return (1.0 + beta) * (cur.point - gamma * g_cur) - beta * (prev.point - gamma * g_prev)

    def sim_step(oracle: FunctionOracle, window):
        prev, cur = window
        g_prev = np.asarray(oracle.gradient(prev), dtype=float)
        g_cur = np.asarray(oracle.gradient(cur), dtype=float)
        new = (1.0 + beta) * (cur - gamma * g_cur) - beta * (prev - gamma * g_prev)
        return new, {"g": g_cur}

    return MethodSpec(
        name="nesterov",
        order=2,
        parameters={"gamma": gamma, "beta": beta},
        families=(OracleFamilyDecl("f", carries_values=True, at_states=True),),
        symbolic_step=sym_step,
        simulate_step=sim_step,
    )


def inexact_gradient(gamma: float, eps: float) -> MethodSpec:
    """x+ = x - gamma d with ||d - grad f(x)|| <= eps ||grad f(x)||."""
    if eps < 0:
        raise ValueError(f"relative error bound must be nonnegative, got {eps}")

    def sym_step(ws: StepWorkspace, window: Sequence[SymState]) -> VectorExpr:
        (cur,) = window
        g, _ = ws.oracle_at(cur, "f")
        if eps == 0:
            # A zero error bound pins d = g; keeping d as a variable would
            # leave the feasible set without interior.
            return cur.point - gamma * g
        d = ws.fresh_vector(f"d{cur.index}")
        ws.add_inequality(
            relative_inexactness_constraint(g, d, eps), f"inexact[{cur.index}]"
        )
        return cur.point - gamma * d

    def sim_step(oracle: FunctionOracle, window):
        (cur,) = window
        g = np.asarray(oracle.gradient(cur), dtype=float)
        d = np.asarray(
            oracle.direction(cur) if oracle.direction is not None else g, dtype=float
        )
        err, bound = float(np.linalg.norm(d - g)), eps * float(np.linalg.norm(g))
        # Small absolute slack: directions reconstructed from numeric
        # certificates carry rounding at the solver's precision.
        if err > bound + 1e-6 * (1.0 + float(np.linalg.norm(g))):
            raise ValueError(f"direction violates relative error bound: {err} > {bound}")
        return cur - gamma * d, {"g": g, "d": d}

    notes = {}
    if eps >= 1:
        notes["degenerate"] = "eps >= 1 admits d = 0, i.e. the method may stall anywhere"
    return MethodSpec(
        name="inexact-gradient",
        order=1,
        parameters={"gamma": gamma, "eps": eps},
        families=(OracleFamilyDecl("f", carries_values=True, at_states=True),),
        symbolic_step=sym_step,
        simulate_step=sim_step,
        notes=notes,
    )


def three_operator_splitting(gamma: float, beta: float, alpha: float) -> MethodSpec:
    """Davis-Yin style splitting for 0 in A x + B x + grad f(x).

    State sequence is w.  One step resolves x+ = J_{alpha B}(w), evaluates
    grad f(x+), resolves y+ = J_{alpha A}(2 x+ - w - (gamma/beta) grad f(x+)),
    then shifts w+ = w - beta (x+ - y+).  Resolvent outputs enter the basis;
    the operator values follow from the resolvent identity
    J_{alpha O}(v) = u  <=>  (v - u)/alpha in O(u).
    """
    if beta == 0:
        raise ValueError("beta = 0 degenerates the update to w+ = w")
    if alpha <= 0:
        raise ValueError(f"resolvent scale must be positive, got alpha={alpha}")
    if gamma < 0:
        raise ValueError(f"step-size must be nonnegative, got gamma={gamma}")

    def sym_step(ws: StepWorkspace, window: Sequence[SymState]) -> VectorExpr:
        (cur,) = window
        w = cur.point
        x = ws.fresh_vector(f"xr[{cur.index + 1}]")
        ws.add_record("B", x, (w - x) / alpha)
        g, _ = ws.fresh_oracle("f", x)
        y = ws.fresh_vector(f"yr[{cur.index + 1}]")
        ws.add_record("A", y, (2.0 * x - w - (gamma / beta) * g - y) / alpha)
        return w - beta * (x - y)

    def sim_step(oracle: SplittingOracle, window):
        (w,) = window
        x = np.asarray(oracle.resolvent_b(w, alpha), dtype=float)
        g = np.asarray(oracle.gradient(x), dtype=float)
        y = np.asarray(oracle.resolvent_a(2.0 * x - w - (gamma / beta) * g, alpha), dtype=float)
        return w - beta * (x - y), {"x": x, "y": y, "g": g}

    return MethodSpec(
        name="three-operator-splitting",
        order=1,
        parameters={"gamma": gamma, "beta": beta, "alpha": alpha},
        families=(
            OracleFamilyDecl("B", carries_values=False, at_states=False),
            OracleFamilyDecl("f", carries_values=True, at_states=False),
            OracleFamilyDecl("A", carries_values=False, at_states=False),
        ),
        symbolic_step=sym_step,
        simulate_step=sim_step,
        state_symbol="w",
        # Beyond translating the w sequence, two more shifts leave every
        # constraint value alone: moving all resolvent outputs together
        # (the operator values absorb it) and moving all gradients
        # together (A and the free function values absorb it).
        gauge_groups=(("w",), ("xr", "yr"), ("g_f",)),
    )


def recognize_tuning(method: MethodSpec, mu: float, L: float) -> str | None:
    """Label well-known parameter choices relative to class constants."""
    def rel(a: float, b: float) -> bool:
        return abs(a - b) <= 1e-9 * max(1.0, abs(a), abs(b))

    sqL, sqmu = math.sqrt(L), math.sqrt(mu)
    gamma = method.parameters.get("gamma")
    beta = method.parameters.get("beta")
    if gamma is None or beta is None:
        return None
    if method.name == "heavy-ball":
        if rel(gamma, (2.0 / (sqL + sqmu)) ** 2) and rel(beta, ((sqL - sqmu) / (sqL + sqmu)) ** 2):
            return "chebyshev-limit accelerated tuning"
    if method.name == "nesterov":
        if rel(gamma, 1.0 / L) and rel(beta, (sqL - sqmu) / (sqL + sqmu)):
            return "accelerated tuning (optimal quadratic rate)"
    return None


# ---------------------------------------------------------------------------
# Analytic gallery: the piecewise-cubic whose unit-step gradient dynamic is
# the logistic map on [0, 1]


@dataclass(frozen=True)
class GalleryFunction:
    """Explicit (1+rho)-smooth test function with closed-form derivative."""

    rho: float
    value: Callable[[float], float]
    gradient: Callable[[float], float]

    @property
    def smoothness(self) -> float:
        return 1.0 + self.rho


def gallery_f_rho(rho: float) -> GalleryFunction:
    """Three-piece even function f_rho; on [0, 1], x - f'(x) = rho x (1 - x)."""
    if not 0 < rho <= 4:
        raise ValueError(f"rho must lie in (0, 4], got {rho}")
    c1 = (rho - 1.0) ** 3 / (6.0 * rho**2)
    c2 = ((rho - 1.0) ** 3 + 4.0 * rho**3) / (6.0 * rho**2)
    c3 = (4.0 * (rho - 1.0) ** 3 - 11.0 * rho**3) / (24.0 * rho**2)

    def value(x: float) -> float:
        a = abs(float(x))
        if a <= 1.0:
            return rho / 3.0 * a**3 + (1.0 - rho) / 2.0 * a**2 + c1
        if a <= 1.5:
            return -rho / 3.0 * a**3 + (1.0 + 3.0 * rho) / 2.0 * a**2 - 2.0 * rho * a + c2
        return 0.5 * a**2 + rho / 4.0 * a + c3

    def gradient(x: float) -> float:
        x = float(x)
        s = 1.0 if x >= 0 else -1.0
        a = abs(x)
        if a <= 1.0:
            return s * (rho * a**2 + (1.0 - rho) * a)
        if a <= 1.5:
            return s * (-rho * a**2 + (1.0 + 3.0 * rho) * a - 2.0 * rho)
        return s * (a + rho / 4.0)

    return GalleryFunction(rho=rho, value=value, gradient=gradient)
