"""Interpolation constraints for the supported function and operator classes.

Each class is described by the inequalities a finite set of evaluations
(point, oracle vector, optional value) must satisfy for some member of the
class to interpolate them.  Constraints are emitted as :class:`ScalarExpr`
objects, each understood as ``expr >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .symbolic import FunctionValue, ScalarExpr, VectorExpr, inner_product, norm_sq

__all__ = [
    "SmoothConvex",
    "SmoothStronglyConvex",
    "MonotoneOperator",
    "CocoerciveOperator",
    "ClassSpec",
    "EvaluationRecord",
    "interpolation_constraints",
    "relative_inexactness_constraint",
]


@dataclass(frozen=True)
class SmoothConvex:
    """L-smooth convex functions; oracle returns (gradient, value)."""

    L: float

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError(f"smoothness constant must be positive, got L={self.L}")

    carries_values = True
    # Scaling (x, g, f) -> (cx, cg, c^2 f) maps interpolable data to
    # interpolable data, which is what makes the unit-separation
    # normalization of the cycle problem lossless.
    homogeneous = True


@dataclass(frozen=True)
class SmoothStronglyConvex:
    """mu-strongly convex, L-smooth functions, 0 <= mu < L."""

    mu: float
    L: float

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError(f"smoothness constant must be positive, got L={self.L}")
        if not 0 <= self.mu < self.L:
            raise ValueError(f"need 0 <= mu < L, got mu={self.mu}, L={self.L}")

    carries_values = True
    homogeneous = True


@dataclass(frozen=True)
class MonotoneOperator:
    """Maximally monotone operators; oracle returns one operator value."""

    carries_values = False
    homogeneous = True


@dataclass(frozen=True)
class CocoerciveOperator:
    """beta-cocoercive operators: <u_i - u_j, x_i - x_j> >= beta ||u_i - u_j||^2."""

    beta: float = 1.0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"cocoercivity constant must be positive, got {self.beta}")

    carries_values = False
    homogeneous = True


ClassSpec = Union[SmoothConvex, SmoothStronglyConvex, MonotoneOperator, CocoerciveOperator]


@dataclass
class EvaluationRecord:
    """One oracle evaluation: the point, the oracle vector, optional value.

    ``function_value`` is present exactly when the class carries values
    (smooth convex functions) and absent for bare operators.
    """

    point: VectorExpr
    oracle_vector: VectorExpr
    function_value: FunctionValue | None = None


def _pair_constraint_smooth(
    ri: EvaluationRecord, rj: EvaluationRecord, mu: float, L: float
) -> ScalarExpr:
    """f_i - f_j - <g_j, x_i - x_j> - (1/2L)||g_i - g_j||^2
    - mu/(2(1-mu/L)) ||x_i - x_j - (g_i - g_j)/L||^2  >= 0."""
    xi, gi, fi = ri.point, ri.oracle_vector, ri.function_value
    xj, gj, fj = rj.point, rj.oracle_vector, rj.function_value
    expr = fi - fj - inner_product(gj, xi - xj) - (1.0 / (2.0 * L)) * norm_sq(gi - gj)
    if mu > 0:
        coeff = mu / (2.0 * (1.0 - mu / L))
        expr = expr - coeff * norm_sq(xi - xj - (gi - gj) / L)
    return expr


def interpolation_constraints(
    spec: ClassSpec, records: list[EvaluationRecord]
) -> list[ScalarExpr]:
    """Constraints (each >= 0) for the class to interpolate the records.

    Function classes emit one inequality per ordered pair (i, j), i != j;
    operator classes are symmetric in the pair and emit one per unordered
    pair.  Counts: n(n-1) and n(n-1)/2 respectively.
    """
    if not records:
        raise ValueError("interpolation requires at least one record")
    if spec.carries_values:
        for k, r in enumerate(records):
            if r.function_value is None:
                raise ValueError(f"record {k} lacks a function value, required by {spec}")

    out: list[ScalarExpr] = []
    n = len(records)
    if isinstance(spec, (SmoothConvex, SmoothStronglyConvex)):
        mu = spec.mu if isinstance(spec, SmoothStronglyConvex) else 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    out.append(_pair_constraint_smooth(records[i], records[j], mu, spec.L))
    elif isinstance(spec, MonotoneOperator):
        for i in range(n):
            for j in range(i + 1, n):
                ri, rj = records[i], records[j]
                out.append(
                    inner_product(ri.oracle_vector - rj.oracle_vector, ri.point - rj.point)
                )
    elif isinstance(spec, CocoerciveOperator):
        for i in range(n):
            for j in range(i + 1, n):
                ri, rj = records[i], records[j]
                du = ri.oracle_vector - rj.oracle_vector
                out.append(
                    inner_product(du, ri.point - rj.point) - spec.beta * norm_sq(du)
                )
    else:
        raise TypeError(f"unsupported class spec {spec!r}")
    return out


def relative_inexactness_constraint(
    g: VectorExpr, d: VectorExpr, eps: float
) -> ScalarExpr:
    """eps^2 ||g||^2 - ||d - g||^2 >= 0 (relatively bounded error on d)."""
    if eps < 0:
        raise ValueError(f"relative error bound must be nonnegative, got {eps}")
    return (eps * eps) * norm_sq(g) - norm_sq(d - g)
