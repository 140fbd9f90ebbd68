"""Assembly of cycle-score minimization problems and their conic lowering.

``build_cycle_problem`` unrolls a method for ``K`` steps from free initial
states, collecting oracle evaluation records and interpolation constraints;
the objective is the cycle score (sum of squared prefix gaps at lag K), cut
off from the trivial zero solution by the unit-separation constraint on the
two first states.

``lower_to_conic`` packages everything as a standard-form program over one
PSD block (the Gram matrix of basis vectors) and a free block (the value
symbols).  Iterates defined by exact linear relations never enter the
basis, so the method's equality relations are eliminated by construction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .symbolic import Context, FunctionValue, ScalarExpr, VectorExpr, norm_sq
from .function_classes import ClassSpec, EvaluationRecord, interpolation_constraints
from .methods import MethodSpec, SymState

__all__ = [
    "TaggedExpr",
    "OracleBinding",
    "CycleProblem",
    "build_cycle_problem",
    "LinearConstraint",
    "ConicProgram",
    "FamilyMap",
    "IndexMap",
    "LoweredProblem",
    "lower_to_conic",
    "StructurallyInfeasibleError",
]


class StructurallyInfeasibleError(ValueError):
    """A constraint reduced to an impossible numeric statement at build time.

    Happens when method parameters collapse iterates (e.g. a zero step-size
    makes x1 identical to x0), so the separation constraint reads 0 >= 1:
    the method cannot produce two distinct iterates at all.
    """


@dataclass
class TaggedExpr:
    expr: ScalarExpr
    tag: str


@dataclass
class OracleBinding:
    spec: ClassSpec
    records: list[EvaluationRecord] = field(default_factory=list)


@dataclass
class CycleProblem:
    """Problem data for one (method, classes, K) triple, still symbolic."""

    method: MethodSpec
    K: int
    ctx: Context
    iterates: list[VectorExpr]
    families: dict[str, OracleBinding]
    objective: ScalarExpr
    normalization: ScalarExpr
    inequalities: list[TaggedExpr]
    equalities: list[TaggedExpr]


class _BuildWorkspace:
    """StepWorkspace implementation collecting records and side constraints."""

    def __init__(self, ctx: Context, method: MethodSpec, families: dict[str, OracleBinding]):
        self.ctx = ctx
        self.method = method
        self.families = families
        self.side_inequalities: list[TaggedExpr] = []
        self.side_equalities: list[TaggedExpr] = []

    def oracle_at(self, state: SymState, family: str):
        if family in state.cache:
            return state.cache[family]
        out = self.fresh_oracle(family, state.point, index_hint=state.index)
        state.cache[family] = out
        return out

    def fresh_oracle(self, family: str, point: VectorExpr, index_hint: int | None = None):
        decl = self.method.family(family)
        binding = self.families[family]
        k = index_hint if index_hint is not None else len(binding.records)
        vec = self.ctx.vector(f"g_{family}[{k}]")
        val: FunctionValue | None = None
        if decl.carries_values:
            val = self.ctx.value(f"f_{family}[{k}]")
        binding.records.append(EvaluationRecord(point, vec, val))
        return vec, val

    def fresh_vector(self, label: str) -> VectorExpr:
        return self.ctx.vector(label)

    def add_record(self, family: str, point: VectorExpr, vector: VectorExpr) -> None:
        decl = self.method.family(family)
        if decl.carries_values:
            raise ValueError(f"family {family} carries values; use fresh_oracle")
        self.families[family].records.append(EvaluationRecord(point, vector, None))

    def add_inequality(self, expr: ScalarExpr, tag: str) -> None:
        self.side_inequalities.append(TaggedExpr(expr, tag))

    def add_equality(self, expr: ScalarExpr, tag: str) -> None:
        self.side_equalities.append(TaggedExpr(expr, tag))


def _bind_classes(method: MethodSpec, classes) -> dict[str, OracleBinding]:
    names = [f.name for f in method.families]
    if isinstance(classes, Mapping):
        missing = [n for n in names if n not in classes]
        if missing:
            raise ValueError(f"no class bound for oracle families {missing}")
        return {n: OracleBinding(classes[n]) for n in names}
    if len(names) != 1:
        raise ValueError(
            f"{method.name} calls {len(names)} oracle families; pass a mapping"
        )
    return {names[0]: OracleBinding(classes)}


def build_cycle_problem(method: MethodSpec, classes, K: int) -> CycleProblem:
    """Unroll ``K`` steps and collect the score, separation and constraints.

    ``classes`` is a single class spec for single-oracle methods, or a
    mapping family-name -> class spec.  The state sequence covers indices
    0 .. K + order - 1; oracle records cover 0 .. K + order - 2 for
    families evaluated at the states.
    """
    if K < 2:
        raise ValueError(f"cycle length must be >= 2, got {K}")
    ell = method.order
    families = _bind_classes(method, classes)
    for name, binding in families.items():
        if not binding.spec.homogeneous:
            warnings.warn(
                f"class for family {name} is not scale-homogeneous; the unit "
                "separation constraint may cut off certificates",
                stacklevel=2,
            )

    ctx = Context()
    ws = _BuildWorkspace(ctx, method, families)

    states = [SymState(ctx.vector(f"{method.state_symbol}[{t}]"), t) for t in range(ell)]
    # Families evaluated at the state sequence get a record at every state
    # the unrolled relations can see, including initial states the update
    # formula itself never reads.
    for decl in method.families:
        if decl.at_states:
            for st in states:
                ws.oracle_at(st, decl.name)
    for t in range(ell, K + ell):
        new_point = method.symbolic_step(ws, states[-ell:])
        states.append(SymState(new_point, t))
        if t <= K + ell - 2:
            for decl in method.families:
                if decl.at_states:
                    ws.oracle_at(states[-1], decl.name)

    iterates = [st.point for st in states]
    objective = ctx.scalar(0.0)
    for t in range(ell):
        objective = objective + norm_sq(iterates[t] - iterates[t + K])
    normalization = norm_sq(iterates[1] - iterates[0])

    inequalities = list(ws.side_inequalities)
    for name, binding in families.items():
        exprs = interpolation_constraints(binding.spec, binding.records)
        k = 0
        n = len(binding.records)
        ordered = binding.spec.carries_values
        for i in range(n):
            for j in range(n):
                if (ordered and i != j) or (not ordered and i < j):
                    inequalities.append(TaggedExpr(exprs[k], f"interp[{name}][{i},{j}]"))
                    k += 1
        assert k == len(exprs)

    return CycleProblem(
        method=method,
        K=K,
        ctx=ctx,
        iterates=iterates,
        families=families,
        objective=objective,
        normalization=normalization,
        inequalities=inequalities,
        equalities=list(ws.side_equalities),
    )


# ---------------------------------------------------------------------------
# Conic lowering


@dataclass
class LinearConstraint:
    """<A, G> + a . F  (sense)  b, with A symmetric."""

    A: np.ndarray
    a: np.ndarray
    b: float
    sense: str  # "=" or ">="
    tag: str


@dataclass
class ConicProgram:
    """min <C, G> + c . F  subject to linear constraints and G PSD.

    ``gauge_directions`` lists vectors v such that restricting G to the
    complement of v loses no solutions (declared shift invariances of the
    originating problem); solvers may use them to remove flat directions.
    """

    psd_dim: int
    free_dim: int
    C: np.ndarray
    c: np.ndarray
    constraints: list[LinearConstraint]
    objective_const: float = 0.0
    gauge_directions: list[np.ndarray] = field(default_factory=list)

    @property
    def nonneg_dim(self) -> int:
        """Slack count: one per inequality row."""
        return sum(1 for con in self.constraints if con.sense == ">=")

    def objective_value(self, G: np.ndarray, F: np.ndarray) -> float:
        return float(np.tensordot(self.C, G) + self.c @ F + self.objective_const)


@dataclass
class FamilyMap:
    spec: ClassSpec
    point_coeffs: np.ndarray   # (records, psd_dim)
    vector_coeffs: np.ndarray  # (records, psd_dim)
    value_indices: np.ndarray  # (records,), -1 where absent


@dataclass
class IndexMap:
    """How abstract quantities sit inside the (G, F) blocks."""

    basis_labels: list[str]
    value_labels: list[str]
    iterate_coeffs: np.ndarray  # (K + order, psd_dim)
    families: dict[str, FamilyMap]
    K: int
    order: int
    method_name: str
    method_parameters: dict[str, float]


@dataclass
class LoweredProblem:
    program: ConicProgram
    index_map: IndexMap
    problem: CycleProblem


def _row(expr: ScalarExpr, n: int, p: int) -> tuple[np.ndarray, np.ndarray, float]:
    return expr.quad_matrix(n), expr.lin_vector(p), expr.const


def lower_to_conic(problem: CycleProblem) -> LoweredProblem:
    """Lower to the standard form; raises on structurally impossible rows."""
    ctx = problem.ctx
    n, p = ctx.basis_dim, ctx.value_dim

    C, c, obj_const = _row(problem.objective, n, p)
    constraints: list[LinearConstraint] = []

    def push(expr: ScalarExpr, rhs: float, sense: str, tag: str) -> None:
        if not expr.quad and not expr.lin:
            # Constant row: either vacuous or impossible.
            b = rhs - expr.const
            ok = (b <= 0) if sense == ">=" else (b == 0)
            if not ok:
                raise StructurallyInfeasibleError(
                    f"constraint {tag} reduces to 0 {sense} {b:g}"
                )
            return
        A, a, const = _row(expr, n, p)
        constraints.append(LinearConstraint(A, a, rhs - const, sense, tag))

    push(problem.normalization, 1.0, ">=", "normalization")
    for te in problem.inequalities:
        push(te.expr, 0.0, ">=", te.tag)
    for te in problem.equalities:
        push(te.expr, 0.0, "=", te.tag)

    gauges = []
    for group in problem.method.gauge_groups:
        v = np.array(
            [1.0 if lbl.split("[")[0] in group else 0.0 for lbl in ctx.basis_labels]
        )
        if v.any():
            gauges.append(v)

    iterate_coeffs = np.vstack([x.dense(n) for x in problem.iterates])
    families: dict[str, FamilyMap] = {}
    for name, binding in problem.families.items():
        recs = binding.records
        families[name] = FamilyMap(
            spec=binding.spec,
            point_coeffs=np.vstack([r.point.dense(n) for r in recs]),
            vector_coeffs=np.vstack([r.oracle_vector.dense(n) for r in recs]),
            value_indices=np.array(
                [r.function_value.index if r.function_value is not None else -1 for r in recs],
                dtype=int,
            ),
        )

    program = ConicProgram(
        psd_dim=n,
        free_dim=p,
        C=C,
        c=c,
        constraints=constraints,
        objective_const=obj_const,
        gauge_directions=gauges,
    )
    index_map = IndexMap(
        basis_labels=list(ctx.basis_labels),
        value_labels=list(ctx.value_labels),
        iterate_coeffs=iterate_coeffs,
        families=families,
        K=problem.K,
        order=problem.method.order,
        method_name=problem.method.name,
        method_parameters=dict(problem.method.parameters),
    )
    return LoweredProblem(program=program, index_map=index_map, problem=problem)
