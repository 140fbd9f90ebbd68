import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cyclesearch.symbolic import (
    Context,
    ContextMismatchError,
    DegreeError,
    evaluate,
    inner_product,
    norm_sq,
)


def test_basis_ids_dense_and_fresh():
    ctx = Context()
    assert ctx.new_basis_vector() == 0
    ctx.new_basis_vector()
    ctx.new_basis_vector()
    assert ctx.new_basis_vector() == 3
    ids = {ctx.new_basis_vector() for _ in range(5)}
    assert len(ids) == 5


def test_inner_product_unit_vectors():
    ctx = Context()
    e0, e1 = ctx.vector(), ctx.vector()
    s = inner_product(e0, e0)
    assert s.quad == {(0, 0): 1.0}
    diff = norm_sq(e0 - e1)
    assert diff.quad == {(0, 0): 1.0, (1, 1): 1.0, (0, 1): -2.0}


def test_inner_product_symmetry():
    ctx = Context()
    a = 2.0 * ctx.vector() - 0.5 * ctx.vector()
    b = ctx.vector() + 3.0 * ctx.vector()
    lhs, rhs = inner_product(a, b), inner_product(b, a)
    assert lhs.quad == rhs.quad


def test_evaluate_simple_cases():
    ctx = Context()
    e0 = ctx.vector()
    ctx.vector()
    s = norm_sq(e0)
    assert evaluate(s, np.eye(2), []) == pytest.approx(1.0)

    f0, f1 = ctx.value(), ctx.value()
    diff = f0 - f1
    assert evaluate(diff, np.eye(2), [3.0, 1.0]) == pytest.approx(2.0)


def test_evaluate_dimension_mismatch():
    ctx = Context()
    s = norm_sq(ctx.vector())
    with pytest.raises(ValueError):
        evaluate(s, np.eye(3), [])
    ctx.value()
    with pytest.raises(ValueError):
        evaluate(s, np.eye(1), [])


def test_context_mixing_is_an_error():
    a = Context().vector()
    b = Context().vector()
    with pytest.raises(ContextMismatchError):
        a + b
    with pytest.raises(ContextMismatchError):
        inner_product(a, b)


def test_degree_separation_is_structural():
    ctx = Context()
    v = ctx.vector()
    f = ctx.value()
    s = norm_sq(v)
    with pytest.raises(DegreeError):
        s * s
    with pytest.raises(DegreeError):
        s * f
    with pytest.raises(DegreeError):
        v * f
    # A legal expression touches values only linearly and vectors only
    # through pairwise products.
    legal = s + 2.0 * f - 1.0
    assert set(legal.quad) == {(0, 0)}
    assert set(legal.lin) == {0}


@st.composite
def _context_and_vectors(draw):
    n_basis = draw(st.integers(2, 6))
    ctx = Context()
    vecs = [ctx.vector() for _ in range(n_basis)]

    def expr(depth=0):
        coeffs = draw(
            st.lists(st.floats(-3, 3, allow_nan=False), min_size=n_basis, max_size=n_basis)
        )
        out = ctx.zero_vector()
        for c, v in zip(coeffs, vecs):
            out = out + c * v
        return out

    return ctx, expr(), expr()


@given(_context_and_vectors(), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_gram_consistency_against_explicit_vectors(cv, seed):
    """Evaluating a symbolic inner product at the Gram matrix of explicit
    vectors equals the coordinate-level inner product."""
    ctx, a, b = cv
    rng = np.random.default_rng(seed)
    d = ctx.basis_dim + 1
    basis = rng.normal(size=(ctx.basis_dim, d))
    G = basis @ basis.T
    val = evaluate(inner_product(a, b), G, np.zeros(ctx.value_dim))
    explicit = float(a.realize(basis) @ b.realize(basis))
    assert val == pytest.approx(explicit, rel=1e-12, abs=1e-9)


@given(
    _context_and_vectors(),
    st.floats(-2, 2, allow_nan=False),
    st.floats(-2, 2, allow_nan=False),
    st.integers(0, 10_000),
)
@settings(max_examples=40, deadline=None)
def test_evaluate_is_linear(cv, alpha, beta, seed):
    ctx, a, b = cv
    rng = np.random.default_rng(seed)
    basis = rng.normal(size=(ctx.basis_dim, ctx.basis_dim))
    G = basis @ basis.T
    F = np.zeros(ctx.value_dim)
    s1, s2 = norm_sq(a), inner_product(a, b)
    combo = alpha * s1 + beta * s2
    lhs = evaluate(combo, G, F)
    rhs = alpha * evaluate(s1, G, F) + beta * evaluate(s2, G, F)
    assert lhs == pytest.approx(rhs, rel=1e-14, abs=1e-10)


def test_quad_matrix_trace_semantics():
    ctx = Context()
    v = ctx.vector() - 2.0 * ctx.vector()
    s = norm_sq(v)
    rng = np.random.default_rng(7)
    B = rng.normal(size=(2, 5))
    G = B @ B.T
    assert float(np.tensordot(s.quad_matrix(), G)) == pytest.approx(
        evaluate(s, G, []), rel=1e-12
    )
