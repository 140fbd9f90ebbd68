"""Symbolic vectors and Gram-lifted quadratic scalars.

Abstract vectors (iterates, gradients, auxiliary directions) are linear
combinations of basis vectors allocated from a :class:`Context`.  Inner
products of such vectors become linear functions of a Gram matrix ``G``;
scalar value symbols (function values) stack into a vector ``F``.  Every
quantity the cycle problems need is therefore an affine function of
``(G, F)``, represented by :class:`ScalarExpr`.

Degrees above 2 have no representation here: there is no product of two
scalar symbols and no product of a scalar symbol with a vector, which is
what keeps the lifted problem linear in ``(G, F)``.
"""

from __future__ import annotations

import numbers
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "Context",
    "ContextMismatchError",
    "DegreeError",
    "FunctionValue",
    "VectorExpr",
    "ScalarExpr",
    "inner_product",
    "norm_sq",
    "evaluate",
]


class ContextMismatchError(ValueError):
    """Raised when expressions from different contexts are combined."""


class DegreeError(TypeError):
    """Raised on operations that would create a polynomial of degree > 2."""


class Context:
    """Allocator for basis-vector ids and scalar value ids.

    Ids are dense, starting at 0, and never reused.  A context is the unit
    of isolation: expressions attached to different contexts never mix.
    """

    __slots__ = ("basis_labels", "value_labels")

    def __init__(self) -> None:
        self.basis_labels: list[str] = []
        self.value_labels: list[str] = []

    @property
    def basis_dim(self) -> int:
        return len(self.basis_labels)

    @property
    def value_dim(self) -> int:
        return len(self.value_labels)

    def new_basis_vector(self, label: str | None = None) -> int:
        """Allocate a fresh basis id (dense numbering)."""
        idx = len(self.basis_labels)
        self.basis_labels.append(label if label is not None else f"b{idx}")
        return idx

    def vector(self, label: str | None = None) -> "VectorExpr":
        """Allocate a fresh basis vector and return it as a unit expression."""
        idx = self.new_basis_vector(label)
        return VectorExpr(self, {idx: 1.0})

    def value(self, label: str | None = None) -> "FunctionValue":
        """Allocate a fresh scalar value symbol (an entry of F)."""
        idx = len(self.value_labels)
        self.value_labels.append(label if label is not None else f"f{idx}")
        return FunctionValue(self, idx)

    def zero_vector(self) -> "VectorExpr":
        return VectorExpr(self, {})

    def scalar(self, const: float = 0.0) -> "ScalarExpr":
        return ScalarExpr(self, {}, {}, float(const))

    def __repr__(self) -> str:
        return f"Context(basis_dim={self.basis_dim}, value_dim={self.value_dim})"


def _check_ctx(a, b) -> None:
    if a.ctx is not b.ctx:
        raise ContextMismatchError("expressions belong to different contexts")


class FunctionValue:
    """A single scalar symbol f_t, one entry of the value vector F."""

    __slots__ = ("ctx", "index")

    def __init__(self, ctx: Context, index: int) -> None:
        self.ctx = ctx
        self.index = index

    def as_scalar(self) -> "ScalarExpr":
        return ScalarExpr(self.ctx, {}, {self.index: 1.0}, 0.0)

    def __add__(self, other):
        return self.as_scalar() + other

    def __radd__(self, other):
        return self.as_scalar() + other

    def __sub__(self, other):
        return self.as_scalar() - other

    def __rsub__(self, other):
        return (-1.0) * self.as_scalar() + other

    def __mul__(self, other):
        return self.as_scalar() * other

    def __rmul__(self, other):
        return self.as_scalar() * other

    def __neg__(self):
        return (-1.0) * self.as_scalar()

    def __repr__(self) -> str:
        return f"FunctionValue({self.ctx.value_labels[self.index]})"


class VectorExpr:
    """A linear combination of basis vectors (sparse coefficient map)."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: Context, coeffs: Mapping[int, float]) -> None:
        self.ctx = ctx
        self.coeffs = {i: float(c) for i, c in coeffs.items() if c != 0.0}

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "VectorExpr") -> "VectorExpr":
        if not isinstance(other, VectorExpr):
            return NotImplemented
        _check_ctx(self, other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0.0) + c
        return VectorExpr(self.ctx, out)

    def __sub__(self, other: "VectorExpr") -> "VectorExpr":
        if not isinstance(other, VectorExpr):
            return NotImplemented
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "VectorExpr":
        if isinstance(scalar, (VectorExpr, ScalarExpr, FunctionValue)):
            raise DegreeError("vectors multiply only by numeric scalars; "
                              "use inner_product for vector products")
        if not isinstance(scalar, numbers.Real):
            return NotImplemented
        s = float(scalar)
        return VectorExpr(self.ctx, {i: s * c for i, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "VectorExpr":
        return self * (1.0 / float(scalar))

    def __neg__(self) -> "VectorExpr":
        return (-1.0) * self

    def dense(self, dim: int | None = None) -> np.ndarray:
        """Coefficients as a dense array of length ``dim`` (default: context)."""
        n = self.ctx.basis_dim if dim is None else dim
        out = np.zeros(n)
        for i, c in self.coeffs.items():
            out[i] = c
        return out

    def realize(self, basis_coords: np.ndarray) -> np.ndarray:
        """Explicit coordinates given explicit basis vectors (rows of input)."""
        d = basis_coords.shape[1]
        out = np.zeros(d)
        for i, c in self.coeffs.items():
            out += c * basis_coords[i]
        return out

    def key(self) -> tuple:
        """Hashable identity of the coefficient map (for memoization)."""
        return tuple(sorted(self.coeffs.items()))

    def __repr__(self) -> str:
        terms = " + ".join(
            f"{c:g}*{self.ctx.basis_labels[i]}" for i, c in sorted(self.coeffs.items())
        )
        return f"VectorExpr({terms or '0'})"


class ScalarExpr:
    """An affine function of (G, F): quadratic in vectors, linear in values.

    ``quad`` maps index pairs (i, j) with i <= j to the coefficient of
    <b_i, b_j>; the implied coefficient matrix is symmetric.  ``lin`` maps
    value ids to coefficients; ``const`` is the scalar offset.
    """

    __slots__ = ("ctx", "quad", "lin", "const")

    def __init__(
        self,
        ctx: Context,
        quad: Mapping[tuple[int, int], float],
        lin: Mapping[int, float],
        const: float = 0.0,
    ) -> None:
        self.ctx = ctx
        q: dict[tuple[int, int], float] = {}
        for (i, j), c in quad.items():
            if i > j:
                i, j = j, i
            if c != 0.0:
                q[(i, j)] = q.get((i, j), 0.0) + float(c)
        self.quad = {k: v for k, v in q.items() if v != 0.0}
        self.lin = {i: float(c) for i, c in lin.items() if c != 0.0}
        self.const = float(const)

    @staticmethod
    def _coerce(ctx: Context, other) -> "ScalarExpr":
        if isinstance(other, ScalarExpr):
            return other
        if isinstance(other, FunctionValue):
            return other.as_scalar()
        if isinstance(other, numbers.Real):
            return ScalarExpr(ctx, {}, {}, float(other))
        raise TypeError(f"cannot interpret {type(other).__name__} as ScalarExpr")

    def __add__(self, other) -> "ScalarExpr":
        other = self._coerce(self.ctx, other)
        _check_ctx(self, other)
        quad = dict(self.quad)
        for k, c in other.quad.items():
            quad[k] = quad.get(k, 0.0) + c
        lin = dict(self.lin)
        for i, c in other.lin.items():
            lin[i] = lin.get(i, 0.0) + c
        return ScalarExpr(self.ctx, quad, lin, self.const + other.const)

    __radd__ = __add__

    def __sub__(self, other) -> "ScalarExpr":
        return self + (-1.0) * self._coerce(self.ctx, other)

    def __rsub__(self, other) -> "ScalarExpr":
        return self._coerce(self.ctx, other) + (-1.0) * self

    def __mul__(self, scalar) -> "ScalarExpr":
        if isinstance(scalar, (ScalarExpr, FunctionValue, VectorExpr)):
            raise DegreeError("products of scalar expressions exceed degree 2")
        if not isinstance(scalar, numbers.Real):
            return NotImplemented
        s = float(scalar)
        return ScalarExpr(
            self.ctx,
            {k: s * c for k, c in self.quad.items()},
            {i: s * c for i, c in self.lin.items()},
            s * self.const,
        )

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarExpr":
        return (-1.0) * self

    def is_zero(self) -> bool:
        return not self.quad and not self.lin and self.const == 0.0

    def quad_matrix(self, dim: int | None = None) -> np.ndarray:
        """Symmetric coefficient matrix A with value contribution tr(A G)."""
        n = self.ctx.basis_dim if dim is None else dim
        A = np.zeros((n, n))
        for (i, j), c in self.quad.items():
            if i == j:
                A[i, i] += c
            else:
                A[i, j] += 0.5 * c
                A[j, i] += 0.5 * c
        return A

    def lin_vector(self, dim: int | None = None) -> np.ndarray:
        p = self.ctx.value_dim if dim is None else dim
        v = np.zeros(p)
        for i, c in self.lin.items():
            v[i] = c
        return v

    def __repr__(self) -> str:
        parts = []
        for (i, j), c in sorted(self.quad.items()):
            bi = self.ctx.basis_labels[i]
            bj = self.ctx.basis_labels[j]
            parts.append(f"{c:g}*<{bi},{bj}>")
        for i, c in sorted(self.lin.items()):
            parts.append(f"{c:g}*{self.ctx.value_labels[i]}")
        if self.const or not parts:
            parts.append(f"{self.const:g}")
        return "ScalarExpr(" + " + ".join(parts) + ")"


def inner_product(a: VectorExpr, b: VectorExpr) -> ScalarExpr:
    """Symbolic <a, b>, linear in the Gram matrix of the basis vectors."""
    if not isinstance(a, VectorExpr) or not isinstance(b, VectorExpr):
        raise TypeError("inner_product expects two VectorExpr operands")
    _check_ctx(a, b)
    quad: dict[tuple[int, int], float] = {}
    for i, ca in a.coeffs.items():
        for j, cb in b.coeffs.items():
            k = (i, j) if i <= j else (j, i)
            quad[k] = quad.get(k, 0.0) + ca * cb
    return ScalarExpr(a.ctx, quad, {}, 0.0)


def norm_sq(a: VectorExpr) -> ScalarExpr:
    """Symbolic squared norm ||a||^2."""
    return inner_product(a, a)


def evaluate(s: ScalarExpr, G: np.ndarray, F: Iterable[float] | np.ndarray) -> float:
    """Value of ``s`` at a concrete Gram matrix G and value vector F."""
    G = np.asarray(G, dtype=float)
    F = np.asarray(list(F) if not isinstance(F, np.ndarray) else F, dtype=float)
    n, p = s.ctx.basis_dim, s.ctx.value_dim
    if G.shape != (n, n):
        raise ValueError(f"Gram matrix shape {G.shape} does not match basis dim {n}")
    if F.shape != (p,):
        raise ValueError(f"value vector length {F.shape} does not match value dim {p}")
    total = s.const
    for (i, j), c in s.quad.items():
        total += c * G[i, j]
    for i, c in s.lin.items():
        total += c * F[i]
    return float(total)
