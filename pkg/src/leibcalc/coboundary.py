"""The Leibniz coboundary of k-tensors, by two independent routes.

Route one is the global cochain formula: alternating directional derivatives
of the cochain with one argument removed, plus alternating bracket
insertions.  It is computed symbolically, so the result can be
differentiated again (which is how the d(d(.)) = 0 property is exercised).

Route two is the local formula in chart coordinates: a genuine (k+1)-tensor
part (signed insertions of coefficient partials) plus non-tensorial
derivative-insertion terms that pair one slot's components with the partial
derivatives of another slot's components.  The two routes are each other's
oracle.

Sign bookkeeping is centralized here:

* tensor part: inserting the derivative covector at slot m carries (-1)^(m+1);
* derivative terms: a block starting at slot a = r+1 (after a passthrough
  prefix of length r with sign (-1)^r) contributes, for each block position
  t = 2..k-r, one term keeping the block's factor order (sign +) and one term
  with the block's first factor pushed right to receive the derivative
  (sign (-1)^t).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .expr import Expr, ZERO, add, sub, mul
from .fields import (
    Chart,
    ChartMismatchError,
    ScalarField,
    TensorField,
    VectorField,
    contract_all,
    evaluate_grid,
    lie_bracket,
    lie_derivative,
    tensor_apply,
    tensor_apply_symbolic,
)

__all__ = [
    "GenericCochain",
    "DerivTerm",
    "LocalCoboundary",
    "cochain_from_tensor",
    "cochain_from_scalar",
    "global_coboundary",
    "local_coboundary",
    "apply_local",
    "coboundary_tensor_part",
    "d_squared_residual",
    "kform_obstructions",
]


@dataclass(frozen=True)
class GenericCochain:
    """A k-multilinear cochain: k vector fields in, a scalar field out.

    The output is symbolic so a cochain produced by one coboundary can be fed
    to another.
    """

    chart: Chart
    arity: int
    evaluator: Callable[[tuple[VectorField, ...]], ScalarField]

    def __call__(self, *fields: VectorField) -> ScalarField:
        if len(fields) != self.arity:
            raise ValueError(
                f"cochain of arity {self.arity} applied to {len(fields)} fields"
            )
        for f in fields:
            if f.chart != self.chart:
                raise ChartMismatchError("field chart differs from cochain chart")
        return self.evaluator(tuple(fields))

    def value(self, fields: Sequence[VectorField], point) -> float:
        return self(*fields).value(point)


def cochain_from_tensor(omega: TensorField) -> GenericCochain:
    return GenericCochain(
        omega.chart,
        omega.rank,
        lambda fields: tensor_apply_symbolic(omega, fields),
    )


def cochain_from_scalar(f: ScalarField) -> GenericCochain:
    return GenericCochain(f.chart, 0, lambda fields: f)


def global_coboundary(alpha: GenericCochain) -> GenericCochain:
    """The cochain coboundary.

    d(alpha)(X_1, ..., X_{k+1}) sums (-1)^(i+1) X_i(alpha(... X_i omitted ...))
    over i, plus (-1)^(j+1) alpha(... [X_i, X_j] in slot i ... X_j omitted ...)
    over pairs i < j.
    """
    k = alpha.arity

    def evaluator(fields: tuple[VectorField, ...]) -> ScalarField:
        total = ZERO
        for i in range(k + 1):
            rest = fields[:i] + fields[i + 1 :]
            inner = alpha(*rest)
            term = lie_derivative(fields[i], inner).expr
            total = add(total, term) if i % 2 == 0 else sub(total, term)
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                bracket = lie_bracket(fields[i], fields[j])
                args = list(fields[:j]) + list(fields[j + 1 :])
                args[i] = bracket
                term = alpha(*args).expr
                # sign (-1)^(j+1) with slots counted from 1; j here is 0-based
                total = add(total, term) if j % 2 == 0 else sub(total, term)
        return ScalarField(alpha.chart, total)

    return GenericCochain(alpha.chart, k + 1, evaluator)


@dataclass(frozen=True, eq=False)
class DerivTerm:
    """One non-tensorial term of the local coboundary.

    Evaluates to

        sign * sum over l, q and free indices of
            coeff[q, free] * X_a^l * d(X_m^q)/dx^l * prod of X_s^{i_s}

    where a is ``contraction_slot``, m is ``derivative_slot`` and s runs over
    the remaining slots in increasing order.  ``coefficients`` is the tensor's
    coefficient grid with axes rearranged to (q, free slots in slot order);
    ``q_position``/``passthrough_positions`` record which original coefficient
    position each axis came from (1-based, for introspection and tests).
    """

    contraction_slot: int
    derivative_slot: int
    sign: int
    q_position: int
    passthrough_positions: tuple[int, ...]
    coefficients: np.ndarray

    def evaluate(self, component_values, jacobians, env) -> float:
        a = self.contraction_slot - 1
        m = self.derivative_slot - 1
        derived = jacobians[m] @ component_values[a]
        slots = [
            s
            for s in range(len(component_values))
            if s not in (a, m)
        ]
        vectors = [derived] + [component_values[s] for s in slots]
        values = evaluate_grid(self.coefficients, env)
        return self.sign * contract_all(values, vectors)


@dataclass(frozen=True, eq=False)
class LocalCoboundary:
    """Structured local coboundary: a tensor part plus derivative terms.

    On tuples of coordinate fields (constant components) every derivative
    term vanishes and the value reduces to the tensor part alone.
    """

    tensor_part: TensorField
    deriv_terms: tuple[DerivTerm, ...]

    @property
    def chart(self) -> Chart:
        return self.tensor_part.chart

    @property
    def rank(self) -> int:
        return self.tensor_part.rank

    def apply(self, fields: Sequence[VectorField], point) -> float:
        return apply_local(self, fields, point)


def coboundary_tensor_part(omega: TensorField) -> TensorField:
    """The (k+1)-tensor part: signed insertions of coefficient partials.

    Entry (j_1, ..., j_{k+1}) sums (-1)^(m+1) times the partial, along
    coordinate j_m, of the coefficient indexed by the remaining j's.
    """
    k = omega.rank
    if k < 1:
        raise ValueError("the tensor part needs rank at least 1")
    chart = omega.chart
    n = chart.dimension
    names = chart.coordinates
    grid = np.empty((n,) * (k + 1), dtype=object)
    for index in np.ndindex(grid.shape):
        total = ZERO
        for m in range(k + 1):
            rest = index[:m] + index[m + 1 :]
            term = omega.coefficients[rest].diff(names[index[m]])
            total = add(total, term) if m % 2 == 0 else sub(total, term)
        grid[index] = total
    return TensorField(chart, grid)


def local_coboundary(omega: TensorField) -> LocalCoboundary:
    """Expand the coboundary of a k-tensor into tensor part plus terms.

    For k = 1 the coboundary is the tensor part alone (it agrees with the
    exterior derivative); derivative terms appear from k = 2 on.
    """
    k = omega.rank
    if k < 1:
        raise ValueError("local coboundary needs rank at least 1")
    tensor_part = coboundary_tensor_part(omega)
    terms: list[DerivTerm] = []
    for r in range(0, k - 1):  # passthrough prefix length
        prefix_sign = -1 if r % 2 else 1
        a = r + 1
        for t in range(2, k - r + 1):  # position within the block
            m = r + t + 1
            # keep the block order: derivative lands on original position r+t,
            # passthrough slots carry positions 1..r, r+1..r+t-1, r+t+1..k
            keep_positions = tuple(range(1, r + 1)) + tuple(
                range(r + 1, r + t)
            ) + tuple(range(r + t + 1, k + 1))
            terms.append(
                _make_deriv_term(omega, a, m, prefix_sign, r + t, keep_positions)
            )
            # push the block's first factor right to receive the derivative:
            # passthrough slots carry positions 1..r, r+2..r+t, r+t+1..k
            push_sign = prefix_sign * (1 if t % 2 == 0 else -1)
            push_positions = tuple(range(1, r + 1)) + tuple(
                range(r + 2, r + t + 1)
            ) + tuple(range(r + t + 1, k + 1))
            terms.append(
                _make_deriv_term(omega, a, m, push_sign, r + 1, push_positions)
            )
    return LocalCoboundary(tensor_part, tuple(terms))


def _make_deriv_term(
    omega: TensorField,
    a: int,
    m: int,
    sign: int,
    q_position: int,
    passthrough_positions: tuple[int, ...],
) -> DerivTerm:
    axes = [q_position - 1] + [p - 1 for p in passthrough_positions]
    coefficients = np.transpose(omega.coefficients, axes)
    return DerivTerm(
        contraction_slot=a,
        derivative_slot=m,
        sign=sign,
        q_position=q_position,
        passthrough_positions=passthrough_positions,
        coefficients=coefficients,
    )


def apply_local(
    d_omega: LocalCoboundary, fields: Sequence[VectorField], point
) -> float:
    """Evaluate the structured coboundary on k+1 fields at a point."""
    fields = tuple(fields)
    if len(fields) != d_omega.rank:
        raise ValueError(
            f"local coboundary of rank {d_omega.rank} applied to "
            f"{len(fields)} fields"
        )
    chart = d_omega.chart
    for f in fields:
        if f.chart != chart:
            raise ChartMismatchError("field chart differs from coboundary chart")
    env = chart.env(point)
    component_values = [
        np.array([c.evaluate(env) for c in f.components]) for f in fields
    ]
    tensor_values = evaluate_grid(d_omega.tensor_part.coefficients, env)
    total = contract_all(tensor_values, component_values)
    jacobians: dict[int, np.ndarray] = {}
    for term in d_omega.deriv_terms:
        m = term.derivative_slot - 1
        if m not in jacobians:
            jacobians[m] = fields[m].jacobian_value(point)
    for term in d_omega.deriv_terms:
        total += term.evaluate(component_values, jacobians, env)
    return total


def d_squared_residual(
    omega: TensorField, fields: Sequence[VectorField], point
) -> float:
    """Apply the cochain coboundary twice; the exact value is zero."""
    fields = tuple(fields)
    if len(fields) != omega.rank + 2:
        raise ValueError(
            f"d(d(.)) of a rank-{omega.rank} tensor needs {omega.rank + 2} fields"
        )
    dd = global_coboundary(global_coboundary(cochain_from_tensor(omega)))
    return dd(*fields).value(point)


def kform_obstructions(
    omega: TensorField,
) -> tuple[TensorField, list[Expr]]:
    """Obstructions to a cocycle being a k-form.

    Returns the tensor part (whose vanishing is closedness on coordinate
    fields) and the list of pairwise swap residuals a_J + a_(J with two
    positions exchanged); the tensor is a k-form exactly when every residual
    is identically zero.
    """
    k = omega.rank
    n = omega.chart.dimension
    if k < 2:
        raise ValueError("form obstructions need rank at least 2")
    if k > n + 1:
        raise ValueError(
            f"the swap obstruction argument needs k <= n + 1 (got k={k}, n={n})"
        )
    closedness = coboundary_tensor_part(omega)
    residuals: list[Expr] = []
    seen: set = set()
    for index in product(range(n), repeat=k):
        for u in range(k):
            for v in range(u + 1, k):
                swapped = list(index)
                swapped[u], swapped[v] = swapped[v], swapped[u]
                swapped = tuple(swapped)
                key = (min(index, swapped), max(index, swapped), u, v)
                if key in seen:
                    continue
                seen.add(key)
                residuals.append(
                    add(omega.coefficients[index], omega.coefficients[swapped])
                )
    return closedness, residuals
