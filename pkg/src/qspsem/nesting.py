"""Protocol nesting in circuit space and its functional-space shadow.

Nesting substitutes a whole protocol for every standard-oracle call of an
outer protocol; the inner phases stay contiguous (the inner protocol is a
black box). For antisymmetric phase lists nesting induces composition of
the embedded polynomials; the package verifies that statement numerically
rather than assuming it.

The single z-rotation written before the first oracle call of the outer
protocol is treated as a rotation (not a bare scalar phase): that is the
reading under which nesting composes the embedded polynomials, and a test
pins the distinction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, PreconditionError
from .qsp import PhaseList, as_phase_list, evaluate, extract_poly, is_antisymmetric


@dataclass(frozen=True)
class NestedProtocol:
    """Outer phase list calling an inner protocol in place of its oracle."""

    outer: PhaseList
    inner: "PhaseList | NestedProtocol"

    def __post_init__(self):
        object.__setattr__(self, "outer", as_phase_list(self.outer))
        if not isinstance(self.inner, NestedProtocol):
            object.__setattr__(self, "inner", as_phase_list(self.inner))


def evaluate_nested(p: NestedProtocol, x: float) -> np.ndarray:
    """Evaluate with the inner protocol substituted into every oracle slot."""
    inner = p.inner
    if isinstance(inner, NestedProtocol):
        oracle = lambda s: evaluate_nested(inner, s)
    else:
        oracle = lambda s: evaluate(inner, s)
    return evaluate(p.outer, x, oracle=oracle)


def _flatten_pair(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    m = outer.size - 1
    n = inner.size - 1
    if m == 0:
        return outer.copy()
    if n == 0:
        # inner is a bare rotation; everything merges into one angle
        return np.array([outer.sum() + m * inner[0]])
    # grouping the two merged inner endpoints first keeps antisymmetric
    # cancellation exact in floating point
    ends = inner[0] + inner[n]
    out = [inner[0] + outer[0]]
    out.extend(inner[1:n])
    for k in range(1, m):
        out.append(outer[k] + ends)
        out.extend(inner[1:n])
    out.append(inner[n] + outer[m])
    return np.array(out)


def flatten(p: NestedProtocol) -> PhaseList:
    """Single phase list realizing the nested circuit exactly.

    Inner phases appear as contiguous runs; only the two endpoint phases of
    each run merge additively with the adjacent outer rotations. No domain
    reduction is applied, so antisymmetry survives exactly.
    """
    inner = p.inner
    if isinstance(inner, NestedProtocol):
        inner = flatten(inner)
    return PhaseList(_flatten_pair(p.outer.phases, inner.phases))


def inner_spans(p: NestedProtocol) -> list[tuple[int, int]]:
    """Index ranges [start, stop) of each inner-protocol copy inside flatten(p)."""
    inner = p.inner
    if isinstance(inner, NestedProtocol):
        inner = flatten(inner)
    m = p.outer.degree
    n = inner.degree
    if m == 0 or n == 0:
        return []
    return [(k * n, k * n + n + 1) for k in range(m)]


@dataclass(frozen=True)
class CompositionReport:
    max_deviation: float
    passed: bool
    outer_antisymmetric: bool
    inner_antisymmetric: bool
    grid: int


def verify_composition(outer, inner, grid: int | None = None, tol: float = 1e-9) -> CompositionReport:
    """Compare the nested circuit's corner against the composed polynomials.

    Reports the max over the grid of |topleft(nested) - (P_outer o P_inner)(x)|.
    """
    outer = as_phase_list(outer)
    inner = as_phase_list(inner)
    nested = NestedProtocol(outer, inner)
    p_out = extract_poly(outer).p
    p_in = extract_poly(inner).p
    deg = max(p_out.degree * p_in.degree, 1)
    if grid is None:
        grid = max(2 * deg + 1, 33)
    if grid < 2 * deg:
        raise ArgumentError(f"grid must have at least {2 * deg} points")
    xs = np.cos(np.pi * (np.arange(grid) + 0.5) / grid)
    # composing pointwise (outer value at the inner value) avoids the
    # coefficient blow-up of the expanded product polynomial
    dev = 0.0
    for x in xs:
        dev = max(dev, abs(evaluate_nested(nested, x)[0, 0] - p_out(p_in(x))))
    return CompositionReport(
        max_deviation=float(dev),
        passed=bool(dev <= tol),
        outer_antisymmetric=is_antisymmetric(outer),
        inner_antisymmetric=is_antisymmetric(inner),
        grid=grid,
    )


@dataclass(frozen=True)
class DiagramReport:
    max_deviation: float
    commutes: bool
    flat_antisymmetric: bool
    grid: int


def commuting_diagram_check(outer, inner, grid: int = 51, tol: float = 1e-9) -> DiagramReport:
    """Execute both paths of the nesting square and assert they agree.

    Path A nests in circuit space, flattens, and projects the top-left
    entry; path B projects each protocol to its polynomial and composes.
    Both inputs must be antisymmetric: that is exactly the class for which
    the square commutes, and non-members are rejected up front.
    """
    outer = as_phase_list(outer)
    inner = as_phase_list(inner)
    if not is_antisymmetric(outer) or not is_antisymmetric(inner):
        raise PreconditionError(
            "commuting-diagram check requires antisymmetric phase lists: "
            "antisymmetry is the unique symmetry for which circuit nesting "
            "induces polynomial composition"
        )
    nested = NestedProtocol(outer, inner)
    flat = flatten(nested)
    p_out = extract_poly(outer).p
    p_in = extract_poly(inner).p
    xs = np.cos(np.pi * (np.arange(grid) + 0.5) / grid)
    dev = 0.0
    for x in xs:
        path_a = evaluate(flat, x)[0, 0]
        path_b = p_out(p_in(x))
        dev = max(dev, abs(path_a - path_b))
    return DiagramReport(
        max_deviation=float(dev),
        commutes=bool(dev <= tol),
        flat_antisymmetric=is_antisymmetric(flat),
        grid=grid,
    )
