"""Products of ball trees: hypergraph vertices, edges, and tensor wavelets.

A vertex of the product of n factor trees is an n-tuple whose i-th component
is a ball of factor i or, for factors of finite total measure, the marker
``TOP`` sitting above every ball of that factor.  The component carried by
``TOP`` is the normalized constant ``A**-0.5``.  Vertices are never
materialized as a collection; iteration is lazy because the vertex count is
multiplicative.

A vertex is generic when every component is a non-leaf ball or ``TOP``;
generic vertices carry tensor-product wavelets.  Decreasing edges of maximal
dimension at a vertex are cubes obtained by stepping one child down in every
component that has children; ``TOP`` and leaves contribute no direction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DegenerateBallError, DomainError, ParameterError
from .operators import Symbol, eigenvalue
from .trees import BallTree
from .wavelets import Wavelet, evaluate, normalized_constant, wavelet_basis


class _Top:
    """Marker for the formal vertex above all balls of a finite-measure factor."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TOP"


TOP = _Top()

Component = int | _Top
Vertex = tuple[Component, ...]


def component_key(c: Component) -> tuple[int, int]:
    return (1, 0) if c is TOP else (0, c)


def vertex_key(v: Vertex) -> tuple[tuple[int, int], ...]:
    return tuple(component_key(c) for c in v)


@dataclass(frozen=True)
class AugmentedFactor:
    """One factor tree, optionally augmented by the TOP vertex.

    ``top_present`` is true exactly when the factor has finite total measure
    (always the case for the finite trees handled here, but it can be forced
    off to model an infinite-measure factor structurally).
    """

    tree: BallTree
    top_present: bool = True

    @property
    def total_measure(self) -> float:
        return self.tree.total_measure

    def vertex_components(self, augmented: bool) -> list[Component]:
        comps: list[Component] = list(range(self.tree.n_vertices))
        if augmented and self.top_present:
            comps.append(TOP)
        return comps

    def generic_components(self, augmented: bool) -> list[Component]:
        comps: list[Component] = list(self.tree.non_leaf_balls())
        if augmented and self.top_present:
            comps.append(TOP)
        return comps


class ProductSpace:
    """Lazy product of factor trees with vertex iteration and membership tests."""

    def __init__(self, factors: Sequence[AugmentedFactor]):
        if len(factors) == 0:
            raise ParameterError("a product needs at least one factor")
        self.factors = tuple(factors)

    @property
    def n(self) -> int:
        return len(self.factors)

    def trees(self) -> tuple[BallTree, ...]:
        return tuple(f.tree for f in self.factors)

    def _check_vertex(self, v: Vertex) -> Vertex:
        if len(v) != self.n:
            raise ParameterError(f"vertex arity {len(v)} does not match {self.n} factors")
        for c, f in zip(v, self.factors):
            if c is not TOP:
                f.tree.check_ball(c)
        return v

    def vertices(self, augmented: bool = False) -> Iterator[Vertex]:
        yield from itertools.product(*(f.vertex_components(augmented) for f in self.factors))

    def generic_vertices(self, augmented: bool = False) -> Iterator[Vertex]:
        yield from itertools.product(*(f.generic_components(augmented) for f in self.factors))

    def is_generic(self, v: Vertex) -> bool:
        self._check_vertex(v)
        return all(c is TOP or not f.tree.is_leaf(c) for c, f in zip(v, self.factors))

    def contains(self, v: Vertex, augmented: bool = False) -> bool:
        if len(v) != self.n:
            return False
        for c, f in zip(v, self.factors):
            if c is TOP:
                if not (augmented and f.top_present):
                    return False
            elif not (isinstance(c, int) and 0 <= c < f.tree.n_vertices):
                return False
        return True

    def measure(self, v: Vertex) -> float:
        self._check_vertex(v)
        out = 1.0
        for c, f in zip(v, self.factors):
            out *= f.total_measure if c is TOP else f.tree.measure[c]
        return out

    def sup(self, a: Vertex, b: Vertex) -> Vertex:
        self._check_vertex(a)
        self._check_vertex(b)
        out: list[Component] = []
        for ca, cb, f in zip(a, b, self.factors):
            if ca is TOP or cb is TOP:
                out.append(TOP)
            else:
                out.append(f.tree.sup(ca, cb))
        return tuple(out)

    def sufficiently_larger(self, a: Vertex, b: Vertex) -> bool:
        """True iff a is strictly greater than b in every component."""
        self._check_vertex(a)
        self._check_vertex(b)
        for ca, cb, f in zip(a, b, self.factors):
            if ca is TOP:
                if cb is TOP:
                    return False
            elif cb is TOP:
                return False
            elif not (ca != cb and f.tree.is_ancestor(ca, cb)):
                return False
        return True

    def point_grid(self) -> Iterator[tuple[int, ...]]:
        """All tuples of factor leaves, ordered like nested Kronecker products."""
        yield from itertools.product(*(f.tree.leaves for f in self.factors))


def product(factors: Sequence[AugmentedFactor | BallTree]) -> ProductSpace:
    wrapped = [f if isinstance(f, AugmentedFactor) else AugmentedFactor(f) for f in factors]
    return ProductSpace(wrapped)


@dataclass(frozen=True)
class Edge:
    """A decreasing cube edge: one child chosen per stepped factor position."""

    top: Vertex
    positions: tuple[int, ...]
    choices: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.positions)

    def corners(self) -> dict[frozenset[int], Vertex]:
        """Corner vertices keyed by the set of stepped positions.

        The partial order is reverse inclusion of the key sets: the empty set
        is the largest corner (the edge's top vertex), the full set the
        smallest, and those two sit on the cube's main diagonal.
        """
        out: dict[frozenset[int], Vertex] = {}
        for r in range(self.dimension + 1):
            for subset in itertools.combinations(range(self.dimension), r):
                v = list(self.top)
                for s in subset:
                    v[self.positions[s]] = self.choices[s]
                out[frozenset(self.positions[s] for s in subset)] = tuple(v)
        return out

    @property
    def largest(self) -> Vertex:
        return self.top

    @property
    def smallest(self) -> Vertex:
        v = list(self.top)
        for pos, ch in zip(self.positions, self.choices):
            v[pos] = ch
        return tuple(v)


@dataclass(frozen=True)
class EdgeFan:
    """Maximal-dimension decreasing edges that start at one vertex."""

    max_dimension: int
    count: int
    _space: ProductSpace
    _vertex: Vertex
    _positions: tuple[int, ...]

    def __iter__(self) -> Iterator[Edge]:
        if not self._positions:
            return
        child_lists = [self._space.factors[p].tree.children[self._vertex[p]] for p in self._positions]
        for choices in itertools.product(*child_lists):
            yield Edge(self._vertex, self._positions, tuple(choices))


def decreasing_edges(space: ProductSpace, vertex: Vertex) -> EdgeFan:
    """Maximal decreasing edges at a vertex: dimension, count, and enumerator.

    The dimension is the number of components with children; the count is
    the product of their branching indices.
    """
    space._check_vertex(vertex)
    positions = tuple(
        i
        for i, (c, f) in enumerate(zip(vertex, space.factors))
        if c is not TOP and not f.tree.is_leaf(c)
    )
    count = 1
    for p in positions:
        count *= space.factors[p].tree.branching_index(vertex[p])
    if not positions:
        count = 0
    return EdgeFan(len(positions), count, space, vertex, positions)


@dataclass(frozen=True)
class MultiWavelet:
    """Tensor product of factor wavelets / normalized constants at a generic vertex.

    ``parts[i]`` is the factor-i wavelet, or None when component i is TOP and
    the factor contributes the constant ``A_i**-0.5``.  ``j[i]`` is the
    factor wavelet index, None at TOP components.
    """

    vertex: Vertex
    j: tuple[int | None, ...]
    parts: tuple[Wavelet | None, ...]

    def value(self, space: ProductSpace, point: tuple[int, ...]) -> complex:
        out = 1.0 + 0.0j
        for part, f, x in zip(self.parts, space.factors, point):
            if part is None:
                out *= normalized_constant(f.tree)
            else:
                out *= evaluate(f.tree, part, x)
        return out

    def leaf_vector(self, space: ProductSpace) -> np.ndarray:
        vecs = []
        for part, f in zip(self.parts, space.factors):
            tree = f.tree
            if part is None:
                vecs.append(np.full(len(tree.leaves), normalized_constant(tree), dtype=complex))
            else:
                vecs.append(np.array([evaluate(tree, part, x) for x in tree.leaves]))
        out = np.array([1.0 + 0.0j])
        for v in vecs:
            out = np.kron(out, v)
        return out


def multiwavelet_basis(space: ProductSpace, augmented: bool = True) -> Iterator[MultiWavelet]:
    """All tensor wavelets over generic vertices, in deterministic order."""
    per_factor: list[list[tuple[Component, int | None, Wavelet | None]]] = []
    for f in space.factors:
        entries: list[tuple[Component, int | None, Wavelet | None]] = []
        for ball in f.tree.non_leaf_balls():
            try:
                basis = wavelet_basis(f.tree, ball)
            except DegenerateBallError:
                continue
            entries.extend((ball, w.j, w) for w in basis)
        if augmented and f.top_present:
            entries.append((TOP, None, None))
        per_factor.append(entries)
    for combo in itertools.product(*per_factor):
        yield MultiWavelet(
            vertex=tuple(e[0] for e in combo),
            j=tuple(e[1] for e in combo),
            parts=tuple(e[2] for e in combo),
        )


class MultiOperator:
    """Polynomial combination of per-factor operators.

    ``terms`` is a list of ``(indices, coefficient)`` pairs where ``indices``
    is a tuple of 0-based factor positions; the term acts as the composition
    of the factor operators at those positions.  An empty tuple is a constant
    (identity) term.  The eigenvalue at a generic vertex is the same
    polynomial evaluated on the per-factor eigenvalues, with the eigenvalue
    at a TOP component equal to 0 because each factor operator kills
    constants.
    """

    def __init__(
        self,
        factors: Sequence[tuple[BallTree, Symbol]],
        terms: Sequence[tuple[tuple[int, ...], complex]],
    ):
        if len(factors) == 0:
            raise ParameterError("an operator needs at least one factor")
        self.factors = tuple((t, s) for t, s in factors)
        checked = []
        for indices, coeff in terms:
            idx = tuple(int(i) for i in indices)
            for i in idx:
                if not (0 <= i < len(self.factors)):
                    raise ParameterError(f"term index {i} out of range for {len(self.factors)} factors")
            checked.append((idx, complex(coeff)))
        self.terms = tuple(checked)
        self._spectra: list[dict[int, complex] | None] = [None] * len(self.factors)

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def degree(self) -> int:
        return max((len(idx) for idx, _ in self.terms), default=0)

    @classmethod
    def single(cls, tree: BallTree, symbol: Symbol) -> "MultiOperator":
        return cls([(tree, symbol)], [((0,), 1.0)])

    def factor_eigenvalue(self, i: int, ball: int) -> complex:
        cache = self._spectra[i]
        if cache is None:
            tree, symbol = self.factors[i]
            cache = {b: eigenvalue(tree, symbol, b) for b in tree.non_leaf_balls()}
            self._spectra[i] = cache
        return cache[ball]

    def lambda_vector(self, vertex: Vertex) -> tuple[complex, ...]:
        if len(vertex) != self.n:
            raise ParameterError(f"vertex arity {len(vertex)} does not match {self.n} factors")
        out = []
        for i, c in enumerate(vertex):
            if c is TOP:
                out.append(0.0 + 0.0j)
            else:
                tree = self.factors[i][0]
                if tree.is_leaf(c):
                    raise DomainError(f"component {c} of {vertex} is minimal; vertex is not generic")
                out.append(self.factor_eigenvalue(i, c))
        return tuple(out)

    def form(self, lams: Sequence[complex]) -> complex:
        """The multilinear form defining the operator, evaluated at a vector."""
        total = 0.0 + 0.0j
        for indices, coeff in self.terms:
            total += coeff * math.prod((lams[i] for i in indices), start=1.0 + 0.0j)
        return complex(total)

    def term_scale(self, lams: Sequence[complex]) -> float:
        """Largest term magnitude at a vector; 1.0 when every term vanishes."""
        best = 0.0
        for indices, coeff in self.terms:
            mag = abs(coeff)
            for i in indices:
                mag *= abs(lams[i])
            best = max(best, mag)
        return best if best > 0.0 else 1.0

    def eigenvalue(self, vertex: Vertex) -> complex:
        return self.form(self.lambda_vector(vertex))

    def space(self) -> ProductSpace:
        return product([t for t, _ in self.factors])


def multi_eigenvalue(op: MultiOperator, vertex: Vertex) -> complex:
    return op.eigenvalue(vertex)
