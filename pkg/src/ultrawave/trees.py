"""Measured ball trees.

A finite ultrametric space is represented by the directed tree of its balls:
vertices are integer ids ``0..n-1``, each carrying a measure and a diameter,
with edges given by immediate inclusion.  Leaves play the role of points.
Trees are immutable after construction; every operation here is a pure read,
so instances can be shared freely between threads.

Structural invariants enforced at construction:

* the measure of a non-leaf ball equals the sum over its maximal subballs
  (relative tolerance ``ADDITIVITY_RTOL``),
* diameters strictly decrease from parent to child (leaves may have 0),
* every non-leaf ball has at least two maximal subballs.

Zero-measure balls are allowed but flagged; downstream constructions skip
them where a positive measure is required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from operator import index as operator_index
from typing import Iterable, Iterator, Sequence

from .errors import ParameterError, SpaceValidationError, UnknownBallError

ADDITIVITY_RTOL = 1e-12


class BallTree:
    """Finite tree of balls with measures and diameters.

    Children are kept in construction order (ascending id for the built-in
    constructors); all deterministic tie-breaks downstream rely on that order.
    """

    def __init__(
        self,
        parent: Sequence[int | None],
        measure: Sequence[float],
        diameter: Sequence[float],
        padic: tuple[int, int] | None = None,
    ):
        n = len(parent)
        if n == 0:
            raise ParameterError("a tree needs at least one vertex")
        if len(measure) != n or len(diameter) != n:
            raise ParameterError("parent/measure/diameter lengths disagree")
        self.parent = tuple(parent)
        self.measure = tuple(float(m) for m in measure)
        self.diameter = tuple(float(d) for d in diameter)
        self.padic = padic

        children: list[list[int]] = [[] for _ in range(n)]
        roots = []
        for i, p in enumerate(self.parent):
            if p is None:
                roots.append(i)
            elif not (0 <= p < n):
                raise SpaceValidationError(f"vertex {i} has out-of-range parent {p}", ball=i)
            else:
                children[p].append(i)
        if len(roots) != 1:
            raise SpaceValidationError(f"expected exactly one root, found {len(roots)}")
        self.root = roots[0]
        self.children = tuple(tuple(c) for c in children)

        depth = [-1] * n
        depth[self.root] = 0
        stack = [self.root]
        order = []
        while stack:
            v = stack.pop()
            order.append(v)
            for c in self.children[v]:
                depth[c] = depth[v] + 1
                stack.append(c)
        if len(order) != n:
            missing = next(i for i in range(n) if depth[i] < 0)
            raise SpaceValidationError(f"vertex {missing} is not reachable from the root", ball=missing)
        self.depth = tuple(depth)

        self.leaves = tuple(i for i in range(n) if not self.children[i])
        self.zero_measure = frozenset(i for i in range(n) if self.measure[i] == 0.0)
        self._leaves_under_cache: dict[int, tuple[int, ...]] = {}
        self._validate()

    # -- structure checks -------------------------------------------------

    def _validate(self) -> None:
        for i in range(self.n_vertices):
            m = self.measure[i]
            if not math.isfinite(m) or m < 0:
                raise SpaceValidationError(f"ball {i} has invalid measure {m}", ball=i)
            if not math.isfinite(self.diameter[i]) or self.diameter[i] < 0:
                raise SpaceValidationError(f"ball {i} has invalid diameter {self.diameter[i]}", ball=i)
            kids = self.children[i]
            if not kids:
                continue
            if len(kids) < 2:
                raise SpaceValidationError(f"non-leaf ball {i} has a single maximal subball", ball=i)
            total = math.fsum(self.measure[c] for c in kids)
            tol = ADDITIVITY_RTOL * max(m, total, 1.0)
            if abs(m - total) > tol:
                raise SpaceValidationError(
                    f"measure of ball {i} is {m} but its subballs sum to {total}", ball=i
                )
            for c in kids:
                if not self.diameter[c] < self.diameter[i]:
                    raise SpaceValidationError(
                        f"diameter does not strictly decrease from ball {i} to ball {c}", ball=c
                    )

    # -- basic queries ------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.parent)

    @property
    def total_measure(self) -> float:
        return self.measure[self.root]

    def check_ball(self, i: int) -> int:
        try:
            idx = operator_index(i)
        except TypeError:
            raise UnknownBallError(f"ball id {i!r} does not belong to this tree") from None
        if not (0 <= idx < self.n_vertices):
            raise UnknownBallError(f"ball id {i!r} does not belong to this tree")
        return idx

    def is_leaf(self, i: int) -> bool:
        return not self.children[self.check_ball(i)]

    def branching_index(self, i: int) -> int:
        return len(self.children[self.check_ball(i)])

    def maximal_subballs(self, i: int) -> tuple[int, ...]:
        return self.children[self.check_ball(i)]

    def non_leaf_balls(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_vertices) if self.children[i])

    def ancestors(self, i: int) -> Iterator[int]:
        """Strict ancestors of ``i``, nearest first."""
        p = self.parent[self.check_ball(i)]
        while p is not None:
            yield p
            p = self.parent[p]

    def is_ancestor(self, a: int, d: int) -> bool:
        """True iff ``a`` contains ``d`` (a ball contains itself)."""
        self.check_ball(a)
        self.check_ball(d)
        while self.depth[d] > self.depth[a]:
            d = self.parent[d]
        return d == a

    def sup(self, a: int, b: int) -> int:
        """Minimal ball containing both arguments (lowest common ancestor)."""
        a = self.check_ball(a)
        b = self.check_ball(b)
        while self.depth[a] > self.depth[b]:
            a = self.parent[a]
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
        while a != b:
            a = self.parent[a]
            b = self.parent[b]
        return a

    def child_toward(self, anc: int, desc: int) -> int:
        """The maximal subball of ``anc`` containing ``desc``."""
        self.check_ball(anc)
        d = self.check_ball(desc)
        if self.depth[d] <= self.depth[anc]:
            raise ParameterError(f"ball {desc} is not strictly inside ball {anc}")
        while self.depth[d] > self.depth[anc] + 1:
            d = self.parent[d]
        if self.parent[d] != anc:
            raise ParameterError(f"ball {desc} is not inside ball {anc}")
        return d

    def leaves_under(self, i: int) -> tuple[int, ...]:
        i = self.check_ball(i)
        cached = self._leaves_under_cache.get(i)
        if cached is None:
            if not self.children[i]:
                cached = (i,)
            else:
                acc: list[int] = []
                for c in self.children[i]:
                    acc.extend(self.leaves_under(c))
                cached = tuple(acc)
            self._leaves_under_cache[i] = cached
        return cached


def build_padic_tree(p: int, depth: int) -> BallTree:
    """Full p-ary tree of the given depth.

    The root has measure and diameter 1; a ball at level k has measure and
    diameter ``p**-k``; children are ordered by digit 0..p-1.  Vertex ids are
    assigned level by level, so level k occupies ids
    ``(p**k - 1)//(p - 1) .. (p**(k+1) - 1)//(p - 1) - 1``.
    """
    if not isinstance(p, int) or isinstance(p, bool) or p < 2:
        raise ParameterError(f"p must be an integer >= 2, got {p!r}")
    if not isinstance(depth, int) or isinstance(depth, bool) or depth < 1:
        raise ParameterError(f"depth must be an integer >= 1, got {depth!r}")
    parent: list[int | None] = [None]
    measure = [1.0]
    diameter = [1.0]
    offset_prev = 0
    level_size = 1
    for k in range(1, depth + 1):
        scale = float(p) ** -k
        for m in range(level_size * p):
            parent.append(offset_prev + m // p)
            measure.append(scale)
            diameter.append(scale)
        offset_prev += level_size
        level_size *= p
    return BallTree(parent, measure, diameter, padic=(p, depth))


def tree_from_leaf_measures(
    parent: Sequence[int | None],
    leaf_measure: dict[int, float],
    diameter: Sequence[float],
) -> BallTree:
    """Build a tree whose interior measures are recomputed from leaf data.

    Forcing additivity bottom-up avoids drift between levels when the caller
    only knows the point masses.
    """
    n = len(parent)
    children: list[list[int]] = [[] for _ in range(n)]
    for i, p in enumerate(parent):
        if p is not None:
            children[p].append(i)
    measure = [0.0] * n
    order = sorted(range(n), key=lambda i: -_depth_of(parent, i))
    for i in order:
        if children[i]:
            measure[i] = math.fsum(measure[c] for c in children[i])
        else:
            measure[i] = float(leaf_measure[i])
    return BallTree(parent, measure, diameter)


def _depth_of(parent: Sequence[int | None], i: int) -> int:
    d = 0
    while parent[i] is not None:
        i = parent[i]
        d += 1
    return d


def sup(tree: BallTree, a: int, b: int) -> int:
    return tree.sup(a, b)


def maximal_subballs(tree: BallTree, i: int) -> tuple[int, ...]:
    return tree.maximal_subballs(i)


def branching_index(tree: BallTree, i: int) -> int:
    return tree.branching_index(i)


@dataclass(frozen=True)
class Violation:
    condition: int  # 1 = sup closure, 2 = interval closure, 3 = sibling closure
    witness: tuple[int, ...]

    def __str__(self) -> str:
        return f"condition {self.condition} violated at {self.witness}"


@dataclass(frozen=True)
class RegularityReport:
    ok: bool
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return self.ok


def validate_regular_subtree(tree: BallTree, members: Iterable[int]) -> RegularityReport:
    """Check the three closure conditions of a regular subtree.

    1. closed under sup, 2. interval-closed, 3. sibling-closed.  Each
    violation is reported with a witness pair/triple of ball ids.
    """
    mset = frozenset(tree.check_ball(m) for m in members)
    if not mset:
        raise ParameterError("member set must be non-empty")
    violations: list[Violation] = []

    ordered = sorted(mset)
    for ai, a in enumerate(ordered):
        for b in ordered[ai + 1:]:
            s = tree.sup(a, b)
            if s not in mset:
                violations.append(Violation(1, (a, b, s)))

    for m in ordered:
        gap: list[int] = []
        for anc in tree.ancestors(m):
            if anc in mset:
                if gap:
                    violations.append(Violation(2, (m, gap[0], anc)))
                break
            gap.append(anc)

    for m in ordered:
        kids = tree.children[m]
        inside = [c for c in kids if c in mset]
        if inside and len(inside) < len(kids):
            missing = next(c for c in kids if c not in mset)
            violations.append(Violation(3, (m, missing)))

    return RegularityReport(not violations, tuple(violations))


class RegularSubtree:
    """A validated sup-, interval- and sibling-closed vertex set."""

    def __init__(self, tree: BallTree, members: Iterable[int]):
        report = validate_regular_subtree(tree, members)
        if not report:
            raise ParameterError(f"not a regular subtree: {report.violations[0]}")
        self.tree = tree
        self.members = frozenset(members)
        self.top = reduce(tree.sup, self.members)
        self.minimal = tuple(
            sorted(m for m in self.members if not any(c in self.members for c in tree.children[m]))
        )

    def __contains__(self, ball: int) -> bool:
        return ball in self.members


def full_subtree(tree: BallTree) -> RegularSubtree:
    return RegularSubtree(tree, range(tree.n_vertices))
