"""Integral operators with kernels of the form T(sup(x, y)).

A symbol assigns a complex value to every non-leaf ball; symbol values at
leaves are never consumed (the sup of two distinct points is a non-leaf
ball, and the diagonal term of the kernel vanishes).  Wavelets diagonalize
these operators; the eigenvalue at a ball I is the finite sum

    lambda_I = T(I) * nu(I) + sum over strict ancestors J of
               T(J) * (nu(J) - nu(child of J on the path to I)).

``apply_dense`` applies the kernel definition directly on leaf values and is
kept deliberately independent of the eigenvalue formula: it is the O(n^2)
oracle the spectral path is tested against.

Scale-homogeneous symbols ``c * diameter**-beta`` on p-adic trees admit an
analytic tail for the infinite upward extension of the truncation: the k-th
ancestor above the root contributes ``c * (1 - 1/p) * p**(k*(1-beta))``, a
geometric series with ratio ``p**(1-beta)`` that converges iff beta > 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import (
    DivergenceError,
    DomainError,
    ParameterError,
    UnsupportedTailError,
)
from .trees import BallTree
from .wavelets import TestFunction


@dataclass(frozen=True)
class TableSymbol:
    """Explicit map from non-leaf ball ids to complex values."""

    entries: Mapping[int, complex]

    def value(self, tree: BallTree, ball: int) -> complex:
        tree.check_ball(ball)
        try:
            return complex(self.entries[ball])
        except KeyError:
            raise DomainError(f"table symbol has no value at ball {ball}") from None


@dataclass(frozen=True)
class HomogeneousSymbol:
    """Closed form ``c * diameter(ball)**-beta``; optional upward tail."""

    c: complex = 1.0
    beta: float = 1.0
    tail: bool = False

    def value(self, tree: BallTree, ball: int) -> complex:
        d = tree.diameter[tree.check_ball(ball)]
        if d <= 0.0:
            raise DomainError(f"ball {ball} has zero diameter; symbol undefined")
        return complex(self.c) * d ** -self.beta


Symbol = TableSymbol | HomogeneousSymbol


def _wants_tail(symbol: Symbol, tail: bool | None) -> bool:
    if tail is None:
        return isinstance(symbol, HomogeneousSymbol) and symbol.tail
    return tail


def _tail_sum(tree: BallTree, symbol: Symbol) -> complex:
    if not isinstance(symbol, HomogeneousSymbol):
        raise UnsupportedTailError("analytic tails exist only for scale-homogeneous symbols")
    if tree.padic is None:
        raise UnsupportedTailError("analytic tails are defined on p-adic trees only")
    p = tree.padic[0]
    if symbol.c == 0:
        return 0.0 + 0.0j
    ratio = float(p) ** (1.0 - symbol.beta)
    if ratio >= 1.0:
        raise DivergenceError(
            f"upward extension diverges: geometric ratio p**(1-beta) = {ratio} >= 1"
        )
    return complex(symbol.c) * (1.0 - 1.0 / p) * ratio / (1.0 - ratio)


def eigenvalue(tree: BallTree, symbol: Symbol, ball: int, tail: bool | None = None) -> complex:
    """Eigenvalue of the operator on the wavelets attached to ``ball``."""
    if tree.is_leaf(ball):
        raise ParameterError(f"ball {ball} is a leaf; wavelets attach to non-leaf balls")
    lam = symbol.value(tree, ball) * tree.measure[ball]
    below = ball
    for anc in tree.ancestors(ball):
        lam += symbol.value(tree, anc) * (tree.measure[anc] - tree.measure[below])
        below = anc
    if _wants_tail(symbol, tail):
        lam += _tail_sum(tree, symbol)
    return complex(lam)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues indexed by non-leaf ball id."""

    eigenvalues: Mapping[int, complex]

    def __getitem__(self, ball: int) -> complex:
        return self.eigenvalues[ball]

    def items(self):
        return sorted(self.eigenvalues.items())


def spectrum(tree: BallTree, symbol: Symbol, tail: bool | None = None) -> Spectrum:
    return Spectrum({b: eigenvalue(tree, symbol, b, tail) for b in tree.non_leaf_balls()})


@dataclass(frozen=True)
class ConvergenceReport:
    converges: bool
    ratio: float | None
    detail: str

    def __bool__(self) -> bool:
        return self.converges


def check_convergence(tree: BallTree, symbol: Symbol, tail: bool | None = None) -> ConvergenceReport:
    """Whether all eigenvalue sums for this symbol/tree combination are finite."""
    if not _wants_tail(symbol, tail):
        return ConvergenceReport(True, None, "finite tree without tail: all sums are finite")
    if not isinstance(symbol, HomogeneousSymbol):
        return ConvergenceReport(False, None, "table symbols do not define an upward tail")
    if tree.padic is None:
        return ConvergenceReport(False, None, "upward tail requires a p-adic tree")
    if symbol.c == 0:
        return ConvergenceReport(True, 0.0, "zero symbol: tail is identically zero")
    p = tree.padic[0]
    ratio = float(p) ** (1.0 - symbol.beta)
    if ratio >= 1.0:
        return ConvergenceReport(
            False, ratio, f"geometric ratio p**(1-beta) = {ratio} >= 1; partial sums grow"
        )
    return ConvergenceReport(True, ratio, f"geometric ratio p**(1-beta) = {ratio} < 1")


def operator_matrix(tree: BallTree, symbol: Symbol) -> np.ndarray:
    """Dense matrix of the operator on leaf values, ordered like ``tree.leaves``."""
    leaves = tree.leaves
    index = {x: i for i, x in enumerate(leaves)}
    n = len(leaves)
    tsup = np.zeros((n, n), dtype=complex)
    for ball in tree.non_leaf_balls():
        t = symbol.value(tree, ball)
        groups = [np.array([index[x] for x in tree.leaves_under(c)]) for c in tree.children[ball]]
        for gi, g1 in enumerate(groups):
            for g2 in groups[gi + 1:]:
                tsup[np.ix_(g1, g2)] = t
                tsup[np.ix_(g2, g1)] = t
    nu = np.array([tree.measure[x] for x in leaves])
    weighted = tsup * nu[None, :]
    return np.diag(weighted.sum(axis=1)) - weighted


def apply_dense(tree: BallTree, symbol: Symbol, f: TestFunction) -> TestFunction:
    """Brute-force kernel application: (Tf)(x) = sum_y T(sup(x,y)) (f(x)-f(y)) nu(y)."""
    out = operator_matrix(tree, symbol) @ f.leaf_vector()
    return TestFunction(tree, dict(zip(tree.leaves, (complex(v) for v in out))))
