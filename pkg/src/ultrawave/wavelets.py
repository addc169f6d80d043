"""Wavelet bases attached to the non-leaf balls of a measured tree.

Each ball I with at least two positive-measure maximal subballs carries an
orthonormal family of zero-mean functions that are constant on those
subballs; the families at distinct balls are mutually orthogonal, and
together with the normalized constant ``A**-0.5`` (A the total measure) they
form an orthonormal basis of the measure-weighted L2 space on the leaves.

Basis choice inside one ball:

* all subball measures equal and positive -> character construction,
  ``value(I_k) = (p*m)**-0.5 * exp(2*pi*1j*j*k/p)``,
* otherwise -> deterministic Gram-Schmidt of zero-mean indicator differences
  in subball order, with phases fixed so the first nonzero value is real
  positive.

Zero-measure subballs never enter the construction; a ball left with fewer
than two positive-measure subballs contributes no wavelets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .errors import DegenerateBallError, DomainError, ParameterError
from .trees import BallTree, RegularSubtree

EQUAL_MEASURE_RTOL = 1e-12


@dataclass(frozen=True)
class Wavelet:
    """Zero-mean unit-norm function supported on one ball.

    ``values`` maps every maximal subball of ``ball`` to the constant the
    function takes there (0.0 on zero-measure subballs); the function
    vanishes outside ``ball``.
    """

    ball: int
    j: int
    values: Mapping[int, complex]


def _character_rows(p: int, m: float) -> list[np.ndarray]:
    k = np.arange(p)
    c = 1.0 / math.sqrt(p * m)
    return [c * np.exp(2j * np.pi * j * k / p) for j in range(1, p)]


def _gram_schmidt_rows(weights: np.ndarray) -> list[np.ndarray]:
    q = len(weights)
    rows: list[np.ndarray] = []
    for t in range(1, q):
        v = np.zeros(q, dtype=complex)
        v[0] = 1.0 / weights[0]
        v[t] = -1.0 / weights[t]
        for _ in range(2):  # re-orthogonalize for 1e-12-level Gram defects
            for b in rows:
                v = v - np.sum(np.conj(b) * v * weights) * b
        v = v / math.sqrt(float(np.sum(np.abs(v) ** 2 * weights)))
        lead = v[np.flatnonzero(np.abs(v) > 1e-13)[0]]
        v = v * (abs(lead) / lead)
        rows.append(v)
    return rows


def wavelet_basis(tree: BallTree, ball: int) -> list[Wavelet]:
    """Orthonormal zero-mean basis of the span of subball indicators at ``ball``.

    Returns exactly ``(#positive-measure subballs) - 1`` wavelets, indexed
    j = 1, 2, ...; deterministic given the stored subball order.
    """
    kids = tree.maximal_subballs(ball)
    if not kids:
        raise ParameterError(f"ball {ball} is a leaf and carries no wavelets")
    pos = [c for c in kids if tree.measure[c] > 0.0]
    if len(pos) < 2:
        raise DegenerateBallError(
            f"ball {ball} has {len(pos)} positive-measure subballs; need at least 2"
        )
    m0 = tree.measure[pos[0]]
    homogeneous = len(pos) == len(kids) and all(
        math.isclose(tree.measure[c], m0, rel_tol=EQUAL_MEASURE_RTOL) for c in kids
    )
    if homogeneous:
        rows = _character_rows(len(kids), m0)
    else:
        rows = _gram_schmidt_rows(np.array([tree.measure[c] for c in pos]))
    wavelets = []
    for j, row in enumerate(rows, start=1):
        values = {c: 0.0 + 0.0j for c in kids}
        for c, v in zip(pos, row):
            values[c] = complex(v)
        wavelets.append(Wavelet(ball, j, values))
    return wavelets


def tree_wavelets(tree: BallTree) -> Iterator[Wavelet]:
    """All wavelets of the tree in (ball id, j) order, skipping degenerate balls."""
    for ball in tree.non_leaf_balls():
        try:
            yield from wavelet_basis(tree, ball)
        except DegenerateBallError:
            continue


def evaluate(tree: BallTree, wavelet: Wavelet, leaf: int) -> complex:
    """Value of the wavelet at a point (leaf); 0 outside its ball."""
    if not tree.is_leaf(leaf):
        raise ParameterError(f"ball {leaf} is not a point of the space")
    if leaf == wavelet.ball or not tree.is_ancestor(wavelet.ball, leaf):
        return 0.0 + 0.0j
    return complex(wavelet.values[tree.child_toward(wavelet.ball, leaf)])


def normalized_constant(tree: BallTree) -> float:
    """The constant with unit norm, ``total_measure**-0.5``."""
    A = tree.total_measure
    if A <= 0.0:
        raise ParameterError("total measure is zero; no normalized constant exists")
    return 1.0 / math.sqrt(A)


@dataclass(frozen=True)
class TestFunction:
    """Function constant on the minimal balls of a regular subtree.

    ``values`` is keyed by the minimal members of ``subtree`` (the tree
    leaves when ``subtree`` is None, which means the full tree).
    """

    __test__ = False  # not a pytest collection target despite the name

    tree: BallTree
    values: Mapping[int, complex]
    subtree: RegularSubtree | None = None

    def __post_init__(self):
        expected = self.subtree.minimal if self.subtree is not None else self.tree.leaves
        if set(self.values) != set(expected):
            raise ParameterError("values must be keyed by exactly the minimal balls of the domain")

    def leaf_values(self) -> dict[int, complex]:
        """Expansion to all tree leaves (0 outside the subtree's support)."""
        if self.subtree is None:
            return {x: complex(v) for x, v in self.values.items()}
        out = {x: 0.0 + 0.0j for x in self.tree.leaves}
        for b, v in self.values.items():
            for x in self.tree.leaves_under(b):
                out[x] = complex(v)
        return out

    def leaf_vector(self) -> np.ndarray:
        lv = self.leaf_values()
        return np.array([lv[x] for x in self.tree.leaves], dtype=complex)


@dataclass(frozen=True)
class WaveletExpansion:
    """Coefficients of a function: mean against ``A**-0.5`` plus wavelet terms."""

    mean: complex
    coeffs: Mapping[tuple[int, int], complex] = field(default_factory=dict)


def analyze(tree: BallTree, f: TestFunction) -> WaveletExpansion:
    """Wavelet coefficients ``<wavelet, f>`` plus the mean coefficient.

    The pairing conjugates the first argument and weights by the measure.
    Coefficients are computed only at balls where they can be nonzero for a
    function of f's resolution: every non-leaf ball on the full tree, or the
    non-minimal members of f's subtree plus the strict ancestors of its top.
    """
    lv = f.leaf_values()
    integral = [0.0 + 0.0j] * tree.n_vertices
    for v in sorted(range(tree.n_vertices), key=lambda i: -tree.depth[i]):
        kids = tree.children[v]
        if kids:
            integral[v] = sum(integral[c] for c in kids)
        else:
            integral[v] = lv[v] * tree.measure[v]
    if f.subtree is None:
        allowed = None
    else:
        allowed = {b for b in f.subtree.members if b not in f.subtree.minimal}
        allowed.update(tree.ancestors(f.subtree.top))
    coeffs: dict[tuple[int, int], complex] = {}
    for w in tree_wavelets(tree):
        if allowed is not None and w.ball not in allowed:
            continue
        coeffs[(w.ball, w.j)] = sum(
            np.conj(w.values[c]) * integral[c] for c in tree.children[w.ball]
        )
    mean = integral[tree.root] * normalized_constant(tree)
    return WaveletExpansion(complex(mean), coeffs)


def synthesize(
    tree: BallTree, expansion: WaveletExpansion, subtree: RegularSubtree | None = None
) -> TestFunction:
    """Rebuild the point-value function from its coefficients.

    Coefficients may sit on non-minimal members of the subtree or on strict
    ancestors of its top ball (where the wavelet is constant on the domain);
    anything else cannot be represented and raises DomainError.
    """
    targets = subtree.minimal if subtree is not None else tree.leaves
    top = subtree.top if subtree is not None else tree.root
    basis_cache: dict[int, list[Wavelet]] = {}
    for ball, j in expansion.coeffs:
        tree.check_ball(ball)
        ok_member = subtree is None or (ball in subtree and ball not in subtree.minimal)
        ok_ancestor = subtree is not None and ball != top and tree.is_ancestor(ball, top)
        if not (ok_member or ok_ancestor):
            raise DomainError(f"coefficient at ball {ball} lies outside the synthesis domain")
        if ball not in basis_cache:
            basis_cache[ball] = wavelet_basis(tree, ball)
        if not (1 <= j <= len(basis_cache[ball])):
            raise DomainError(f"no wavelet with index {j} at ball {ball}")

    const = expansion.mean * normalized_constant(tree)
    values: dict[int, complex] = {}
    for t in targets:
        acc = complex(const)
        for (ball, j), c in expansion.coeffs.items():
            if c == 0:
                continue
            if ball == t or not tree.is_ancestor(ball, t):
                continue
            w = basis_cache[ball][j - 1]
            acc += c * w.values[tree.child_toward(ball, t)]
        values[t] = acc
    return TestFunction(tree, values, subtree)
