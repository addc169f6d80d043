"""Generalized functions as sparse wavelet-coefficient series.

A generalized function on a product of factor trees is determined by

* an anchor vertex (a tuple of positive-measure balls, one per factor) and
  the anchor value ``u0``, fixing its pairing with the anchor's indicator,
* a sparse map of extended coefficients keyed by ``(vertex, j)``: a tuple of
  balls and a tuple of per-factor indices where ``j[i] >= 1`` selects a
  factor wavelet and ``j[i] == 0`` the anchor indicator of factor i (only
  meaningful when ``vertex[i]`` is the anchor ball of that factor).

Pairings with indicator functions reduce to finite sums: per factor, a
wavelet term contributes only when its ball lies strictly above the argument
ball or strictly above the anchor ball, and at most up to their sup; all
higher terms cancel exactly.  ``eval_on_char_nd`` implements that closed
form; the honest all-terms summation lives in the test suite as its oracle.

A Lizorkin series is the same coefficient data without an anchor, restricted
to true wavelet indices (all ``j[i] >= 1``); it pairs with mean-zero
expansions coefficient by coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import AnchorError, DomainError, ParameterError
from .operators import Spectrum
from .products import MultiOperator, component_key
from .trees import BallTree
from .wavelets import Wavelet, WaveletExpansion, TestFunction, synthesize, wavelet_basis

Key = tuple[tuple[int, ...], tuple[int, ...]]

MEAN_ZERO_RTOL = 1e-12


def _key_order(key: Key):
    vertex, j = key
    return tuple(component_key(c) for c in vertex), j


def _as_nd_key(key) -> Key:
    vertex, j = key
    if isinstance(vertex, int):
        vertex = (vertex,)
    if isinstance(j, int):
        j = (j,)
    return tuple(vertex), tuple(j)


@dataclass(frozen=True)
class LizorkinSeries:
    """Formal series over true wavelet indices, stored sparsely."""

    n: int
    coeffs: Mapping[Key, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, c in self.coeffs.items():
            vertex, j = _as_nd_key(key)
            if len(vertex) != self.n or len(j) != self.n:
                raise ParameterError(f"key {key} does not have arity {self.n}")
            if any(ji < 1 for ji in j):
                raise DomainError(f"series key {key} is not a wavelet index (every j must be >= 1)")
            clean[(vertex, j)] = complex(c)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def one_dim(cls, coeffs: Mapping[tuple[int, int], complex]) -> "LizorkinSeries":
        return cls(1, {((b,), (j,)): c for (b, j), c in coeffs.items()})

    def norm_inf(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def items(self):
        return sorted(self.coeffs.items(), key=lambda kv: _key_order(kv[0]))

    def coefficient(self, vertex, j) -> complex:
        return self.coeffs.get(_as_nd_key((vertex, j)), 0.0 + 0.0j)


class GeneralizedFunction:
    """Anchored coefficient series over one tree or a product of trees."""

    def __init__(
        self,
        factors: Sequence[BallTree],
        anchor: Sequence[int],
        coeffs: Mapping[Key, complex] | None = None,
        anchor_value: complex | None = None,
    ):
        self.factors = tuple(factors)
        if len(self.factors) == 0:
            raise ParameterError("need at least one factor tree")
        self.anchor = tuple(anchor)
        if len(self.anchor) != self.n:
            raise ParameterError("anchor arity does not match the number of factors")
        for tree, b in zip(self.factors, self.anchor):
            tree.check_ball(b)
            if tree.measure[b] <= 0.0:
                raise AnchorError(f"anchor ball {b} has zero measure")
        self._basis: dict[tuple[int, int], list[Wavelet]] = {}
        self.coeffs: dict[Key, complex] = {}
        for key, c in (coeffs or {}).items():
            k = _as_nd_key(key)
            self._check_key(k)
            self.coeffs[k] = complex(c)
        if anchor_value is not None:
            self.coeffs[self.anchor_key] = complex(anchor_value)

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def anchor_key(self) -> Key:
        return (self.anchor, (0,) * self.n)

    @property
    def anchor_value(self) -> complex:
        return self.coeffs.get(self.anchor_key, 0.0 + 0.0j)

    def _check_key(self, key: Key) -> None:
        vertex, j = key
        if len(vertex) != self.n or len(j) != self.n:
            raise ParameterError(f"key {key} does not have arity {self.n}")
        for i, (tree, b, ji) in enumerate(zip(self.factors, vertex, j)):
            tree.check_ball(b)
            if ji == 0:
                if b != self.anchor[i]:
                    raise DomainError(
                        f"index {key}: j=0 components exist only at the anchor ball of factor {i}"
                    )
            elif ji >= 1:
                if tree.is_leaf(b):
                    raise DomainError(f"index {key}: wavelets do not attach to the minimal ball {b}")
                if ji > len(self.factor_basis(i, b)):
                    raise DomainError(f"index {key}: no wavelet with index {ji} at ball {b}")
            else:
                raise DomainError(f"index {key}: negative j")

    def factor_basis(self, i: int, ball: int) -> list[Wavelet]:
        cached = self._basis.get((i, ball))
        if cached is None:
            cached = wavelet_basis(self.factors[i], ball)
            self._basis[(i, ball)] = cached
        return cached

    def coefficient(self, vertex, j) -> complex:
        return self.coeffs.get(_as_nd_key((vertex, j)), 0.0 + 0.0j)

    def wavelet_items(self):
        """Stored coefficients at true wavelet indices (every j >= 1)."""
        return [
            (key, c)
            for key, c in sorted(self.coeffs.items(), key=lambda kv: _key_order(kv[0]))
            if all(ji >= 1 for ji in key[1])
        ]

    def items(self):
        return sorted(self.coeffs.items(), key=lambda kv: _key_order(kv[0]))

    @classmethod
    def one_dim(
        cls,
        tree: BallTree,
        anchor_ball: int,
        anchor_value: complex = 0.0,
        coeffs: Mapping[tuple[int, int], complex] | None = None,
    ) -> "GeneralizedFunction":
        nd = {((b,), (j,)): c for (b, j), c in (coeffs or {}).items()}
        return cls([tree], (anchor_ball,), nd, anchor_value)


def _indicator_integral(tree: BallTree, ball: int, values: Mapping[int, complex], target: int) -> complex:
    """Integral of the ball's wavelet over the target ball.

    Nonzero only when the target sits strictly inside the wavelet's ball, in
    which case the wavelet is constant on it.
    """
    if target == ball or not tree.is_ancestor(ball, target):
        return 0.0 + 0.0j
    return values[tree.child_toward(ball, target)] * tree.measure[target]


def eval_on_char_nd(u: GeneralizedFunction, vertex: Sequence[int]) -> complex:
    """Pairing with the indicator of a product ball, via the finite closed form."""
    vertex = tuple(vertex)
    if len(vertex) != u.n:
        raise ParameterError(f"vertex arity {len(vertex)} does not match {u.n} factors")
    for tree, b in zip(u.factors, vertex):
        tree.check_ball(b)
    sups = [tree.sup(b, a) for tree, b, a in zip(u.factors, vertex, u.anchor)]
    total = 0.0 + 0.0j
    for (kv, kj), c in u.items():  # sorted: summation order independent of construction
        if c == 0:
            continue
        term = c
        for i in range(u.n):
            tree = u.factors[i]
            ball, ji = kv[i], kj[i]
            b0, a0, s = vertex[i], u.anchor[i], sups[i]
            if ji == 0:
                term *= tree.measure[b0]
                continue
            above_arg = ball != b0 and tree.is_ancestor(ball, b0)
            above_anchor = ball != a0 and tree.is_ancestor(ball, a0)
            if not ((above_arg or above_anchor) and tree.is_ancestor(s, ball)):
                term = 0.0 + 0.0j
                break
            w = u.factor_basis(i, ball)[ji - 1]
            term *= _indicator_integral(tree, ball, w.values, b0) - (
                tree.measure[b0] / tree.measure[a0]
            ) * _indicator_integral(tree, ball, w.values, a0)
        total += term
    return complex(total)


def eval_on_char(u: GeneralizedFunction, ball: int) -> complex:
    if u.n != 1:
        raise ParameterError("eval_on_char expects a one-factor generalized function")
    return eval_on_char_nd(u, (ball,))


def eval_on_product(u: GeneralizedFunction, factor_values: Sequence[Mapping[int, complex]]) -> complex:
    """Apply ``u`` to a rank-1 test function given by per-factor leaf values."""
    if len(factor_values) != u.n:
        raise ParameterError(f"need one leaf-value map per factor, got {len(factor_values)}")
    masses = []
    for tree, fv in zip(u.factors, factor_values):
        masses.append(sum(complex(fv[x]) * tree.measure[x] for x in sorted(fv)))
    total = 0.0 + 0.0j
    for (kv, kj), c in u.items():
        if c == 0:
            continue
        term = c
        for i in range(u.n):
            tree = u.factors[i]
            fv = factor_values[i]
            ball, ji = kv[i], kj[i]
            if ji == 0:
                term *= masses[i]
                continue
            w = u.factor_basis(i, ball)[ji - 1]
            integral = 0.0 + 0.0j
            for child in tree.children[ball]:
                val = w.values[child]
                if val == 0:
                    continue
                integral += val * sum(
                    complex(fv.get(x, 0.0)) * tree.measure[x] for x in tree.leaves_under(child)
                )
            a0 = u.anchor[i]
            anchored = _indicator_integral(tree, ball, w.values, a0)
            term *= integral - masses[i] / tree.measure[a0] * anchored
            if term == 0:
                break
        total += term
    return complex(total)


def eval_on_test(u: GeneralizedFunction, f: TestFunction | WaveletExpansion) -> complex:
    """Apply a one-factor generalized function to a test function."""
    if u.n != 1:
        raise ParameterError("eval_on_test expects a one-factor generalized function")
    tree = u.factors[0]
    if isinstance(f, WaveletExpansion):
        f = synthesize(tree, f)
    return eval_on_product(u, [f.leaf_values()])


def extended_leaf_values(
    tree: BallTree, anchor_ball: int, ball: int, j: int, conjugate: bool = False
) -> dict[int, complex]:
    """Leaf values of one extended family member of a factor.

    ``j >= 1`` selects a wavelet at ``ball`` (the zero function at a leaf);
    ``j == 0`` is the anchor indicator when ``ball`` is the anchor and the
    zero function otherwise.
    """
    out: dict[int, complex] = {}
    if j == 0:
        if ball == anchor_ball:
            for x in tree.leaves_under(anchor_ball):
                out[x] = 1.0 + 0.0j
        return out
    if tree.is_leaf(ball):
        return out
    for w in wavelet_basis(tree, ball):
        if w.j == j:
            for child, val in w.values.items():
                v = complex(val).conjugate() if conjugate else complex(val)
                if v == 0:
                    continue
                for x in tree.leaves_under(child):
                    out[x] = v
            return out
    raise DomainError(f"no wavelet with index {j} at ball {ball}")


def eval_extended(u: GeneralizedFunction, vertex: Sequence[int], j: Sequence[int]) -> complex:
    """Value of ``u`` on the conjugate of an extended family member."""
    vertex = tuple(vertex)
    j = tuple(j)
    factor_values = [
        extended_leaf_values(tree, a0, b, ji, conjugate=True)
        for tree, a0, b, ji in zip(u.factors, u.anchor, vertex, j)
    ]
    return eval_on_product(u, factor_values)


def lizorkin_pair(phi: LizorkinSeries, f: WaveletExpansion | Mapping[Key, complex]) -> complex:
    """Finite pairing: sum of series coefficients times expansion coefficients."""
    if isinstance(f, WaveletExpansion):
        if phi.n != 1:
            raise ParameterError("a one-dimensional expansion pairs with a one-factor series")
        scale = max(1.0, max((abs(c) for c in f.coeffs.values()), default=0.0))
        if abs(f.mean) > MEAN_ZERO_RTOL * scale:
            raise DomainError(f"expansion is not mean-zero (mean coefficient {f.mean})")
        lookup = {_as_nd_key((k, j)): c for (k, j), c in f.coeffs.items()}
    else:
        lookup = {_as_nd_key(k): complex(c) for k, c in f.items()}
    return complex(sum(c * lookup.get(key, 0.0) for key, c in phi.items()))


def apply_operator(u: GeneralizedFunction, operator: Spectrum | MultiOperator) -> LizorkinSeries:
    """Coefficient series of the operator applied to ``u``.

    Diagonal action: each true wavelet coefficient is scaled by the
    eigenvalue at its vertex; indicator components and the anchor value are
    killed because the operator maps constants to zero.
    """
    out: dict[Key, complex] = {}
    for (vertex, j), c in u.wavelet_items():
        if isinstance(operator, Spectrum):
            if u.n != 1:
                raise ParameterError("a plain spectrum applies to one-factor functions only")
            lam = operator[vertex[0]]
        else:
            lam = operator.eigenvalue(vertex)
        out[(vertex, j)] = lam * c
    return LizorkinSeries(u.n, out)
