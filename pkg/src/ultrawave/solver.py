"""Solving Tu = f with anchor/boundary data, and the characteristic set.

The operator is diagonal on wavelet coefficients, so solving is coefficient
division: ``u = f / lambda`` wherever the eigenvalue is nonzero.  Vertices
whose eigenvalue vanishes (relative to the operator's own term magnitudes)
are characteristic: there the equation constrains nothing, the right-hand
side must vanish for solvability, and the solution coefficients are free
parameters.  Boundary data (indices with some ``j == 0``) is copied into the
solution verbatim; the one-factor case is the n = 1 instance with the anchor
value as its single boundary index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .distributions import GeneralizedFunction, Key, LizorkinSeries, apply_operator, _as_nd_key
from .errors import (
    AnchorError,
    DegenerateBallError,
    DomainError,
    IllConditionedError,
    ParameterError,
    UnsolvableError,
)
from .products import MultiOperator, vertex_key
from .wavelets import wavelet_basis


@dataclass(frozen=True)
class Characteristic:
    vertex: tuple[int, ...]
    eigenvalue: complex
    scale: float


def _classify(op: MultiOperator, epsilon: float):
    lam_map: dict[tuple[int, ...], tuple[complex, float]] = {}
    chars: list[Characteristic] = []
    space = op.space()
    for v in space.generic_vertices(augmented=False):
        lams = op.lambda_vector(v)
        lam = op.form(lams)
        scale = op.term_scale(lams)
        lam_map[v] = (lam, scale)
        if abs(lam) <= epsilon * scale:
            chars.append(Characteristic(v, lam, scale))
    chars.sort(key=lambda c: vertex_key(c.vertex))
    return lam_map, chars


def characteristics(op: MultiOperator, epsilon: float = 1e-9) -> list[Characteristic]:
    """All generic vertices whose eigenvalue vanishes relative to the term scale."""
    return _classify(op, epsilon)[1]


@dataclass(frozen=True)
class SolvabilityViolation:
    vertex: tuple[int, ...]
    j: tuple[int, ...]
    magnitude: float
    threshold: float

    def __str__(self) -> str:
        return (
            f"|f| = {self.magnitude:.3e} at characteristic index "
            f"(vertex={self.vertex}, j={self.j}), allowed {self.threshold:.3e}"
        )


@dataclass(frozen=True)
class SolvabilityReport:
    ok: bool
    violations: tuple[SolvabilityViolation, ...]

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class CauchyProblem:
    """Operator, right-hand side, anchor/boundary data and tolerances.

    ``free_values`` selects the coefficients at characteristic indices:
    ``"zero"``, an integer seed for reproducible random values, or an
    explicit ``{(vertex, j): value}`` map.
    """

    operator: MultiOperator
    rhs: LizorkinSeries
    anchor: tuple[int, ...]
    anchor_value: complex = 0.0
    boundary: Mapping[Key, complex] = field(default_factory=dict)
    epsilon: float = 1e-9
    free_values: str | int | Mapping[Key, complex] = "zero"
    warn_factor: float = 1e-6

    def __post_init__(self):
        self.anchor = tuple(self.anchor)
        if self.rhs.n != self.operator.n or len(self.anchor) != self.operator.n:
            raise ParameterError("operator, right-hand side and anchor arities disagree")
        for (tree, _), b in zip(self.operator.factors, self.anchor):
            tree.check_ball(b)
            if tree.measure[b] <= 0.0:
                raise AnchorError(f"anchor ball {b} has zero measure")
        clean = {}
        for key, c in dict(self.boundary).items():
            k = _as_nd_key(key)
            if all(ji >= 1 for ji in k[1]):
                raise ParameterError(f"boundary index {k} has no j = 0 component")
            if k == (self.anchor, (0,) * self.operator.n):
                raise ParameterError("the pure anchor index is set through anchor_value")
            clean[k] = complex(c)
        self.boundary = clean


def check_solvability(problem: CauchyProblem) -> SolvabilityReport:
    """Necessary conditions: the rhs must vanish at every characteristic vertex."""
    _, chars = _classify(problem.operator, problem.epsilon)
    char_set = {c.vertex for c in chars}
    threshold = problem.epsilon * problem.rhs.norm_inf()
    violations = [
        SolvabilityViolation(vertex, j, abs(c), threshold)
        for (vertex, j), c in problem.rhs.items()
        if vertex in char_set and abs(c) > threshold
    ]
    return SolvabilityReport(not violations, tuple(violations))


@dataclass(frozen=True)
class FreeParam:
    vertex: tuple[int, ...]
    j: tuple[int, ...]
    value: complex


@dataclass(frozen=True)
class ResidualReport:
    max_rel: float
    max_abs: float
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class Solution:
    u: GeneralizedFunction
    free_params: tuple[FreeParam, ...]
    residual: ResidualReport
    characteristic_vertices: tuple[tuple[int, ...], ...]


def _free_value_source(problem: CauchyProblem):
    if problem.free_values == "zero":
        return lambda key: 0.0 + 0.0j
    if isinstance(problem.free_values, int) and not isinstance(problem.free_values, bool):
        rng = np.random.default_rng(problem.free_values)
        return lambda key: complex(rng.standard_normal() + 1j * rng.standard_normal())
    if isinstance(problem.free_values, Mapping):
        table = {_as_nd_key(k): complex(v) for k, v in problem.free_values.items()}
        return lambda key: table.get(key, 0.0 + 0.0j)
    raise ParameterError(f"unsupported free_values specification {problem.free_values!r}")


def solve(problem: CauchyProblem) -> Solution:
    """Divide by the spectrum off the characteristic set; report free parameters.

    Raises UnsolvableError when the rhs sits on a characteristic vertex, and
    IllConditionedError when it sits on an eigenvalue inside the warn band
    (above the characteristic tolerance but below ``warn_factor * scale``).
    """
    op = problem.operator
    trees = [t for t, _ in op.factors]
    lam_map, chars = _classify(op, problem.epsilon)
    char_set = {c.vertex for c in chars}
    fnorm = problem.rhs.norm_inf()
    threshold = problem.epsilon * fnorm

    report = check_solvability(problem)
    if not report:
        raise UnsolvableError(report.violations)

    warnings: list[str] = []
    ill: list[Key] = []
    coeffs: dict[Key, complex] = dict(problem.boundary)
    for (vertex, j), c in problem.rhs.items():
        if vertex in char_set:
            continue  # below the solvability threshold; the free value rules here
        if vertex not in lam_map:
            raise DomainError(f"rhs vertex {vertex} is not a generic vertex of the operator's space")
        lam, scale = lam_map[vertex]
        if abs(lam) < problem.warn_factor * scale:
            if abs(c) > threshold:
                ill.append((vertex, j))
                continue
            warnings.append(
                f"near-characteristic eigenvalue {lam} (scale {scale:.3e}) under index {(vertex, j)}"
            )
        coeffs[(vertex, j)] = c / lam
    if ill:
        raise IllConditionedError(ill)

    free_value = _free_value_source(problem)
    free_params: list[FreeParam] = []
    for c in chars:
        ranges = []
        degenerate = False
        for tree, ball in zip(trees, c.vertex):
            try:
                ranges.append(range(1, len(wavelet_basis(tree, ball)) + 1))
            except DegenerateBallError:
                degenerate = True
                break
        if degenerate:
            continue
        for j in itertools.product(*ranges):
            key = (c.vertex, tuple(j))
            value = free_value(key)
            free_params.append(FreeParam(c.vertex, tuple(j), value))
            coeffs[key] = value

    u = GeneralizedFunction(trees, problem.anchor, coeffs, problem.anchor_value)

    applied = apply_operator(u, op)
    keys = set(applied.coeffs) | set(problem.rhs.coeffs)
    max_abs = 0.0
    for key in keys:
        if key[0] in char_set:
            continue
        max_abs = max(max_abs, abs(applied.coefficient(*key) - problem.rhs.coefficient(*key)))
    denom = fnorm if fnorm > 0 else 1.0
    residual = ResidualReport(max_abs / denom, max_abs, tuple(warnings))
    return Solution(u, tuple(free_params), residual, tuple(c.vertex for c in chars))
