"""JSON file formats for spaces, symbols, operators, series and solutions.

Anywhere a space file is expected, the inline shorthand ``padic(p,depth)``
is accepted; symbols likewise accept ``homog(beta=...,c=...,tail=...)``.
References inside composite files (operator factor symbols, problem parts)
are paths resolved relative to the referencing file's directory.
"""

from __future__ import annotations

import json
import os
import re
from typing import Any, Mapping, Sequence

from .distributions import GeneralizedFunction, LizorkinSeries
from .errors import FileFormatError
from .operators import HomogeneousSymbol, Symbol, TableSymbol
from .products import MultiOperator
from .solver import CauchyProblem, Solution
from .trees import BallTree, build_padic_tree
from .wavelets import WaveletExpansion

_PADIC_RE = re.compile(r"^padic\(\s*(\d+)\s*,\s*(\d+)\s*\)$")
_HOMOG_RE = re.compile(r"^homog\((.*)\)$")


def _read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read file: {exc}", location=path) from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}", location=path) from exc


def _write_json(obj: Any, path: str | None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


def _complex_of(entry: Mapping[str, Any], location: str) -> complex:
    try:
        return complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"bad complex entry {entry!r}", location=location) from exc


def _pair_of(value: Any, location: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, Sequence) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise FileFormatError(f"expected [re, im], got {value!r}", location=location)


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# -- spaces ----------------------------------------------------------------


def space_from_obj(obj: Mapping[str, Any], location: str = "space") -> BallTree:
    kind = obj.get("kind")
    if kind == "padic":
        return build_padic_tree(int(obj["p"]), int(obj["depth"]))
    if kind == "explicit":
        vertices = obj.get("vertices")
        if not isinstance(vertices, list) or not vertices:
            raise FileFormatError("explicit space needs a non-empty 'vertices' list", location)
        n = len(vertices)
        parent: list[int | None] = [None] * n
        measure = [0.0] * n
        diameter = [0.0] * n
        seen = set()
        for rec in vertices:
            try:
                i = int(rec["id"])
            except (KeyError, TypeError, ValueError):
                raise FileFormatError(f"vertex record without usable id: {rec!r}", location) from None
            if not (0 <= i < n) or i in seen:
                raise FileFormatError(f"vertex ids must be unique integers 0..{n - 1}; got {i}", location)
            seen.add(i)
            p = rec.get("parent")
            parent[i] = None if p is None else int(p)
            measure[i] = float(rec["measure"])
            diameter[i] = float(rec["diameter"])
        return BallTree(parent, measure, diameter)
    raise FileFormatError(f"unknown space kind {kind!r}", location)


def load_space(spec: str | Mapping[str, Any], base_dir: str = ".") -> BallTree:
    if isinstance(spec, Mapping):
        return space_from_obj(spec)
    m = _PADIC_RE.match(spec.strip())
    if m:
        return build_padic_tree(int(m.group(1)), int(m.group(2)))
    path = os.path.join(base_dir, spec)
    return space_from_obj(_read_json(path), location=path)


def space_to_obj(tree: BallTree) -> dict[str, Any]:
    if tree.padic is not None:
        return {"kind": "padic", "p": tree.padic[0], "depth": tree.padic[1]}
    return {
        "kind": "explicit",
        "vertices": [
            {
                "id": i,
                "parent": tree.parent[i],
                "measure": tree.measure[i],
                "diameter": tree.diameter[i],
            }
            for i in range(tree.n_vertices)
        ],
    }


# -- symbols ---------------------------------------------------------------


def symbol_from_obj(obj: Mapping[str, Any], location: str = "symbol") -> Symbol:
    kind = obj.get("kind")
    if kind == "table":
        entries = {}
        for rec in obj.get("entries", []):
            entries[int(rec["ball"])] = _complex_of(rec, location)
        return TableSymbol(entries)
    if kind == "homogeneous":
        c = _pair_of(obj.get("c", 1.0), location)
        return HomogeneousSymbol(c=c, beta=float(obj.get("beta", 1.0)), tail=bool(obj.get("tail", False)))
    raise FileFormatError(f"unknown symbol kind {kind!r}", location)


def _homog_shorthand(text: str) -> HomogeneousSymbol | None:
    m = _HOMOG_RE.match(text.strip())
    if not m:
        return None
    kwargs: dict[str, Any] = {}
    body = m.group(1).strip()
    for part in filter(None, (p.strip() for p in body.split(","))):
        if "=" not in part:
            raise FileFormatError(f"bad homog() argument {part!r}", location=text)
        key, val = (s.strip() for s in part.split("=", 1))
        if key == "beta":
            kwargs["beta"] = float(val)
        elif key == "c":
            kwargs["c"] = complex(val)
        elif key == "tail":
            kwargs["tail"] = val.lower() in ("1", "true", "yes")
        else:
            raise FileFormatError(f"unknown homog() key {key!r}", location=text)
    if "beta" not in kwargs:
        raise FileFormatError("homog() needs beta=...", location=text)
    return HomogeneousSymbol(**kwargs)


def load_symbol(spec: str | Mapping[str, Any], base_dir: str = ".") -> Symbol:
    if isinstance(spec, Mapping):
        return symbol_from_obj(spec)
    short = _homog_shorthand(spec)
    if short is not None:
        return short
    path = os.path.join(base_dir, spec)
    return symbol_from_obj(_read_json(path), location=path)


def symbol_to_obj(symbol: Symbol) -> dict[str, Any]:
    if isinstance(symbol, TableSymbol):
        return {
            "kind": "table",
            "entries": [
                {"ball": b, "re": complex(v).real, "im": complex(v).imag}
                for b, v in sorted(symbol.entries.items())
            ],
        }
    return {"kind": "homogeneous", "c": _pair(symbol.c), "beta": symbol.beta, "tail": symbol.tail}


# -- operators ---------------------------------------------------------------


def operator_from_obj(
    obj: Mapping[str, Any], trees: Sequence[BallTree], base_dir: str = ".", location: str = "operator"
) -> MultiOperator:
    factor_specs = obj.get("factors")
    if not isinstance(factor_specs, list) or len(factor_specs) != len(trees):
        raise FileFormatError(
            f"operator lists {len(factor_specs or [])} factor symbols for {len(trees)} spaces", location
        )
    symbols = [load_symbol(s, base_dir) for s in factor_specs]
    terms = []
    for rec in obj.get("terms", []):
        indices = tuple(int(i) - 1 for i in rec.get("indices", []))
        terms.append((indices, _complex_of(rec, location)))
    return MultiOperator(list(zip(trees, symbols)), terms)


def load_operator(spec: str | Mapping[str, Any], trees: Sequence[BallTree], base_dir: str = ".") -> MultiOperator:
    if isinstance(spec, Mapping):
        return operator_from_obj(spec, trees, base_dir)
    path = os.path.join(base_dir, spec)
    return operator_from_obj(_read_json(path), trees, os.path.dirname(path) or ".", location=path)


def operator_to_obj(op: MultiOperator) -> dict[str, Any]:
    return {
        "factors": [symbol_to_obj(sym) for _, sym in op.factors],
        "terms": [
            {"indices": [i + 1 for i in idx], "re": coeff.real, "im": coeff.imag}
            for idx, coeff in op.terms
        ],
    }


# -- coefficient collections -------------------------------------------------


def _coeff_entry_key(rec: Mapping[str, Any], location: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if "ball" in rec:
        return (int(rec["ball"]),), (int(rec["j"]),)
    try:
        vertex = tuple(int(b) for b in rec["vertex"])
        j = tuple(int(x) for x in rec["j"])
    except (KeyError, TypeError, ValueError):
        raise FileFormatError(f"bad coefficient entry {rec!r}", location) from None
    return vertex, j


def _coeff_entry_obj(key, value: complex) -> dict[str, Any]:
    vertex, j = key
    if len(vertex) == 1:
        return {"ball": vertex[0], "j": j[0], "re": complex(value).real, "im": complex(value).imag}
    return {
        "vertex": list(vertex),
        "j": list(j),
        "re": complex(value).real,
        "im": complex(value).imag,
    }


def expansion_from_obj(obj: Mapping[str, Any], location: str = "expansion") -> WaveletExpansion:
    mean = _pair_of(obj.get("mean", 0.0), location)
    coeffs = {}
    for rec in obj.get("coeffs", []):
        vertex, j = _coeff_entry_key(rec, location)
        if len(vertex) != 1:
            raise FileFormatError("a wavelet expansion is one-dimensional", location)
        coeffs[(vertex[0], j[0])] = _complex_of(rec, location)
    return WaveletExpansion(mean, coeffs)


def expansion_to_obj(e: WaveletExpansion) -> dict[str, Any]:
    return {
        "mean": _pair(e.mean),
        "coeffs": [
            _coeff_entry_obj(((b,), (j,)), c) for (b, j), c in sorted(e.coeffs.items())
        ],
    }


def lizorkin_from_obj(obj: Mapping[str, Any], n: int, location: str = "series") -> LizorkinSeries:
    mean = _pair_of(obj.get("mean", 0.0), location)
    if mean != 0:
        raise FileFormatError("a right-hand side series must have zero mean coefficient", location)
    coeffs = {}
    for rec in obj.get("coeffs", []):
        coeffs[_coeff_entry_key(rec, location)] = _complex_of(rec, location)
    return LizorkinSeries(n, coeffs)


def load_lizorkin(spec: str | Mapping[str, Any], n: int, base_dir: str = ".") -> LizorkinSeries:
    if isinstance(spec, Mapping):
        return lizorkin_from_obj(spec, n)
    path = os.path.join(base_dir, spec)
    return lizorkin_from_obj(_read_json(path), n, location=path)


def lizorkin_to_obj(series: LizorkinSeries) -> dict[str, Any]:
    return {"mean": [0.0, 0.0], "coeffs": [_coeff_entry_obj(k, c) for k, c in series.items()]}


# -- generalized functions / solutions ---------------------------------------


def genfun_to_obj(u: GeneralizedFunction) -> dict[str, Any]:
    coeffs = [
        _coeff_entry_obj(key, c) for key, c in u.items() if key != u.anchor_key
    ]
    return {
        "anchor": {"vertex": list(u.anchor), "value": _pair(u.anchor_value)},
        "coeffs": coeffs,
    }


def genfun_from_obj(
    obj: Mapping[str, Any], trees: Sequence[BallTree], location: str = "function"
) -> GeneralizedFunction:
    anchor_obj = obj.get("anchor")
    if not isinstance(anchor_obj, Mapping):
        raise FileFormatError("missing 'anchor' object", location)
    anchor = tuple(int(b) for b in anchor_obj["vertex"])
    value = _pair_of(anchor_obj.get("value", 0.0), location)
    coeffs = {}
    for rec in obj.get("coeffs", []):
        coeffs[_coeff_entry_key(rec, location)] = _complex_of(rec, location)
    return GeneralizedFunction(trees, anchor, coeffs, value)


def solution_to_obj(sol: Solution) -> dict[str, Any]:
    obj = genfun_to_obj(sol.u)
    obj["free_params"] = [
        _coeff_entry_obj((fp.vertex, fp.j), fp.value) for fp in sol.free_params
    ]
    obj["residual"] = {
        "max_rel": sol.residual.max_rel,
        "max_abs": sol.residual.max_abs,
        "warnings": list(sol.residual.warnings),
    }
    return obj


def load_solution(spec: str | Mapping[str, Any], trees: Sequence[BallTree], base_dir: str = ".") -> GeneralizedFunction:
    if isinstance(spec, Mapping):
        return genfun_from_obj(spec, trees)
    path = os.path.join(base_dir, spec)
    return genfun_from_obj(_read_json(path), trees, location=path)


# -- problems ------------------------------------------------------------------


def problem_from_obj(
    obj: Mapping[str, Any], base_dir: str = ".", location: str = "problem"
) -> tuple[CauchyProblem, list[BallTree]]:
    space_specs = obj.get("spaces")
    if not isinstance(space_specs, list) or not space_specs:
        raise FileFormatError("problem needs a non-empty 'spaces' list", location)
    trees = [load_space(s, base_dir) for s in space_specs]
    op = load_operator(obj["operator"], trees, base_dir)
    rhs = load_lizorkin(obj.get("rhs", {"mean": [0.0, 0.0], "coeffs": []}), len(trees), base_dir)
    anchor_obj = obj.get("anchor")
    if not isinstance(anchor_obj, Mapping):
        raise FileFormatError("missing 'anchor' object", location)
    anchor = tuple(int(b) for b in anchor_obj["vertex"])
    anchor_value = _pair_of(anchor_obj.get("value", 0.0), location)
    boundary = {}
    for rec in obj.get("boundary", []):
        boundary[_coeff_entry_key(rec, location)] = _complex_of(rec, location)
    free: str | int | dict = "zero"
    fp = obj.get("free_params", "zero")
    if fp == "zero":
        free = "zero"
    elif isinstance(fp, Mapping) and "seed" in fp:
        free = int(fp["seed"])
    elif isinstance(fp, list):
        free = {_coeff_entry_key(rec, location): _complex_of(rec, location) for rec in fp}
    else:
        raise FileFormatError(f"unsupported free_params value {fp!r}", location)
    problem = CauchyProblem(
        operator=op,
        rhs=rhs,
        anchor=anchor,
        anchor_value=anchor_value,
        boundary=boundary,
        epsilon=float(obj.get("epsilon", 1e-9)),
        free_values=free,
    )
    return problem, trees


def load_problem(path: str) -> tuple[CauchyProblem, list[BallTree]]:
    obj = _read_json(path)
    return problem_from_obj(obj, os.path.dirname(path) or ".", location=path)


def write_json(obj: Any, path: str | None) -> str:
    return _write_json(obj, path)


def fmt17(x: float) -> str:
    """17 significant digits, '.' decimal separator; round-trips doubles."""
    return format(float(x), ".17g")
