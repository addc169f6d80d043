"""Command-line front end.

Subcommands: validate, wavelets, spectrum, characteristics, solve, eval.
Exit codes: 0 success, 2 parse/validation failure, 3 solvability violation,
4 numeric (divergent tail or ill-conditioned division).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .distributions import eval_on_char_nd
from .errors import (
    DivergenceError,
    FileFormatError,
    IllConditionedError,
    ParameterError,
    SpaceValidationError,
    UltrawaveError,
    UnknownBallError,
    UnsolvableError,
)
from .io import (
    fmt17,
    load_operator,
    load_problem,
    load_solution,
    load_space,
    load_symbol,
    solution_to_obj,
    write_json,
)
from .operators import spectrum
from .solver import characteristics, solve
from .wavelets import tree_wavelets


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    spaces: list[str] = field(default_factory=list)
    symbol: str | None = None
    operator: str | None = None
    problem: str | None = None
    at: str | None = None
    out: str | None = None
    format: str = "json"
    epsilon: float | None = None
    seed: int | None = None


def _emit_rows(rows: list[dict], columns: list[str], config: RunConfig) -> None:
    if config.format == "csv":
        lines = [",".join(columns)]
        for row in rows:
            cells = []
            for col in columns:
                v = row[col]
                cells.append(fmt17(v) if isinstance(v, float) else str(v))
            lines.append(",".join(cells))
        text = "\n".join(lines) + "\n"
        if config.out:
            with open(config.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        text = write_json(rows, config.out)
        if not config.out:
            sys.stdout.write(text + "\n")


def _require(value, flag: str):
    if value is None:
        raise ParameterError(f"this command requires {flag}")
    return value


def _one_space(config: RunConfig):
    spec = config.input or (config.spaces[0] if config.spaces else None)
    return load_space(_require(spec, "a space file or --space"))


def _cmd_validate(config: RunConfig) -> int:
    tree = _one_space(config)
    report = {
        "ok": True,
        "vertices": tree.n_vertices,
        "leaves": len(tree.leaves),
        "total_measure": tree.total_measure,
        "zero_measure_balls": sorted(tree.zero_measure),
    }
    text = write_json(report, config.out)
    if not config.out:
        sys.stdout.write(text + "\n")
    return 0


def _cmd_wavelets(config: RunConfig) -> int:
    tree = _one_space(config)
    rows = []
    for w in tree_wavelets(tree):
        for sub in tree.children[w.ball]:
            v = complex(w.values[sub])
            rows.append({"ball": w.ball, "j": w.j, "subball": sub, "re": v.real, "im": v.imag})
    _emit_rows(rows, ["ball", "j", "subball", "re", "im"], config)
    return 0


def _cmd_spectrum(config: RunConfig) -> int:
    tree = _one_space(config)
    symbol = load_symbol(_require(config.symbol, "--symbol"))
    spec = spectrum(tree, symbol)
    rows = [{"ball": b, "re": lam.real, "im": lam.imag} for b, lam in spec.items()]
    _emit_rows(rows, ["ball", "re", "im"], config)
    return 0


def _cmd_characteristics(config: RunConfig) -> int:
    if not config.spaces:
        raise ParameterError("this command requires --space (repeat once per factor)")
    trees = [load_space(s) for s in config.spaces]
    op = load_operator(_require(config.operator, "--operator"), trees)
    eps = config.epsilon if config.epsilon is not None else 1e-9
    rows = []
    for c in characteristics(op, eps):
        rows.append(
            {
                "vertex": list(c.vertex),
                "abs": abs(c.eigenvalue),
                "re": c.eigenvalue.real,
                "im": c.eigenvalue.imag,
            }
        )
    if config.format == "csv":
        n = len(trees)
        flat = []
        for row in rows:
            rec = {f"vertex_{i + 1}": row["vertex"][i] for i in range(n)}
            rec.update(abs=row["abs"], re=row["re"], im=row["im"])
            flat.append(rec)
        _emit_rows(flat, [f"vertex_{i + 1}" for i in range(n)] + ["abs", "re", "im"], config)
    else:
        _emit_rows(rows, [], config)
    return 0


def _cmd_solve(config: RunConfig) -> int:
    path = _require(config.input or config.problem, "a problem file")
    problem, _trees = load_problem(path)
    if config.epsilon is not None:
        problem.epsilon = config.epsilon
    if config.seed is not None:
        problem.free_values = config.seed
    sol = solve(problem)
    text = write_json(solution_to_obj(sol), config.out)
    if not config.out:
        sys.stdout.write(text + "\n")
    sys.stderr.write(
        f"solved: residual max_rel={fmt17(sol.residual.max_rel)}, "
        f"{len(sol.characteristic_vertices)} characteristic vertices, "
        f"{len(sol.free_params)} free parameters\n"
    )
    return 0


def _parse_at(at: str) -> list[tuple[int, ...]]:
    try:
        data = json.loads(at)
    except json.JSONDecodeError:
        with open(at, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    if not isinstance(data, list):
        raise FileFormatError("--at expects a JSON list of vertices")
    out = []
    for item in data:
        if isinstance(item, int):
            out.append((item,))
        else:
            out.append(tuple(int(b) for b in item))
    return out


def _cmd_eval(config: RunConfig) -> int:
    if not config.spaces:
        raise ParameterError("this command requires --space (repeat once per factor)")
    trees = [load_space(s) for s in config.spaces]
    u = load_solution(_require(config.input, "a solution file"), trees)
    vertices = _parse_at(_require(config.at, "--at"))
    rows = []
    for v in sorted(vertices):
        value = eval_on_char_nd(u, v)
        rows.append({"vertex": list(v), "re": value.real, "im": value.imag})
    if config.format == "csv":
        n = len(trees)
        flat = []
        for row in rows:
            rec = {f"vertex_{i + 1}": row["vertex"][i] for i in range(n)}
            rec.update(re=row["re"], im=row["im"])
            flat.append(rec)
        _emit_rows(flat, [f"vertex_{i + 1}" for i in range(n)] + ["re", "im"], config)
    else:
        _emit_rows(rows, [], config)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "wavelets": _cmd_wavelets,
    "spectrum": _cmd_spectrum,
    "characteristics": _cmd_characteristics,
    "solve": _cmd_solve,
    "eval": _cmd_eval,
}


def run(config: RunConfig) -> int:
    handler = _COMMANDS.get(config.command)
    if handler is None:
        sys.stderr.write(f"unknown command {config.command!r}\n")
        return 2
    try:
        return handler(config)
    except UnsolvableError as exc:
        sys.stderr.write(f"unsolvable: {exc}\n")
        return 3
    except (IllConditionedError, DivergenceError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return 4
    except (FileFormatError, SpaceValidationError, ParameterError, UnknownBallError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except UltrawaveError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ultrawave",
        description="Wavelet analysis and spectral equation solving on measured ball trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("validate", "check a space file's structural invariants"),
        ("wavelets", "list the wavelet basis of a space"),
        ("spectrum", "eigenvalues of a symbol on a space"),
        ("characteristics", "vertices where an operator's eigenvalue vanishes"),
        ("solve", "solve an equation problem file"),
        ("eval", "evaluate a solution on listed balls/vertices"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", nargs="?", help="primary input file (command-specific)")
        p.add_argument("--space", action="append", default=[], help="space file or padic(p,depth); repeat per factor")
        p.add_argument("--symbol", help="symbol file or homog(beta=...)")
        p.add_argument("--operator", help="operator file")
        p.add_argument("--problem", help="problem file")
        p.add_argument("--at", help="JSON list of vertices to evaluate (inline or file)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=["csv", "json"], default="json")
        p.add_argument("--epsilon", type=float, help="characteristic tolerance override")
        p.add_argument("--seed", type=int, help="seed for free-parameter assignment")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(
        command=args.command,
        input=args.input,
        spaces=args.space,
        symbol=args.symbol,
        operator=args.operator,
        problem=args.problem,
        at=args.at,
        out=args.out,
        format=args.format,
        epsilon=args.epsilon,
        seed=args.seed,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
