"""Command-line front end.

Usage::

    bellwronskian bell-expand --m 3
    bellwronskian verify --config configs/exp12.cfg --format json
    bellwronskian equiv --f "exp(t)" --f "exp(2*t)" --g "exp(t)" --g "exp(3*t)"

Exit status: 0 success, 1 a verification failed (or the frames are not
equivalent), 2 configuration error, 3 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Sequence

import jsonschema

from . import verify as V
from .errors import (
    ConfigError,
    DegenerateError,
    DimensionMismatch,
    ExpressionSyntaxError,
    InsufficientJetOrder,
    NoUsablePoints,
    OrderLimitExceeded,
    SmoothnessBudgetExceeded,
    ValidationFailure,
)
from .exprlang import INF, MatrixFunctionSpec, VectorFunctionSpec, parse
from .ncbell import MAX_ORDER, bell_expand, format_polynomial
from .wronskian import (
    CoefficientVector,
    Frame,
    MultiIndex,
    admissible_indices,
    sample_points,
    standard_index,
    usable_points,
    reconstruct_coefficients,
    wronskian_direct,
    wronskian_via_bell,
    wronskian_via_bell_auto,
)

TASKS = ("bell-expand", "wronskian", "reconstruct", "verify", "equiv")
IDENTITIES = (
    "lemma0",
    "corollary0",
    "theorem1",
    "theorem1_auto",
    "corollary1",
    "abel_liouville",
    "lemma2",
)

_EXPRS = {"type": "array", "minItems": 1, "items": {"type": "string"}}
_BOUND = {"anyOf": [{"type": "number"}, {"enum": ["-inf", "inf"]}]}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "task": {"enum": list(TASKS)},
        "n": {"type": "integer", "minimum": 1},
        "functions": _EXPRS,
        "g": _EXPRS,
        "coefficients": {"anyOf": [_EXPRS, {"const": "auto"}]},
        "matrix": {"type": "array", "minItems": 1, "items": _EXPRS},
        "domain": {"type": "array", "minItems": 2, "maxItems": 2, "items": _BOUND},
        "points": {
            "anyOf": [
                {"type": "integer", "minimum": 1},
                {"type": "array", "minItems": 1, "items": {"type": "number"}},
            ]
        },
        "k": {
            "type": "array",
            "items": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0}},
        },
        "identities": {"type": "array", "items": {"enum": list(IDENTITIES)}},
        "d": {"type": "array", "items": {"enum": [0, 1, 2]}},
        "j_max": {"type": "integer", "minimum": 0, "maximum": MAX_ORDER - 1},
        "m": {"type": "integer", "minimum": 0},
        "jet_order": {"type": "integer", "minimum": 0},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "abs_floor": {"type": "number", "minimum": 0},
        "format": {"enum": ["text", "json"]},
    },
}


@dataclass
class RunConfig:
    task: str
    n: int | None = None
    functions: list[str] | None = None
    g: list[str] | None = None
    coefficients: list[str] | str | None = None
    matrix: list[list[str]] | None = None
    domain: tuple[float, float] = (-INF, INF)
    points: int | list[float] = 11
    k: list[tuple[int, ...]] | None = None
    identities: list[str] | None = None
    d: list[int] = field(default_factory=lambda: [0, 1, 2])
    j_max: int = 5
    m: int | None = None
    jet_order: int | None = None
    tolerance: float = V.DEFAULT_TOL
    abs_floor: float = V.DEFAULT_ABS_FLOOR
    format: str = "text"


def _schema_error(err: jsonschema.ValidationError) -> ConfigError:
    path = ".".join(str(p) for p in err.absolute_path)
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        return ConfigError("unknown key", ".".join(filter(None, [path, extra[0] if extra else ""])))
    return ConfigError(err.message, path or None)


def load_raw(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", "config") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", "config") from exc
    validate_raw(raw)
    return raw


def validate_raw(raw: Any) -> None:
    errors = sorted(
        jsonschema.Draft202012Validator(CONFIG_SCHEMA).iter_errors(raw),
        key=lambda e: [str(p) for p in e.absolute_path],
    )
    if errors:
        raise _schema_error(errors[0])


def make_config(raw: dict[str, Any], task: str | None = None) -> RunConfig:
    """Build and validate a :class:`RunConfig` from a schema-checked mapping."""
    raw = dict(raw)
    if task is not None:
        if raw.get("task", task) != task:
            raise ConfigError(f"config is for task {raw['task']!r}, command line asks for {task!r}", "task")
        raw["task"] = task
    if "task" not in raw:
        raise ConfigError("missing", "task")
    if "domain" in raw:
        raw["domain"] = tuple(float(x) for x in raw["domain"])
        if not raw["domain"][0] < raw["domain"][1]:
            raise ConfigError("lower bound must be below upper bound", "domain")
    if "k" in raw and raw["k"] is not None:
        raw["k"] = [tuple(k) for k in raw["k"]]
    known = {f.name for f in fields(RunConfig)}
    cfg = RunConfig(**{k: v for k, v in raw.items() if k in known})
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.task == "bell-expand":
        if cfg.m is None:
            raise ConfigError("required for bell-expand", "m")
        return
    if not cfg.functions:
        raise ConfigError(f"required for {cfg.task}", "functions")
    n = cfg.n if cfg.n is not None else len(cfg.functions)
    cfg.n = n
    if len(cfg.functions) != n:
        raise ConfigError(f"{len(cfg.functions)} expressions for n={n}", "functions")
    if cfg.task == "equiv":
        if not cfg.g:
            raise ConfigError("required for equiv", "g")
        if len(cfg.g) != n:
            raise ConfigError(f"{len(cfg.g)} expressions for n={n}", "g")
    if isinstance(cfg.coefficients, list) and len(cfg.coefficients) != n:
        raise ConfigError(f"{len(cfg.coefficients)} expressions for n={n}", "coefficients")
    for i, k in enumerate(cfg.k or []):
        if len(k) != n:
            raise ConfigError(f"multi-index {list(k)} has length {len(k)}, n={n}", f"k.{i}")
    if cfg.matrix is not None and any(len(r) != len(cfg.matrix) for r in cfg.matrix):
        raise ConfigError("matrix must be square", "matrix")
    for name in ("functions", "g", "coefficients"):
        exprs = getattr(cfg, name)
        if isinstance(exprs, list):
            for i, s in enumerate(exprs):
                _check_expr(s, f"{name}.{i}")
    for r, row in enumerate(cfg.matrix or []):
        for c, s in enumerate(row):
            _check_expr(s, f"matrix.{r}.{c}")
    if cfg.identities:
        needs_a = {"corollary0", "theorem1", "corollary1", "abel_liouville"}
        if needs_a & set(cfg.identities) and not isinstance(cfg.coefficients, list):
            raise ConfigError("explicit coefficient expressions are required for " + ", ".join(
                sorted(needs_a & set(cfg.identities))), "coefficients")
        if "lemma0" in cfg.identities and cfg.matrix is None and not isinstance(cfg.coefficients, list):
            raise ConfigError("lemma0 needs a matrix or explicit coefficients", "matrix")


def _check_expr(source: str, where: str) -> None:
    try:
        parse(source)
    except ExpressionSyntaxError as exc:
        raise ConfigError(str(exc), where) from exc


def load_config(path: str | Path, task: str | None = None) -> RunConfig:
    return make_config(load_raw(path), task)


# Deterministic JSON: insertion-ordered keys, floats at 17 significant digits.

def _dump(obj: Any) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_dump(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    if hasattr(obj, "tolist"):
        return _dump(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return _dump(obj)


@dataclass
class Outcome:
    exit_code: int
    payload: dict
    lines: list[str]


def _frame(cfg: RunConfig, exprs: list[str]) -> Frame:
    return Frame(VectorFunctionSpec.of(exprs, cfg.domain))


def _coefficients(cfg: RunConfig) -> CoefficientVector | None:
    if isinstance(cfg.coefficients, list):
        return CoefficientVector(VectorFunctionSpec.of(cfg.coefficients, cfg.domain))
    return None


def _points(cfg: RunConfig) -> list[float]:
    if isinstance(cfg.points, list):
        return [float(p) for p in cfg.points]
    return sample_points(cfg.domain, cfg.points)


def companion_spec(coefficients: Sequence[str]) -> MatrixFunctionSpec:
    """Expression matrix of ``X_a`` for the given coefficient expressions."""
    n = len(coefficients)
    rows = [[coefficients[i]] + ["1" if i == j - 1 else "0" for j in range(1, n)] for i in range(n)]
    return MatrixFunctionSpec.of(rows)


def run_bell(cfg: RunConfig) -> Outcome:
    poly = bell_expand(cfg.m)
    text = format_polynomial(poly)
    payload = {
        "task": "bell-expand",
        "m": cfg.m,
        "text": text,
        "word_count": len(poly),
        "coefficient_sum": poly.coefficient_sum,
        "terms": [{"word": list(w), "coefficient": poly.terms[w]} for w in poly.words()],
    }
    return Outcome(0, payload, [text])


def run_wronskian(cfg: RunConfig) -> Outcome:
    f = _frame(cfg, cfg.functions)
    a = _coefficients(cfg)
    ks = [MultiIndex(k) for k in cfg.k] if cfg.k else [standard_index(f.n)]
    rows, lines = [], []
    for t in _points(cfg):
        for k in ks:
            row = {"point": t, "k": list(k.k), "direct": wronskian_direct(f, k, t)}
            if a is not None:
                row["via_bell"] = wronskian_via_bell(f, a, k, t)
            elif cfg.coefficients == "auto":
                row["via_bell"] = wronskian_via_bell_auto(f, k, t)
            rows.append(row)
            extra = f"  via_bell={row['via_bell']:.12g}" if "via_bell" in row else ""
            lines.append(f"t={t:.6g} k={k}  direct={row['direct']:.12g}{extra}")
    return Outcome(0, {"task": "wronskian", "values": rows}, lines)


def run_reconstruct(cfg: RunConfig) -> Outcome:
    f = _frame(cfg, cfg.functions)
    good, skipped = usable_points(f, _points(cfg))
    if not good:
        raise NoUsablePoints("W_f vanishes at every sample point")
    rows, lines = [], []
    for t in good:
        coeffs = reconstruct_coefficients(f, t)
        rows.append({"point": t, "coefficients": coeffs.tolist()})
        lines.append(f"t={t:.6g}  a = (" + ", ".join(f"{c:.12g}" for c in coeffs) + ")")
    for t, why in skipped:
        lines.append(f"t={t:.6g}  skipped: {why}")
    payload = {
        "task": "reconstruct",
        "values": rows,
        "skipped": [{"point": t, "reason": why} for t, why in skipped],
    }
    return Outcome(0, payload, lines)


def default_identities(cfg: RunConfig) -> list[str]:
    ids = []
    if cfg.matrix is not None or isinstance(cfg.coefficients, list):
        ids.append("lemma0")
    if isinstance(cfg.coefficients, list):
        ids += ["corollary0", "theorem1", "corollary1", "abel_liouville"]
    ids += ["theorem1_auto", "lemma2"]
    return ids


def run_verify(cfg: RunConfig) -> Outcome:
    f = _frame(cfg, cfg.functions)
    a = _coefficients(cfg)
    pts = _points(cfg)
    ks = [MultiIndex(k) for k in cfg.k] if cfg.k else admissible_indices(f.n, f.n + 3)
    tol = cfg.tolerance
    reports: list[V.VerificationReport] = []
    for ident in cfg.identities or default_identities(cfg):
        if ident == "lemma0":
            X = MatrixFunctionSpec.of(cfg.matrix) if cfg.matrix is not None else companion_spec(cfg.coefficients)
            reports.append(V.verify_lemma0(X, cfg.j_max, pts, tol, cfg.jet_order))
        elif ident == "corollary0":
            reports.append(V.verify_corollary0(f, a, cfg.j_max, pts, tol))
        elif ident == "theorem1":
            reports.append(V.verify_theorem1(f, a, ks, pts, tol))
        elif ident == "theorem1_auto":
            reports.append(V.verify_theorem1(f, None, ks, pts, tol))
        elif ident == "corollary1":
            for d in cfg.d:
                reports.append(V.verify_corollary1(f, a, d, pts, tol))
        elif ident == "abel_liouville":
            reports.append(V.verify_abel_liouville(f, a, pts, tol, cfg.jet_order or 1))
        elif ident == "lemma2":
            reports.append(V.verify_lemma2(f, pts, tol))
    if all(not r.records for r in reports):
        raise NoUsablePoints("no identity could be evaluated at any sample point")
    passed = all(r.passed for r in reports)
    payload = {"task": "verify", "passed": passed, "reports": [r.to_dict() for r in reports]}
    lines = [r.summary() for r in reports]
    lines.append("ALL PASS" if passed else "SOME CHECKS FAILED")
    return Outcome(0 if passed else 1, payload, lines)


def run_equiv(cfg: RunConfig) -> Outcome:
    f = _frame(cfg, cfg.functions)
    g = _frame(cfg, cfg.g)
    pts = _points(cfg)
    try:
        res = V.range_equivalent(f, g, pts, cfg.tolerance, cfg.abs_floor)
    except ValidationFailure as exc:
        payload = {"task": "equiv", "equivalent": False, "error": "validation-failure", "message": str(exc)}
        return Outcome(1, payload, [f"NOT EQUIVALENT (validation failure): {exc}"])
    payload = {"task": "equiv", **res.to_dict()}
    return Outcome(0 if res.equivalent else 1, payload, [res.summary()])


RUNNERS = {
    "bell-expand": run_bell,
    "wronskian": run_wronskian,
    "reconstruct": run_reconstruct,
    "verify": run_verify,
    "equiv": run_equiv,
}


def _parse_points(text: str) -> int | list[float]:
    try:
        if "," not in text:
            try:
                return int(text)
            except ValueError:
                return [float(text)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected a count or a comma-separated list, got {text!r}", "points") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bellwronskian",
        description="Noncommutative Bell polynomials, generalized Wronskians and range equivalence.",
    )
    p.add_argument("task", choices=TASKS)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--m", type=int, help="Bell index for bell-expand")
    p.add_argument("--tol", type=float, help="relative tolerance (default 1e-8)")
    p.add_argument("--abs-floor", type=float, help="absolute floor for equivalence checks")
    p.add_argument("--points", help="sample count N or comma-separated list of points")
    p.add_argument("--format", choices=("text", "json"))
    p.add_argument("--jet-order", type=int, help="jet order override for jet-based checks")
    p.add_argument("--f", action="append", metavar="EXPR", help="component of f (repeat)")
    p.add_argument("--g", action="append", metavar="EXPR", help="component of g (repeat)")
    p.add_argument("--a", action="append", metavar="EXPR", help="coefficient a_i (repeat), or 'auto'")
    p.add_argument("--domain", nargs=2, metavar=("LO", "HI"))
    p.add_argument("--k", action="append", metavar="K1,K2,...", help="multi-index (repeat)")
    p.add_argument("--identity", action="append", choices=IDENTITIES, help="restrict verify to these")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    raw: dict[str, Any] = load_raw(args.config) if args.config else {}
    overrides = {
        "m": args.m,
        "tolerance": args.tol,
        "abs_floor": args.abs_floor,
        "format": args.format,
        "jet_order": args.jet_order,
        "functions": args.f,
        "g": args.g,
        "identities": args.identity,
    }
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    if args.a is not None:
        raw["coefficients"] = "auto" if args.a == ["auto"] else args.a
    if args.points is not None:
        raw["points"] = _parse_points(args.points)
    if args.domain is not None:
        try:
            raw["domain"] = [x if x in ("-inf", "inf") else float(x) for x in args.domain]
        except ValueError:
            raise ConfigError(f"bounds must be numbers or +-inf: {args.domain}", "domain") from None
    if args.k is not None:
        try:
            raw["k"] = [[int(x) for x in k.split(",")] for k in args.k]
        except ValueError:
            raise ConfigError("multi-index entries must be integers", "k") from None
    validate_raw(raw)
    return make_config(raw, args.task)


def _emit(outcome: Outcome, fmt: str, out) -> None:
    if fmt == "json":
        out.write(dumps(outcome.payload) + "\n")
    else:
        out.write("\n".join(outcome.lines) + "\n")


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    fmt = args.format or "text"
    try:
        cfg = config_from_args(args)
        fmt = cfg.format
        outcome = RUNNERS[cfg.task](cfg)
    except (
        ConfigError,
        ExpressionSyntaxError,
        OrderLimitExceeded,
        SmoothnessBudgetExceeded,
        InsufficientJetOrder,
        DimensionMismatch,
    ) as exc:
        err.write(f"config error: {exc}\n")
        if fmt == "json":
            out.write(dumps({"task": args.task, "error": "config", "message": str(exc)}) + "\n")
        return 2
    except DegenerateError as exc:
        err.write(f"numerical degeneracy: {exc}\n")
        if fmt == "json":
            out.write(dumps({"task": args.task, "error": "degenerate", "message": str(exc)}) + "\n")
        return 3
    _emit(outcome, fmt, out)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
