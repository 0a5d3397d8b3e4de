"""Command-line front end.

Exit status: 0 success, 1 hypothesis or condition not satisfied (including a
violated envelope or a residual above threshold), 2 bad input, 3 numerical
failure.  Errors are also written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import bounds, conditions, hfunction, mathieu
from .errors import FoxWrightError, HypothesisError, InputError, NumericalError
from .fox_wright import FoxWrightParams, convergence_data, eval_series

EXIT_OK, EXIT_CONDITION, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures through the JSON error path
        raise InputError(message)


# --------------------------------------------------------------------------
# parsing helpers


def load_params(source: str | None) -> FoxWrightParams:
    if not source:
        raise InputError("--params is required")
    text = source.strip()
    if text.startswith("@"):
        text = _read(text[1:])
    elif not text.startswith("{"):
        text = _read(text)
    return FoxWrightParams.from_json(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read parameter file {path!r}: {exc.strerror}") from None


def parse_floats(text: str, count: int | None = None) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(values) != count:
        raise InputError(f"expected {count} numbers, got {len(values)}")
    return values


def parse_sweep(text: str) -> tuple[str, np.ndarray]:
    """``var:lin|log:start:stop:points``."""
    parts = text.split(":")
    if len(parts) != 5:
        raise InputError("sweep must look like var:lin|log:start:stop:points")
    var, scale, start, stop, points = parts
    try:
        start_f, stop_f, n = float(start), float(stop), int(points)
    except ValueError:
        raise InputError(f"bad numbers in sweep {text!r}") from None
    if n < 2:
        raise InputError("sweep needs at least 2 points")
    if scale == "lin":
        grid = np.linspace(start_f, stop_f, n)
    elif scale == "log":
        if start_f <= 0 or stop_f <= 0:
            raise InputError("log sweep needs positive endpoints")
        grid = np.geomspace(start_f, stop_f, n)
    else:
        raise InputError(f"sweep scale must be lin or log, got {scale!r}")
    return var, grid


def parse_z(text: str) -> float | complex:
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise InputError(f"cannot parse z = {text!r}") from None


def thread_count() -> int:
    raw = os.environ.get("FOXWRIGHT_THREADS", "").strip()
    if not raw:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"FOXWRIGHT_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise InputError("FOXWRIGHT_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Map preserving input order regardless of completion order."""
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# output


def _clean(value):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.12g}")
    if isinstance(value, complex):
        return {"re": _clean(value.real), "im": _clean(value.imag)}
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return str(value)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, dict) and set(value) == {"re", "im"}:
        return f"{value['re']:.12g}{value['im']:+.12g}j"
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def emit(payload: dict, fmt: str, out) -> None:
    payload = _clean(payload)
    rows = payload.get("rows", [])
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True) + "\n")
        return
    columns = list(rows[0].keys()) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
        out.write(buf.getvalue())
        return
    # table: a bare value for single scalar results, aligned columns otherwise
    if len(rows) == 1 and "value" in rows[0] and payload.get("scalar"):
        out.write(_cell(rows[0]["value"]) + "\n")
        return
    cells = [[_cell(row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    for r in cells:
        out.write("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() + "\n")
    for note in payload.get("notes", []):
        out.write(f"# {note}\n")


# --------------------------------------------------------------------------
# commands


def _grid(args, var: str, single) -> np.ndarray:
    if args.sweep:
        name, grid = parse_sweep(args.sweep)
        if name != var:
            raise InputError(f"this command sweeps {var!r}, not {name!r}")
        return grid
    if single is None:
        raise InputError(f"--{var} or --sweep is required")
    return np.array([single])


def cmd_eval(args) -> tuple[dict, int]:
    # summing to 1e-14 costs little and keeps all 12 printed digits honest
    params = load_params(args.params)
    if args.sweep:
        _, grid = parse_sweep(args.sweep)
        zs = list(grid)
    elif args.z is not None:
        zs = [parse_z(args.z)]
    else:
        raise InputError("--z or --sweep is required")
    values = parallel_map(lambda z: eval_series(params, z, tol=min(args.tol, 1e-14)), zs)
    rows = [{"z": z, "value": v} for z, v in zip(zs, values)]
    return {"command": "eval", "rows": rows, "scalar": len(rows) == 1}, EXIT_OK


def cmd_convergence(args) -> tuple[dict, int]:
    conv = convergence_data(load_params(args.params))
    return {"command": "convergence", "rows": [conv.to_dict()]}, EXIT_OK


def _report_rows(report: conditions.ConditionReport) -> list[dict]:
    return [dict(d) for d in report.details]


def cmd_check(args) -> tuple[dict, int]:
    kind = args.kind
    if kind == "h1":
        report = conditions.check_h1(load_params(args.params), args.nmax)
    elif kind == "h2":
        if args.params:
            p = load_params(args.params)
            report = conditions.check_h2(p.upper_shifts(), p.lower_shifts())
        else:
            if args.upper is None or args.lower is None:
                raise InputError("check h2 needs --params or both --upper and --lower")
            report = conditions.check_h2(parse_floats(args.upper), parse_floats(args.lower))
    elif kind == "cm":
        params = load_params(args.params)
        a, b = parse_floats(args.interval, 2)
        report = conditions.numeric_cm_check(
            lambda x: eval_series(params, -x), (a, b), args.order, args.grid
        )
    elif kind in ("turan-a", "turan-sigma"):
        params = load_params(args.params)
        if kind == "turan-a":
            value = args.A if args.A is not None else 1.0
            margin = conditions.turan_in_A(params, value, float(args.z or 0.0))
        else:
            value = args.sigma if args.sigma is not None else 1.0
            margin = conditions.turan_in_sigma(params, value, float(args.z or 0.5))
        report = conditions.ConditionReport(True)
        report.add(f"{kind} margin", margin, margin >= -1e-10)
    else:
        raise InputError(f"unknown check {kind!r}")
    payload = {
        "command": f"check {kind}",
        "satisfied": report.satisfied,
        "first_failure": report.first_failure,
        "notes": report.notes,
        "rows": _report_rows(report),
    }
    return payload, EXIT_OK if report.satisfied else EXIT_CONDITION


def cmd_bounds(args) -> tuple[dict, int]:
    grid = _grid(args, "z", args.z)
    checked = not args.unchecked
    if args.kind == "pfq":
        upper = parse_floats(args.upper or "")
        lower = parse_floats(args.lower or "")
        fn = lambda z: bounds.pfq_luke(upper, lower, args.sigma, z, checked=checked)
    else:
        params = load_params(args.params)
        if args.kind == "luke":
            fn = lambda z: bounds.luke_bounds(params, z, checked=checked)
        else:
            fn = lambda z: bounds.luke_bounds_lambda(params, args.lam, z, checked=checked)
    envs = parallel_map(fn, [float(z) for z in grid])
    rows = [
        {"z": e.z, "lower": e.lower, "value": e.value, "upper": e.upper, "contained": e.contained}
        for e in envs
    ]
    ok = all(e.contained is not False for e in envs)
    notes = sorted({n for e in envs for n in e.notes})
    payload = {"command": f"bounds {args.kind}", "all_contained": ok, "rows": rows, "notes": notes}
    return payload, EXIT_OK if ok else EXIT_CONDITION


def cmd_mathieu(args) -> tuple[dict, int]:
    grid = _grid(args, "r", args.r)
    spec = mathieu.MathieuSpec(args.alpha, args.beta, args.mu, args.nu, float(grid[0]))
    rows = parallel_map(lambda r: mathieu.mathieu_rows(spec, [float(r)])[0], list(grid))
    ok = True
    for row in rows:
        for lo, hi in (("L", "R"), ("L1", "R1")):
            if row[lo] is not None:
                within = row[lo] - 1e-8 <= row["sum"] <= row[hi] + 1e-8
                row[f"{lo}<=sum<={hi}"] = within
                ok &= within
    payload = {"command": "mathieu", "all_contained": ok, "rows": rows}
    return payload, EXIT_OK if ok else EXIT_CONDITION


def cmd_verify(args) -> tuple[dict, int]:
    kind = args.kind
    if kind == "mathieu":
        spec = mathieu.MathieuSpec(args.alpha, args.beta, args.mu, args.nu, args.r or 0.0)
        res = mathieu.verify_mathieu_integral_rep(spec).to_dict()
    else:
        params = load_params(args.params)
        z = float(args.z) if args.z is not None else None

        def need(name, value):
            if value is None:
                raise InputError(f"verify {kind} needs --{name}")
            return value

        if kind == "laplace":
            res = hfunction.verify_laplace_rep(hfunction.HDensitySpec(params), need("z", z))
        elif kind == "moment":
            res = hfunction.verify_moment(hfunction.HDensitySpec(params), args.k)
        elif kind == "stieltjes":
            res = hfunction.verify_stieltjes_rep(
                hfunction.HDensitySpec(params), need("sigma", args.sigma), need("z", z)
            )
        elif kind == "reciprocal":
            res = hfunction.verify_reciprocal_laplace(params, need("z", z))
        elif kind == "lambda":
            res = hfunction.verify_lambda_transform(
                params, need("lam", args.lam), args.omega, need("z", z)
            )
        elif kind == "meijer":
            res = hfunction.meijer_g_reduction_check(params, need("t", args.t))
        else:
            raise InputError(f"unknown verifier {kind!r}")
        res = res.to_dict()
    ok = res["rel_residual"] <= args.threshold or res["abs_residual"] <= args.threshold
    row = {k: v for k, v in res.items() if k != "warnings"}
    payload = {"command": f"verify {kind}", "passed": ok, "rows": [row], "notes": res["warnings"]}
    return payload, EXIT_OK if ok else EXIT_CONDITION


def cmd_zeros(args) -> tuple[dict, int]:
    params = load_params(args.params)
    rect = tuple(parse_floats(args.rect, 4))
    count = conditions.zero_count_rectangle(params, rect, args.n)
    row = {"x0": rect[0], "x1": rect[1], "y0": rect[2], "y1": rect[3], "zeros": count}
    status = EXIT_OK
    if args.expect is not None and count != args.expect:
        status = EXIT_CONDITION
    return {"command": "zeros", "rows": [row]}, status


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="foxwright", description="Fox-Wright function toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, params=True):
        if params:
            p.add_argument("--params", help="parameter JSON, a file path, or @path")
        p.add_argument("--format", choices=("json", "csv", "table"), default="table")
        p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("eval", help="sum the series")
    common(p)
    p.add_argument("--z")
    p.add_argument("--sweep")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("convergence", help="delta, nabla, rho, mu, gamma")
    common(p)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("check", help="hypothesis and monotonicity checks")
    p.add_argument("kind", choices=("h1", "h2", "cm", "turan-a", "turan-sigma"))
    common(p)
    p.add_argument("--nmax", type=int, default=16)
    p.add_argument("--upper")
    p.add_argument("--lower")
    p.add_argument("--interval", default="0.5,4")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--grid", type=int, default=40)
    p.add_argument("--A", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--z")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bounds", help="two-sided envelopes")
    p.add_argument("kind", choices=("luke", "lambda", "pfq"))
    common(p)
    p.add_argument("--z", type=float)
    p.add_argument("--sweep")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--upper")
    p.add_argument("--lower")
    p.add_argument("--unchecked", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("mathieu", help="Mathieu series and its bounds")
    common(p, params=False)
    for name in ("alpha", "beta", "mu", "nu"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--r", type=float)
    p.add_argument("--sweep")
    p.set_defaults(func=cmd_mathieu)

    p = sub.add_parser("verify", help="integral representation residuals")
    p.add_argument("kind", choices=("laplace", "moment", "stieltjes", "reciprocal", "lambda", "meijer", "mathieu"))
    common(p)
    p.add_argument("--z")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--sigma", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--t", type=float)
    for name in ("alpha", "beta", "mu", "nu", "r"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--threshold", type=float, default=1e-6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zeros", help="argument-principle zero count in a rectangle")
    common(p)
    p.add_argument("--rect", default="0.1,4,-6,6")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--expect", type=int)
    p.set_defaults(func=cmd_zeros)
    return parser


def _fail(exc: Exception, status: int) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": status}) + "\n")
    return status


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if not 0 < args.tol <= 1e-2:
            raise InputError("--tol must lie in (0, 1e-2]")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            payload, status = args.func(args)
        extra = sorted({str(w.message) for w in caught})
        if extra:
            payload.setdefault("notes", [])
            payload["notes"] = list(payload["notes"]) + extra
        emit(payload, args.format, out)
        return status
    except HypothesisError as exc:
        return _fail(exc, EXIT_CONDITION)
    except InputError as exc:
        return _fail(exc, EXIT_INPUT)
    except NumericalError as exc:
        return _fail(exc, EXIT_NUMERIC)
    except FoxWrightError as exc:
        return _fail(exc, EXIT_INPUT)
    except (ValueError, TypeError) as exc:
        return _fail(exc, EXIT_INPUT)
    except (ArithmeticError, RuntimeError) as exc:
        return _fail(exc, EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
