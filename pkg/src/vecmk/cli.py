"""Command-line frontend.

Instance files are JSON with ``"schema": "vecmk/1"``::

    {
      "schema": "vecmk/1",
      "space": {"labels": ["a", "b"], "dist": [[0, 1], [1, 0]]},
      "measures": [{"name": "mu", "atoms": [[1.0], [-1.0]]}],
      "functions": [{"name": "f", "values": [[0.5], [0.0]]}],
      "solver": {"tol_gap": 1e-8}
    }

The space may give ``"coords"`` (plus an optional ``"metric"``) instead of
``"dist"``. Measures and functions may also be objects keyed by name, and
atoms may be an object keyed by point label (missing points get zero atoms).

Exit codes: 0 ok, 1 input error, 2 domain error (e.g. MassNotZero),
3 solver did not converge (the bracket is still printed), 4 a verification
check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError, NonConvergence, ParseError, UnknownName, VecMKError
from .experiments import CampaignReport, counterexample_run, theorem_campaign, verify_measures
from .functions import FunctionSample, function_from_json, integrate
from .linalg import as_vector, vector_to_json
from .measures import DiscreteVectorMeasure, measure_from_json
from .norms import NormKind, induced_metric_certificates, norm
from .solvers import NormCertificate, SolverConfig
from .space import FiniteMetricSpace, from_coords, validate

SCHEMA = "vecmk/1"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DOMAIN = 2
EXIT_NONCONVERGENCE = 3
EXIT_CHECK_FAILED = 4


# -- instance files -----------------------------------------------------------


@dataclass
class InstanceFile:
    space: FiniteMetricSpace
    measures: dict[str, DiscreteVectorMeasure] = field(default_factory=dict)
    functions: dict[str, FunctionSample] = field(default_factory=dict)
    solver: SolverConfig = field(default_factory=SolverConfig)

    def measure(self, name: str) -> DiscreteVectorMeasure:
        try:
            return self.measures[name]
        except KeyError:
            raise UnknownName(f"no measure named {name!r}; have {sorted(self.measures)}") from None

    def function(self, name: str) -> FunctionSample:
        try:
            return self.functions[name]
        except KeyError:
            raise UnknownName(f"no function named {name!r}; have {sorted(self.functions)}") from None

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "space": self.space.to_json(),
            "measures": [{"name": k, **v.to_json()} for k, v in self.measures.items()],
            "functions": [{"name": k, **v.to_json()} for k, v in self.functions.items()],
            "solver": self.solver.to_dict(),
        }


def parse_space(obj) -> FiniteMetricSpace:
    if not isinstance(obj, dict):
        raise ParseError("'space' must be an object")
    labels = obj.get("labels")
    if "dist" in obj:
        return validate(obj["dist"], labels)
    if "coords" in obj:
        return from_coords(obj["coords"], labels, obj.get("metric", "euclidean"))
    raise ParseError("'space' needs 'dist' or 'coords'")


def _named(obj, what: str) -> list[tuple[str, object]]:
    if obj is None:
        return []
    if isinstance(obj, dict):
        return list(obj.items())
    if isinstance(obj, list):
        out = []
        for item in obj:
            if not isinstance(item, dict) or "name" not in item:
                raise ParseError(f"every entry of '{what}' needs a 'name'")
            out.append((str(item["name"]), item))
        return out
    raise ParseError(f"'{what}' must be a list or an object")


def _dense(space: FiniteMetricSpace, obj, key: str):
    """Accept a dense list or a ``{label: vector}`` object for ``obj[key]``."""
    data = obj[key] if isinstance(obj, dict) else obj
    if isinstance(data, dict):
        vecs = {space.index(k): as_vector(v) for k, v in data.items()}
        if not vecs:
            raise ParseError(f"'{key}' object is empty")
        proto = next(iter(vecs.values()))
        cplx = any(np.iscomplexobj(v) for v in vecs.values())
        dense = np.zeros((space.size, proto.size), dtype=complex if cplx else float)
        for i, v in vecs.items():
            if v.size != proto.size:
                raise ParseError(f"'{key}' vectors have different dimensions")
            dense[i] = v
        return dense
    return obj


def parse_instance(obj) -> InstanceFile:
    if not isinstance(obj, dict):
        raise ParseError("instance must be a JSON object")
    schema = obj.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ParseError(f"unsupported schema {schema!r}; expected {SCHEMA!r}")
    if "space" not in obj:
        raise ParseError("instance needs a 'space'")
    space = parse_space(obj["space"])
    measures, functions = {}, {}
    for name, item in _named(obj.get("measures"), "measures"):
        if name in measures:
            raise ParseError(f"duplicate measure name {name!r}")
        if isinstance(item, dict) and "atoms" not in item:
            raise ParseError(f"measure {name!r} needs 'atoms'")
        measures[name] = measure_from_json(space, _dense(space, item, "atoms"))
    for name, item in _named(obj.get("functions"), "functions"):
        if name in functions:
            raise ParseError(f"duplicate function name {name!r}")
        if isinstance(item, dict) and "values" not in item:
            raise ParseError(f"function {name!r} needs 'values'")
        functions[name] = function_from_json(space, _dense(space, item, "values"))
    solver = SolverConfig.from_dict(obj.get("solver"))
    return InstanceFile(space, measures, functions, solver)


def load_instance(path: str) -> InstanceFile:
    try:
        if path == "-":
            obj = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    try:
        return parse_instance(obj)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise ParseError(f"{path}: malformed instance ({exc})") from None


# -- output -------------------------------------------------------------------


def _g(x: float) -> str:
    return format(float(x), ".17g")


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, indent=2) + "\n")


def _emit_certificate(cert: NormCertificate, fmt: str, out) -> None:
    if fmt == "json":
        _emit(cert.to_json(), out)
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["kind", "value", "lower", "upper", "gap", "iterations"])
        w.writerow([cert.kind, _g(cert.value), _g(cert.lower_bound), _g(cert.upper_bound),
                    _g(cert.gap), cert.iterations])
    else:
        out.write(f"{cert.kind} = {_g(cert.value)}  in [{_g(cert.lower_bound)}, "
                  f"{_g(cert.upper_bound)}]  gap {_g(cert.gap)}  ({cert.iterations} iterations)\n")


def _emit_report(report: CampaignReport, fmt: str, out) -> None:
    if fmt == "json":
        _emit(report.to_json(), out)
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["claim", "instances", "worst_slack", "passed"])
        for c in report.checks:
            w.writerow([c.claim, c.instances, _g(c.worst_slack), c.passed])
    else:
        out.write(report.to_text() + "\n")


def matrix_csv(labels, matrix: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + list(labels))
    for lab, row in zip(labels, matrix):
        w.writerow([lab] + [_g(v) for v in row])
    return buf.getvalue()


# -- commands -----------------------------------------------------------------


def _config(args, base: SolverConfig) -> SolverConfig:
    d = base.to_dict()
    if args.tol_gap is not None:
        d["tol_gap"] = args.tol_gap
    if args.max_iter is not None:
        d["max_iter"] = args.max_iter
    if args.seed is not None:
        d["seed"] = args.seed
    return SolverConfig.from_dict(d)


def cmd_norm(args, out) -> int:
    inst = load_instance(args.file)
    mu = inst.measure(args.measure)
    try:
        cert = norm(mu, args.kind, _config(args, inst.solver))
    except NonConvergence as exc:
        if exc.certificate is not None:
            _emit_certificate(exc.certificate, args.output or "json", out)
        raise
    _emit_certificate(cert, args.output or "json", out)
    return EXIT_OK


def cmd_matrix(args, out) -> int:
    inst = load_instance(args.file)
    kind = NormKind.parse(args.kind)
    x = None if args.x is None else as_vector(json.loads(args.x))
    space = inst.space
    certs = induced_metric_certificates(space, kind, x, _config(args, inst.solver), args.workers)
    m = space.size
    val, lo, up = np.zeros((m, m)), np.zeros((m, m)), np.zeros((m, m))
    for (i, j), c in certs.items():
        val[i, j] = val[j, i] = c.value
        lo[i, j] = lo[j, i] = c.lower_bound
        up[i, j] = up[j, i] = c.upper_bound
    fmt = args.output or "csv"
    if fmt == "json":
        _emit({"kind": kind.value, "labels": list(space.labels), "matrix": val.tolist(),
               "lower": lo.tolist(), "upper": up.tolist()}, out)
    elif fmt == "csv":
        out.write(matrix_csv(space.labels, val))
    else:
        width = max(len(lab) for lab in space.labels)
        for lab, row in zip(space.labels, val):
            out.write(f"{lab:>{width}}  " + "  ".join(f"{v:.10f}" for v in row) + "\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    seed = 0 if args.seed is None else args.seed
    if args.random:
        if args.file is not None:
            raise InputError("give either an instance file or --random, not both")
        config = _config(args, SolverConfig(seed=seed))
        report = theorem_campaign(seed=seed, instances=args.instances,
                                  max_points=args.max_points, max_dim=args.max_dim, config=config)
    else:
        if args.file is None:
            raise InputError("verify needs an instance file or --random")
        inst = load_instance(args.file)
        report = verify_measures(inst.measures, seed, _config(args, inst.solver))
    _emit_report(report, args.output or "text", out)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_counterexample(args, out) -> int:
    config = _config(args, SolverConfig())
    report = counterexample_run(args.dim, args.shifts, config)
    _emit_report(report, args.output or "text", out)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_integrate(args, out) -> int:
    inst = load_instance(args.file)
    value = integrate(inst.function(args.function), inst.measure(args.measure))
    fmt = args.output or "json"
    if fmt == "json":
        _emit({"value": vector_to_json(np.atleast_1d(value))[0]}, out)
    elif fmt == "csv":
        out.write("re,im\n" f"{_g(np.real(value))},{_g(np.imag(value))}\n")
    else:
        out.write(f"{_g(np.real(value))}" + (f" {_g(np.imag(value))}j" if isinstance(value, complex) else "")
                  + "\n")
    return EXIT_OK


def cmd_echo(args, out) -> int:
    _emit(load_instance(args.file).to_json(), out)
    return EXIT_OK


def _global_flags(default) -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--tol-gap", type=float, default=default, help="relative duality-gap target")
    g.add_argument("--max-iter", type=int, default=default, help="iteration cap per solve")
    g.add_argument("--seed", type=int, default=default)
    g.add_argument("--output", choices=("json", "csv", "text"), default=default)
    return g


def build_parser() -> argparse.ArgumentParser:
    # the flags are accepted before or after the subcommand; SUPPRESS keeps
    # the subcommand copy from overwriting a value given before it
    top = _global_flags(None)
    common = _global_flags(argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="vecmk", parents=[top],
        description="Certified norms of vector measures on finite metric spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="norm of one measure")
    p.add_argument("file")
    p.add_argument("--measure", required=True)
    p.add_argument("--kind", required=True, help="variation, mk, mkstar or hanin")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("matrix", parents=[common], help="induced metric on the points")
    p.add_argument("file")
    p.add_argument("--kind", required=True)
    p.add_argument("--x", default=None, help="unit vector as JSON (default: first basis vector)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("verify", parents=[common], help="check the norm inequalities")
    p.add_argument("file", nargs="?")
    p.add_argument("--random", action="store_true", help="random campaign instead of a file")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--max-points", type=int, default=8)
    p.add_argument("--max-dim", type=int, default=4)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counterexample", parents=[common], help="shifted harmonic sequences")
    p.add_argument("--dim", type=int, default=10_000)
    p.add_argument("--shifts", type=int, default=100)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("integrate", parents=[common], help="integral of a function against a measure")
    p.add_argument("file")
    p.add_argument("--function", required=True)
    p.add_argument("--measure", required=True)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("echo", parents=[common], help="print the parsed instance in canonical form")
    p.add_argument("file")
    p.set_defaults(func=cmd_echo)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except NonConvergence as exc:
        err.write(f"error: NonConvergence: {exc}\n")
        return EXIT_NONCONVERGENCE
    except DomainError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    except (InputError, VecMKError) as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
