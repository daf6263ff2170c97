"""Unified command-line front end.

Subcommands: check, pdf, copula, assembled, tau, rho, sample, validate,
fn, normalize.  Scalar results are emitted as JSON with 17-significant-digit
floats; sample and grid output is CSV.  Exit codes: 0 success, 1 usage,
2 model parse, 3 domain/precondition, 4 convergence, 5 validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .copulas import (
    AssembledDistribution,
    assembled_cdf,
    assembled_logpdf,
    build_copula,
    conditional_cdf,
    copula_cdf,
    copula_pdf2,
    copula_pdf_fd,
)
from .densities import (
    bifactor_logpdf,
    bivariate_gamma_logpdf,
    gamma_marginal_logpdf,
    trivariate_gamma_logpdf,
)
from .dependence import (
    kendall_tau_closed,
    kendall_tau_mc,
    kendall_tau_quadrature,
    spearman_rho_closed,
    spearman_rho_mc,
    spearman_rho_quadrature,
)
from .divisibility import check_infinite_divisibility
from .errors import (
    ArgumentError,
    ConstructionError,
    ConvergenceError,
    DomainError,
    GammacopError,
    KernelError,
    ModelError,
    ParseError,
    PreconditionError,
)
from .polynomial import (
    AffineModel,
    model_from_json_dict,
    model_to_json_dict,
    subset_label,
)
from .sampling import (
    RngSpec,
    make_rng,
    sample_bivariate_gamma,
    sample_copula,
    sample_copula3,
    sample_multifactor,
)
from .specialfn import (
    SeriesControl,
    default_control,
    horn_phi3,
    lauricella_FI,
    lauricella_FII,
    pfq,
)
from .validation import run_full_validation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4
EXIT_VALIDATION = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _json_scalar(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x != x:
            return "NaN"
        if x == float("inf"):
            return "Infinity"
        if x == float("-inf"):
            return "-Infinity"
        return format(x, ".17g")
    if x is None:
        return "null"
    return json.dumps(x)


def to_json(obj, indent: int = 0) -> str:
    """JSON with floats printed to 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{json.dumps(str(k))}: {to_json(v, indent + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        items = [f"{inner}{to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return _json_scalar(obj)


def _emit(obj, out_path: str | None = None) -> None:
    text = to_json(obj) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_model(path: str) -> AffineModel:
    """Load and validate a model JSON file; errors name the offending key."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read model file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"model file {path} is not valid JSON: {exc}") from None
    return model_from_json_dict(data)


def _parse_floats(text: str, expected: int | None = None) -> np.ndarray:
    try:
        values = np.array([float(tok) for tok in text.split(",")])
    except ValueError:
        raise UsageError(f"expected comma-separated floats, got {text!r}") from None
    if expected is not None and values.size != expected:
        raise UsageError(f"expected {expected} comma-separated floats, got {values.size}")
    return values


def _control(args) -> SeriesControl:
    ctl = default_control()
    overrides = {}
    if getattr(args, "rel_tol", None) is not None:
        overrides["rel_tol"] = args.rel_tol
    if getattr(args, "max_terms", None) is not None:
        overrides["max_terms"] = args.max_terms
    if overrides:
        from dataclasses import replace

        ctl = replace(ctl, **overrides)
    return ctl


def _model_logpdf(model: AffineModel, ctl):
    if model.n == 2:
        if model.shapes.is_pure:
            return lambda x: bivariate_gamma_logpdf(model, x, ctl)
        return lambda x: bifactor_logpdf(model, x, ctl)
    if model.n == 3 and model.shapes.is_pure:
        return lambda x: trivariate_gamma_logpdf(model, x, ctl)
    raise DomainError(
        "closed-form densities cover n=2 (any shapes) and n=3 (pure) only"
    )


def _cmd_check(args) -> int:
    model = parse_model(args.model)
    report = check_infinite_divisibility(model.poly, tol=args.tol,
                                         max_subset_size=args.max_card)
    _emit({
        "n": report.n,
        "divisible": report.divisible,
        "singleton_ok": report.singleton_ok,
        "btilde_ok": report.btilde_ok,
        "tol": report.tol,
        "dual": {subset_label(m): float(report.dual[m])
                 for m in range(1 << report.n)},
        "btilde": {subset_label(m): v for m, v in sorted(report.btilde.items())},
    }, args.out)
    return EXIT_OK


def _cmd_pdf(args) -> int:
    model = parse_model(args.model)
    ctl = _control(args)
    logpdf = _model_logpdf(model, ctl)
    if args.batch:
        pts = np.loadtxt(args.batch, delimiter=",", skiprows=1, ndmin=2)
        values = logpdf(pts) if args.log else np.exp(logpdf(pts))
        header = "logpdf" if args.log else "pdf"
        _write_csv(args.out, header.split(","), values[:, None])
        return EXIT_OK
    x = _parse_floats(args.x, model.n)
    value = logpdf(x)
    if args.log:
        _emit({"x": list(x), "logpdf": value}, args.out)
    else:
        _emit({"x": list(x), "pdf": float(np.exp(value))}, args.out)
    return EXIT_OK


def _cmd_copula(args) -> int:
    model = parse_model(args.model)
    copula = build_copula(model, force=args.force)
    v = _parse_floats(args.v, model.n)
    out = {"v": list(v)}
    if args.pdf:
        if model.n == 2:
            out["pdf"] = copula_pdf2(copula, v)
        else:
            out["pdf"] = copula_pdf_fd(copula, v)
            out["method"] = "finite_difference"
    elif args.conditional:
        if model.n != 2:
            raise DomainError("--conditional requires a bivariate model")
        out["conditional_cdf"] = conditional_cdf(copula, v[0], v[1])
    else:
        out["cdf"] = copula_cdf(copula, v)
    _emit(out, args.out)
    return EXIT_OK


def _parse_marginals(path: str, n: int):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read marginals file {path}: {exc}") from None
    if isinstance(data, dict):
        data = data.get("marginals")
    if not isinstance(data, list) or len(data) != n:
        raise ParseError(f"marginals file must list {n} (scale, shape) pairs")
    pairs = []
    for item in data:
        if isinstance(item, dict):
            pairs.append((float(item["p"]), float(item["shape"])))
        else:
            pairs.append((float(item[0]), float(item[1])))
    return tuple(pairs)


def _cmd_assembled(args) -> int:
    model = parse_model(args.model)
    copula = build_copula(model, force=args.force)
    marginals = _parse_marginals(args.marginals, model.n)
    dist = AssembledDistribution(copula, marginals)
    x = _parse_floats(args.x, model.n)
    out = {"x": list(x)}
    if args.pdf:
        out["logpdf"] = assembled_logpdf(dist, x)
        out["pdf"] = float(np.exp(out["logpdf"]))
    else:
        out["cdf"] = assembled_cdf(dist, x)
    _emit(out, args.out)
    return EXIT_OK


def _cmd_dependence(args, which: str) -> int:
    model = parse_model(args.model)
    copula = build_copula(model, force=args.force)
    if copula.n != 2:
        raise DomainError("tau/rho are implemented for bivariate models")
    ctl = _control(args)
    r12 = -float(copula.alpha[3])
    if args.method == "closed":
        fn = kendall_tau_closed if which == "tau" else spearman_rho_closed
        res = fn(r12, copula.lam, *copula.lams, ctl)
    elif args.method == "quad":
        fn = kendall_tau_quadrature if which == "tau" else spearman_rho_quadrature
        res = fn(copula, ctl)
    else:
        fn = kendall_tau_mc if which == "tau" else spearman_rho_mc
        res = fn(copula, n_samples=args.n_samples, seed=args.seed)
    _emit({which: res.value, "method": res.method, "est_error": res.est_error},
          args.out)
    return EXIT_OK


def _write_csv(path: str | None, header, rows: np.ndarray) -> None:
    lines = [",".join(header)]
    for row in np.atleast_2d(rows):
        lines.append(",".join(format(float(v), ".17g") for v in row))
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_sample(args) -> int:
    model = parse_model(args.model)
    rng = make_rng(RngSpec(seed=args.seed, stream=args.stream))
    if args.space == "copula":
        copula = build_copula(model, force=args.force)
        if model.n == 2:
            draws = sample_copula(copula, rng, size=args.n)
        elif model.n == 3:
            draws = sample_copula3(copula, rng, size=args.n)
        else:
            raise DomainError("copula sampling is implemented for n=2 and n=3")
        header = [f"v{i + 1}" for i in range(model.n)]
    else:
        if model.n == 2 and model.shapes.is_pure:
            draws = sample_bivariate_gamma(model, rng, size=args.n)
        else:
            draws = sample_multifactor(model, rng, size=args.n)
        header = [f"x{i + 1}" for i in range(model.n)]
    _write_csv(args.out, header, draws)
    return EXIT_OK


def _cmd_validate(args) -> int:
    model = parse_model(args.model)
    report = run_full_validation(model, full=args.full)
    payload = {
        "overall": report.overall,
        "checks": [
            {
                "name": c.name,
                "target": c.target,
                "computed": c.computed,
                "tolerance": c.tolerance,
                "passed": c.passed,
                "skipped": c.skipped,
                "note": c.note,
            }
            for c in report.checks
        ],
    }
    if args.json:
        _emit(payload, args.json)
    for c in report.checks:
        status = "SKIP" if c.skipped else ("PASS" if c.passed else "FAIL")
        print(f"{status:4s} {c.name}: computed={c.computed:.6g} "
              f"target={c.target:.6g} tol={c.tolerance:.2g} {c.note}")
    print(f"overall: {'PASS' if report.overall else 'FAIL'}")
    if args.emit_grid:
        copula = build_copula(model, force=True)
        grid = np.linspace(0.01, 0.99, args.grid_points)
        mesh = np.meshgrid(*([grid] * model.n), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        values = copula_cdf(copula, pts)
        _write_csv(args.emit_grid,
                   [f"v{i + 1}" for i in range(model.n)] + ["cdf"],
                   np.column_stack([pts, values]))
    return EXIT_OK if report.overall else EXIT_VALIDATION


def _cmd_fn(args) -> int:
    ctl = _control(args)
    if args.function == "pfq":
        if args.z is None:
            raise UsageError("pfq requires --z")
        upper = list(_parse_floats(args.upper)) if args.upper else []
        lower = list(_parse_floats(args.lower)) if args.lower else []
        value = pfq(upper, lower, args.z, ctl)
    else:
        arity = {"phi3": 4, "fi": 6, "fii": 6}[args.function]
        if not args.args:
            raise UsageError(f"{args.function} requires --args with {arity} floats")
        a = _parse_floats(args.args, arity)
        if args.function == "phi3":
            value = horn_phi3(a[0], a[1], a[2], a[3], ctl)
        elif args.function == "fi":
            value = lauricella_FI(a[0], a[1], a[2], a[3], a[4], a[5], ctl)
        else:
            value = lauricella_FII(a[0], a[1], a[2], a[3], a[4], a[5], ctl)
    _emit({"function": args.function, "value": value}, args.out)
    return EXIT_OK


def _cmd_normalize(args) -> int:
    model = parse_model(args.model)
    _emit(model_to_json_dict(model), args.out)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="gammacop",
                     description="Multivariate gamma distributions, their "
                                 "Laplace copulas, and validation oracles")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--out", help="write output to this file instead of stdout")
        return p

    p = add("check", help="infinite-divisibility test")
    p.add_argument("--model", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-card", type=int, default=None,
                   help="skip subsets larger than this (guardrail for n > 12)")

    p = add("pdf", help="closed-form density at a point or CSV batch")
    p.add_argument("--model", required=True)
    p.add_argument("--x", help="comma-separated support point")
    p.add_argument("--log", action="store_true", help="emit logpdf")
    p.add_argument("--batch", help="CSV of points (header row, one point per line)")
    p.add_argument("--rel-tol", type=float, dest="rel_tol")
    p.add_argument("--max-terms", type=int, dest="max_terms")

    p = add("copula", help="copula cdf/pdf/conditional at a point")
    p.add_argument("--model", required=True)
    p.add_argument("--v", required=True, help="comma-separated point in [0,1]^n")
    p.add_argument("--pdf", action="store_true")
    p.add_argument("--conditional", action="store_true")
    p.add_argument("--force", action="store_true",
                   help="skip the divisibility gate (empirical checks still run)")

    p = add("assembled", help="Sklar-assembled distribution cdf/pdf")
    p.add_argument("--model", required=True)
    p.add_argument("--marginals", required=True,
                   help="JSON list of (scale, shape) gamma marginal pairs")
    p.add_argument("--x", required=True)
    p.add_argument("--pdf", action="store_true")
    p.add_argument("--force", action="store_true")

    for which in ("tau", "rho"):
        p = add(which, help=f"Kendall tau or Spearman rho of the model copula")
        p.add_argument("--model", required=True)
        p.add_argument("--method", choices=("closed", "quad", "mc"), default="closed")
        p.add_argument("--n-samples", type=int, default=1_000_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--force", action="store_true")
        p.add_argument("--rel-tol", type=float, dest="rel_tol")
        p.add_argument("--max-terms", type=int, dest="max_terms")

    p = add("sample", help="draw random variates to CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--space", choices=("gamma", "copula"), default="gamma")
    p.add_argument("--force", action="store_true")

    p = add("validate", help="run the oracle suite against a model")
    p.add_argument("--model", required=True)
    p.add_argument("--full", action="store_true",
                   help="include 3-D quadrature and full-size Monte Carlo")
    p.add_argument("--json", help="also write the report as JSON")
    p.add_argument("--emit-grid", help="write a copula cdf grid as CSV")
    p.add_argument("--grid-points", type=int, default=21)

    p = add("fn", help="evaluate a special function (debug/verification)")
    p.add_argument("function", choices=("phi3", "fi", "fii", "pfq"))
    p.add_argument("--args", help="comma-separated arguments")
    p.add_argument("--upper", help="pfq upper parameters")
    p.add_argument("--lower", help="pfq lower parameters")
    p.add_argument("--z", type=float, help="pfq argument")
    p.add_argument("--rel-tol", type=float, dest="rel_tol")
    p.add_argument("--max-terms", type=int, dest="max_terms")

    p = add("normalize", help="re-emit a model in canonical JSON form")
    p.add_argument("--model", required=True)

    return parser


_COMMANDS = {
    "check": _cmd_check,
    "pdf": _cmd_pdf,
    "copula": _cmd_copula,
    "assembled": _cmd_assembled,
    "sample": _cmd_sample,
    "validate": _cmd_validate,
    "fn": _cmd_fn,
    "normalize": _cmd_normalize,
}


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command in ("tau", "rho"):
            return _cmd_dependence(args, args.command)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ArgumentError, DomainError, PreconditionError, ModelError,
            KernelError, ConstructionError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except GammacopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
