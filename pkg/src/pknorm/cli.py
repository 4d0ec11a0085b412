"""Command line front end; every command prints one JSON document.

Exit codes: 0 success, 1 mathematical violation or rejection, 2 invalid input.
"""

import argparse
import sys

from . import fuzz, io, lemmas
from .norms import PkParams, pk_norm
from .preserver import DecompositionError, decompose, verify_preservation
from .tensor import TensorShape

DEFAULT_TOL = 1e-9
DEFAULT_TRIALS = 1000
DEFAULT_SEED = 0


class InputError(Exception):
    pass


def _dims(text):
    try:
        dims = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be comma separated integers, got {text!r}")
    if not dims or any(d < 2 for d in dims):
        raise argparse.ArgumentTypeError("every dims entry must be >= 2")
    return dims


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return v


def _params(args):
    if args.p is None or args.k is None:
        raise InputError("--p and --k are required")
    try:
        return PkParams(args.p, args.k)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _config(args):
    keys = ("command", "p", "k", "dims", "trials", "seed", "tol", "matrix", "map", "suite", "gamma")
    return {key: getattr(args, key, None) for key in keys}


def _load_map(args):
    phi = io.superoperator_from_json(io.load(args.map))
    if args.dims is not None and list(phi.shape.dims) != list(args.dims):
        raise InputError(f"--dims {args.dims} does not match map dims {list(phi.shape.dims)}")
    if phi.shape.m < 2:
        raise InputError("map needs at least two tensor factors")
    return phi


def cmd_norm(args):
    params = _params(args)
    if args.matrix is None:
        raise InputError("--matrix is required")
    a = io.matrix_from_json(io.load(args.matrix))
    k_eff = params.effective_k(*a.shape)
    out = {"value": pk_norm(a, params), "k_effective": k_eff, "k_clamped": k_eff != params.k}
    return 0, out


def cmd_verify(args):
    params = _params(args)
    if args.map is None:
        raise InputError("--map is required")
    phi = _load_map(args)
    rep = verify_preservation(phi, params, args.trials, args.seed, args.tol)
    return (0 if rep.preserving else 1), io.report_to_json(rep)


def cmd_decompose(args):
    params = _params(args)
    if params.p <= 2:
        raise InputError("p must exceed 2")
    if args.map is None:
        raise InputError("--map is required")
    phi = _load_map(args)
    try:
        res = decompose(phi, params, tol=max(args.tol, 1e-300))
    except DecompositionError as exc:
        return 1, {
            "error": "not a tensor-(p,k)-preserver",
            "stage": exc.stage,
            "depth": exc.depth,
            "residual": exc.residual,
            "message": str(exc),
            "diagnostics": io.jsonable(exc.diagnostics),
        }
    return 0, io.decomposition_to_json(res)


def _suite_json(res):
    return {
        "suite": res.name,
        "trials": res.trials,
        "seed": res.seed,
        "violations": res.violations,
        "vacuous": res.vacuous,
        "min_slack": res.min_slack,
        "histogram": io.jsonable(res.histogram),
        "first_violation": io.jsonable(res.first_violation),
    }


def cmd_fuzz_lemmas(args):
    if args.suite is None:
        raise InputError("--suite is required")
    try:
        names = fuzz.resolve(args.suite)
    except KeyError as exc:
        raise InputError(exc.args[0]) from exc
    results = [fuzz.run_suite(n, args.trials, args.seed) for n in names]
    total = sum(r.violations for r in results)
    out = {"suites": [_suite_json(r) for r in results], "violations": total}
    return (0 if total == 0 else 1), out


def cmd_counterexample(args):
    if args.gamma is None:
        raise InputError("--gamma is required")
    k = 2 if args.k is None else args.k
    try:
        rep = lemmas.remark_counterexample(args.gamma, k)
    except lemmas.PreconditionError as exc:
        raise InputError(str(exc)) from exc
    c, d = lemmas.counterexample_instance()
    out = {
        "c_plus_d": io.matrix_to_json(c + d),
        "c_minus_d": io.matrix_to_json(c - d),
        "lhs": rep.details["lhs"],
        "rhs": rep.details["rhs"],
        "slack": rep.slack,
        "reversal_fails": rep.slack > 0,
    }
    return (0 if rep.slack > 0 else 1), out


COMMANDS = {
    "norm": cmd_norm,
    "verify": cmd_verify,
    "decompose": cmd_decompose,
    "fuzz-lemmas": cmd_fuzz_lemmas,
    "counterexample": cmd_counterexample,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="pknorm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--p", type=float)
        sp.add_argument("--k", type=_positive_int)
        sp.add_argument("--dims", type=_dims)
        sp.add_argument("--trials", type=_positive_int, default=DEFAULT_TRIALS)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
        sp.add_argument("--matrix")
        sp.add_argument("--map")
        sp.add_argument("--suite")
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--out")
    return parser


def _emit(doc, out):
    text = io.dumps(doc)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def run(argv=None):
    """Parse ``argv``, run the command, return ``(exit_code, json_document)``."""
    args = build_parser().parse_args(argv)
    try:
        code, out = COMMANDS[args.command](args)
    except (InputError, io.FormatError, OSError, ValueError) as exc:
        code, out = 2, {"error": str(exc)}
    out["config"] = _config(args)
    return code, out, args.out


def main(argv=None):
    try:
        code, out, path = run(argv)
    except SystemExit as exc:
        # argparse usage errors
        return exc.code if isinstance(exc.code, int) else 2
    try:
        _emit(out, path)
    except OSError as exc:
        sys.stderr.write(f"cannot write output: {exc}\n")
        return 2
    if code == 2:
        sys.stderr.write(f"error: {out['error']}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
