"""Command-line interface.

Exit codes: 0 property holds / operation succeeded, 1 property fails (witness
in the report), 2 input or precondition error, 3 undecided at precision
(or inconclusive family check).
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .decomposition import decompose, zero_gap_radius
from .errors import InputError, NoWitnessError, PreconditionError, UndecidedError
from .exact import DEFAULT_MAX_PRECISION, DEFAULT_PRECISION, format_value, parse_value
from .families import (
    counterexample_space,
    is_k_separating_on,
    ultrametric_by_family,
)
from .functions import classify_function
from .generators import FUNCTION_CLASSES, GenSpec, gen_function, gen_metric, gen_pseudoultrametric, gen_ultrametric
from .io import dumps, parse_pairs, read_family, read_function, read_matrix
from .spaces import CLASSES, classify_space
from .theorems import (
    apply,
    dual_witness,
    min_falsifying_exponent,
    probe_fab,
    probe_snowflake,
    witness_not_pseudoultrametric_preserving,
    witness_not_semimetric_preserving,
    witness_not_ultrametric_metric_preserving,
    witness_not_ultrametric_preserving,
)

SCHEMA = "ultrapres.report/1"

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNDECIDED = 0, 1, 2, 3

FN_PROPERTIES = (
    "increasing",
    "amenable",
    "doubling",
    "pseudoultrametric-preserving",
    "semimetric-preserving",
    "ultrametric-preserving",
    "ultrametric-metric-preserving",
)

log = logging.getLogger("ultrapres")


def _fmt(v):
    return format_value(v) if isinstance(v, Fraction) else v


def _digest(path):
    data = Path(path).read_bytes()
    return {"path": str(path), "sha256": hashlib.sha256(data).hexdigest()}


class Outcome:
    def __init__(self, code, result, summary):
        self.code = code
        self.result = result
        self.summary = summary


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InputError(f"--{name.replace('_', '-')} is required for {args.command}")


# --- subcommands ---------------------------------------------------------------

def cmd_classify_space(args):
    _need(args, "input")
    space = read_matrix(args.input)
    report = classify_space(space)
    result = report.to_json()
    if args.require:
        if args.require not in CLASSES:
            raise InputError(f"--require must be one of {CLASSES} for classify-space")
        holds = report.classes[args.require]
        result["required"] = {"class": args.require, "holds": holds}
        code = EXIT_OK if holds else EXIT_FAIL
        summary = f"{args.require}: {'yes' if holds else 'no'}"
    else:
        code = EXIT_OK
        summary = ", ".join(f"{c}={'yes' if v else 'no'}" for c, v in report.classes.items())
    return Outcome(code, result, summary)


def _counterexamples(f, cls):
    out = {}
    builders = {
        "pseudoultrametric_preserving": witness_not_pseudoultrametric_preserving,
        "semimetric_preserving": witness_not_semimetric_preserving,
        "ultrametric_preserving": witness_not_ultrametric_preserving,
        "ultrametric_metric_preserving": (
            witness_not_ultrametric_metric_preserving if cls.amenable.holds else witness_not_semimetric_preserving
        ),
    }
    for name, holds in cls.derived().items():
        if not holds:
            out[name] = builders[name](f).to_json()
    return out


def cmd_classify_fn(args):
    _need(args, "fn")
    f = read_function(args.fn)
    cls = classify_function(f)
    result = cls.to_json()
    result["function"] = f.to_json()
    result["counterexamples"] = _counterexamples(f, cls)
    code = EXIT_OK
    summary = ", ".join(f"{k}={'yes' if v else 'no'}" for k, v in cls.derived().items())
    if args.require:
        if args.require not in FN_PROPERTIES:
            raise InputError(f"--require must be one of {FN_PROPERTIES} for classify-fn")
        key = args.require.replace("-", "_")
        holds = getattr(cls, key)
        holds = holds.holds if hasattr(holds, "holds") else holds
        result["required"] = {"property": args.require, "holds": holds}
        code = EXIT_OK if holds else EXIT_FAIL
        summary = f"{args.require}: {'yes' if holds else 'no'}"
    return Outcome(code, result, summary)


def cmd_transform(args):
    _need(args, "input", "fn")
    space = read_matrix(args.input)
    f = read_function(args.fn)
    image = apply(f, space)
    report = classify_space(image)
    result = {"transformed": image.to_json(), "classification": report.to_json()}
    code = EXIT_OK
    summary = ", ".join(f"{c}={'yes' if v else 'no'}" for c, v in report.classes.items())
    if args.require:
        if args.require not in CLASSES:
            raise InputError(f"--require must be one of {CLASSES} for transform")
        holds = report.classes[args.require]
        result["required"] = {"class": args.require, "holds": holds}
        code = EXIT_OK if holds else EXIT_FAIL
    return Outcome(code, result, summary)


def cmd_dual_witness(args):
    _need(args, "input")
    pkg = dual_witness(read_matrix(args.input))
    if pkg is None:
        return Outcome(EXIT_OK, {"ultrametric": True, "witness": None}, "ultrametric: no dual witness")
    return Outcome(
        EXIT_FAIL,
        {"ultrametric": False, "witness": pkg.to_json()},
        f"not ultrametric: f_(a,b) with a={pkg.notes['a']}, b={pkg.notes['b']} breaks triangle at {pkg.indices}",
    )


def cmd_probe_fab(args):
    _need(args, "input")
    res = probe_fab(read_matrix(args.input))
    result = {
        "ultrametric": res.ultrametric,
        "pairs_checked": res.pairs_checked,
        "failing_pair": [_fmt(v) for v in res.failing_pair] if res.failing_pair else None,
        "witness": res.witness.to_json() if res.witness else None,
    }
    if res.ultrametric:
        return Outcome(EXIT_OK, result, f"ultrametric ({res.pairs_checked} pairs passed)")
    a, b = res.failing_pair
    return Outcome(EXIT_FAIL, result, f"not ultrametric: fails at (a, b) = ({a}, {b})")


def cmd_probe_snowflake(args):
    _need(args, "input", "alpha")
    alpha = parse_value(args.alpha)
    res = probe_snowflake(read_matrix(args.input), alpha, args.precision, args.max_precision)
    result = {
        "alpha": _fmt(alpha),
        "metric": res.metric,
        "witness": list(res.witness) if res.witness else None,
        "undecided": [list(t) for t in res.undecided],
    }
    if res.metric is None:
        return Outcome(EXIT_UNDECIDED, result, f"undecided at precision for {len(res.undecided)} triple(s)")
    if res.metric:
        return Outcome(EXIT_OK, result, f"d^{alpha} is a metric")
    return Outcome(EXIT_FAIL, result, f"d^{alpha} is not a metric: triple {res.witness}")


def cmd_min_exponent(args):
    _need(args, "input")
    tol = parse_value(args.tol) if args.tol else Fraction(1, 2 ** 30)
    res = min_falsifying_exponent(read_matrix(args.input), tol, args.precision, args.max_precision)
    if res is None:
        return Outcome(EXIT_OK, {"alpha": None, "tolerance": _fmt(tol)}, "ultrametric: no falsifying exponent")
    result = {
        "alpha": _fmt(res.alpha),
        "lo": _fmt(res.lo),
        "hi": _fmt(res.hi),
        "tolerance": _fmt(tol),
        "triple": list(res.triple),
    }
    return Outcome(EXIT_OK, result, f"alpha* ~ {float(res.alpha):.12g} at triple {res.triple}")


def cmd_decompose(args):
    _need(args, "input")
    res = decompose(read_matrix(args.input))
    return Outcome(EXIT_OK, res.to_json(), f"r* = {res.r_star}; factorization verified")


def cmd_zero_gap(args):
    _need(args, "input", "fn")
    r0 = zero_gap_radius(read_matrix(args.input), read_function(args.fn))
    if r0 is None:
        return Outcome(EXIT_OK, {"r0": None}, "f o d is still ultrametric")
    return Outcome(EXIT_OK, {"r0": _fmt(r0)}, f"r0 = {r0}; f vanishes on [0, r0)")


def cmd_family_check(args):
    _need(args, "family")
    family = read_family(args.family)
    if args.input:
        space = read_matrix(args.input)
        res = ultrametric_by_family(family, space, precision=args.precision, max_precision=args.max_precision)
        result = {
            "mode": "ultrametric",
            "verdict": res.label,
            "inconclusive_pair": [_fmt(v) for v in res.inconclusive_pair] if res.inconclusive_pair else None,
            "failing_member": res.failing_member,
        }
        code = {"ultrametric": EXIT_OK, "not_ultrametric": EXIT_FAIL, "inconclusive": EXIT_UNDECIDED}[res.label]
        return Outcome(code, result, res.label)
    _need(args, "pairs")
    k = parse_value(args.k) if args.k else Fraction(2)
    res = is_k_separating_on(family, k, parse_pairs(args.pairs), args.precision, args.max_precision)
    margins = [m.to_json() if hasattr(m, "to_json") else _fmt(m) for m in res.margins]
    result = {
        "mode": "k-separation",
        "k": _fmt(k),
        "holds": res.holds,
        "failing_pair": [_fmt(v) for v in res.failing_pair] if res.failing_pair else None,
        "margins": margins,
    }
    if res.holds:
        return Outcome(EXIT_OK, result, f"{k}-separating on all given pairs")
    return Outcome(EXIT_FAIL, result, f"not {k}-separating at {res.failing_pair}")


def cmd_family_counterexample(args):
    _need(args, "family", "t1", "t2")
    family = read_family(args.family)
    t1, t2 = parse_value(args.t1), parse_value(args.t2)
    try:
        space, cert = counterexample_space(family, t1, t2)
    except NoWitnessError as exc:
        return Outcome(EXIT_FAIL, {"counterexample": None, "reason": str(exc)}, str(exc))
    result = {
        "counterexample": space.to_json(),
        "certificate": {
            "t3": _fmt(cert.t3),
            "metric": cert.metric,
            "ultrametric": cert.ultrametric,
            "member_metric": list(cert.member_metric),
        },
    }
    return Outcome(EXIT_OK, result, f"t3 = {cert.t3}; sides {[str(v) for v in space.sides()]}")


def cmd_gen(args):
    _need(args, "seed")
    kind = args.kind
    spec = GenSpec(seed=args.seed, n=args.n, target=args.gen_class if kind == "function" else kind)
    if kind == "ultrametric":
        obj = gen_ultrametric(spec).to_json()
    elif kind == "metric":
        space = gen_metric(spec)
        obj = space.to_json()
        obj["meta_flags"] = {"ultrametric": classify_space(space).ultrametric}
    elif kind == "pseudoultrametric":
        zero = parse_value(args.zero_pairs) if args.zero_pairs else Fraction(1, 3)
        obj = gen_pseudoultrametric(spec, zero).to_json()
    else:
        if args.gen_class is None:
            raise InputError(f"--class is required for gen --kind function; one of {FUNCTION_CLASSES}")
        obj = gen_function(spec, args.gen_class).to_json()
    obj["meta"] = {"genspec": spec.to_json(), "generator": f"ultrapres {__version__}"}
    flags = obj.pop("meta_flags", None)
    if flags:
        obj["meta"].update(flags)
    return Outcome(EXIT_OK, obj, f"generated {kind} (seed {args.seed})")


COMMANDS = {
    "classify-space": cmd_classify_space,
    "classify-fn": cmd_classify_fn,
    "transform": cmd_transform,
    "dual-witness": cmd_dual_witness,
    "probe-fab": cmd_probe_fab,
    "probe-snowflake": cmd_probe_snowflake,
    "min-exponent": cmd_min_exponent,
    "decompose": cmd_decompose,
    "zero-gap": cmd_zero_gap,
    "family-check": cmd_family_check,
    "family-counterexample": cmd_family_counterexample,
    "gen": cmd_gen,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="matrix file (.json or .csv)")
    common.add_argument("--fn", help="function spec (JSON)")
    common.add_argument("--family", help="family file (JSON list of function specs)")
    common.add_argument("--alpha", help="snowflake exponent, e.g. 3 or 5/2")
    common.add_argument("--k", help="separation level k > 1 (default 2)")
    common.add_argument("--require", help="class or property that must hold for exit code 0")
    common.add_argument("--pairs", help="finite pair set 't1:t2,t1:t2'")
    common.add_argument("--t1")
    common.add_argument("--t2")
    common.add_argument("--tol", help="min-exponent tolerance (default 2^-30)")
    common.add_argument("--seed", type=int)
    common.add_argument("--n", type=int, default=6)
    common.add_argument("--kind", choices=("ultrametric", "metric", "pseudoultrametric", "function"),
                        default="ultrametric")
    common.add_argument("--class", dest="gen_class", choices=FUNCTION_CLASSES)
    common.add_argument("--zero-pairs")
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help=f"initial enclosure bits (default {DEFAULT_PRECISION}, width about 2^-{DEFAULT_PRECISION})")
    common.add_argument("--max-precision", type=int, default=DEFAULT_MAX_PRECISION,
                        help=f"refinement cap in bits (default {DEFAULT_MAX_PRECISION})")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="text", action="store_false", default=False, help="JSON report (default)")
    fmt.add_argument("--text", dest="text", action="store_true", help="human-readable summary")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ultrapres", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _echo(args):
    keys = ("input", "fn", "family", "alpha", "k", "require", "pairs", "t1", "t2", "tol", "seed")
    out = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    if args.command == "gen":
        out.update(kind=args.kind, n=args.n)
        if args.gen_class:
            out["class"] = args.gen_class
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        outcome = COMMANDS[args.command](args)
    except (InputError, PreconditionError, NoWitnessError) as exc:
        outcome = Outcome(EXIT_INPUT, {"error": {"type": type(exc).__name__, "message": str(exc)}}, str(exc))
        print(f"ultrapres {args.command}: {exc}", file=sys.stderr)
    except UndecidedError as exc:
        outcome = Outcome(EXIT_UNDECIDED, {"error": {"type": "UndecidedError", "message": str(exc),
                                                     "detail": exc.detail}}, str(exc))

    if args.command == "gen" and outcome.code == EXIT_OK:
        payload = outcome.result
    else:
        payload = {
            "schema": SCHEMA,
            "command": args.command,
            "args": _echo(args),
            "inputs": {
                name: _digest(getattr(args, name))
                for name in ("input", "fn", "family")
                if getattr(args, name) and Path(getattr(args, name)).is_file()
            },
            "precision": {"initial_bits": args.precision, "max_bits": args.max_precision},
            "exit_code": outcome.code,
            "result": outcome.result,
        }
        if args.timing:
            payload["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    if args.text:
        sys.stdout.write(f"{args.command}: {outcome.summary} (exit {outcome.code})\n")
    else:
        sys.stdout.write(dumps(payload))
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
