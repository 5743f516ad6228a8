"""The ``gpmirror`` command-line driver.

Every command prints one JSON report (keys sorted, so output is byte-stable)
and exits 0 on success, 1 when a verification fails and 2 on usage or input
errors. Reports are cached by a hash of the canonical inputs, the command,
the order and the version tag.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Optional

import jsonschema

from . import __version__, CACHE_VERSION
from .cache import Cache, make_key
from .errors import GPMirrorError, VerificationFailure

log = logging.getLogger("gpmirror")

SELECTORS = ("Knonneg", "Kplus", "Kp", "AmbientNonneg")


class UsageError(Exception):
    pass


def jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def render(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def load_schema(name: str) -> dict:
    return json.loads(resources.files("gpmirror").joinpath("schemas", name).read_text())


def schema_validator(name: str):
    """Validator for a shipped schema with cross-file references resolved."""
    from referencing import Registry, Resource
    root = resources.files("gpmirror").joinpath("schemas")
    registry = Registry().with_resources(
        (f.name, Resource.from_contents(json.loads(f.read_text())))
        for f in root.iterdir() if f.name.endswith(".schema.json"))
    schema = load_schema(name)
    return jsonschema.validators.validator_for(schema)(schema, registry=registry)


def read_json(path: str, schema: Optional[str] = None) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc
    if schema:
        jsonschema_check(data, schema, path)
    return data


def jsonschema_check(data, schema: str, path: str) -> None:
    try:
        schema_validator(schema).validate(data)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"{path}: {exc.message}") from exc


def parse_vector(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise UsageError(f"not an integer vector: {text!r}") from exc


def parse_rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(x) for x in text.replace(" ", "").split(",") if x]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a list of rationals: {text!r}") from exc


def parse_order(text: str) -> Fraction:
    try:
        N = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"order must be a rational number, got {text!r}") from exc
    if N < 0:
        raise UsageError("order must be nonnegative")
    return N


def _simplex(data: dict):
    from .polytope import validate_reflexive
    return validate_reflexive(data["vertices"], data.get("name", ""))


# -- commands -------------------------------------------------------------------
# Each handler returns (inputs, order, compute) where ``inputs`` is the
# canonical description used for the cache key and ``compute`` produces the
# report body and the ok flag.

def cmd_polytope(args):
    data = read_json(args.file, "polytope_input.schema.json")

    def compute():
        from .polytope import boundary_points, describe
        simplex = _simplex(data)
        P = boundary_points(simplex)
        out = describe(simplex, P)
        out["num_points"] = len(P)
        return out, True

    return {"polytope": data}, None, compute


def cmd_monoid(args):
    data = read_json(args.file, "polytope_input.schema.json")
    N = parse_order(args.order)
    if args.selector == "Kp" and args.p is None:
        raise UsageError("--selector Kp needs --p")
    grading = parse_rationals(args.grading) if args.grading else None

    def compute():
        from .monoid import default_grading, enumerate_monoid, grading_from_weights, relation_lattice
        K = relation_lattice(_simplex(data))
        g = grading_from_weights(K, grading) if grading else default_grading(K)
        sel = ("Kp", args.p) if args.selector == "Kp" else args.selector
        if args.selector == "Kp" and not 0 <= args.p < K.size:
            raise UsageError(f"--p must lie in [0, {K.size})")
        elems = enumerate_monoid(sel, K, g, N)
        return {"selector": args.selector, "p": args.p, "order": N, "rank": K.rank,
                "num_points": K.size, "grading": g.to_json(),
                "elements": [{"u": list(u), "grade": g.grade(u)} for u in elems]}, True

    inputs = {"polytope": data, "selector": args.selector, "p": args.p,
              "grading": [str(x) for x in grading] if grading else None}
    return inputs, N, compute


def cmd_mirror_map(args):
    data = read_json(args.file, "polytope_input.schema.json")
    N = parse_order(args.order)
    us = [parse_vector(u) for u in args.u or []]
    grading = parse_rationals(args.grading) if args.grading else None

    def compute():
        from .mirrormap import build_bundle, integrality_report
        bundle = build_bundle(_simplex(data), N, grading=grading,
                              gamma_convention=args.gamma_convention, jobs=args.jobs)
        for u in us:
            if len(u) != bundle.size:
                raise UsageError(f"u-vector {u} has length {len(u)}, expected {bundle.size}")
        out = {"order": N, "rank": bundle.K.rank, "num_points": bundle.size,
               "points": [list(p) for p in bundle.K.points],
               "grading": bundle.grading.to_json(),
               "gamma_convention": bundle.gamma_convention,
               "tau": bundle.tau.to_json()}
        ok = True
        if args.check_integrality or us:
            rep = integrality_report(bundle, us or None, check_support=args.check_support)
            out["integrality"] = rep
            ok = rep["all_integral"]
        if args.emit_series:
            out["phi"] = [s.to_json() for s in bundle.phi]
        return out, ok

    inputs = {"polytope": data, "u": us, "check_integrality": args.check_integrality,
              "check_support": args.check_support, "gamma": args.gamma_convention,
              "grading": [str(x) for x in grading] if grading else None,
              "emit_series": args.emit_series}
    return inputs, N, compute


def cmd_hypersurface(args):
    if args.n < 3:
        raise UsageError("--n must be at least 3")
    if args.order < 0:
        raise UsageError("--order must be nonnegative")

    def compute():
        from .mirrormap import hypersurface_fast_path
        out = hypersurface_fast_path(args.n, args.order, args.power).to_json()
        return out, out["integral"]

    return {"n": args.n, "power": args.power}, args.order, compute


def cmd_gkz_verify(args):
    if args.lemma_c4:
        def compute():
            from .gkz import lemma_c4_check
            rows = [lemma_c4_check(a, u) for a in range(-6, 7) for u in range(1, 7)]
            return {"lemma_c4": rows}, all(r["verdict"] != "mismatch" for r in rows)
        return {"lemma_c4": True}, None, compute
    if not args.file:
        raise UsageError("gkz-verify needs a polytope file or --lemma-c4")
    data = read_json(args.file, "polytope_input.schema.json")
    N = parse_order(args.order)

    def compute():
        from .gkz import verify_solutions
        rep = verify_solutions(_simplex(data), N)
        return rep, rep["passed"]

    return {"polytope": data}, N, compute


def _parse_lambda(text: str, simplex):
    from .subdivision import refining_heights
    if text == "refining":
        return refining_heights(simplex)[0]
    vals = parse_rationals(text)
    return vals[0] if len(vals) == 1 else vals


def cmd_subdivision(args):
    data = read_json(args.file)
    if "heights" in data:
        jsonschema_check(data, "heights_input.schema.json", args.file)

        def compute():
            from .subdivision import tropical_smoothness
            return tropical_smoothness(data["points"], data["heights"], args.char,
                                       data.get("vertices")).to_json(), True

        return {"heights": data, "char": args.char}, None, compute
    jsonschema_check(data, "polytope_input.schema.json", args.file)

    def compute():
        from .subdivision import lcm_lambda, mpcp_mpcs_check
        simplex = _simplex(data)
        lam = _parse_lambda(args.lam, simplex)
        rep = mpcp_mpcs_check(simplex, lam)
        out = {"mpcp": rep.to_json()}
        if rep.verdict != "neither":
            out["volumes"] = lcm_lambda(simplex, lam, args.normalization).to_json()
        return out, True

    return {"polytope": data, "lambda": args.lam, "normalization": args.normalization}, None, compute


def cmd_smooth_check(args):
    from .finitefield import MAX_ORDER, is_prime
    if args.soundness:
        def compute():
            from .subdivision import soundness_suite
            rep = soundness_suite(args.soundness, args.seed)
            return rep, rep["false_positives"] == 0
        return {"soundness": args.soundness, "seed": args.seed}, None, compute
    if not args.file:
        raise UsageError("smooth-check needs a potential or polytope file, or --soundness")
    if args.char is None or not is_prime(args.char):
        raise UsageError("--char must be a prime")
    if args.char ** args.degree > MAX_ORDER:
        raise UsageError(f"field order exceeds {MAX_ORDER}")
    data = read_json(args.file)

    def compute():
        from .finitefield import field
        from .subdivision import bruteforce_smooth, potential_heights, tropical_smoothness
        F = field(args.char, args.degree)
        if "terms" in data:
            terms = [(t["e"], t["c"]) for t in data["terms"]]
            return {"bruteforce": bruteforce_smooth(terms, F, data.get("weights")).to_json()}, True
        from .polytope import boundary_points, mirror_potential
        simplex = _simplex(data)
        P = boundary_points(simplex)
        terms = mirror_potential(simplex, P, args.coefficient)
        res = bruteforce_smooth([(e, c) for e, c in terms], F, simplex.weights)
        lam = _parse_lambda(args.lam, simplex)
        pts, hts, verts = potential_heights(simplex, lam if isinstance(lam, list) else [lam] * len(P), P)
        trop = tropical_smoothness(pts, hts, args.char, verts)
        return {"bruteforce": res.to_json(), "tropical": {
            "verdict": trop.verdict, "reasons": trop.reasons,
            "volumes": [c.volume for c in trop.subdivision.cells]}}, True

    if "terms" in data:
        jsonschema_check(data, "potential_input.schema.json", args.file)
    else:
        jsonschema_check(data, "polytope_input.schema.json", args.file)
    inputs = {"input": data, "char": args.char, "degree": args.degree,
              "coefficient": args.coefficient, "lambda": args.lam}
    return inputs, None, compute


COMMANDS: dict[str, Callable] = {
    "polytope": cmd_polytope,
    "monoid": cmd_monoid,
    "mirror-map": cmd_mirror_map,
    "hypersurface": cmd_hypersurface,
    "gkz-verify": cmd_gkz_verify,
    "subdivision": cmd_subdivision,
    "smooth-check": cmd_smooth_check,
}


def _add_globals(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--cache", metavar="DIR", default=d(None),
                   help="cache directory (default: $GPMIRROR_CACHE, unset disables caching)")
    p.add_argument("--jobs", type=int, default=d(1), help="worker threads")
    p.add_argument("--format", choices=["json", "jsonl"], default=d("json"),
                   help="output format; jsonl streams monoid elements one per line")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpmirror", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gpmirror {__version__}")
    _add_globals(parser, False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _add_globals(p, True)
        return p

    p = add("polytope", "validate a simplex and print its toric data")
    p.add_argument("file")

    p = add("monoid", "enumerate a relation monoid up to a grade")
    p.add_argument("file")
    p.add_argument("--order", required=True)
    p.add_argument("--selector", choices=SELECTORS, default="Knonneg")
    p.add_argument("--p", type=int, help="point index for --selector Kp")
    p.add_argument("--grading", help="comma-separated weights, one per point")

    p = add("mirror-map", "compute mirror-map series and check integrality")
    p.add_argument("file")
    p.add_argument("--order", required=True)
    p.add_argument("--check-integrality", action="store_true")
    p.add_argument("--check-support", action="store_true")
    p.add_argument("--u", action="append", metavar="VECTOR", help="relation to test (repeatable)")
    p.add_argument("--gamma-convention", choices=["single", "double"], default="single")
    p.add_argument("--grading")
    p.add_argument("--emit-series", action="store_true")

    p = add("hypersurface", "one-variable mirror map of a Fermat hypersurface")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--power", type=int)

    p = add("gkz-verify", "check that the series solve the GKZ system")
    p.add_argument("file", nargs="?")
    p.add_argument("--order", default="3")
    p.add_argument("--lemma-c4", action="store_true", help="check the closed forms for log derivatives on a grid")

    p = add("subdivision", "tropical verdict for a heights file, or MPCP/lcm for a polytope")
    p.add_argument("file")
    p.add_argument("--char", type=int, default=0)
    p.add_argument("--lambda", dest="lam", default="1",
                   help="heights on P: one value, a comma list, or 'refining'")
    p.add_argument("--normalization", choices=["M-lattice", "degree-sublattice"],
                   default="M-lattice")

    p = add("smooth-check", "brute-force smoothness over a finite field")
    p.add_argument("file", nargs="?")
    p.add_argument("--char", type=int)
    p.add_argument("--degree", type=int, default=1, help="extension degree k of F_{p^k}")
    p.add_argument("--coefficient", type=int, default=1, help="value of every b_p")
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--soundness", type=int, metavar="N", help="run N random instances")
    p.add_argument("--seed", type=int, default=0)
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1:
        print("gpmirror: --jobs must be positive", file=sys.stderr)
        return 2
    cache_dir = args.cache or os.environ.get("GPMIRROR_CACHE")
    cache = Cache(cache_dir) if cache_dir else None
    try:
        inputs, order, compute = COMMANDS[args.command](args)
        key = make_key(args.command, jsonable(inputs), jsonable(order), CACHE_VERSION)
        text = cache.get(key) if cache else None
        if text is None:
            body, ok = compute()
            report = {"command": args.command, "version": __version__, "ok": bool(ok)}
            report.update(jsonable(body))
            text = render(report)
            if cache:
                cache.put(key, text)
        report = json.loads(text)
    except UsageError as exc:
        print(f"gpmirror: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"gpmirror: verification failed: {exc}", file=sys.stderr)
        return 1
    except GPMirrorError as exc:
        print(f"gpmirror: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.format == "jsonl" and "elements" in report:
        for e in report["elements"]:
            out.write(json.dumps(e, sort_keys=True) + "\n")
    else:
        out.write(text)
    return 0 if report["ok"] else 1


def main() -> None:
    sys.exit(run())
