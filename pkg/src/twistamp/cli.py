"""Command line interface: graph files in, symbolic checks and reports out.

Graph files are JSON:

    {
      "vertices": [1, 2, 3, 4],
      "edges": [{"id": 1, "source": 1, "target": 2, "mass": "1/2"}, ...],
      "external_momenta": {"1": ["3/4", "0", "0", "-1"], ...}
    }

Masses and momentum components may be JSON numbers or decimal/rational
strings; strings are the recommended form since they parse to exact
rationals with no binary-float detour.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import __version__
from .errors import (
    InvariantViolation,
    PrecisionError,
    StructuralError,
    TwistampError,
    ValidationError,
)
from .graphs import Graph, cycle_basis, loop_number, route_momenta
from .integrate import (
    IntegrationConfig,
    direct_amplitude,
    extract_constants,
    feynman_trick_check,
    parametric_amplitude,
    pfaffian_amplitude,
)
from .symanzik import first_symanzik_trees, second_symanzik
from .twistor import pfaffian_symanzik_ratio, propagator_forms

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _read_document(path: str):
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return doc, hashlib.sha256(raw).hexdigest()


def _expect(condition: bool, where: str, message: str) -> None:
    if not condition:
        raise ValidationError(f"{where}: {message}")


def graph_from_document(doc) -> Graph:
    """Validate the JSON document shape and build the Graph from it."""
    _expect(isinstance(doc, dict), "document", "top level must be an object")
    _expect(isinstance(doc.get("vertices"), list), "vertices", "must be a list")
    _expect(isinstance(doc.get("edges"), list), "edges", "must be a list")
    vertices = doc["vertices"]

    edges = []
    for pos, entry in enumerate(doc["edges"]):
        where = f"edges[{pos}]"
        _expect(isinstance(entry, dict), where, "must be an object")
        for key in ("id", "source", "target", "mass"):
            _expect(key in entry, where, f"missing field {key!r}")
        _expect(isinstance(entry["id"], int), f"{where}.id", "must be an integer")
        _expect(
            isinstance(entry["mass"], (int, float, str)),
            f"{where}.mass",
            "must be a number or a decimal/rational string",
        )
        edges.append((entry["id"], entry["source"], entry["target"], entry["mass"]))

    momenta = {}
    raw_momenta = doc.get("external_momenta", {}) or {}
    _expect(isinstance(raw_momenta, dict), "external_momenta", "must be an object")
    by_name = {str(v): v for v in vertices}
    for key, comps in raw_momenta.items():
        where = f"external_momenta[{key!r}]"
        _expect(key in by_name, where, "no such vertex")
        _expect(
            isinstance(comps, list) and len(comps) == 4,
            where,
            "must be a list of 4 components",
        )
        momenta[by_name[key]] = comps

    return Graph.build(vertices, edges, momenta)


def load_graph(path: str):
    doc, digest = _read_document(path)
    return graph_from_document(doc), digest


def _symbolic_checks(g: Graph) -> dict:
    """Exact verdicts: Pf vs S2, matrix-tree match, propagator form ranks."""
    basis = cycle_basis(g)
    routing = route_momenta(g)
    checks: dict = {}

    sym = second_symanzik(g, basis, routing)
    checks["first_symanzik_match"] = bool(sym.s1 == first_symanzik_trees(g))

    forms = propagator_forms(g, basis, routing)
    ranks = []
    expected = []
    for f in forms:
        ranks.append(f.form.rank())
        expected.append(4 if any(f.alpha) else 2)
    checks["propagator_ranks"] = {
        "ranks": ranks,
        "expected": expected,
        "pass": ranks == expected,
    }

    if g.n_edges == 2 * loop_number(g) + 2:
        ratio = pfaffian_symanzik_ratio(g, basis, routing)
        checks["pfaffian_symanzik"] = {
            "lambda2": [ratio.lambda2.real, ratio.lambda2.imag],
            "residual": ratio.residual,
            "exact": ratio.exact,
            "verdict": "PASS" if ratio.exact else "FAIL",
        }
    else:
        checks["pfaffian_symanzik"] = {"verdict": "SKIPPED", "reason": "N != 2n+2"}
    return checks


def cmd_symanzik(args) -> int:
    g, _ = load_graph(args.graph)
    sym = second_symanzik(g, cycle_basis(g), route_momenta(g))
    print(f"S1 = {sym.s1.text()}")
    print(f"S2 = {sym.s2.text()}")
    return EXIT_OK


def cmd_twistor_check(args) -> int:
    g, _ = load_graph(args.graph)
    ratio = pfaffian_symanzik_ratio(g)
    lam = ratio.lambda2
    print(f"lambda^2 = {lam.real:+.12g}{lam.imag:+.12g}i")
    print(f"residual = {ratio.residual:.3g} (exact: {ratio.exact})")
    print("PASS" if ratio.exact else "FAIL")
    return EXIT_OK if ratio.exact else EXIT_NUMERIC


def _error_entry(exc: TwistampError) -> dict:
    return {"error": {"type": type(exc).__name__, "message": str(exc)}}


def cmd_integrate(args) -> int:
    g, digest = load_graph(args.graph)
    cfg = IntegrationConfig(
        n_samples=args.samples,
        seed=args.seed,
        scale=args.scale,
        batch_size=args.batch_size,
        qmc=args.qmc,
    )
    methods = ["direct", "parametric", "pfaffian"] if args.method == "all" else [args.method]
    runners = {
        "direct": direct_amplitude,
        "parametric": parametric_amplitude,
        "pfaffian": pfaffian_amplitude,
    }

    results = {}
    computed = {}
    failures = []
    for name in methods:
        try:
            computed[name] = runners[name](g, cfg)
            results[name] = computed[name].to_dict()
        except TwistampError as exc:
            results[name] = _error_entry(exc)
            failures.append(exc)

    report = {
        "tool": "twistamp",
        "version": __version__,
        "command": "integrate",
        "input": args.graph,
        "input_hash": f"sha256:{digest}",
        "graph": {"edges": g.n_edges, "vertices": g.n_vertices, "loops": loop_number(g)},
        "seed": cfg.seed,
        "samples": cfg.n_samples,
        "qmc": cfg.qmc,
        "method": args.method,
        "results": results,
    }

    if args.method == "all" and not failures:
        try:
            consts = extract_constants(
                g, cfg, (computed["direct"], computed["parametric"], computed["pfaffian"])
            )
            report["constants"] = {
                "c_hat": consts.c_hat,
                "c_hat_std_error": consts.c_hat_std_error,
                "C_hat": consts.big_c_hat,
                "C_hat_std_error": consts.big_c_hat_std_error,
            }
        except TwistampError as exc:
            report["constants"] = _error_entry(exc)

    if args.exact:
        try:
            report["symbolic_checks"] = _symbolic_checks(g)
        except TwistampError as exc:
            report["symbolic_checks"] = _error_entry(exc)

    text = json.dumps(report, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)

    if failures:
        validation = any(isinstance(f, ValidationError) for f in failures)
        return EXIT_VALIDATION if validation else EXIT_NUMERIC
    return EXIT_OK


def cmd_feynman_check(args) -> int:
    cfg = IntegrationConfig(n_samples=args.samples, seed=args.seed)
    result = feynman_trick_check(args.values, cfg)
    print(f"lhs = {result.lhs:.12g}")
    print(f"rhs = {result.rhs:.12g} ({result.method}, std error {result.std_error:.3g})")
    print(f"relative gap = {result.rel_gap:.3g}")
    if result.method == "quadrature":
        ok = result.rel_gap <= 1e-10
    else:
        ok = abs(result.rhs - result.lhs) <= 3.0 * result.std_error
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twistamp",
        description="Loop amplitudes three ways: direct, parametric, pfaffian.",
    )
    parser.add_argument("--version", action="version", version=f"twistamp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sym = sub.add_parser("symanzik", help="print S1 and S2 for a graph file")
    p_sym.add_argument("graph", help="path to the graph JSON file")
    p_sym.set_defaults(func=cmd_symanzik)

    p_tw = sub.add_parser(
        "twistor-check",
        help="verify Pf(sum a Q)^2 = lambda^2 S2^2 exactly (needs N = 2n+2)",
    )
    p_tw.add_argument("graph", help="path to the graph JSON file")
    p_tw.set_defaults(func=cmd_twistor_check)

    p_int = sub.add_parser("integrate", help="run the Monte Carlo amplitude estimators")
    p_int.add_argument("graph", help="path to the graph JSON file")
    p_int.add_argument(
        "--method",
        choices=["direct", "parametric", "pfaffian", "all"],
        default="all",
    )
    p_int.add_argument("--samples", type=int, default=1_000_000)
    p_int.add_argument("--seed", type=int, default=0)
    p_int.add_argument("--scale", type=float, default=None, help="direct-method proposal scale")
    p_int.add_argument("--batch-size", type=int, default=65_536)
    p_int.add_argument("--qmc", action="store_true", help="scrambled-Sobol simplex sampling")
    p_int.add_argument(
        "--exact",
        action="store_true",
        help="embed the exact symbolic verdicts (Pf vs S2, matrix-tree, ranks) in the report",
    )
    p_int.add_argument("--output", default=None, help="write the JSON report to a file")
    p_int.set_defaults(func=cmd_integrate)

    p_f = sub.add_parser("feynman-check", help="check the simplex denominator identity")
    p_f.add_argument("values", type=float, nargs="+", help="positive denominators A_1..A_N")
    p_f.add_argument("--samples", type=int, default=200_000)
    p_f.add_argument("--seed", type=int, default=0)
    p_f.set_defaults(func=cmd_feynman_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InvariantViolation, PrecisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
