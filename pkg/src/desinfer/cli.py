"""Command-line front end.

Exit status: 0 when every requested property holds, 1 when some property is
violated, 2 on input errors and 3 on internal errors (including an oracle
disagreement).
"""
from __future__ import annotations

import argparse
import random
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .composition import (
    composition_to_json,
    concurrent_composition,
    diamond_composition,
    export_dot,
)
from .fsa import InvalidInstance, check_assumptions, generates_infinite_runs, local_automaton
from .gadgets import (
    normalize_acyclic_dfas,
    normalize_complete_dfas,
    random_acyclic_dfa,
    random_complete_dfa,
    random_digraph,
    reduce_path_to_predictability,
    reduce_to_codetectability,
    reduce_to_copredictability,
)
from .io import (
    certificate_to_dict,
    dumps,
    evidence_to_dict,
    graph_from_dict,
    instance_digest,
    instance_to_dict,
    load_dfas,
    load_instance,
    read_json,
)
from .oracle import BudgetExceeded, OracleConfig, check_certificate, naive_verify
from .verifiers import PROPERTIES, pump_certificate, property_composition, verify

HOLDS, VIOLATED, INPUT_ERROR, INTERNAL_ERROR = 0, 1, 2, 3

ADJECTIVE = {
    "strong-detectability": "strongly detectable",
    "co-detectability": "co-detectable",
    "diagnosability": "diagnosable",
    "co-diagnosability": "co-diagnosable",
    "predictability": "predictable",
    "co-predictability": "co-predictable",
}


class InputError(Exception):
    """A problem with the user's request rather than with the tool."""


def _worst(codes) -> int:
    # internal errors outrank input errors, which outrank violations
    rank = {HOLDS: 0, VIOLATED: 1, INPUT_ERROR: 2, INTERNAL_ERROR: 3}
    return max(codes, key=rank.__getitem__, default=HOLDS)


def _error_report(path, prop, kind, problems) -> dict:
    return {"instance": str(path), "property": prop, "error": kind, "problems": list(problems)}


def _base_report(path, fsa, observers, prop) -> dict:
    diag = check_assumptions(fsa)
    return {
        "tool": "desinfer",
        "version": __version__,
        "instance": str(path),
        "digest": instance_digest(fsa, observers),
        "property": prop,
        "assumptions": {"deadlock_free": diag["deadlock_free"], "prompt": diag["prompt"]},
        "finite_language": not generates_infinite_runs(fsa),
    }


def _verify_job(path, prop, pump, use_oracle, budget):
    """Run one (instance, property) pair; returns ``(report, exit status)``."""
    try:
        fsa, observers = load_instance(path)
        report = _base_report(path, fsa, observers, prop)
        start = time.perf_counter()
        verdict = verify(prop, fsa, observers)
        elapsed = time.perf_counter() - start
    except (InvalidInstance, ValueError) as exc:
        problems = exc.problems if isinstance(exc, InvalidInstance) else [str(exc)]
        return _error_report(path, prop, "input", problems), INPUT_ERROR
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        return _error_report(path, prop, "internal", [repr(exc), traceback.format_exc()]), INTERNAL_ERROR

    code = HOLDS if verdict.holds else VIOLATED
    report["verdict"] = "holds" if verdict.holds else "violated"
    report["holds"] = verdict.holds
    report["summary"] = ("" if verdict.holds else "not ") + ADJECTIVE[prop]
    report["certificate"] = certificate_to_dict(verdict.certificate) if verdict.certificate else None
    report["pump"] = pump
    report["evidence"] = None
    if pump is not None and verdict.certificate is not None:
        report["evidence"] = evidence_to_dict(pump_certificate(verdict.certificate, pump, fsa, observers))
    report["timing"] = {"verify_seconds": round(elapsed, 6)}
    report["oracle"] = None
    if use_oracle:
        report["oracle"], agrees = _cross_check(prop, fsa, observers, verdict, budget)
        if not agrees:
            code = INTERNAL_ERROR
    return report, code


def _cross_check(prop, fsa, observers, verdict, budget):
    out = {"status": "ok"}
    try:
        naive = naive_verify(prop, fsa, observers, OracleConfig(budget=budget))
    except BudgetExceeded:
        out["status"] = "budget exceeded"
        naive = None
    if naive is not None:
        out["holds"] = naive.holds
        out["agrees"] = naive.holds == verdict.holds
    if verdict.certificate is not None:
        check = check_certificate(verdict.certificate, fsa, observers)
        out["certificate_valid"] = check.ok
        out["certificate_problems"] = check.problems
    ok = out.get("agrees", True) and out.get("certificate_valid", True)
    if not ok:
        out["status"] = "disagreement"
    return out, ok


def _oracle_job(path, prop, budget):
    try:
        fsa, observers = load_instance(path)
        report = _base_report(path, fsa, observers, prop)
        start = time.perf_counter()
        verdict = naive_verify(prop, fsa, observers, OracleConfig(budget=budget))
        elapsed = time.perf_counter() - start
    except (InvalidInstance, ValueError) as exc:
        problems = exc.problems if isinstance(exc, InvalidInstance) else [str(exc)]
        return _error_report(path, prop, "input", problems), INPUT_ERROR
    except BudgetExceeded as exc:
        return _error_report(path, prop, "internal", [f"oracle budget exceeded: {exc}"]), INTERNAL_ERROR
    except Exception as exc:  # noqa: BLE001
        return _error_report(path, prop, "internal", [repr(exc), traceback.format_exc()]), INTERNAL_ERROR
    report["verdict"] = "holds" if verdict.holds else "violated"
    report["holds"] = verdict.holds
    report["summary"] = ("" if verdict.holds else "not ") + ADJECTIVE[prop]
    report["certificate"] = certificate_to_dict(verdict.certificate) if verdict.certificate else None
    report["timing"] = {"oracle_seconds": round(elapsed, 6)}
    return report, HOLDS if verdict.holds else VIOLATED


def _run_jobs(fn, jobs, n_workers):
    if n_workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        return [f.result() for f in futures]


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_reports(results, json_path) -> int:
    reports = [r for r, _ in results]
    _emit(dumps(reports[0] if len(reports) == 1 else reports), json_path)
    for r, code in results:
        if code in (INPUT_ERROR, INTERNAL_ERROR):
            for p in r.get("problems") or [r.get("oracle")]:
                print(f"{r['instance']}: {r['property']}: {p}", file=sys.stderr)
    return _worst(code for _, code in results)


def _properties(args) -> list[str]:
    props = args.property or []
    if "all" in props:
        return list(PROPERTIES)
    if not props:
        raise InputError("choose at least one --property")
    return props


# ----------------------------------------------------------------- commands


def cmd_verify(args) -> int:
    props = _properties(args)
    jobs = [(p, prop, args.pump, args.oracle, args.budget) for p in args.instances for prop in props]
    if args.dot and len(jobs) != 1:
        raise InputError("--dot needs exactly one instance and one property")
    results = _run_jobs(_verify_job, jobs, args.jobs)
    code = _emit_reports(results, args.json)
    if args.dot and code in (HOLDS, VIOLATED):
        fsa, observers = load_instance(args.instances[0])
        comp = property_composition(props[0], fsa, observers)
        Path(args.dot).write_text(export_dot(comp, props[0]), encoding="utf-8")
    return code


def cmd_oracle(args) -> int:
    props = _properties(args)
    jobs = [(p, prop, args.budget) for p in args.instances for prop in props]
    return _emit_reports(_run_jobs(_oracle_job, jobs, args.jobs), args.json)


def cmd_compose(args) -> int:
    fsa, observers = load_instance(args.instance)
    if args.property:
        comp = property_composition(args.property, fsa, observers)
        name = args.property
    else:
        if observers is None:
            raise InputError("the instance declares no observers")
        if args.variant == "diamond":
            comp = diamond_composition(fsa, observers)
        else:
            comp = concurrent_composition(fsa, [local_automaton(fsa, o) for o in observers])
        name = args.variant
    if args.json:
        Path(args.json).write_text(composition_to_json(comp) + "\n", encoding="utf-8")
    dot = export_dot(comp, name)
    if args.dot:
        Path(args.dot).write_text(dot, encoding="utf-8")
    if not args.json and not args.dot:
        sys.stdout.write(dot)
    return HOLDS


def _random_sources(reduction, rng, size):
    alphabet = ["0", "1"]
    if reduction == "codet":
        return [random_acyclic_dfa(rng, rng.randint(1, size), alphabet) for _ in range(2)]
    if reduction == "copred":
        return [random_complete_dfa(rng, rng.randint(1, size), alphabet) for _ in range(2)]
    nodes, edges = random_digraph(rng, rng.randint(2, size + 1))
    return nodes, edges, nodes[0], nodes[-1]


def _reduce(reduction, source, normalize):
    if reduction == "path":
        return reduce_path_to_predictability(*source)
    dfas = source
    if normalize:
        dfas = normalize_acyclic_dfas(dfas) if reduction == "codet" else normalize_complete_dfas(dfas)
    if reduction == "codet":
        return reduce_to_codetectability(dfas)
    return reduce_to_copredictability(dfas)


def cmd_generate(args) -> int:
    out = Path(args.out)
    sources = []
    if args.source:
        if args.reduction == "path":
            sources = [graph_from_dict(read_json(p)) for p in args.source]
        else:
            sources = [load_dfas(args.source)]
        normalize = args.normalize
    else:
        rng = random.Random(args.seed)
        sources = [_random_sources(args.reduction, rng, args.size) for _ in range(args.count)]
        # random DFA families rarely meet the preconditions as drawn
        normalize = True
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for i, src in enumerate(sources):
        inst = _reduce(args.reduction, src, normalize)
        stem = f"{args.reduction}-{i:03d}"
        (out / f"{stem}.json").write_text(dumps(instance_to_dict(inst.fsa, inst.observers)), encoding="utf-8")
        if inst.expected is None:
            expected = None
        else:
            expected = ("" if inst.expected else "not ") + ADJECTIVE[inst.property]
        sidecar = {
            "reduction": args.reduction,
            "property": inst.property,
            "expected_holds": inst.expected,
            "expected": expected,
            "seed": None if args.source else args.seed,
            "normalized": normalize,
            "provenance": inst.provenance,
        }
        (out / f"{stem}.expected.json").write_text(dumps(sidecar), encoding="utf-8")
        written.append(stem)
    sys.stdout.write(dumps({"written": written, "directory": str(out)}))
    return HOLDS


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="desinfer",
        description="Decide detectability, diagnosability and predictability of finite-state automata.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_property(p, multiple=True):
        choices = [*PROPERTIES, "all"] if multiple else list(PROPERTIES)
        p.add_argument(
            "-p", "--property", choices=choices, action="append" if multiple else "store",
            help="property to decide (repeatable; 'all' selects every property)" if multiple else None,
        )

    v = sub.add_parser("verify", help="decide properties and print a JSON report")
    v.add_argument("instances", nargs="+", help="instance JSON files")
    add_property(v)
    v.add_argument("--pump", type=int, metavar="K", help="attach runs with every certificate cycle repeated K times")
    v.add_argument("--oracle", action="store_true", help="cross-check with the brute-force decider")
    v.add_argument("--budget", type=int, default=5_000_000, help="oracle step budget")
    v.add_argument("--dot", metavar="PATH", help="write the searched composition as DOT")
    v.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")
    v.add_argument("--jobs", type=int, default=1, metavar="N", help="parallel workers")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="decide properties with the brute-force decider only")
    o.add_argument("instances", nargs="+")
    add_property(o)
    o.add_argument("--budget", type=int, default=5_000_000)
    o.add_argument("--json", metavar="PATH")
    o.add_argument("--jobs", type=int, default=1, metavar="N")
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("compose", help="emit a composition as DOT or JSON")
    c.add_argument("instance")
    c.add_argument("--variant", choices=["diamond", "plain"], default="diamond")
    add_property(c, multiple=False)
    c.add_argument("--dot", metavar="PATH")
    c.add_argument("--json", metavar="PATH")
    c.set_defaults(func=cmd_compose)

    g = sub.add_parser("generate", help="write reduction instances with expected verdicts")
    g.add_argument("reduction", choices=["codet", "copred", "path"])
    g.add_argument("--source", nargs="+", metavar="FILE", help="DFA files (codet, copred) or graph files (path)")
    g.add_argument("--normalize", action="store_true", help="normalize source DFAs first")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--size", type=int, default=3, help="largest random source size")
    g.add_argument("--out", required=True, metavar="DIR")
    g.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors and 0 for --help/--version
        return int(exc.code or 0)
    if getattr(args, "jobs", 1) < 1 or (getattr(args, "pump", None) or 0) < 0:
        print("error: --jobs must be positive and --pump non-negative", file=sys.stderr)
        return INPUT_ERROR
    try:
        return args.func(args)
    except (InputError, InvalidInstance, ValueError, OSError) as exc:
        problems = exc.problems if isinstance(exc, InvalidInstance) else [str(exc)]
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return INPUT_ERROR
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return INTERNAL_ERROR


def entry_point():
    sys.exit(main())
