"""Batch front end.

Verbs: ``check``, ``convert``, ``connect``, ``derive``, ``synth``,
``roundtrip``, ``axioms``, ``async``, ``emit``.  Reports are JSON objects
``{"verb", "inputs", "results", "witnesses"}`` on stdout.  Exit codes:
0 when every asserted property holds, 1 when a property check fails (the
report names the failing check and carries a witness), 2 on invalid input
(diagnostics on stderr).  Output is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional

from . import dot as dotmod
from . import io as iomod
from .es import EsError, LivenessError, classify, configurations
from .domains import OrderError, algebraicity, interchange_classes, \
    irreducible_elements, primes, validate_domain, weak_primes
from .duality import connect_es, dom_of_es, epes_dom, epes_ev, epes_isomorphic, \
    es_isomorphic, ev_of_domain, fuse, poset_isomorphic, unfold
from .graphs import GraphError
from .intervals import check_axioms, ev_wd, interval_classes, zeta
from .asyncgraphs import AsyncError, async_domain, validate_async_graph
from .rewrite import TraceLimitError, grammar_from_es, once_per_rule_depth, \
    trace_classes

DEFAULT_CEILING = 10000

_INPUT_FLAGS = {"es": "es", "domain": "domain", "grammar": "grammar",
                "async_graph": "asyncgraph", "epes": "epes"}


def _one_input(args) -> tuple:
    given = [(flag, kind) for flag, kind in _INPUT_FLAGS.items()
             if getattr(args, flag, None)]
    if len(given) != 1:
        raise iomod.SchemaError("give exactly one input "
                                "(--es | --domain | --grammar | --async | --epes)")
    flag, kind = given[0]
    path = getattr(args, flag)
    return path, kind, iomod.load_structure(path, kind)


def _report(verb: str, inputs: Dict[str, str], results: Dict[str, Any],
            witnesses: Optional[List] = None) -> str:
    return json.dumps({"verb": verb, "inputs": inputs, "results": results,
                       "witnesses": witnesses or []}, indent=2, sort_keys=True)


def _domain_summary(dom) -> Dict[str, Any]:
    alg = algebraicity(dom)
    return {
        "elements": len(dom.elements),
        "covers": len(dom.covers()),
        "irreducibles": sorted(irreducible_elements(dom)),
        "primes": sorted(primes(dom)),
        "weak_primes": sorted(weak_primes(dom)),
        "interchange_classes": [sorted(c) for c in interchange_classes(dom)],
        "irreducible_algebraic": alg.irreducible_algebraic,
        "prime_algebraic": alg.prime_algebraic,
        "weak_prime_algebraic": alg.weak_prime_algebraic,
    }


# ---------------------------------------------------------------------- #
# Verbs
# ---------------------------------------------------------------------- #

def _cmd_check(args) -> tuple:
    path, kind, value = _one_input(args)
    witnesses: List = []
    if kind == "es":
        cl = classify(value)
        results = {"kind": kind, "live": cl.live, "stable": cl.stable,
                   "prime": cl.prime, "connected": cl.connected,
                   "configurations": len(configurations(value))}
        if not cl.live:
            witnesses += list(cl.diagnostics)
            raise _FailureWithReport(results, witnesses, path)
    elif kind == "domain":
        rep = validate_domain(value)
        results = {"kind": kind, "valid": rep.ok}
        if not rep.ok:
            witnesses.append({"check": rep.condition, "witness": list(rep.witness or ())})
            raise _FailureWithReport(results, witnesses, path)
        results.update(_domain_summary(value))
    elif kind == "grammar":
        value.validate()
        results = {"kind": kind, "rules": [r.name for r in value.rules],
                   "start_nodes": len(value.start.nodes),
                   "start_edges": len(value.start.edges)}
    elif kind == "asyncgraph":
        rep = validate_async_graph(value, weak=args.weak)
        results = {"kind": kind, "axiom1": rep.axiom1, "axiom2": rep.axiom2,
                   "cube_up": rep.cube_up, "cube_down": rep.cube_down,
                   "coherence": rep.coherence,
                   "all_cofinal_equivalent": rep.all_cofinal_equivalent,
                   "weak_valid": rep.weak_valid(), "full_valid": rep.full_valid(),
                   "weak_prime": rep.weak_prime(), "prime": rep.prime()}
        ok = rep.weak_valid() if args.weak else rep.full_valid()
        if not ok:
            witnesses += list(rep.diagnostics)
            raise _FailureWithReport(results, witnesses, path)
    else:  # epes
        from .duality import validate_epes
        ok, diags = validate_epes(value)
        results = {"kind": kind, "valid": ok}
        if not ok:
            witnesses += list(diags)
            raise _FailureWithReport(results, witnesses, path)
    return {"input": path}, results, witnesses


class _FailureWithReport(Exception):
    def __init__(self, results, witnesses, path):
        self.results = results
        self.witnesses = witnesses
        self.path = path


def _cmd_convert(args) -> tuple:
    path, kind, value = _one_input(args)
    target = args.to
    conversions = {
        ("es", "domain"): lambda v: ("domain", iomod.domain_to_json(dom_of_es(v))),
        ("es", "epes"): lambda v: ("epes", iomod.epes_to_json(unfold(v))),
        ("domain", "es"): lambda v: ("es", iomod.es_to_json(ev_of_domain(v))),
        ("domain", "epes"): lambda v: ("epes", iomod.epes_to_json(epes_ev(v))),
        ("domain", "es-intervals"): lambda v: ("es", iomod.es_to_json(ev_wd(v))),
        ("epes", "es"): lambda v: ("es", iomod.es_to_json(fuse(v))),
        ("epes", "domain"): lambda v: ("domain", iomod.domain_to_json(epes_dom(v))),
    }
    key = (kind, target)
    if key not in conversions:
        raise iomod.SchemaError(f"cannot convert {kind} to {target}")
    out_kind, payload = conversions[key](value)
    if args.out:
        iomod.dump_json(payload, args.out)
    results = {"from": kind, "to": target, "written": args.out or None,
               "structure": payload}
    return {"input": path}, results, []


def _cmd_connect(args) -> tuple:
    path, kind, value = _one_input(args)
    if kind != "es":
        raise iomod.SchemaError("connect expects --es")
    out = connect_es(value)
    payload = iomod.es_to_json(out)
    if args.out:
        iomod.dump_json(payload, args.out)
    cl = classify(out)
    return {"input": path}, {"connected": cl.connected, "events": len(out.events),
                             "written": args.out or None, "structure": payload}, []


def _cmd_derive(args) -> tuple:
    path, kind, value = _one_input(args)
    if kind != "grammar":
        raise iomod.SchemaError("derive expects --grammar")
    depth = args.depth
    if depth is None:
        # exhaustive for once-per-rule grammars (e.g. synthesised ones)
        depth = once_per_rule_depth(value)
        if depth is None:
            raise iomod.SchemaError(
                "derive requires --depth (this grammar has no provable bound)")
    ceiling = int(os.environ.get("WEAVENT_CLASS_CEILING", DEFAULT_CEILING))
    res = trace_classes(value, depth, fusion_safe=args.fusion_safe, ceiling=ceiling)
    dom = res.domain
    alg = algebraicity(dom)
    results = {
        "depth": depth,
        "fusion_safe": args.fusion_safe,
        "trace_classes": len(res.classes),
        "classes": [c.element_id for c in res.classes],
        "weak_prime": alg.weak_prime_algebraic,
        "prime": alg.prime_algebraic,
    }
    witnesses: List = []
    if args.out:
        if args.format == "dot":
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(dotmod.poset_dot(dom, "traces"))
        else:
            iomod.dump_json(iomod.domain_to_json(dom), args.out)
        results["written"] = args.out
    expected_prime = args.fusion_safe
    if not alg.weak_prime_algebraic or (expected_prime and not alg.prime_algebraic):
        witnesses.append({"check": "trace-domain-algebraicity",
                          "witness": results["classes"]})
        raise _FailureWithReport(results, witnesses, path)
    return {"input": path}, results, witnesses


def _cmd_synth(args) -> tuple:
    path, kind, value = _one_input(args)
    if kind != "es":
        raise iomod.SchemaError("synth expects --es")
    grammar = grammar_from_es(value)
    payload = iomod.grammar_to_json(grammar)
    if args.out:
        iomod.dump_json(payload, args.out)
    results = {"rules": [r.name for r in grammar.rules],
               "start_nodes": len(grammar.start.nodes),
               "exhaustive_depth": len(grammar.rules),
               "written": args.out or None,
               "structure": payload}
    return {"input": path}, results, []


def _cmd_roundtrip(args) -> tuple:
    path, kind, value = _one_input(args)
    witnesses: List = []
    if kind == "es":
        cl = classify(value)
        if not cl.live:
            raise iomod.SchemaError("roundtrip --es needs a live structure: "
                                    + "; ".join(cl.diagnostics))
        dom = dom_of_es(value)
        connected = connect_es(value)
        ok1 = poset_isomorphic(dom_of_es(connected), dom) is not None
        results = {"kind": kind, "dom_preserved": ok1}
        if cl.connected:
            ok2 = es_isomorphic(connected, value) is not None
            results["connected_fixed_point"] = ok2
            if not ok2:
                witnesses.append({"check": "coreflection-counit", "witness": path})
        if not ok1:
            witnesses.append({"check": "coreflection-domain", "witness": path})
    elif kind == "domain":
        back = poset_isomorphic(dom_of_es(ev_of_domain(value)), value) is not None
        agree = es_isomorphic(ev_wd(value), ev_of_domain(value)) is not None
        pairs = zeta(value)
        results = {"kind": kind, "dom_of_ev_isomorphic": back,
                   "interval_construction_agrees": agree,
                   "zeta_classes": len(pairs)}
        if not back:
            witnesses.append({"check": "duality-domain-roundtrip", "witness": path})
        if not agree:
            witnesses.append({"check": "interval-vs-irreducible-es", "witness": path})
    elif kind == "epes":
        again = unfold(fuse(value))
        ok1 = epes_isomorphic(value, again) is not None
        ok2 = es_isomorphic(fuse(unfold(fuse(value))), fuse(value)) is not None
        results = {"kind": kind, "unfold_fuse_isomorphic": ok1,
                   "fuse_unfold_isomorphic": ok2}
        if not ok1:
            witnesses.append({"check": "epes-unfold-fuse", "witness": path})
        if not ok2:
            witnesses.append({"check": "es-fuse-unfold", "witness": path})
    else:
        raise iomod.SchemaError("roundtrip expects --es, --domain or --epes")
    if witnesses:
        raise _FailureWithReport(results, witnesses, path)
    return {"input": path}, results, witnesses


def _cmd_axioms(args) -> tuple:
    path, kind, value = _one_input(args)
    if kind != "domain":
        raise iomod.SchemaError("axioms expects --domain")
    rep = check_axioms(value)
    alg = algebraicity(value)
    results = {"F": rep.F, "C": rep.C, "R": rep.R, "V": rep.V, "I": rep.I,
               "intervals": len(value.covers()),
               "interval_classes": len(interval_classes(value)),
               "weak_prime_algebraic": alg.weak_prime_algebraic}
    witnesses = []
    if rep.witness is not None:
        witnesses.append({"check": "interval-axiom", "witness": list(rep.witness)})
    return {"input": path}, results, witnesses


def _cmd_async(args) -> tuple:
    path, kind, value = _one_input(args)
    if kind != "asyncgraph":
        raise iomod.SchemaError("async expects --async")
    rep = validate_async_graph(value, weak=args.weak)
    results = {"axiom1": rep.axiom1, "axiom2": rep.axiom2,
               "cube_up": rep.cube_up, "cube_down": rep.cube_down,
               "coherence": rep.coherence,
               "all_cofinal_equivalent": rep.all_cofinal_equivalent,
               "weak_valid": rep.weak_valid(), "full_valid": rep.full_valid(),
               "weak_prime": rep.weak_prime(), "prime": rep.prime()}
    witnesses: List = []
    if rep.weak_prime():
        dom = async_domain(value)
        results["path_classes"] = len(dom.elements)
        if args.out:
            iomod.dump_json(iomod.domain_to_json(dom), args.out)
            results["written"] = args.out
    ok = rep.weak_valid() if args.weak else rep.full_valid()
    if not ok:
        witnesses += list(rep.diagnostics)
        raise _FailureWithReport(results, witnesses, path)
    return {"input": path}, results, witnesses


def _cmd_emit(args) -> tuple:
    path, kind, value = _one_input(args)
    if (args.format or "dot") != "dot":
        raise iomod.SchemaError(f"unknown format {args.format!r}")
    if not args.out:
        raise iomod.SchemaError("emit requires --out")
    if kind == "es":
        text = dotmod.poset_dot(dom_of_es(value))
    elif kind == "domain":
        text = dotmod.poset_dot(value)
    elif kind == "grammar":
        text = dotmod.typed_graph_dot(value.start, "start")
    elif kind == "asyncgraph":
        text = dotmod.async_dot(value)
    else:
        raise iomod.SchemaError("emit expects --es, --domain, --grammar or --async")
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise iomod.SchemaError(f"cannot write {args.out!r}: {exc}") from None
    return {"input": path}, {"written": args.out, "bytes": len(text)}, []


_VERBS = {
    "check": _cmd_check,
    "convert": _cmd_convert,
    "connect": _cmd_connect,
    "derive": _cmd_derive,
    "synth": _cmd_synth,
    "roundtrip": _cmd_roundtrip,
    "axioms": _cmd_axioms,
    "async": _cmd_async,
    "emit": _cmd_emit,
}


def _add_input_flags(sub) -> None:
    sub.add_argument("--es")
    sub.add_argument("--domain")
    sub.add_argument("--grammar")
    sub.add_argument("--async", dest="async_graph")
    sub.add_argument("--epes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weavent",
        description="Event structures, weak prime domains, fusing graph rewriting.")
    subs = parser.add_subparsers(dest="verb", required=True)
    for verb in _VERBS:
        sub = subs.add_parser(verb)
        _add_input_flags(sub)
        sub.add_argument("--out")
        sub.add_argument("--format")
        sub.add_argument("--weak", action="store_true")
        if verb == "derive":
            sub.add_argument("--depth", type=int)
            sub.add_argument("--fusion-safe", dest="fusion_safe", action="store_true")
        if verb == "convert":
            sub.add_argument("--to", required=True)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = _VERBS[args.verb]
    try:
        inputs, results, witnesses = handler(args)
    except _FailureWithReport as fail:
        print(_report(args.verb, {"input": fail.path}, fail.results, fail.witnesses))
        return 1
    except (iomod.SchemaError, EsError, OrderError, GraphError, AsyncError,
            LivenessError, TraceLimitError, FileNotFoundError) as exc:
        json.dump({"error": str(exc)}, sys.stderr, indent=2, sort_keys=True)
        sys.stderr.write("\n")
        return 2
    print(_report(args.verb, inputs, results, witnesses))
    return 0


if __name__ == "__main__":
    sys.exit(main())
