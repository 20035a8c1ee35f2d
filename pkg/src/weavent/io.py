"""JSON input/output for every structure kind.

One structure per file.  Schemas are strict: unknown keys are rejected, and
every reference (event names, element ids, node/edge ids) is checked at
load time.  ``load_structure`` dispatches on the expected kind: ``es``,
``domain``, ``grammar``, ``asyncgraph`` or ``epes``.
"""

from __future__ import annotations

import json
from typing import Any, Dict, Mapping

from .es import BINARY, EventStructure
from .domains import FiniteDomain
from .duality import Epes
from .graphs import GraphMorphism, TypedGraph
from .rewrite import Grammar, Rule
from .asyncgraphs import AsyncGraph

KINDS = ("es", "domain", "grammar", "asyncgraph", "epes")


class SchemaError(ValueError):
    """Input file does not follow the expected schema."""


def _require_keys(obj: Mapping, allowed: set, required: set, what: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{what}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"{what}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise SchemaError(f"{what}: missing keys {sorted(missing)}")


def _string_list(value, what: str) -> list:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise SchemaError(f"{what}: expected a list of strings")
    return value


# ---------------------------------------------------------------------- #
# Event structures
# ---------------------------------------------------------------------- #

def parse_es(obj: Mapping) -> EventStructure:
    _require_keys(obj, {"events", "conflict", "consistent", "enabling"},
                  {"events"}, "event structure")
    if "conflict" in obj and "consistent" in obj:
        raise SchemaError("give either 'conflict' or 'consistent', not both")
    events = _string_list(obj["events"], "events")
    enabling = []
    for k, entry in enumerate(obj.get("enabling", [])):
        _require_keys(entry, {"needs", "event"}, {"needs", "event"}, f"enabling[{k}]")
        enabling.append((_string_list(entry["needs"], f"enabling[{k}].needs"),
                         entry["event"]))
    try:
        if "consistent" in obj:
            family = [_string_list(xs, "consistent[*]") for xs in obj["consistent"]]
            return EventStructure.with_consistency(events, family, enabling)
        conflict = []
        for k, pair in enumerate(obj.get("conflict", [])):
            pair = _string_list(pair, f"conflict[{k}]")
            if len(pair) != 2:
                raise SchemaError(f"conflict[{k}]: expected a pair")
            conflict.append((pair[0], pair[1]))
        return EventStructure.binary(events, conflict, enabling)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def es_to_json(es: EventStructure) -> Dict[str, Any]:
    out: Dict[str, Any] = {"events": sorted(es.events)}
    if es.conflict_kind == BINARY:
        out["conflict"] = sorted(sorted(p) for p in es.conflict)
    else:
        out["consistent"] = sorted(sorted(m) for m in es.consistent_sets)
    out["enabling"] = [{"needs": sorted(needs), "event": e}
                       for needs, e in sorted(es.enabling_gens, key=lambda g: (g[1], sorted(g[0])))]
    return out


def parse_epes(obj: Mapping) -> Epes:
    _require_keys(obj, {"events", "conflict", "enabling", "equiv"}, {"events"}, "EPES")
    base = parse_es({k: v for k, v in obj.items() if k != "equiv"})
    blocks = []
    covered = set()
    for k, block in enumerate(obj.get("equiv", [])):
        block = _string_list(block, f"equiv[{k}]")
        for e in block:
            if e not in base.events:
                raise SchemaError(f"equiv[{k}]: unknown event {e!r}")
            if e in covered:
                raise SchemaError(f"equiv[{k}]: event {e!r} in two blocks")
        covered |= set(block)
        blocks.append(frozenset(block))
    blocks += [frozenset((e,)) for e in base.events - covered]
    return Epes(base, frozenset(blocks))


def epes_to_json(p: Epes) -> Dict[str, Any]:
    out = es_to_json(p.base)
    out["equiv"] = sorted((sorted(b) for b in p.equiv if len(b) > 1))
    return out


# ---------------------------------------------------------------------- #
# Domains
# ---------------------------------------------------------------------- #

def parse_domain(obj: Mapping) -> FiniteDomain:
    _require_keys(obj, {"elements", "covers", "kind"}, {"elements", "covers"}, "domain")
    elements = _string_list(obj["elements"], "elements")
    covers = []
    for k, pair in enumerate(obj["covers"]):
        pair = _string_list(pair, f"covers[{k}]")
        if len(pair) != 2:
            raise SchemaError(f"covers[{k}]: expected a pair")
        covers.append((pair[0], pair[1]))
    kind = obj.get("kind", "coherent")
    try:
        return FiniteDomain(elements, covers, kind)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def domain_to_json(dom: FiniteDomain) -> Dict[str, Any]:
    return {"elements": list(dom.elements),
            "covers": [list(c) for c in dom.covers()],
            "kind": dom.kind}


# ---------------------------------------------------------------------- #
# Typed graphs and grammars
# ---------------------------------------------------------------------- #

def parse_graph(obj: Mapping, what: str = "graph", self_typed: bool = False) -> TypedGraph:
    _require_keys(obj, {"nodes", "edges"}, {"nodes"}, what)
    nodes = []
    ntype = {}
    for k, nd in enumerate(obj["nodes"]):
        _require_keys(nd, {"id", "type"}, {"id"}, f"{what}.nodes[{k}]")
        if not self_typed and "type" not in nd:
            raise SchemaError(f"{what}.nodes[{k}]: missing type")
        nodes.append(nd["id"])
        ntype[nd["id"]] = nd["id"] if self_typed else nd["type"]
    edges = []
    for k, ed in enumerate(obj.get("edges", [])):
        required = {"id", "src", "tgt"} if self_typed else {"id", "type", "src", "tgt"}
        _require_keys(ed, {"id", "type", "src", "tgt"}, required, f"{what}.edges[{k}]")
        edges.append((ed["id"], ed.get("type", ed["id"]), ed["src"], ed["tgt"]))
    try:
        return TypedGraph(nodes, edges, ntype)
    except ValueError as exc:
        raise SchemaError(f"{what}: {exc}") from None


def graph_to_json(g: TypedGraph, self_typed: bool = False) -> Dict[str, Any]:
    nodes = []
    for n in sorted(g.nodes):
        nodes.append({"id": n} if self_typed else {"id": n, "type": g.node_type[n]})
    edges = []
    for e in sorted(g.edges):
        entry = {"id": e, "src": g.src[e], "tgt": g.tgt[e]}
        if not self_typed:
            entry["type"] = g.edge_type[e]
        edges.append(entry)
    return {"nodes": nodes, "edges": edges}


def _parse_rule_map(obj: Mapping, src: TypedGraph, tgt: TypedGraph, what: str) -> GraphMorphism:
    _require_keys(obj, {"nodes", "edges"}, {"nodes"}, what)
    nmap = obj["nodes"]
    emap = obj.get("edges", {})
    if not isinstance(nmap, dict) or not isinstance(emap, dict):
        raise SchemaError(f"{what}: node/edge maps must be objects")
    mor = GraphMorphism(src, tgt, dict(nmap), dict(emap))
    try:
        mor.validate()
    except ValueError as exc:
        raise SchemaError(f"{what}: {exc}") from None
    return mor


def parse_grammar(obj: Mapping) -> Grammar:
    _require_keys(obj, {"type_graph", "start", "rules"},
                  {"type_graph", "start", "rules"}, "grammar")
    tg = parse_graph(obj["type_graph"], "type_graph", self_typed=True)
    start = parse_graph(obj["start"], "start")
    rules = []
    for k, rd in enumerate(obj["rules"]):
        what = f"rules[{k}]"
        _require_keys(rd, {"name", "L", "K", "R", "l", "r"},
                      {"name", "L", "K", "R", "l", "r"}, what)
        lg = parse_graph(rd["L"], f"{what}.L")
        kg = parse_graph(rd["K"], f"{what}.K")
        rg = parse_graph(rd["R"], f"{what}.R")
        lmor = _parse_rule_map(rd["l"], kg, lg, f"{what}.l")
        rmor = _parse_rule_map(rd["r"], kg, rg, f"{what}.r")
        rules.append(Rule(rd["name"], lg, kg, rg, lmor, rmor))
    grammar = Grammar(tg, start, tuple(rules))
    try:
        grammar.validate()
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    return grammar


def grammar_to_json(g: Grammar) -> Dict[str, Any]:
    return {
        "type_graph": graph_to_json(g.type_graph, self_typed=True),
        "start": graph_to_json(g.start),
        "rules": [{
            "name": r.name,
            "L": graph_to_json(r.L),
            "K": graph_to_json(r.K),
            "R": graph_to_json(r.R),
            "l": {"nodes": dict(sorted(r.l.node_map.items())),
                  "edges": dict(sorted(r.l.edge_map.items()))},
            "r": {"nodes": dict(sorted(r.r.node_map.items())),
                  "edges": dict(sorted(r.r.edge_map.items()))},
        } for r in g.rules],
    }


# ---------------------------------------------------------------------- #
# Asynchronous graphs
# ---------------------------------------------------------------------- #

def parse_async(obj: Mapping) -> AsyncGraph:
    _require_keys(obj, {"nodes", "edges", "origin", "squares"},
                  {"nodes", "edges", "origin"}, "async graph")
    nodes = _string_list(obj["nodes"], "nodes")
    edges = []
    for k, ed in enumerate(obj["edges"]):
        _require_keys(ed, {"id", "src", "tgt"}, {"id", "src", "tgt"}, f"edges[{k}]")
        edges.append((ed["id"], ed["src"], ed["tgt"]))
    squares = []
    for k, sq in enumerate(obj.get("squares", [])):
        if (not isinstance(sq, list) or len(sq) != 2
                or any(len(_string_list(p, f"squares[{k}]")) != 2 for p in sq)):
            raise SchemaError(f"squares[{k}]: expected a pair of 2-edge paths")
        squares.append((tuple(sq[0]), tuple(sq[1])))
    try:
        return AsyncGraph.build(nodes, edges, obj["origin"], squares)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def async_to_json(a: AsyncGraph) -> Dict[str, Any]:
    return {
        "nodes": sorted(a.nodes),
        "edges": [{"id": e, "src": s, "tgt": t}
                  for e, (s, t) in sorted(a.edges.items())],
        "origin": a.origin,
        "squares": sorted(sorted([list(p) for p in sq]) for sq in a.squares),
    }


# ---------------------------------------------------------------------- #
# Dispatch
# ---------------------------------------------------------------------- #

_PARSERS = {
    "es": parse_es,
    "domain": parse_domain,
    "grammar": parse_grammar,
    "asyncgraph": parse_async,
    "epes": parse_epes,
}


def load_structure(path: str, kind: str):
    """Load and validate one structure of the expected kind from a file."""
    if kind not in _PARSERS:
        raise SchemaError(f"unknown kind {kind!r}; expected one of {KINDS}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON: {exc}") from None
    return _PARSERS[kind](obj)


def dump_json(obj: Mapping, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
