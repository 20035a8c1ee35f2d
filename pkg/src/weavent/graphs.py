"""Typed directed graphs and their morphisms.

A graph has string-identified nodes and edges with total source/target maps.
Typing assigns every node and edge an item of a fixed type graph; a type
graph is itself a graph typed by the identity.  Morphisms must commute with
source, target and typing.  Matching is plain backtracking over typed
candidates, in deterministic (sorted) order; matches need not be injective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple


class GraphError(ValueError):
    """Malformed graph, morphism, or argument."""


class TypedGraph:
    """Immutable typed graph.

    ``node_type``/``edge_type`` give the typing map; for a type graph these
    are identities.
    """

    def __init__(self, nodes: Iterable[str], edges: Iterable[Tuple[str, str, str, str]],
                 node_type: Optional[Mapping[str, str]] = None):
        """``edges`` are tuples ``(edge_id, type, src, tgt)``; ``node_type``
        maps node ids to type-node ids (identity when omitted)."""
        self.nodes: FrozenSet[str] = frozenset(nodes)
        self.src: Dict[str, str] = {}
        self.tgt: Dict[str, str] = {}
        self.edge_type: Dict[str, str] = {}
        for eid, etype, s, t in edges:
            if eid in self.edge_type:
                raise GraphError(f"duplicate edge id {eid!r}")
            if s not in self.nodes or t not in self.nodes:
                raise GraphError(f"edge {eid!r} has endpoints outside the node set")
            self.src[eid] = s
            self.tgt[eid] = t
            self.edge_type[eid] = etype
        self.edges: FrozenSet[str] = frozenset(self.edge_type)
        if node_type is None:
            self.node_type = {n: n for n in self.nodes}
        else:
            self.node_type = dict(node_type)
            missing = self.nodes - set(self.node_type)
            if missing:
                raise GraphError(f"nodes without a type: {sorted(missing)}")

    def validate_typed_over(self, tg: "TypedGraph") -> None:
        """Check that the typing maps form a graph morphism into ``tg``."""
        for n in self.nodes:
            if self.node_type[n] not in tg.nodes:
                raise GraphError(f"node {n!r} typed by unknown {self.node_type[n]!r}")
        for e in self.edges:
            te = self.edge_type[e]
            if te not in tg.edges:
                raise GraphError(f"edge {e!r} typed by unknown {te!r}")
            if tg.src[te] != self.node_type[self.src[e]] or tg.tgt[te] != self.node_type[self.tgt[e]]:
                raise GraphError(f"typing of edge {e!r} does not commute with src/tgt")

    def same(self, other: "TypedGraph") -> bool:
        return (self.nodes == other.nodes and self.edges == other.edges
                and self.src == other.src and self.tgt == other.tgt
                and self.node_type == other.node_type and self.edge_type == other.edge_type)

    def incident_edges(self, n: str) -> Tuple[str, ...]:
        return tuple(sorted(e for e in self.edges if self.src[e] == n or self.tgt[e] == n))

    def subgraph(self, nodes: Iterable[str], edges: Iterable[str]) -> "TypedGraph":
        nodes = set(nodes)
        return TypedGraph(nodes,
                          [(e, self.edge_type[e], self.src[e], self.tgt[e])
                           for e in edges],
                          {n: self.node_type[n] for n in nodes})

    def item_count(self) -> int:
        return len(self.nodes) + len(self.edges)

    def __repr__(self):
        return f"TypedGraph(|N|={len(self.nodes)}, |E|={len(self.edges)})"


@dataclass(frozen=True, eq=False)
class GraphMorphism:
    source: TypedGraph
    target: TypedGraph
    node_map: Dict[str, str]
    edge_map: Dict[str, str]

    def validate(self) -> None:
        for n in self.source.nodes:
            if n not in self.node_map or self.node_map[n] not in self.target.nodes:
                raise GraphError(f"node {n!r} unmapped or mapped outside the target")
            if self.source.node_type[n] != self.target.node_type[self.node_map[n]]:
                raise GraphError(f"node {n!r} changes type")
        for e in self.source.edges:
            if e not in self.edge_map or self.edge_map[e] not in self.target.edges:
                raise GraphError(f"edge {e!r} unmapped or mapped outside the target")
            img = self.edge_map[e]
            if self.source.edge_type[e] != self.target.edge_type[img]:
                raise GraphError(f"edge {e!r} changes type")
            if self.node_map[self.source.src[e]] != self.target.src[img] \
                    or self.node_map[self.source.tgt[e]] != self.target.tgt[img]:
                raise GraphError(f"edge {e!r} does not commute with src/tgt")

    def apply_node(self, n: str) -> str:
        return self.node_map[n]

    def apply_edge(self, e: str) -> str:
        return self.edge_map[e]

    def is_injective(self) -> bool:
        return (len(set(self.node_map.values())) == len(self.node_map)
                and len(set(self.edge_map.values())) == len(self.edge_map))

    def is_surjective(self) -> bool:
        return (set(self.node_map.values()) == self.target.nodes
                and set(self.edge_map.values()) == self.target.edges)

    def compose(self, then: "GraphMorphism") -> "GraphMorphism":
        """This morphism followed by ``then``."""
        return GraphMorphism(self.source, then.target,
                             {n: then.node_map[v] for n, v in self.node_map.items()},
                             {e: then.edge_map[v] for e, v in self.edge_map.items()})


def identity_morphism(g: TypedGraph) -> GraphMorphism:
    return GraphMorphism(g, g, {n: n for n in g.nodes}, {e: e for e in g.edges})


def _morphisms(pattern: TypedGraph, host: TypedGraph,
               node_candidates=None, edge_candidates=None,
               injective: bool = False) -> Iterator[GraphMorphism]:
    """All typed morphisms pattern -> host, in deterministic order."""
    nodes = sorted(pattern.nodes)
    edges = sorted(pattern.edges)

    def ncands(n):
        base = sorted(x for x in host.nodes if host.node_type[x] == pattern.node_type[n])
        if node_candidates is not None:
            allowed = node_candidates(n)
            base = [x for x in base if x in allowed]
        return base

    def ecands(e):
        base = sorted(x for x in host.edges if host.edge_type[x] == pattern.edge_type[e])
        if edge_candidates is not None:
            allowed = edge_candidates(e)
            base = [x for x in base if x in allowed]
        return base

    nc = {n: ncands(n) for n in nodes}
    ec = {e: ecands(e) for e in edges}
    if any(not v for v in nc.values()) or any(not v for v in ec.values()):
        return

    def assign_edges(k, nmap, emap):
        if k == len(edges):
            yield GraphMorphism(pattern, host, dict(nmap), dict(emap))
            return
        e = edges[k]
        for x in ec[e]:
            if injective and x in emap.values():
                continue
            if host.src[x] != nmap[pattern.src[e]] or host.tgt[x] != nmap[pattern.tgt[e]]:
                continue
            emap[e] = x
            yield from assign_edges(k + 1, nmap, emap)
            del emap[e]

    def assign_nodes(k, nmap):
        if k == len(nodes):
            yield from assign_edges(0, nmap, {})
            return
        n = nodes[k]
        for x in nc[n]:
            if injective and x in nmap.values():
                continue
            nmap[n] = x
            yield from assign_nodes(k + 1, nmap)
            del nmap[n]

    yield from assign_nodes(0, {})


def find_matches(pattern: TypedGraph, host: TypedGraph) -> List[GraphMorphism]:
    """All (not necessarily injective) typed morphisms, deterministically ordered."""
    return list(_morphisms(pattern, host))


def graph_isomorphism(g1: TypedGraph, g2: TypedGraph) -> Optional[GraphMorphism]:
    """A typed isomorphism between the two graphs, or None."""
    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return None
    if iso_hash(g1) != iso_hash(g2):
        return None
    for m in _morphisms(g1, g2, injective=True):
        if m.is_surjective():
            return m
    return None


def iso_hash(g: TypedGraph, rounds: int = 3) -> str:
    """Isomorphism-invariant fingerprint (Weisfeiler-Leman style refinement)."""
    colour = {n: g.node_type[n] for n in g.nodes}
    for _ in range(rounds):
        new = {}
        for n in g.nodes:
            outs = sorted((g.edge_type[e], colour[g.tgt[e]]) for e in g.edges if g.src[e] == n)
            ins = sorted((g.edge_type[e], colour[g.src[e]]) for e in g.edges if g.tgt[e] == n)
            new[n] = f"{colour[n]}|{outs}|{ins}"
        colour = new
    node_part = sorted(colour.values())
    edge_part = sorted(f"{g.edge_type[e]}:{colour[g.src[e]]}->{colour[g.tgt[e]]}" for e in g.edges)
    return str((node_part, edge_part))


def disjoint_union_tags(graphs: Mapping[str, TypedGraph]) -> TypedGraph:
    """Disjoint union with items renamed ``tag:item`` (used by tests/demos)."""
    nodes = []
    edges = []
    ntype = {}
    for tag, g in sorted(graphs.items()):
        for n in g.nodes:
            nodes.append(f"{tag}:{n}")
            ntype[f"{tag}:{n}"] = g.node_type[n]
        for e in g.edges:
            edges.append((f"{tag}:{e}", g.edge_type[e], f"{tag}:{g.src[e]}", f"{tag}:{g.tgt[e]}"))
    return TypedGraph(nodes, edges, ntype)
