"""Deterministic DOT emission.

Posets come out as Hasse diagrams (one node per element, one edge per
cover), typed graphs with ``id:type`` labels, asynchronous graphs with the
commuting squares listed as comments.  Nodes and edges are emitted in sorted
order so repeated runs are byte-identical.
"""

from __future__ import annotations

from typing import List

from .domains import FiniteDomain
from .graphs import TypedGraph
from .asyncgraphs import AsyncGraph


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def poset_dot(dom: FiniteDomain, name: str = "hasse") -> str:
    lines: List[str] = [f"digraph {_q(name)} {{", "  rankdir=BT;"]
    for x in sorted(dom.elements):
        lines.append(f"  {_q(x)};")
    for a, b in sorted(dom.covers()):
        lines.append(f"  {_q(a)} -> {_q(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def typed_graph_dot(g: TypedGraph, name: str = "graph") -> str:
    lines = [f"digraph {_q(name)} {{"]
    for n in sorted(g.nodes):
        lines.append(f"  {_q(n)} [label={_q(n + ':' + g.node_type[n])}];")
    for e in sorted(g.edges):
        lines.append(f"  {_q(g.src[e])} -> {_q(g.tgt[e])} "
                     f"[label={_q(e + ':' + g.edge_type[e])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def async_dot(a: AsyncGraph, name: str = "async") -> str:
    lines = [f"digraph {_q(name)} {{"]
    for sq in sorted(sorted(map(list, sq)) for sq in a.squares):
        lines.append(f"  // square: {sq[0]} ~ {sq[1]}")
    for n in sorted(a.nodes):
        shape = "doublecircle" if n == a.origin else "circle"
        lines.append(f"  {_q(n)} [shape={shape}];")
    for e, (s, t) in sorted(a.edges.items()):
        lines.append(f"  {_q(s)} -> {_q(t)} [label={_q(e)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
