"""Asynchronous graphs: transition graphs with declared commuting squares.

A square is an unordered pair of coinitial-cofinal length-2 paths.  The
declared squares generate an equivalence on length-2 paths, which extends to
arbitrary paths by contextual closure (rewriting a 2-segment into an
equivalent one).  Validation checks the square axioms; the cube axiom splits
into an upward (join) and a downward (stability) direction, and the weak
variant omits the downward one.  When all cofinal paths from the origin are
equivalent, the path classes ordered by prefix form a weak prime domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .domains import COHERENT, FiniteDomain

Path2 = Tuple[str, str]


class AsyncError(ValueError):
    """Malformed asynchronous graph."""


@dataclass(frozen=True, eq=False)
class AsyncGraph:
    """A finite acyclic transition graph with origin and square generators."""
    nodes: FrozenSet[str]
    edges: Dict[str, Tuple[str, str]]  # edge id -> (src, tgt)
    origin: str
    squares: FrozenSet[FrozenSet[Path2]]

    @staticmethod
    def build(nodes: Iterable[str], edges: Iterable[Tuple[str, str, str]], origin: str,
              squares: Iterable[Tuple[Path2, Path2]] = ()) -> "AsyncGraph":
        emap = {}
        nodeset = frozenset(nodes)
        for eid, s, t in edges:
            if eid in emap:
                raise AsyncError(f"duplicate edge id {eid!r}")
            if s not in nodeset or t not in nodeset:
                raise AsyncError(f"edge {eid!r} has unknown endpoints")
            emap[eid] = (s, t)
        if origin not in nodeset:
            raise AsyncError(f"unknown origin {origin!r}")
        sqs = set()
        for p, q in squares:
            sqs.add(frozenset((tuple(p), tuple(q))))
        return AsyncGraph(nodeset, emap, origin, frozenset(sqs))

    def src(self, e: str) -> str:
        return self.edges[e][0]

    def tgt(self, e: str) -> str:
        return self.edges[e][1]

    def out_edges(self, n: str) -> Tuple[str, ...]:
        return tuple(sorted(e for e, (s, t) in self.edges.items() if s == n))

    def paths2(self) -> Tuple[Path2, ...]:
        out = []
        for e1, (s1, t1) in sorted(self.edges.items()):
            for e2, (s2, t2) in sorted(self.edges.items()):
                if t1 == s2:
                    out.append((e1, e2))
        return tuple(out)


class _Uf:
    def __init__(self, items):
        self.p = {x: x for x in items}

    def find(self, x):
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


def _square_classes(a: AsyncGraph) -> Dict[Path2, int]:
    """Equivalence on length-2 paths generated by the declared squares."""
    p2 = a.paths2()
    pos = {p: k for k, p in enumerate(p2)}
    uf = _Uf(range(len(p2)))
    for sq in a.squares:
        members = sorted(sq)
        if len(members) == 1:
            continue
        p, q = members
        if p not in pos or q not in pos:
            raise AsyncError(f"square {members} is not a pair of length-2 paths")
        if a.src(p[0]) != a.src(q[0]) or a.tgt(p[1]) != a.tgt(q[1]):
            raise AsyncError(f"square {members} is not coinitial-cofinal")
        uf.union(pos[p], pos[q])
    roots = {}
    cls = {}
    for p in p2:
        r = uf.find(pos[p])
        roots.setdefault(r, len(roots))
        cls[p] = roots[r]
    return cls


def _same2(cls: Dict[Path2, int], p: Path2, q: Path2) -> bool:
    return p in cls and q in cls and cls[p] == cls[q]


@dataclass(frozen=True)
class AsyncReport:
    acyclic: bool
    reachable: bool
    axiom1: bool
    axiom2: bool
    cube_up: bool
    cube_down: bool
    coherence: bool
    all_cofinal_equivalent: bool
    diagnostics: Tuple[str, ...] = ()

    def weak_valid(self) -> bool:
        return (self.acyclic and self.reachable and self.axiom1 and self.axiom2
                and self.cube_up and self.coherence)

    def full_valid(self) -> bool:
        return self.weak_valid() and self.cube_down

    def weak_prime(self) -> bool:
        return self.weak_valid() and self.all_cofinal_equivalent

    def prime(self) -> bool:
        return self.full_valid() and self.all_cofinal_equivalent

    def __bool__(self):
        return self.weak_valid()


def _is_acyclic(a: AsyncGraph) -> bool:
    state = {n: 0 for n in a.nodes}
    order = sorted(a.nodes)

    def dfs(n):
        state[n] = 1
        for e in a.out_edges(n):
            t = a.tgt(e)
            if state[t] == 1:
                return False
            if state[t] == 0 and not dfs(t):
                return False
        state[n] = 2
        return True

    return all(state[n] == 2 or dfs(n) for n in order)


def _reachable(a: AsyncGraph) -> bool:
    seen = {a.origin}
    todo = [a.origin]
    while todo:
        n = todo.pop()
        for e in a.out_edges(n):
            t = a.tgt(e)
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return seen == set(a.nodes)


def _origin_path_classes(a: AsyncGraph) -> Tuple[Dict[Tuple[str, ...], int], List[Tuple[str, ...]]]:
    """All paths from the origin and their classes under contextual closure."""
    cls2 = _square_classes(a)
    paths = [()]
    stack = [((), a.origin)]
    while stack:
        path, node = stack.pop()
        for e in a.out_edges(node):
            p2 = path + (e,)
            paths.append(p2)
            stack.append((p2, a.tgt(e)))
    paths = sorted(set(paths))
    by_class = {}
    for p in a.paths2():
        by_class.setdefault(cls2[p], []).append(p)
    uf = _Uf(paths)
    for w in paths:
        for i in range(len(w) - 1):
            seg = (w[i], w[i + 1])
            if seg not in cls2:
                continue
            for seg2 in by_class[cls2[seg]]:
                if seg2 != seg:
                    w2 = w[:i] + seg2 + w[i + 2:]
                    if w2 in uf.p:
                        uf.union(w, w2)
    roots, out = {}, {}
    for w in paths:
        r = uf.find(w)
        roots.setdefault(r, len(roots))
        out[w] = roots[r]
    return out, paths


def validate_async_graph(a: AsyncGraph, weak: bool = False) -> AsyncReport:
    """Evaluate the asynchronous-graph axioms.

    Reports each axiom separately; ``weak_valid`` ignores the downward
    (stability) direction of the cube, ``full_valid`` includes it.  The
    ``weak`` argument only selects which verdict ``bool(report)`` should
    reflect and is kept for symmetry with the other validators.
    """
    diags = []
    cls = _square_classes(a)
    acyclic = _is_acyclic(a)
    reachable = _reachable(a)
    if not acyclic:
        diags.append("graph has a cycle")
    if not reachable:
        diags.append("nodes unreachable from the origin")

    related = []  # ordered distinct related pairs of length-2 paths
    by_class: Dict[int, List[Path2]] = {}
    for p, k in cls.items():
        by_class.setdefault(k, []).append(p)
    for k, members in sorted(by_class.items()):
        for p in sorted(members):
            for q in sorted(members):
                if p != q:
                    related.append((p, q))

    axiom1 = True
    for p, q in related:
        if p[1] == q[1] and p[0] != q[0]:
            continue
        if p[1] != q[1] and p[0] == q[0]:
            axiom1 = False
            diags.append(f"axiom1: {p} ~ {q}")
            break
        if p == q:
            continue
    axiom2 = True
    for p, q in related:
        for p2, q2 in related:
            if p[0] != p2[0]:
                continue
            if (p[1] == p2[1]) != (q[0] == q2[0]):
                axiom2 = False
                diags.append(f"axiom2: {p}~{q} vs {p2}~{q2}")
                break
        if not axiom2:
            break

    def square(p: Path2, q: Path2) -> bool:
        return _same2(cls, p, q)

    edges_from: Dict[str, Tuple[str, ...]] = {n: a.out_edges(n) for n in a.nodes}

    def cube_up_holds() -> Optional[tuple]:
        # premise: m;c1 ~ u1;u2 and m;c2 ~ v1;v2, outer paths extended by
        # u3, v3 to a common target; conclusion: an upper median closes the
        # three faces.
        for m in sorted(a.edges):
            for c1 in edges_from[a.tgt(m)]:
                for u1u2 in by_class.get(cls.get((m, c1)), []):
                    u1, u2 = u1u2
                    if u1 == m:
                        continue
                    for c2 in edges_from[a.tgt(m)]:
                        for v1v2 in by_class.get(cls.get((m, c2)), []):
                            v1, v2 = v1v2
                            if v1 == m or v1 == u1:
                                continue
                            for u3 in edges_from[a.tgt(u2)]:
                                for v3 in edges_from[a.tgt(v2)]:
                                    if a.tgt(u3) != a.tgt(v3):
                                        continue
                                    if not _cube_up_conclusion(u1, u2, u3, v1, v2, v3):
                                        return (m, (u1, u2, u3), (v1, v2, v3))
        return None

    def _cube_up_conclusion(u1, u2, u3, v1, v2, v3) -> bool:
        lnode, rnode, top = a.tgt(u1), a.tgt(v1), a.tgt(u3)
        for w1 in edges_from[lnode]:
            for w2 in edges_from[rnode]:
                if a.tgt(w1) != a.tgt(w2):
                    continue
                if not square((u1, w1), (v1, w2)):
                    continue
                for z in edges_from[a.tgt(w1)]:
                    if a.tgt(z) != top:
                        continue
                    if square((u2, u3), (w1, z)) and square((v2, v3), (w2, z)):
                        return True
        return False

    def cube_down_holds() -> Optional[tuple]:
        # premise: u1;w1 ~ v1;w2 meeting at an upper median, with outer
        # paths through u2;u3 ~ w1;z and v2;v3 ~ w2;z; conclusion: a lower
        # median m with m;c1 ~ u1;u2 and m;c2 ~ v1;v2.
        for b in sorted(a.nodes):
            for u1 in edges_from[b]:
                for v1 in edges_from[b]:
                    if v1 == u1:
                        continue
                    for w1 in edges_from[a.tgt(u1)]:
                        for w2 in edges_from[a.tgt(v1)]:
                            if a.tgt(w1) != a.tgt(w2) or not square((u1, w1), (v1, w2)):
                                continue
                            for u2 in edges_from[a.tgt(u1)]:
                                for u3 in edges_from[a.tgt(u2)]:
                                    for z in edges_from[a.tgt(w1)]:
                                        if a.tgt(z) != a.tgt(u3) or not square((u2, u3), (w1, z)):
                                            continue
                                        for v2 in edges_from[a.tgt(v1)]:
                                            for v3 in edges_from[a.tgt(v2)]:
                                                if a.tgt(v3) != a.tgt(z) or not square((v2, v3), (w2, z)):
                                                    continue
                                                if not _cube_down_conclusion(b, u1, u2, v1, v2):
                                                    return (b, (u1, u2, u3), (v1, v2, v3))
        return None

    def _cube_down_conclusion(b, u1, u2, v1, v2) -> bool:
        for m in edges_from[b]:
            for c1 in edges_from[a.tgt(m)]:
                if a.tgt(c1) != a.tgt(u2) or not square((u1, u2), (m, c1)):
                    continue
                for c2 in edges_from[a.tgt(m)]:
                    if a.tgt(c2) == a.tgt(v2) and square((v1, v2), (m, c2)):
                        return True
        return False

    def coherence_holds() -> Optional[tuple]:
        # premise: lower median squares m;c1 ~ u1;u2, m;c2 ~ v1;v2 and a
        # commuting square u1;x1 ~ v1;x2; conclusion: a top completing the
        # two side squares over it.
        for m in sorted(a.edges):
            b = a.src(m)
            for c1 in edges_from[a.tgt(m)]:
                for u1u2 in by_class.get(cls.get((m, c1)), []):
                    u1, u2 = u1u2
                    if a.src(u1) != b or u1 == m:
                        continue
                    for c2 in edges_from[a.tgt(m)]:
                        for v1v2 in by_class.get(cls.get((m, c2)), []):
                            v1, v2 = v1v2
                            if a.src(v1) != b or v1 == m or v1 == u1:
                                continue
                            for x1 in edges_from[a.tgt(u1)]:
                                for x2 in edges_from[a.tgt(v1)]:
                                    if a.tgt(x1) != a.tgt(x2) or not square((u1, x1), (v1, x2)):
                                        continue
                                    if not _coherence_conclusion(u2, v2, x1, x2):
                                        return (m, (u1, u2), (v1, v2), (x1, x2))
        return None

    def _coherence_conclusion(u2, v2, x1, x2) -> bool:
        ct = a.tgt(x1)
        for z in edges_from[ct]:
            for y1 in edges_from[a.tgt(u2)]:
                if a.tgt(y1) != a.tgt(z) or not square((u2, y1), (x1, z)):
                    continue
                for y2 in edges_from[a.tgt(v2)]:
                    if a.tgt(y2) == a.tgt(z) and square((v2, y2), (x2, z)):
                        return True
        return False

    wup = cube_up_holds() if acyclic else ("cycle",)
    wdown = cube_down_holds() if acyclic else ("cycle",)
    wcoh = coherence_holds() if acyclic else ("cycle",)
    if wup:
        diags.append(f"cube (upward) fails at {wup}")
    if wdown:
        diags.append(f"cube (downward/stability) fails at {wdown}")
    if wcoh:
        diags.append(f"coherence fails at {wcoh}")

    all_equiv = True
    if acyclic:
        pcls, paths = _origin_path_classes(a)
        ends: Dict[str, set] = {}
        for w in paths:
            node = a.origin if not w else a.tgt(w[-1])
            ends.setdefault(node, set()).add(pcls[w])
        all_equiv = all(len(s) == 1 for s in ends.values())
        if not all_equiv:
            diags.append("inequivalent cofinal paths from the origin")
    return AsyncReport(acyclic, reachable, axiom1, axiom2,
                       wup is None, wdown is None, wcoh is None,
                       all_equiv, tuple(diags))


def async_domain(a: AsyncGraph) -> FiniteDomain:
    """Prefix order on ≃-classes of origin paths (weak prime validation first)."""
    report = validate_async_graph(a, weak=True)
    if not report.weak_prime():
        raise AsyncError("not a weak prime asynchronous graph: "
                         + "; ".join(report.diagnostics))
    pcls, paths = _origin_path_classes(a)
    reps: Dict[int, Tuple[str, ...]] = {}
    for w in paths:
        k = pcls[w]
        if k not in reps or w < reps[k]:
            reps[k] = w
    ids = {k: f"p{k}:{';'.join(w) or 'ε'}" for k, w in reps.items()}
    leq = set()
    for w in paths:
        for j in range(len(w) + 1):
            leq.add((ids[pcls[w[:j]]], ids[pcls[w]]))
    return FiniteDomain.from_leq(sorted(ids.values()),
                                 sorted((x, y) for x, y in leq if x != y), COHERENT)


def hasse_as_async(dom: FiniteDomain) -> AsyncGraph:
    """The Hasse diagram of a poset as an asynchronous graph with every
    square declared commuting."""
    bottom = dom.bottom()
    if bottom is None:
        raise AsyncError("poset has no least element")
    edges = [(f"{x}>{y}", x, y) for x, y in dom.covers()]
    a = AsyncGraph.build(dom.elements, edges, bottom)
    sqs = []
    p2 = a.paths2()
    for p, q in combinations(sorted(p2), 2):
        if a.src(p[0]) == a.src(q[0]) and a.tgt(p[1]) == a.tgt(q[1]):
            sqs.append((p, q))
    return AsyncGraph.build(dom.elements, edges, bottom, sqs)
