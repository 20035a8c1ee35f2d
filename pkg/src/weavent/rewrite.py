"""Double-pushout rewriting with left-linear, possibly fusing rules.

Rules are spans ``L ← K → R`` with the left leg mono and consuming; the
right leg is arbitrary, so a step may merge items.  Applying a rule removes
the matched deleted part (when the gluing condition holds) and glues the
right-hand side back in as a pushout, computed as a quotient of a disjoint
union by union-find.

Derivations from a grammar's start graph are compared by left-consistent
permutations: a permutation of equal-length derivations using the same rules
stepwise, for which an isomorphism of the two derivation colimits matches up
all matches, comatches and the start graph.  The classes, ordered by prefix,
form the trace domain of the grammar, which is weak prime algebraic (prime
when only fusion-safe steps are allowed).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .es import EventStructure, EsError, classify, minimal_enablings
from .domains import COHERENT, FiniteDomain
from .graphs import (GraphError, GraphMorphism, TypedGraph, find_matches,
                     graph_isomorphism, iso_hash, _morphisms)


class TraceLimitError(GraphError):
    """Trace-class enumeration exceeded the configured ceiling."""


# ---------------------------------------------------------------------- #
# Rules and grammars
# ---------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class Rule:
    name: str
    L: TypedGraph
    K: TypedGraph
    R: TypedGraph
    l: GraphMorphism
    r: GraphMorphism

    def validate(self) -> None:
        if self.l.source is not self.K or self.l.target is not self.L:
            raise GraphError(f"rule {self.name!r}: l must map K into L")
        if self.r.source is not self.K or self.r.target is not self.R:
            raise GraphError(f"rule {self.name!r}: r must map K into R")
        self.l.validate()
        self.r.validate()
        if not self.l.is_injective():
            raise GraphError(f"rule {self.name!r}: left leg must be mono")
        if self.l.is_surjective():
            raise GraphError(f"rule {self.name!r}: rule must consume something")


@dataclass(frozen=True, eq=False)
class Grammar:
    type_graph: TypedGraph
    start: TypedGraph
    rules: Tuple[Rule, ...]

    def validate(self) -> None:
        self.type_graph.validate_typed_over(self.type_graph)
        self.start.validate_typed_over(self.type_graph)
        names = set()
        for rule in self.rules:
            if rule.name in names:
                raise GraphError(f"duplicate rule name {rule.name!r}")
            names.add(rule.name)
            rule.validate()
            for g in (rule.L, rule.K, rule.R):
                g.validate_typed_over(self.type_graph)

    def rule(self, name: str) -> Rule:
        for rule in self.rules:
            if rule.name == name:
                return rule
        raise GraphError(f"no rule named {name!r}")


# ---------------------------------------------------------------------- #
# Pushouts
# ---------------------------------------------------------------------- #

class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller tagged tuple as representative for determinism
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def classes(self) -> Dict[tuple, List[tuple]]:
        out: Dict[tuple, List[tuple]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return {k: sorted(v) for k, v in out.items()}


def _fresh(base: str, used: set) -> str:
    name = base
    k = 1
    while name in used:
        k += 1
        name = f"{base}~{k}"
    used.add(name)
    return name


def pushout(f: GraphMorphism, g: GraphMorphism) -> Tuple[TypedGraph, GraphMorphism, GraphMorphism]:
    """Pushout of the span ``A ←f− C −g→ B``.

    Returns ``(P, inA, inB)``.  ``P`` is the disjoint union of ``A`` and
    ``B`` quotiented by ``f(c) ≈ g(c)``; item names prefer the ``B`` side
    (merged items join their ``B`` names with ``+``).
    """
    if f.source is not g.source:
        raise GraphError("pushout legs must share their source")
    a, b = f.target, g.target
    ufn, ufe = _UnionFind(), _UnionFind()
    for n in a.nodes:
        ufn.add(("A", n))
    for n in b.nodes:
        ufn.add(("B", n))
    for e in a.edges:
        ufe.add(("A", e))
    for e in b.edges:
        ufe.add(("B", e))
    for c in f.source.nodes:
        ufn.union(("A", f.node_map[c]), ("B", g.node_map[c]))
    for c in f.source.edges:
        ufe.union(("A", f.edge_map[c]), ("B", g.edge_map[c]))

    used: set = set()
    node_name: Dict[tuple, str] = {}
    for root, members in sorted(ufn.classes().items()):
        bs = sorted({x for tag, x in members if tag == "B"})
        if bs:
            base = "+".join(bs)
        else:
            base = min(x for tag, x in members)
        name = _fresh(base, used)
        for m in members:
            node_name[m] = name
    edge_used: set = set()
    edge_name: Dict[tuple, str] = {}
    for root, members in sorted(ufe.classes().items()):
        bs = sorted({x for tag, x in members if tag == "B"})
        base = "+".join(bs) if bs else min(x for tag, x in members)
        name = _fresh(base, edge_used)
        for m in members:
            edge_name[m] = name

    nodes = sorted(set(node_name.values()))
    ntype = {}
    for m, name in node_name.items():
        tag, x = m
        ntype[name] = (a if tag == "A" else b).node_type[x]
    edges = {}
    for m, name in edge_name.items():
        tag, x = m
        gph = a if tag == "A" else b
        edges[name] = (name, gph.edge_type[x],
                       node_name[(tag, gph.src[x])], node_name[(tag, gph.tgt[x])])
    p = TypedGraph(nodes, sorted(edges.values()), ntype)
    in_a = GraphMorphism(a, p, {n: node_name[("A", n)] for n in a.nodes},
                         {e: edge_name[("A", e)] for e in a.edges})
    in_b = GraphMorphism(b, p, {n: node_name[("B", n)] for n in b.nodes},
                         {e: edge_name[("B", e)] for e in b.edges})
    return p, in_a, in_b


def is_pushout(f: GraphMorphism, g: GraphMorphism,
               pa: GraphMorphism, pb: GraphMorphism) -> bool:
    """Whether ``pa: A→P``, ``pb: B→P`` make the square over ``A←C→B`` a pushout.

    Concrete criterion: the square commutes and the canonical quotient of
    the disjoint union maps onto ``P`` bijectively (no extra or missing
    identifications).
    """
    if f.source is not g.source or pa.source is not f.target \
            or pb.source is not g.target or pa.target is not pb.target:
        raise GraphError("is_pushout: the four morphisms do not form a square")
    for c in f.source.nodes:
        if pa.node_map[f.node_map[c]] != pb.node_map[g.node_map[c]]:
            return False
    for c in f.source.edges:
        if pa.edge_map[f.edge_map[c]] != pb.edge_map[g.edge_map[c]]:
            return False
    canon, in_a, in_b = pushout(f, g)
    p = pa.target
    node_to = {}
    for n in f.target.nodes:
        node_to.setdefault(in_a.node_map[n], set()).add(pa.node_map[n])
    for n in g.target.nodes:
        node_to.setdefault(in_b.node_map[n], set()).add(pb.node_map[n])
    if any(len(v) != 1 for v in node_to.values()):
        return False
    nmap = {k: v.pop() for k, v in node_to.items()}
    if len(nmap) != len(canon.nodes) or len(set(nmap.values())) != len(nmap) \
            or len(nmap) != len(p.nodes):
        return False
    edge_to = {}
    for e in f.target.edges:
        edge_to.setdefault(in_a.edge_map[e], set()).add(pa.edge_map[e])
    for e in g.target.edges:
        edge_to.setdefault(in_b.edge_map[e], set()).add(pb.edge_map[e])
    if any(len(v) != 1 for v in edge_to.values()):
        return False
    emap = {k: v.pop() for k, v in edge_to.items()}
    if len(emap) != len(canon.edges) or len(set(emap.values())) != len(emap) \
            or len(emap) != len(p.edges):
        return False
    mediating = GraphMorphism(canon, p, nmap, emap)
    try:
        mediating.validate()
    except GraphError:
        return False
    return True


# ---------------------------------------------------------------------- #
# Direct derivations
# ---------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class DirectDerivation:
    """One DPO step ``G ⇒ H`` with all six boundary morphisms."""
    rule: Rule
    G: TypedGraph
    D: TypedGraph
    H: TypedGraph
    match: GraphMorphism   # L -> G
    mK: GraphMorphism      # K -> D
    mR: GraphMorphism      # R -> H
    lstar: GraphMorphism   # D -> G (inclusion)
    rstar: GraphMorphism   # D -> H


def apply_rule(g: TypedGraph, rule: Rule, m: GraphMorphism) -> Optional[DirectDerivation]:
    """Apply a rule at a match; returns None when the gluing condition fails.

    With ``l`` mono the condition splits into the dangling check (no context
    edge may keep a deleted node alive) and the identification check (items
    identified by the match must all be preserved).
    """
    if m.source is not rule.L or m.target is not g:
        raise GraphError("match must map the rule's left-hand side into the host")
    m.validate()
    kept_nodes = {rule.l.node_map[k] for k in rule.K.nodes}
    kept_edges = {rule.l.edge_map[k] for k in rule.K.edges}
    del_nodes = {m.node_map[x] for x in rule.L.nodes - kept_nodes}
    del_edges = {m.edge_map[x] for x in rule.L.edges - kept_edges}
    # identification condition
    if del_nodes & {m.node_map[x] for x in kept_nodes}:
        return None
    if del_edges & {m.edge_map[x] for x in kept_edges}:
        return None
    seen: Dict[str, str] = {}
    for x in sorted(rule.L.nodes - kept_nodes):
        img = m.node_map[x]
        if img in seen:
            return None
        seen[img] = x
    seen = {}
    for x in sorted(rule.L.edges - kept_edges):
        img = m.edge_map[x]
        if img in seen:
            return None
        seen[img] = x
    # dangling condition
    d_edges = g.edges - del_edges
    for e in d_edges:
        if g.src[e] in del_nodes or g.tgt[e] in del_nodes:
            return None
    d = g.subgraph(g.nodes - del_nodes, d_edges)
    lstar = GraphMorphism(d, g, {n: n for n in d.nodes}, {e: e for e in d.edges})
    mk = GraphMorphism(rule.K, d,
                       {k: m.node_map[rule.l.node_map[k]] for k in rule.K.nodes},
                       {k: m.edge_map[rule.l.edge_map[k]] for k in rule.K.edges})
    h, in_r, in_d = pushout(rule.r, mk)
    return DirectDerivation(rule, g, d, h, m, mk, in_r, lstar, in_d)


def verify_direct_derivation(d: DirectDerivation) -> bool:
    """Check both squares of a step against the pushout criterion."""
    left = is_pushout(d.rule.l, d.mK, d.match, d.lstar)
    right = is_pushout(d.rule.r, d.mK, d.mR, d.rstar)
    return left and right


def is_fusion_safe(d: DirectDerivation) -> bool:
    """Whether the pair (match∘l, r) is jointly mono: the step never
    re-merges items that the host already identifies."""
    seen = {}
    for k in sorted(d.rule.K.nodes):
        key = (d.mK.node_map[k], d.rule.r.node_map[k])
        if key in seen:
            return False
        seen[key] = k
    seen = {}
    for k in sorted(d.rule.K.edges):
        key = (d.mK.edge_map[k], d.rule.r.edge_map[k])
        if key in seen:
            return False
        seen[key] = k
    return True


# ---------------------------------------------------------------------- #
# Sequential independence and interchange
# ---------------------------------------------------------------------- #

def sequential_independence(d1: DirectDerivation, d2: DirectDerivation
                            ) -> Optional[Tuple[GraphMorphism, GraphMorphism]]:
    """An independence pair ``(i1: R1→D2, i2: L2→D1)`` or None.

    ``i1`` is unique if it exists because contexts embed into their hosts;
    ``i2`` is searched in deterministic order.
    """
    if d1.H is not d2.G:
        raise GraphError("steps are not consecutive")
    # i1: factor the comatch of d1 through the context of d2
    nmap, emap = {}, {}
    for n in d1.rule.R.nodes:
        img = d1.mR.node_map[n]
        if img not in d2.D.nodes:
            return None
        nmap[n] = img
    for e in d1.rule.R.edges:
        img = d1.mR.edge_map[e]
        if img not in d2.D.edges:
            return None
        emap[e] = img
    i1 = GraphMorphism(d1.rule.R, d2.D, nmap, emap)
    # i2: factor the match of d2 through the context of d1
    want_n = d2.match.node_map
    want_e = d2.match.edge_map
    node_pre = {n: frozenset(x for x in d1.D.nodes if d1.rstar.node_map[x] == want_n[n])
                for n in d2.rule.L.nodes}
    edge_pre = {e: frozenset(x for x in d1.D.edges if d1.rstar.edge_map[x] == want_e[e])
                for e in d2.rule.L.edges}
    for i2 in _morphisms(d2.rule.L, d1.D,
                         node_candidates=lambda n: node_pre[n],
                         edge_candidates=lambda e: edge_pre[e]):
        return i1, i2
    return None


def interchange(d1: DirectDerivation, d2: DirectDerivation,
                pair: Tuple[GraphMorphism, GraphMorphism]
                ) -> Tuple[DirectDerivation, DirectDerivation]:
    """Swap two sequentially independent steps.

    Applies the second rule first (through ``i2``) and the first rule at the
    intermediate graph; the final graph is isomorphic to the original one.
    """
    i1, i2 = pair
    m2new = i2.compose(d1.lstar)
    d2new = apply_rule(d1.G, d2.rule, m2new)
    if d2new is None:
        raise GraphError("independence pair does not yield an applicable first step")
    nmap, emap = {}, {}
    for n in d1.rule.L.nodes:
        img = d1.match.node_map[n]
        if img not in d2new.D.nodes:
            raise GraphError("invalid independence pair: first match not preserved")
        nmap[n] = d2new.rstar.node_map[img]
    for e in d1.rule.L.edges:
        img = d1.match.edge_map[e]
        if img not in d2new.D.edges:
            raise GraphError("invalid independence pair: first match not preserved")
        emap[e] = d2new.rstar.edge_map[img]
    m1new = GraphMorphism(d1.rule.L, d2new.H, nmap, emap)
    d1new = apply_rule(d2new.H, d1.rule, m1new)
    if d1new is None:
        raise GraphError("interchange failed to reapply the first rule")
    return d2new, d1new


# ---------------------------------------------------------------------- #
# Derivations, colimits, trace equivalence
# ---------------------------------------------------------------------- #

class Derivation:
    """A sequence of direct derivations glued on the nose."""

    def __init__(self, source: TypedGraph, steps: Tuple[DirectDerivation, ...] = (),
                 parent: Optional["Derivation"] = None):
        for i, st in enumerate(steps):
            prev = source if i == 0 else steps[i - 1].H
            if st.G is not prev:
                raise GraphError(f"step {i + 1} does not start at the previous target")
        self.source = source
        self.steps = steps
        self.parent = parent
        self._colimit = None

    def extend(self, step: DirectDerivation) -> "Derivation":
        if step.G is not self.target:
            raise GraphError("step does not start at the derivation's target")
        return Derivation(self.source, self.steps + (step,), parent=self)

    @property
    def target(self) -> TypedGraph:
        return self.steps[-1].H if self.steps else self.source

    def __len__(self):
        return len(self.steps)

    def rule_names(self) -> Tuple[str, ...]:
        return tuple(st.rule.name for st in self.steps)

    def prefix(self, k: int) -> "Derivation":
        d = self
        while len(d) > k:
            if d.parent is not None and len(d.parent) == len(d) - 1:
                d = d.parent
            else:
                d = Derivation(self.source, d.steps[:-1])
        return d

    def colimit(self) -> "Colimit":
        if self._colimit is None:
            self._colimit = Colimit(self)
        return self._colimit

    def __repr__(self):
        return f"Derivation({';'.join(self.rule_names()) or 'ε'})"


class Colimit:
    """Colimit of the zig-zag of graphs of a derivation.

    Computed as a union-find quotient of the disjoint union of the row
    ``G_0 ← D_1 → G_1 ← … → G_n``; the class maps serve as the colimit
    injections.
    """

    def __init__(self, deriv: Derivation):
        gs = [deriv.source] + [st.H for st in deriv.steps]
        ufn, ufe = _UnionFind(), _UnionFind()
        for i, g in enumerate(gs):
            for n in g.nodes:
                ufn.add(("G", i, n))
            for e in g.edges:
                ufe.add(("G", i, e))
        for i, st in enumerate(deriv.steps, start=1):
            for n in st.D.nodes:
                ufn.add(("D", i, n))
                ufn.union(("D", i, n), ("G", i - 1, st.lstar.node_map[n]))
                ufn.union(("D", i, n), ("G", i, st.rstar.node_map[n]))
            for e in st.D.edges:
                ufe.add(("D", i, e))
                ufe.union(("D", i, e), ("G", i - 1, st.lstar.edge_map[e]))
                ufe.union(("D", i, e), ("G", i, st.rstar.edge_map[e]))
        self._nclass: Dict[tuple, str] = {}
        self._eclass: Dict[tuple, str] = {}
        nodes = []
        ntype = {}
        nclasses = sorted(ufn.classes().items())
        for idx, (root, members) in enumerate(nclasses):
            name = f"n{idx}"
            nodes.append(name)
            for mtag in members:
                self._nclass[mtag] = name
            tag, i, x = members[0]
            gref = gs[i] if tag == "G" else deriv.steps[i - 1].D
            ntype[name] = gref.node_type[x]
        edges = []
        eclasses = sorted(ufe.classes().items())
        for idx, (root, members) in enumerate(eclasses):
            name = f"e{idx}"
            for mtag in members:
                self._eclass[mtag] = name
            tag, i, x = members[0]
            gref = gs[i] if tag == "G" else deriv.steps[i - 1].D
            edges.append((name, gref.edge_type[x],
                          self._nclass[(tag, i, gref.src[x])],
                          self._nclass[(tag, i, gref.tgt[x])]))
        self.graph = TypedGraph(nodes, edges, ntype)

    def node_in(self, stage: int, node: str) -> str:
        return self._nclass[("G", stage, node)]

    def edge_in(self, stage: int, edge: str) -> str:
        return self._eclass[("G", stage, edge)]


def _left_consistent_iso(psi1: Derivation, psi2: Derivation,
                         sigma: Sequence[int]) -> Optional[GraphMorphism]:
    """The colimit isomorphism pinned by the start graph and the matches, if
    consistent; None when some pin clashes or the pinned map is not an iso."""
    col1, col2 = psi1.colimit(), psi2.colimit()
    nmap: Dict[str, str] = {}
    emap: Dict[str, str] = {}

    def pin(m: Dict[str, str], a: str, b: str) -> bool:
        if m.get(a, b) != b:
            return False
        m[a] = b
        return True

    for n in psi1.source.nodes:
        if not pin(nmap, col1.node_in(0, n), col2.node_in(0, n)):
            return None
    for e in psi1.source.edges:
        if not pin(emap, col1.edge_in(0, e), col2.edge_in(0, e)):
            return None
    for i, st1 in enumerate(psi1.steps):
        st2 = psi2.steps[sigma[i]]
        for x in st1.rule.L.nodes:
            if not pin(nmap, col1.node_in(i, st1.match.node_map[x]),
                       col2.node_in(sigma[i], st2.match.node_map[x])):
                return None
        for x in st1.rule.L.edges:
            if not pin(emap, col1.edge_in(i, st1.match.edge_map[x]),
                       col2.edge_in(sigma[i], st2.match.edge_map[x])):
                return None
        for x in st1.rule.R.nodes:
            if not pin(nmap, col1.node_in(i + 1, st1.mR.node_map[x]),
                       col2.node_in(sigma[i] + 1, st2.mR.node_map[x])):
                return None
        for x in st1.rule.R.edges:
            if not pin(emap, col1.edge_in(i + 1, st1.mR.edge_map[x]),
                       col2.edge_in(sigma[i] + 1, st2.mR.edge_map[x])):
                return None
    if len(nmap) != len(col1.graph.nodes) or len(set(nmap.values())) != len(col2.graph.nodes):
        return None
    if len(emap) != len(col1.graph.edges) or len(set(emap.values())) != len(col2.graph.edges):
        return None
    xi = GraphMorphism(col1.graph, col2.graph, nmap, emap)
    try:
        xi.validate()
    except GraphError:
        return None
    return xi


def equivalent_traces(psi1: Derivation, psi2: Derivation) -> Optional[Tuple[int, ...]]:
    """The left-consistent permutation relating two derivations, or None.

    Both derivations must start from the same graph on the nose (their
    decorations are identities).  The permutation is returned 0-indexed:
    position ``i`` of the first derivation plays position ``sigma[i]`` of
    the second.
    """
    if not psi1.source.same(psi2.source):
        raise GraphError("derivations start from different graphs")
    n = len(psi1)
    if n != len(psi2):
        return None
    names1 = psi1.rule_names()
    names2 = psi2.rule_names()
    if sorted(names1) != sorted(names2):
        return None
    slots = {i: [j for j in range(n) if names2[j] == names1[i]] for i in range(n)}

    def assign(i, sigma, used):
        if i == n:
            xi = _left_consistent_iso(psi1, psi2, sigma)
            if xi is not None:
                yield tuple(sigma)
            return
        for j in slots[i]:
            if j in used:
                continue
            sigma.append(j)
            used.add(j)
            yield from assign(i + 1, sigma, used)
            sigma.pop()
            used.discard(j)

    for sigma in assign(0, [], set()):
        return sigma
    return None


# ---------------------------------------------------------------------- #
# Trace classes and the trace domain
# ---------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class TraceClass:
    element_id: str
    representative: Derivation
    members: Tuple[Derivation, ...]


@dataclass(frozen=True, eq=False)
class TraceDomainResult:
    domain: FiniteDomain
    classes: Tuple[TraceClass, ...]


def _enumerate_derivations(grammar: Grammar, depth: int,
                           fusion_safe: bool) -> List[Derivation]:
    grammar.validate()
    root = Derivation(grammar.start)
    pool = [root]
    frontier = [root]
    while frontier:
        nxt = []
        for deriv in frontier:
            if len(deriv) >= depth:
                continue
            host = deriv.target
            for rule in sorted(grammar.rules, key=lambda r: r.name):
                for m in find_matches(rule.L, host):
                    step = apply_rule(host, rule, m)
                    if step is None:
                        continue
                    if fusion_safe and not is_fusion_safe(step):
                        continue
                    child = deriv.extend(step)
                    pool.append(child)
                    nxt.append(child)
        frontier = nxt
    return pool


def trace_classes(grammar: Grammar, depth: int, fusion_safe: bool = False,
                  ceiling: int = 10000) -> TraceDomainResult:
    """Enumerate derivations up to ``depth`` and quotient them into trace
    classes; the classes ordered by prefix form the returned domain."""
    pool = _enumerate_derivations(grammar, depth, fusion_safe)
    index = {id(d): k for k, d in enumerate(pool)}
    uf = _UnionFind()
    for k in range(len(pool)):
        uf.add(k)
    buckets: Dict[tuple, List[int]] = {}
    for k, d in enumerate(pool):
        key = (len(d), tuple(sorted(d.rule_names())), iso_hash(d.target))
        buckets.setdefault(key, []).append(k)
    for key, members in sorted(buckets.items()):
        for pos, k1 in enumerate(members):
            for k2 in members[pos + 1:]:
                if uf.find(k1) == uf.find(k2):
                    continue
                if equivalent_traces(pool[k1], pool[k2]) is not None:
                    uf.union(k1, k2)
    grouped: Dict[int, List[int]] = {}
    for k in range(len(pool)):
        grouped.setdefault(uf.find(k), []).append(k)
    ordered = sorted(grouped.values(),
                     key=lambda ks: (len(pool[ks[0]]), pool[min(ks)].rule_names(), min(ks)))
    if len(ordered) > ceiling:
        raise TraceLimitError(
            f"{len(ordered)} trace classes exceed the ceiling of {ceiling}")
    class_of: Dict[int, int] = {}
    for ci, ks in enumerate(ordered):
        for k in ks:
            class_of[k] = ci
    ids = []
    classes = []
    for ci, ks in enumerate(ordered):
        rep = pool[min(ks)]
        label = ";".join(rep.rule_names()) or "ε"
        eid = f"t{ci}:{label}"
        ids.append(eid)
        classes.append(TraceClass(eid, rep, tuple(pool[k] for k in sorted(ks))))
    leq = []
    for ci, ks in enumerate(ordered):
        below = set()
        for k in ks:
            d = pool[k]
            cur = d
            while True:
                below.add(class_of[index[id(cur)]])
                if len(cur) == 0:
                    break
                cur = cur.parent
        for cj in below:
            if cj != ci:
                leq.append((ids[cj], ids[ci]))
    domain = FiniteDomain.from_leq(ids, leq, COHERENT)
    return TraceDomainResult(domain, tuple(classes))


def trace_domain(grammar: Grammar, depth: int, fusion_safe: bool = False,
                 ceiling: int = 10000) -> FiniteDomain:
    """The prefix-ordered poset of trace classes of a grammar."""
    return trace_classes(grammar, depth, fusion_safe, ceiling).domain


def once_per_rule_depth(grammar: Grammar) -> Optional[int]:
    """The rule count, when it provably bounds every derivation.

    Holds when each rule consumes a node of a private type: created by no
    rule, deleted by no other rule, and present exactly once in the start
    graph.  Grammars produced by ``grammar_from_es`` have this shape, so
    enumerating to this depth is exhaustive.
    """
    created = set()
    for rule in grammar.rules:
        kept = {rule.r.node_map[k] for k in rule.K.nodes}
        for n in rule.R.nodes - kept:
            created.add(rule.R.node_type[n])
    for rule in grammar.rules:
        kept = {rule.l.node_map[k] for k in rule.K.nodes}
        deleted_types = {rule.L.node_type[n] for n in rule.L.nodes - kept}
        if not any(t not in created
                   and sum(1 for n in grammar.start.nodes
                           if grammar.start.node_type[n] == t) == 1
                   for t in deleted_types):
            return None
    return len(grammar.rules)


# ---------------------------------------------------------------------- #
# A grammar for a connected event structure
# ---------------------------------------------------------------------- #

def _tuple_label(u: Tuple[str, ...]) -> str:
    return "(" + ",".join(u) + ")"


def _pmin(es: EventStructure, e: str) -> List[Tuple[str, ...]]:
    """Choice tuples over the minimal enablings of ``e``: one event out of
    each minimal enabling, serialised as sorted duplicate-free tuples."""
    factors = sorted(minimal_enablings(es, e), key=sorted)
    if any(not f for f in factors):
        return []
    out = set()
    for combo in product(*[sorted(f) for f in factors]):
        u = tuple(sorted(set(combo)))
        if e in u:
            raise EsError(f"event {e!r} occurs in its own minimal enabling")
        out.add(u)
    return sorted(out)


def grammar_from_es(es: EventStructure) -> Grammar:
    """Synthesise a grammar whose trace domain regenerates the structure.

    One rule per event: it consumes a private item and one shared item per
    conflict pair, requires the event's loop-carrying nodes to have been
    merged, and merges, for every other event, the tuple nodes witnessing
    this event into that event's own node.
    """
    if es.conflict_kind != "binary":
        raise EsError("grammar synthesis needs a binary-conflict structure")
    cl = classify(es)
    if not cl.live:
        raise EsError("grammar synthesis needs a live structure: " + "; ".join(cl.diagnostics))
    if not cl.connected:
        raise EsError("grammar synthesis needs a connected structure")
    events = sorted(es.events)
    pmin = {e: _pmin(es, e) for e in events}
    conflicts = sorted(tuple(sorted(p)) for p in es.conflict) if es.conflict else []

    t_nodes = [f"ev:{e}" for e in events] + [f"init:{e}" for e in events] \
        + [f"cnf:{a}#{b}" for a, b in conflicts]
    t_edges = [(f"lab:{e}", f"lab:{e}", f"ev:{e}", f"ev:{e}") for e in events]
    for e in events:
        for u in pmin[e]:
            lu = _tuple_label(u)
            t_edges.append((f"lab:{lu}@{e}", f"lab:{lu}@{e}", f"ev:{e}", f"ev:{e}"))
    tg = TypedGraph(t_nodes, t_edges)

    s_nodes, s_edges, s_types = [], [], {}
    for e in events:
        s_nodes += [f"i_{e}", f"s_{e}"]
        s_types[f"i_{e}"] = f"init:{e}"
        s_types[f"s_{e}"] = f"ev:{e}"
        s_edges.append((f"es_{e}", f"lab:{e}", f"s_{e}", f"s_{e}"))
        for u in pmin[e]:
            lu = _tuple_label(u)
            node = f"l_{lu}@{e}"
            s_nodes.append(node)
            s_types[node] = f"ev:{e}"
            s_edges.append((f"el_{lu}@{e}", f"lab:{lu}@{e}", node, node))
    for a, b in conflicts:
        s_nodes.append(f"c_{a}#{b}")
        s_types[f"c_{a}#{b}"] = f"cnf:{a}#{b}"
    start = TypedGraph(s_nodes, s_edges, s_types)

    rules = []
    for e in events:
        l_nodes, l_edges, l_types = [], [], {}
        l_nodes.append(f"i_{e}")
        l_types[f"i_{e}"] = f"init:{e}"
        for a, b in conflicts:
            if e in (a, b):
                l_nodes.append(f"c_{a}#{b}")
                l_types[f"c_{a}#{b}"] = f"cnf:{a}#{b}"
        own = f"own_{e}"
        l_nodes.append(own)
        l_types[own] = f"ev:{e}"
        l_edges.append((f"es_{e}", f"lab:{e}", own, own))
        for u in pmin[e]:
            lu = _tuple_label(u)
            l_edges.append((f"el_{lu}@{e}", f"lab:{lu}@{e}", own, own))
        affected = []
        for e2 in events:
            if e2 == e:
                continue
            hits = [u for u in pmin[e2] if e in u]
            if hits:
                affected.append((e2, hits))
        for e2, hits in affected:
            l_nodes.append(f"s_{e2}")
            l_types[f"s_{e2}"] = f"ev:{e2}"
            l_edges.append((f"es_{e2}", f"lab:{e2}", f"s_{e2}", f"s_{e2}"))
            for u in hits:
                lu = _tuple_label(u)
                node = f"l_{lu}@{e2}"
                l_nodes.append(node)
                l_types[node] = f"ev:{e2}"
                l_edges.append((f"el_{lu}@{e2}", f"lab:{lu}@{e2}", node, node))
        lgraph = TypedGraph(l_nodes, l_edges, l_types)

        k_nodes = [n for n in l_nodes if n != f"i_{e}" and not n.startswith("c_")]
        kgraph = TypedGraph(k_nodes, l_edges, {n: l_types[n] for n in k_nodes})
        l_mor = GraphMorphism(kgraph, lgraph, {n: n for n in k_nodes},
                              {ed[0]: ed[0] for ed in l_edges})

        r_nodes, r_types, rmap_n = [], {}, {}
        r_nodes.append(own)
        r_types[own] = f"ev:{e}"
        rmap_n[own] = own
        for e2, hits in affected:
            merged = f"m_{e2}"
            r_nodes.append(merged)
            r_types[merged] = f"ev:{e2}"
            rmap_n[f"s_{e2}"] = merged
            for u in hits:
                lu = _tuple_label(u)
                rmap_n[f"l_{lu}@{e2}"] = merged
        r_edges = [(eid, etype, rmap_n[s], rmap_n[t]) for eid, etype, s, t in l_edges]
        rgraph = TypedGraph(r_nodes, r_edges, r_types)
        r_mor = GraphMorphism(kgraph, rgraph, dict(rmap_n),
                              {ed[0]: ed[0] for ed in l_edges})
        rules.append(Rule(e, lgraph, kgraph, rgraph, l_mor, r_mor))
    grammar = Grammar(tg, start, tuple(rules))
    grammar.validate()
    return grammar
