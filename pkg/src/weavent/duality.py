"""Passages between event structures and weak prime domains, and prime
event structures with equivalence.

``dom_of_es`` orders the configurations by inclusion; ``ev_of_domain`` reads
an event structure back off a weak prime domain, with events the
interchangeability classes of irreducibles.  Their composite ``connect_es``
replaces a live structure by a connected one with the same configuration
poset.  The EPES constructions present the same correspondence through
prime structures carrying an event equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple

from .es import (BINARY, CONSISTENCY, EsError, EventStructure, LivenessError,
                 classify, configurations, minimal_enablings)
from .domains import (BOUNDED_COMPLETE, COHERENT, FiniteDomain, OrderError,
                      algebraicity, decompose, interchange_classes,
                      irreducible_elements, predecessor, validate_domain,
                      weak_primes)

EventSet = FrozenSet[str]


def configuration_id(c: Iterable[str]) -> str:
    """Canonical element id of a configuration, e.g. ``{a,c}``."""
    return "{" + ",".join(sorted(c)) + "}"


# ---------------------------------------------------------------------- #
# ES -> domain
# ---------------------------------------------------------------------- #

def dom_of_es(es: EventStructure) -> FiniteDomain:
    """The configurations of a live structure ordered by inclusion.

    Joins of consistent sets are unions and covers add exactly one event;
    the result is weak prime algebraic.
    """
    cl = classify(es)
    if not cl.live:
        raise LivenessError("not live: " + "; ".join(cl.diagnostics))
    confs = sorted(configurations(es), key=lambda c: (len(c), sorted(c)))
    ids = {c: configuration_id(c) for c in confs}
    covers = []
    for c in confs:
        for e in es.events - c:
            c2 = c | {e}
            if c2 in ids:
                covers.append((ids[c], ids[c2]))
    kind = COHERENT if es.conflict_kind == BINARY else BOUNDED_COMPLETE
    return FiniteDomain(ids.values(), covers, kind)


def dom_of_es_morphism(f: Mapping[str, str], src: EventStructure,
                       dst: EventStructure) -> Dict[str, str]:
    """Image of an ES morphism on configuration posets (``C ↦ f(C)``)."""
    out = {}
    for c in configurations(src):
        img = frozenset(f[e] for e in c if e in f)
        out[configuration_id(c)] = configuration_id(img)
    return out


# ---------------------------------------------------------------------- #
# Domain -> ES
# ---------------------------------------------------------------------- #

def _require_weak_prime(dom: FiniteDomain) -> None:
    rep = validate_domain(dom)
    if not rep.ok:
        raise OrderError(f"not a valid domain: {rep.condition} {rep.witness}")
    wps = set(weak_primes(dom))
    for i in irreducible_elements(dom):
        if i not in wps:
            raise OrderError(f"not weak prime algebraic: irreducible {i!r} is not a weak prime")


def ev_of_domain(dom: FiniteDomain) -> EventStructure:
    """The event structure of a weak prime domain.

    Events are ↔*-classes of irreducibles; a set enables a class when it
    contains the classes of all strict predecessors of one of its members;
    two classes are in conflict when no element dominates members of both.
    """
    _require_weak_prime(dom)
    classes = interchange_classes(dom)
    name = {}
    for k, cls in enumerate(classes):
        nm = f"class{k}:{min(cls)}"
        for i in cls:
            name[i] = nm
    gens = set()
    for i in name:
        below = decompose(dom, predecessor(dom, i))
        gens.add((frozenset(name[j] for j in below), name[i]))
    events = sorted(set(name.values()))
    if dom.kind == COHERENT:
        conflict = []
        for c1, c2 in combinations(classes, 2):
            together = any(
                any(dom.leq(i, d) for i in c1) and any(dom.leq(j, d) for j in c2)
                for d in dom.elements)
            if not together:
                conflict.append((name[min(c1)], name[min(c2)]))
        return EventStructure.binary(events, conflict, [(x, e) for x, e in gens])
    cons = [frozenset(name[i] for i in decompose(dom, d)) for d in dom.maximal_elements()]
    return EventStructure.with_consistency(events, cons, [(x, e) for x, e in gens])


def connect_es(es: EventStructure) -> EventStructure:
    """The connected structure with the same configuration domain."""
    return ev_of_domain(dom_of_es(es))


# ---------------------------------------------------------------------- #
# Isomorphism search
# ---------------------------------------------------------------------- #

def _es_signature(es: EventStructure, e: str):
    # invariant data of an event: its minimal enablings and consistency
    # profile.  Enabling counts only as observed through configurations, so
    # different generator presentations of the same structure agree.
    mins = minimal_enablings(es, e)
    used = sum(1 for e2 in es.events for c in minimal_enablings(es, e2) if e in c)
    if es.conflict_kind == BINARY:
        deg = sum(1 for p in es.conflict if e in p)
        return (len(mins), tuple(sorted(len(c) for c in mins)), deg, used)
    sizes = tuple(sorted(len(m) for m in es.consistent_sets if e in m))
    return (len(mins), tuple(sorted(len(c) for c in mins)), sizes, used)


def _es_matches(es1: EventStructure, es2: EventStructure, phi: Dict[str, str]) -> bool:
    if es1.conflict_kind == BINARY:
        if {frozenset((phi[a], phi[b])) for p in es1.conflict for a, b in [sorted(p)]} \
                != es2.conflict:
            return False
    else:
        if {frozenset(phi[x] for x in m) for m in es1.consistent_sets} != es2.consistent_sets:
            return False
    for e in es1.events:
        mins1 = {frozenset(phi[x] for x in c) for c in minimal_enablings(es1, e)}
        if mins1 != set(minimal_enablings(es2, phi[e])):
            return False
    return True


def _es_isomorphisms(es1: EventStructure, es2: EventStructure) -> Iterator[Dict[str, str]]:
    if es1.conflict_kind != es2.conflict_kind or len(es1.events) != len(es2.events):
        return
    sig1 = {e: _es_signature(es1, e) for e in es1.events}
    sig2 = {e: _es_signature(es2, e) for e in es2.events}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return
    order = sorted(es1.events, key=lambda e: (sig1[e], e))
    candidates = {e: sorted(x for x in es2.events if sig2[x] == sig1[e]) for e in order}

    def compatible(phi, e, x):
        for a, b in phi.items():
            if es1.conflict_kind == BINARY:
                if es1.in_conflict(e, a) != es2.in_conflict(x, b):
                    return False
            else:
                if es1.is_consistent((e, a)) != es2.is_consistent((x, b)):
                    return False
        return True

    def extend(k, phi, used):
        if k == len(order):
            if _es_matches(es1, es2, phi):
                yield dict(phi)
            return
        e = order[k]
        for x in candidates[e]:
            if x in used or not compatible(phi, e, x):
                continue
            phi[e] = x
            used.add(x)
            yield from extend(k + 1, phi, used)
            del phi[e]
            used.discard(x)

    yield from extend(0, {}, set())


def es_isomorphic(es1: EventStructure, es2: EventStructure) -> Optional[Dict[str, str]]:
    """A bijection preserving and reflecting conflict and enabling, or None."""
    for phi in _es_isomorphisms(es1, es2):
        return phi
    return None


def poset_isomorphic(dom1: FiniteDomain, dom2: FiniteDomain) -> Optional[Dict[str, str]]:
    """An order isomorphism between two finite posets, or None."""
    if len(dom1.elements) != len(dom2.elements):
        return None

    def heights(dom):
        h = {}
        for x in sorted(dom.elements, key=lambda x: bin(dom._downm(dom.index(x))).count("1")):
            lows = dom.lower_covers(x)
            h[x] = 0 if not lows else 1 + max(h[y] for y in lows)
        return h

    h1, h2 = heights(dom1), heights(dom2)

    def sig(dom, h, x):
        i = dom.index(x)
        return (h[x], len(dom.lower_covers(x)), len(dom.upper_covers(x)),
                bin(dom._downm(i)).count("1"), bin(dom._upm(i)).count("1"))

    sig1 = {x: sig(dom1, h1, x) for x in dom1.elements}
    sig2 = {x: sig(dom2, h2, x) for x in dom2.elements}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return None
    order = sorted(dom1.elements, key=lambda x: (sig1[x], x))
    candidates = {x: sorted(y for y in dom2.elements if sig2[y] == sig1[x]) for x in order}

    def extend(k, phi, used):
        if k == len(order):
            return dict(phi)
        x = order[k]
        for y in candidates[x]:
            if y in used:
                continue
            if any((dom1.leq(x, a) != dom2.leq(y, b)) or (dom1.leq(a, x) != dom2.leq(b, y))
                   for a, b in phi.items()):
                continue
            phi[x] = y
            used.add(y)
            res = extend(k + 1, phi, used)
            if res is not None:
                return res
            del phi[x]
            used.discard(y)
        return None

    return extend(0, {}, set())


# ---------------------------------------------------------------------- #
# Prime event structures with equivalence
# ---------------------------------------------------------------------- #

@dataclass(frozen=True)
class Epes:
    """A prime event structure together with an equivalence on its events.

    The equivalence is stored as a partition (every event appears in exactly
    one block).  Valid instances satisfy: the base classifies as live and
    prime, every history ``⌈e⌉ ∪ {e}`` is saturated, and causally related
    events are never equivalent.
    """
    base: EventStructure
    equiv: FrozenSet[EventSet]

    def block_of(self, e: str) -> EventSet:
        for b in self.equiv:
            if e in b:
                return b
        raise EsError(f"event {e!r} not covered by the equivalence")

    def equivalent(self, a: str, b: str) -> bool:
        return b in self.block_of(a)


def causes(es: EventStructure, e: str) -> EventSet:
    mins = sorted(minimal_enablings(es, e), key=sorted)
    if len(mins) != 1:
        raise EsError(f"event {e!r} has {len(mins)} minimal enablings; need a prime base")
    return mins[0]


def _saturated(p: Epes, xs: EventSet, cause_map: Mapping[str, EventSet]) -> bool:
    # every event equivalent to a member and enabled inside xs must belong
    for e in xs:
        for e2 in p.block_of(e):
            if e2 not in xs and cause_map[e2] <= xs:
                return False
    return True


def validate_epes(p: Epes) -> Tuple[bool, Tuple[str, ...]]:
    """Check the EPES axioms; returns (ok, diagnostics)."""
    diags = []
    seen = set()
    for b in p.equiv:
        if b & seen:
            diags.append("equivalence blocks overlap")
        seen |= b
    if seen != p.base.events:
        diags.append("equivalence does not cover the events")
    if p.base.conflict_kind != BINARY:
        diags.append("EPES base must use binary conflict")
        return (False, tuple(diags))
    cl = classify(p.base)
    if not cl.live:
        diags.append("base not live")
    if not cl.prime:
        diags.append("base not prime")
    if diags:
        return (False, tuple(diags))
    cmap = {e: causes(p.base, e) for e in p.base.events}
    for e in sorted(p.base.events):
        hist = cmap[e] | {e}
        if not _saturated(p, hist, cmap):
            diags.append(f"history of {e!r} is not saturated")
        for c in cmap[e]:
            if p.equivalent(c, e):
                diags.append(f"causally related events {c!r} < {e!r} are equivalent")
    return (not diags, tuple(diags))


def epes_is_connected(p: Epes) -> bool:
    """Whether the equivalence is regenerated by its conflict-free pairs."""
    for block in p.equiv:
        members = sorted(block)
        parent = {x: x for x in members}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in combinations(members, 2):
            if not p.base.in_conflict(a, b):
                parent[find(a)] = find(b)
        if len({find(x) for x in members}) > 1:
            return False
    return True


def epes_dom(p: Epes) -> FiniteDomain:
    """The poset of saturated configurations of an EPES."""
    ok, diags = validate_epes(p)
    if not ok:
        raise EsError("invalid EPES: " + "; ".join(diags))
    cmap = {e: causes(p.base, e) for e in p.base.events}
    sat = [c for c in configurations(p.base) if _saturated(p, c, cmap)]
    leq = [(configuration_id(c1), configuration_id(c2))
           for c1 in sat for c2 in sat if c1 < c2]
    return FiniteDomain.from_leq([configuration_id(c) for c in sat], leq, COHERENT)


def epes_ev(dom: FiniteDomain) -> Epes:
    """The EPES of a weak prime domain: irreducibles as events,
    interchangeability classes as the equivalence."""
    _require_weak_prime(dom)
    irr = irreducible_elements(dom)
    conflict = [(a, b) for a, b in combinations(sorted(irr), 2)
                if not dom.consistent((a, b))]
    gens = []
    for i in irr:
        below = decompose(dom, predecessor(dom, i))
        gens.append((tuple(sorted(below)), i))
    base = EventStructure.binary(irr, conflict, gens)
    blocks = interchange_classes(dom)
    p = Epes(base, frozenset(blocks))
    ok, diags = validate_epes(p)
    if not ok:
        raise EsError("constructed EPES violates its axioms: " + "; ".join(diags))
    return p


def fuse(p: Epes) -> EventStructure:
    """Quotient an EPES by its equivalence.

    Enabling descends through representatives; two classes are in conflict
    only when all representative pairs are.
    """
    name = {}
    for b in p.equiv:
        nm = min(b)
        for e in b:
            name[e] = nm
    events = sorted(set(name.values()))
    gens = set()
    for needs, e in p.base.enabling_gens:
        gens.add((frozenset(name[x] for x in needs), name[e]))
    conflict = []
    for b1, b2 in combinations(sorted(p.equiv, key=min), 2):
        if all(p.base.in_conflict(a, b) for a in b1 for b in b2):
            conflict.append((name[min(b1)], name[min(b2)]))
    return EventStructure.binary(events, conflict, [(x, e) for x, e in gens])


def unfold(es: EventStructure) -> Epes:
    """Split every event into its minimal enablings.

    Events of the result are pairs ``⟨C, e⟩`` with ``C`` a minimal enabling
    of ``e`` (and ``C ∪ {e}`` consistent); all instances of one event are
    equivalent.  ``fuse(unfold(es))`` is isomorphic to ``es``.
    """
    cl = classify(es)
    if not cl.live:
        raise LivenessError("not live: " + "; ".join(cl.diagnostics))
    if es.conflict_kind != BINARY:
        raise EsError("unfold is defined on binary-conflict structures")
    inst = []  # (C, e, id)
    for e in sorted(es.events):
        for c in sorted(minimal_enablings(es, e), key=sorted):
            if es.is_consistent(c | {e}):
                inst.append((c, e, f"<{configuration_id(c)}:{e}>"))
    flat = {x: c | {e} for c, e, x in inst}
    covers_of = {}  # base event c -> instances whose flat part contains c
    for c, e, x in inst:
        for ev in flat[x]:
            covers_of.setdefault(ev, []).append(x)
    gens = set()
    for c, e, x in inst:
        needed = sorted(c)
        if not needed:
            gens.add((frozenset(), x))
            continue
        choices = [covers_of.get(ev, []) for ev in needed]
        if any(not ch for ch in choices):
            continue
        seen = {frozenset()}
        partial = [frozenset()]
        for ch in choices:
            nxt = set()
            for base in partial:
                for pick in ch:
                    nxt.add(base | {pick})
            partial = list(nxt)
        for xs in partial:
            gens.add((frozenset(xs), x))
    conflict = []
    for (c1, e1, x1), (c2, e2, x2) in combinations(inst, 2):
        if not es.is_consistent(c1 | c2 | {e1, e2}):
            conflict.append((x1, x2))
    base = EventStructure.binary([x for _, _, x in inst], conflict,
                                 [(xs, x) for xs, x in gens])
    blocks: Dict[str, set] = {}
    for c, e, x in inst:
        blocks.setdefault(e, set()).add(x)
    return Epes(base, frozenset(frozenset(b) for b in blocks.values()))


def epes_isomorphic(p1: Epes, p2: Epes) -> Optional[Dict[str, str]]:
    """A base isomorphism that carries the one equivalence onto the other."""
    if sorted(len(b) for b in p1.equiv) != sorted(len(b) for b in p2.equiv):
        return None
    blocks2 = set(p2.equiv)
    for phi in _es_isomorphisms(p1.base, p2.base):
        if {frozenset(phi[x] for x in b) for b in p1.equiv} == blocks2:
            return phi
    return None
