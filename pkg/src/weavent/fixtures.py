"""The worked structures used throughout tests, demos and documentation.

Names follow the roles the structures play: the running three-event
structure with an or-enabled third event, its stable/prime cousins, the
five-event structure with a joint and a solo enabling for one event, the
small posets witnessing failures of primality, transitivity and the axioms,
and the running fusion grammar.
"""

from __future__ import annotations

from .es import EventStructure
from .domains import BOUNDED_COMPLETE, FiniteDomain
from .graphs import GraphMorphism, TypedGraph
from .rewrite import Grammar, Rule


def e_run() -> EventStructure:
    """Three events, no conflict; c is enabled by a or by b (unstable)."""
    return EventStructure.binary(
        "abc", enabling=[((), "a"), ((), "b"), (("a",), "c"), (("b",), "c")])


def e_ccs() -> EventStructure:
    """The prime structure of two parallel processes: a before c, b free."""
    return EventStructure.binary(
        "abc", enabling=[((), "a"), ((), "b"), (("a",), "c")])


def e_prime_conflict() -> EventStructure:
    """Like ``e_run`` but with a # b: stable yet not connected."""
    return EventStructure.binary(
        "abc", conflict=[("a", "b")],
        enabling=[((), "a"), ((), "b"), (("a",), "c"), (("b",), "c")])


def e_split() -> EventStructure:
    """The connected rewording of ``e_prime_conflict``: c split in two
    instances, conflict saturated."""
    return EventStructure.binary(
        ["a", "b", "c1", "c2"],
        conflict=[("a", "b"), ("c1", "c2"), ("a", "c2"), ("b", "c1")],
        enabling=[((), "a"), ((), "b"), (("a",), "c1"), (("b",), "c2")])


def e_joint() -> EventStructure:
    """c needs both a and b together (a single joint minimal enabling)."""
    return EventStructure.binary(
        "abc", enabling=[((), "a"), ((), "b"), (("a", "b"), "c")])


def e_five() -> EventStructure:
    """Five events: d enabled by {a,b} jointly or by c alone; d # e."""
    return EventStructure.binary(
        "abcde", conflict=[("d", "e")],
        enabling=[((), "a"), ((), "b"), ((), "c"), ((), "e"),
                  (("a", "b"), "d"), (("c",), "d")])


def e_three_independent() -> EventStructure:
    """Three pairwise independent events; its domain is the cube."""
    return EventStructure.binary(
        "xyz", enabling=[((), "x"), ((), "y"), ((), "z")])


# ---------------------------------------------------------------------- #
# Posets
# ---------------------------------------------------------------------- #

def m3() -> FiniteDomain:
    """Bottom, three incomparable atoms, top: a lattice that is not weak
    prime algebraic."""
    return FiniteDomain("bxyzt", [("b", "x"), ("b", "y"), ("b", "z"),
                                  ("x", "t"), ("y", "t"), ("z", "t")])


def chain(n: int) -> FiniteDomain:
    """A chain with ``n`` covers (hence ``n + 1`` elements)."""
    els = [f"c{k}" for k in range(n + 1)]
    return FiniteDomain(els, [(els[k], els[k + 1]) for k in range(n)])


def pair_no_join() -> FiniteDomain:
    """Two atoms under two maximal elements: bounded pair without a join."""
    return FiniteDomain("b" "x" "y" "s" "t",
                        [("b", "x"), ("b", "y"),
                         ("x", "s"), ("y", "s"), ("x", "t"), ("y", "t")])


def nontransitive_poset(with_top: bool = True) -> FiniteDomain:
    """Three irreducibles with i ↔ i' and i' ↔ i'' but not i ↔ i''."""
    covers = [("bot", "q1"), ("bot", "q2"), ("bot", "q3"),
              ("q1", "i1"), ("q1", "m12"),
              ("q2", "i2"), ("q2", "m12"), ("q2", "m23"),
              ("q3", "i3"), ("q3", "m23"),
              ("i1", "j12"), ("i2", "j12"), ("m12", "j12"),
              ("i2", "j23"), ("i3", "j23"), ("m23", "j23")]
    elements = {x for pair in covers for x in pair}
    if with_top:
        covers += [("j12", "top"), ("j23", "top")]
        elements |= {"top"}
    return FiniteDomain(elements, covers)


def nontransitive_bdomain() -> FiniteDomain:
    """A weak prime bounded-complete poset (not coherent) where
    interchangeability fails to be transitive on a consistent pair."""
    covers = [("bot", "p1"), ("bot", "p2"), ("bot", "p3"),
              ("p1", "i1"), ("p1", "p12"), ("p1", "p13"),
              ("p2", "i2"), ("p2", "p12"), ("p2", "p23"),
              ("p3", "i3"), ("p3", "p13"), ("p3", "p23"),
              ("i1", "A"), ("i1", "i12"),
              ("i2", "i12"), ("i2", "i23"),
              ("i3", "B"), ("i3", "i23"),
              ("p12", "i12"), ("p23", "i23"),
              ("p13", "A"), ("p13", "B"),
              ("A", "T"), ("B", "T")]
    elements = {x for pair in covers for x in pair}
    return FiniteDomain(elements, covers, BOUNDED_COMPLETE)


# ---------------------------------------------------------------------- #
# The running fusion grammar
# ---------------------------------------------------------------------- #

def running_grammar() -> Grammar:
    """Two nodes, four loops; two fusing rules and one plain deleting rule.

    The rules named ``p_a``/``p_b`` delete one loop and merge the two nodes;
    ``p_c`` deletes the ``in`` loop and only applies after a merge.
    """
    tg = TypedGraph(["n"], [("abar", "abar", "n", "n"), ("bbar", "bbar", "n", "n"),
                            ("nubar", "nubar", "n", "n"), ("in", "in", "n", "n")])
    start = TypedGraph(
        ["c", "v"],
        [("e_abar", "abar", "c", "c"), ("e_bbar", "bbar", "c", "c"),
         ("e_in", "in", "c", "c"), ("e_nubar", "nubar", "v", "v")],
        {"c": "n", "v": "n"})

    def fusing(y: str) -> Rule:
        lg = TypedGraph(["c", "v"],
                        [(f"e_{y}bar", f"{y}bar", "c", "c"),
                         ("e_nubar", "nubar", "v", "v")],
                        {"c": "n", "v": "n"})
        kg = TypedGraph(["c", "v"], [("e_nubar", "nubar", "v", "v")],
                        {"c": "n", "v": "n"})
        rg = TypedGraph(["cv"], [("e_nubar", "nubar", "cv", "cv")], {"cv": "n"})
        return Rule(f"p_{y}", lg, kg, rg,
                    GraphMorphism(kg, lg, {"c": "c", "v": "v"}, {"e_nubar": "e_nubar"}),
                    GraphMorphism(kg, rg, {"c": "cv", "v": "cv"}, {"e_nubar": "e_nubar"}))

    lc = TypedGraph(["cv"], [("e_in", "in", "cv", "cv"),
                             ("e_nubar", "nubar", "cv", "cv")], {"cv": "n"})
    kc = TypedGraph(["cv"], [("e_nubar", "nubar", "cv", "cv")], {"cv": "n"})
    rc = TypedGraph(["cv"], [("e_nubar", "nubar", "cv", "cv")], {"cv": "n"})
    pc = Rule("p_c", lc, kc, rc,
              GraphMorphism(kc, lc, {"cv": "cv"}, {"e_nubar": "e_nubar"}),
              GraphMorphism(kc, rc, {"cv": "cv"}, {"e_nubar": "e_nubar"}))
    grammar = Grammar(tg, start, (fusing("a"), fusing("b"), pc))
    grammar.validate()
    return grammar
