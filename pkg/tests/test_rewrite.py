import random

import pytest

from weavent.domains import algebraicity, validate_domain
from weavent.duality import dom_of_es, es_isomorphic, ev_of_domain, poset_isomorphic
from weavent.fixtures import e_run, running_grammar
from weavent.graphs import (GraphError, GraphMorphism, TypedGraph, find_matches,
                            graph_isomorphism, iso_hash)
from weavent.rewrite import (Derivation, Grammar, Rule, TraceLimitError,
                             apply_rule, equivalent_traces, interchange,
                             is_fusion_safe, is_pushout, pushout,
                             sequential_independence, trace_classes,
                             trace_domain, verify_direct_derivation)


@pytest.fixture(scope="module")
def grammar():
    return running_grammar()


@pytest.fixture(scope="module")
def start(grammar):
    return grammar.start


def step(grammar, host, rule_name, which=0):
    rule = grammar.rule(rule_name)
    matches = find_matches(rule.L, host)
    st = apply_rule(host, rule, matches[which])
    assert st is not None
    return st


class TestGraphs:
    def test_match_counts_at_start(self, grammar, start):
        assert len(find_matches(grammar.rule("p_a").L, start)) == 1
        assert len(find_matches(grammar.rule("p_b").L, start)) == 1
        assert len(find_matches(grammar.rule("p_c").L, start)) == 0

    def test_no_match_in_empty_graph(self, grammar):
        empty = TypedGraph([], [])
        assert find_matches(grammar.rule("p_a").L, empty) == []

    def test_noninjective_match_appears_after_merge(self, grammar, start):
        st = step(grammar, start, "p_a")
        ms = find_matches(grammar.rule("p_b").L, st.H)
        assert len(ms) == 1
        assert not ms[0].is_injective()

    def test_iso_hash_invariance(self, grammar, start):
        h1 = step(grammar, start, "p_a").H
        relabel = TypedGraph(["z"], [(e, h1.edge_type[e], "z", "z") for e in h1.edges],
                             {"z": "n"})
        assert iso_hash(h1) == iso_hash(relabel)
        assert graph_isomorphism(h1, relabel) is not None

    def test_morphism_validation(self, grammar, start):
        bad = GraphMorphism(grammar.rule("p_a").L, start,
                            {"c": "c", "v": "c"}, {"e_abar": "e_abar",
                                                   "e_nubar": "e_nubar"})
        with pytest.raises(GraphError):
            bad.validate()


class TestApplyRule:
    def test_running_first_step(self, grammar, start):
        st = step(grammar, start, "p_a")
        assert len(st.H.nodes) == 1
        assert sorted(st.H.edge_type[e] for e in st.H.edges) == ["bbar", "in", "nubar"]

    def test_second_step_reaches_gab(self, grammar, start):
        st2 = step(grammar, step(grammar, start, "p_a").H, "p_b")
        assert sorted(st2.H.edge_type[e] for e in st2.H.edges) == ["in", "nubar"]

    def test_dangling_returns_none(self):
        # deleting a node with an untouched incident edge
        tg = TypedGraph(["N"], [("E", "E", "N", "N")])
        host = TypedGraph(["x", "y"], [("e1", "E", "x", "y")], {"x": "N", "y": "N"})
        lg = TypedGraph(["u"], [], {"u": "N"})
        kg = TypedGraph([], [], {})
        rule = Rule("del", lg, kg, kg,
                    GraphMorphism(kg, lg, {}, {}), GraphMorphism(kg, kg, {}, {}))
        m = GraphMorphism(lg, host, {"u": "x"}, {})
        assert apply_rule(host, rule, m) is None

    def test_identification_of_deleted_items_returns_none(self):
        tg = TypedGraph(["N"], [])
        host = TypedGraph(["x"], [], {"x": "N"})
        lg = TypedGraph(["u", "w"], [], {"u": "N", "w": "N"})
        kg = TypedGraph([], [], {})
        rule = Rule("del2", lg, kg, kg,
                    GraphMorphism(kg, lg, {}, {}), GraphMorphism(kg, kg, {}, {}))
        m = GraphMorphism(lg, host, {"u": "x", "w": "x"}, {})
        assert apply_rule(host, rule, m) is None

    def test_pushout_verifier_on_constructed_steps(self, grammar):
        pool = trace_classes(grammar, 3).classes
        seen = 0
        for cls in pool:
            for deriv in cls.members:
                for st in deriv.steps:
                    assert verify_direct_derivation(st)
                    seen += 1
        assert seen > 10

    def test_is_pushout_rejects_extra_identification(self):
        empty = TypedGraph([], [], {})
        a = TypedGraph(["x"], [], {"x": "N"})
        b = TypedGraph(["y"], [], {"y": "N"})
        p_wrong = TypedGraph(["z"], [], {"z": "N"})
        f = GraphMorphism(empty, a, {}, {})
        g = GraphMorphism(empty, b, {}, {})
        pa = GraphMorphism(a, p_wrong, {"x": "z"}, {})
        pb = GraphMorphism(b, p_wrong, {"y": "z"}, {})
        assert not is_pushout(f, g, pa, pb)
        canon, in_a, in_b = pushout(f, g)
        assert is_pushout(f, g, in_a, in_b)
        assert len(canon.nodes) == 2


class TestFusionSafety:
    def test_first_step_safe(self, grammar, start):
        assert is_fusion_safe(step(grammar, start, "p_a"))

    def test_merged_rematch_unsafe(self, grammar, start):
        st2 = step(grammar, step(grammar, start, "p_a").H, "p_b")
        assert not is_fusion_safe(st2)

    def test_right_linear_always_safe(self, grammar, start):
        ga = step(grammar, start, "p_a").H
        st = step(grammar, ga, "p_c")
        assert st.rule.r.is_injective()
        assert is_fusion_safe(st)


class TestIndependence:
    def test_pa_pb_independent(self, grammar, start):
        d1 = step(grammar, start, "p_a")
        d2 = step(grammar, d1.H, "p_b")
        assert sequential_independence(d1, d2) is not None

    def test_pa_pc_dependent(self, grammar, start):
        d1 = step(grammar, start, "p_a")
        d2 = step(grammar, d1.H, "p_c")
        assert sequential_independence(d1, d2) is None

    def test_disjoint_steps_independent(self):
        tg = TypedGraph(["N"], [("E", "E", "N", "N")])
        host = TypedGraph(["x", "y"],
                          [("ex", "E", "x", "x"), ("ey", "E", "y", "y")],
                          {"x": "N", "y": "N"})
        lg = TypedGraph(["u"], [("eu", "E", "u", "u")], {"u": "N"})
        kg = TypedGraph(["u"], [], {"u": "N"})
        rule = Rule("drop", lg, kg, kg,
                    GraphMorphism(kg, lg, {"u": "u"}, {}),
                    GraphMorphism(kg, kg, {"u": "u"}, {}))
        d1 = apply_rule(host, rule, GraphMorphism(lg, host, {"u": "x"}, {"eu": "ex"}))
        m2 = GraphMorphism(lg, d1.H, {"u": "y"}, {"eu": "ey"})
        d2 = apply_rule(d1.H, rule, m2)
        assert sequential_independence(d1, d2) is not None


class TestInterchange:
    def test_swaps_pa_pb(self, grammar, start):
        d1 = step(grammar, start, "p_a")
        d2 = step(grammar, d1.H, "p_b")
        pair = sequential_independence(d1, d2)
        d2n, d1n = interchange(d1, d2, pair)
        assert (d2n.rule.name, d1n.rule.name) == ("p_b", "p_a")
        assert graph_isomorphism(d1n.H, d2.H) is not None
        psi1 = Derivation(start).extend(d1).extend(d2)
        psi2 = Derivation(start).extend(d2n).extend(d1n)
        assert equivalent_traces(psi1, psi2) == (1, 0)

    def test_double_interchange_equivalent(self, grammar, start):
        d1 = step(grammar, start, "p_a")
        d2 = step(grammar, d1.H, "p_b")
        pair = sequential_independence(d1, d2)
        d2n, d1n = interchange(d1, d2, pair)
        pair2 = sequential_independence(d2n, d1n)
        assert pair2 is not None
        e1, e2 = interchange(d2n, d1n, pair2)
        psi0 = Derivation(start).extend(d1).extend(d2)
        psi2 = Derivation(start).extend(e1).extend(e2)
        assert equivalent_traces(psi0, psi2) is not None

    def test_preserves_fusion_safety(self):
        # two disjoint loop-dropping steps: both safe, independent, and the
        # interchanged pair is safe again
        tg = TypedGraph(["N"], [("E", "E", "N", "N")])
        host = TypedGraph(["x", "y"],
                          [("ex", "E", "x", "x"), ("ey", "E", "y", "y")],
                          {"x": "N", "y": "N"})
        lg = TypedGraph(["u"], [("eu", "E", "u", "u")], {"u": "N"})
        kg = TypedGraph(["u"], [], {"u": "N"})
        rule = Rule("drop", lg, kg, kg,
                    GraphMorphism(kg, lg, {"u": "u"}, {}),
                    GraphMorphism(kg, kg, {"u": "u"}, {}))
        d1 = apply_rule(host, rule, GraphMorphism(lg, host, {"u": "x"}, {"eu": "ex"}))
        d2 = apply_rule(d1.H, rule,
                        GraphMorphism(lg, d1.H, {"u": "y"}, {"eu": "ey"}))
        assert is_fusion_safe(d1) and is_fusion_safe(d2)
        pair = sequential_independence(d1, d2)
        d2n, d1n = interchange(d1, d2, pair)
        assert is_fusion_safe(d2n) and is_fusion_safe(d1n)
        assert graph_isomorphism(d1n.H, d2.H) is not None
        assert sequential_independence(d2n, d1n) is not None


class TestEquivalentTraces:
    def test_identity(self, grammar, start):
        d1 = step(grammar, start, "p_a")
        psi = Derivation(start).extend(d1)
        assert equivalent_traces(psi, psi) == (0,)

    def test_different_rules_not_equivalent(self, grammar, start):
        da = step(grammar, start, "p_a")
        dc = step(grammar, da.H, "p_c")
        db = step(grammar, start, "p_b")
        dc2 = step(grammar, db.H, "p_c")
        psi1 = Derivation(start).extend(da).extend(dc)
        psi2 = Derivation(start).extend(db).extend(dc2)
        assert equivalent_traces(psi1, psi2) is None

    def test_source_mismatch_rejected(self, grammar, start):
        other = TypedGraph(["c", "v"],
                           [("e_abar", "abar", "c", "c"),
                            ("e_nubar", "nubar", "v", "v")],
                           {"c": "n", "v": "n"})
        with pytest.raises(GraphError):
            equivalent_traces(Derivation(start), Derivation(other))


class TestTraceDomain:
    def test_running_depth3(self, grammar):
        dom = trace_domain(grammar, 3)
        assert len(dom.elements) == 7
        assert validate_domain(dom).ok
        assert poset_isomorphic(dom, dom_of_es(e_run())) is not None
        alg = algebraicity(dom)
        assert alg.weak_prime_algebraic and not alg.prime_algebraic

    def test_running_fusion_safe(self, grammar):
        dom = trace_domain(grammar, 3, fusion_safe=True)
        assert len(dom.elements) == 5
        assert algebraicity(dom).prime_algebraic

    def test_ev_recovers_run(self, grammar):
        dom = trace_domain(grammar, 3)
        assert es_isomorphic(ev_of_domain(dom), e_run()) is not None

    def test_depth_zero(self, grammar):
        dom = trace_domain(grammar, 0)
        assert len(dom.elements) == 1

    def test_no_applicable_rule(self, grammar):
        empty_start = TypedGraph([], [])
        g = Grammar(grammar.type_graph, empty_start, grammar.rules)
        assert len(trace_domain(g, 4).elements) == 1

    def test_class_ceiling(self, grammar):
        with pytest.raises(TraceLimitError):
            trace_domain(grammar, 3, ceiling=3)

    def test_minimal_common_extension_length(self, grammar):
        # consistent classes join at the length predicted by the overlap of
        # their permutation into a common extension
        res = trace_classes(grammar, 3)
        dom = res.domain
        by_id = {c.element_id: c for c in res.classes}
        for id1 in dom.elements:
            for id2 in dom.elements:
                if not dom.consistent((id1, id2)):
                    continue
                join = dom.join((id1, id2))
                a, b, j = by_id[id1], by_id[id2], by_id[join]
                phi = next(d for d in j.members
                           if equivalent_traces(d.prefix(len(a.representative.steps)),
                                                a.representative) is not None)
                phi2 = next(d for d in j.members
                            if equivalent_traces(d.prefix(len(b.representative.steps)),
                                                 b.representative) is not None)
                sigma = equivalent_traces(phi, phi2)
                assert sigma is not None
                la = len(a.representative.steps)
                lb = len(b.representative.steps)
                n = sum(1 for k in range(la, len(phi.steps)) if sigma[k] < lb)
                assert len(j.representative.steps) == la + n
