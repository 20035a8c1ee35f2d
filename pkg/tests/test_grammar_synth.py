import random

import pytest

from weavent.es import EsError, classify
from weavent.domains import algebraicity
from weavent.duality import dom_of_es, es_isomorphic, ev_of_domain, poset_isomorphic
from weavent.fixtures import e_five, e_prime_conflict, e_run, e_three_independent
from weavent.rewrite import grammar_from_es, trace_domain
from tests._gen import random_connected_es


class TestConstruction:
    def test_run_shape(self):
        g = grammar_from_es(e_run())
        assert [r.name for r in g.rules] == ["a", "b", "c"]
        assert len(g.start.nodes) == 7
        assert sorted(g.start.nodes) == ["i_a", "i_b", "i_c", "l_(a,b)@c",
                                         "s_a", "s_b", "s_c"]
        # type graph: one carrier node and one start marker per event
        assert len(g.type_graph.nodes) == 6
        assert len(g.type_graph.edges) == 4

    def test_five_shape(self):
        g = grammar_from_es(e_five())
        assert len(g.rules) == 5
        assert len(g.start.nodes) == 13
        assert {"c_d#e", "l_(a,c)@d", "l_(b,c)@d"} <= set(g.start.nodes)

    def test_single_event(self):
        from weavent.es import EventStructure
        es = EventStructure.binary("e", enabling=[((), "e")])
        g = grammar_from_es(es)
        assert len(g.rules) == 1
        assert sorted(g.start.nodes) == ["i_e", "s_e"]

    def test_rules_are_consuming_and_left_linear(self):
        for es in (e_run(), e_five(), e_three_independent()):
            g = grammar_from_es(es)
            for rule in g.rules:
                assert rule.l.is_injective()
                assert not rule.l.is_surjective()

    def test_rejects_disconnected(self):
        with pytest.raises(EsError):
            grammar_from_es(e_prime_conflict())


class TestRoundTrip:
    def test_run(self):
        g = grammar_from_es(e_run())
        dom = trace_domain(g, depth=3)
        assert poset_isomorphic(dom, dom_of_es(e_run())) is not None
        assert es_isomorphic(ev_of_domain(dom), e_run()) is not None

    def test_five(self):
        es = e_five()
        dom = trace_domain(grammar_from_es(es), depth=5)
        assert poset_isomorphic(dom, dom_of_es(es)) is not None
        assert es_isomorphic(ev_of_domain(dom), es) is not None

    def test_random_connected(self):
        rng = random.Random(101)
        for _ in range(6):
            es = random_connected_es(rng)
            dom = trace_domain(grammar_from_es(es), depth=len(es.events))
            assert algebraicity(dom).weak_prime_algebraic
            assert es_isomorphic(ev_of_domain(dom), es) is not None

    def test_rules_fire_at_most_once(self):
        # the private marker of each rule is consumed and never re-created,
        # so depth |E| enumerates every derivation
        from weavent.rewrite import trace_classes
        g = grammar_from_es(e_run())
        res = trace_classes(g, depth=5)
        for cls in res.classes:
            names = cls.representative.rule_names()
            assert len(names) == len(set(names))
            assert len(names) <= 3
