import random
from itertools import combinations

import pytest

from weavent.es import EventStructure, LivenessError, classify, configurations, \
    minimal_enablings
from weavent.domains import (algebraicity, interchangeable, irreducible_elements,
                             validate_domain, validate_domain_morphism)
from weavent.duality import (configuration_id, connect_es, dom_of_es,
                             dom_of_es_morphism, es_isomorphic, ev_of_domain,
                             poset_isomorphic)
from weavent.fixtures import (chain, e_ccs, e_five, e_prime_conflict, e_run,
                              e_split, m3, nontransitive_bdomain)
from tests._gen import random_live_es, random_weak_prime_domain


@pytest.fixture(scope="module")
def run_dom():
    return dom_of_es(e_run())


class TestDomOfEs:
    def test_run_seven_elements(self, run_dom):
        assert len(run_dom.elements) == 7
        assert len(run_dom.covers()) == 9
        assert algebraicity(run_dom).weak_prime_algebraic

    def test_ccs_six_elements(self):
        dom = dom_of_es(e_ccs())
        assert len(dom.elements) == 6
        assert algebraicity(dom).prime_algebraic

    def test_conflict_variant_five_elements(self):
        dom = dom_of_es(e_prime_conflict())
        assert sorted(dom.elements) == ["{a,c}", "{a}", "{b,c}", "{b}", "{}"]

    def test_covers_add_one_event(self, run_dom):
        def events_of(eid):
            inner = eid.strip("{}")
            return set(inner.split(",")) if inner else set()

        for a, b in run_dom.covers():
            assert len(events_of(b) - events_of(a)) == 1
        es = e_run()
        for c in configurations(es):
            for c2 in configurations(es):
                if c < c2 and len(c2 - c) == 1:
                    assert run_dom.is_cover(configuration_id(c), configuration_id(c2))

    def test_needs_liveness(self):
        es = EventStructure.binary("ab", enabling=[((), "a"), ((), "b")],
                                   conflict=[])
        broken = EventStructure.binary("ab", enabling=[((), "a"), (("b",), "b")])
        with pytest.raises(LivenessError):
            dom_of_es(broken)
        assert validate_domain(dom_of_es(es)).ok

    def test_irreducibles_are_minimal_enabling_instances(self):
        rng = random.Random(71)
        for _ in range(20):
            es = random_live_es(rng)
            dom = dom_of_es(es)
            expected = set()
            for e in es.events:
                for c in minimal_enablings(es, e):
                    if es.is_consistent(c | {e}):
                        expected.add(configuration_id(c | {e}))
            assert set(irreducible_elements(dom)) == expected

    def test_interchangeable_iff_same_event_and_consistent(self):
        rng = random.Random(73)
        for _ in range(15):
            es = random_live_es(rng, max_events=4)
            dom = dom_of_es(es)
            instances = []
            for e in es.events:
                for c in minimal_enablings(es, e):
                    if es.is_consistent(c | {e}):
                        instances.append((c, e))
            for (c1, e1), (c2, e2) in combinations(instances, 2):
                i1 = configuration_id(c1 | {e1})
                i2 = configuration_id(c2 | {e2})
                expected = e1 == e2 and es.is_consistent(c1 | c2 | {e1})
                assert interchangeable(dom, i1, i2) == expected


class TestEvOfDomain:
    def test_run_domain_roundtrip(self, run_dom):
        es = ev_of_domain(run_dom)
        assert len(es.events) == 3
        assert es_isomorphic(es, e_run()) is not None

    def test_split_dom_splits_c(self):
        dom = dom_of_es(e_prime_conflict())
        es = ev_of_domain(dom)
        assert len(es.events) == 4
        assert es_isomorphic(es, e_split()) is not None

    def test_chain(self):
        es = ev_of_domain(chain(2))
        assert len(es.events) == 2
        (g1,) = [g for g in es.enabling_gens if not g[0]]
        other = next(e for e in es.events if e != g1[1])
        assert es.enables({g1[1]}, other)

    def test_rejects_non_weak_prime(self):
        from weavent.domains import OrderError
        with pytest.raises(OrderError):
            ev_of_domain(m3())

    def test_bounded_complete_variant(self):
        es = ev_of_domain(nontransitive_bdomain())
        assert es.conflict_kind == "consistency"
        assert len(es.events) == 4

    def test_dom_of_ev_isomorphic(self, run_dom):
        rng = random.Random(79)
        doms = [run_dom, dom_of_es(e_ccs()), dom_of_es(e_prime_conflict()),
                chain(3), chain(1)]
        doms += [random_weak_prime_domain(rng) for _ in range(20)]
        for dom in doms:
            back = dom_of_es(ev_of_domain(dom))
            assert poset_isomorphic(back, dom) is not None


class TestConnect:
    def test_fixes_connected(self):
        for es in (e_run(), e_ccs()):
            assert es_isomorphic(connect_es(es), es) is not None

    def test_splits_disconnected(self):
        out = connect_es(e_prime_conflict())
        assert len(out.events) == 4
        assert classify(out).connected
        assert es_isomorphic(out, e_split()) is not None

    def test_coreflection_small_suite(self):
        rng = random.Random(83)
        for _ in range(25):
            es = random_live_es(rng)
            out = connect_es(es)
            assert classify(out).connected
            assert poset_isomorphic(dom_of_es(out), dom_of_es(es)) is not None
            if classify(es).connected:
                assert es_isomorphic(out, es) is not None


class TestIsomorphisms:
    def test_relabelled_es(self):
        es = e_run()
        relabelled = EventStructure.binary(
            "xyz", enabling=[((), "x"), ((), "y"), (("x",), "z"), (("y",), "z")])
        phi = es_isomorphic(es, relabelled)
        assert phi is not None and phi["c"] == "z"

    def test_distinguishes_structures(self):
        assert es_isomorphic(e_run(), e_ccs()) is None

    def test_posets_of_different_size(self):
        assert poset_isomorphic(dom_of_es(e_run()), dom_of_es(e_ccs())) is None

    def test_split_relabel(self):
        a = dom_of_es(e_prime_conflict())
        b = dom_of_es(e_split())
        assert poset_isomorphic(a, b) is not None

    def test_poset_self(self):
        dom = dom_of_es(e_five())
        phi = poset_isomorphic(dom, dom)
        assert phi is not None
        for a, b in dom.covers():
            assert dom.leq(phi[a], phi[b])


class TestMorphismImages:
    def test_image_is_domain_morphism(self):
        src = e_run()
        target = EventStructure.binary(["c'"], enabling=[((), "c'")])
        f = dom_of_es_morphism({"c": "c'"}, src, target)
        rep = validate_domain_morphism(f, dom_of_es(src), dom_of_es(target))
        assert rep.ok

    def test_random_identity_images(self):
        rng = random.Random(89)
        for _ in range(10):
            es = random_live_es(rng, max_events=4)
            f = dom_of_es_morphism({e: e for e in es.events}, es, es)
            assert validate_domain_morphism(f, dom_of_es(es), dom_of_es(es)).ok
