"""Unstable structures as stable ones with an equivalence on events.

Unfolding splits every event into one instance per minimal enabling; all
instances of an event are declared equivalent.  The result is a prime
structure whose equivalence-saturated configurations rebuild the original
domain, and fusing (quotienting by the equivalence) undoes the unfolding.
"""

from weavent import (algebraicity, dom_of_es, epes_dom, epes_ev,
                     epes_isomorphic, es_isomorphic, fuse, poset_isomorphic,
                     unfold, classify)
from weavent.fixtures import e_run

es = e_run()
p = unfold(es)
print("instances:", sorted(p.base.events))
print("the base is prime:", classify(p.base).prime)
print("equivalence blocks:", [sorted(b) for b in sorted(p.equiv, key=min)])

dom = epes_dom(p)
print("\nsaturated configurations:", len(dom.elements),
      "(the two instances of c only ever happen together)")
print("matches the original domain:",
      poset_isomorphic(dom, dom_of_es(es)) is not None)
print("weak prime:", algebraicity(dom).weak_prime_algebraic)

print("\nfuse(unfold(es)) is the original:", es_isomorphic(fuse(p), es) is not None)
print("unfold(fuse(p)) is p:", epes_isomorphic(unfold(fuse(p)), p) is not None)

q = epes_ev(dom_of_es(es))
print("\nbuilt straight from the domain: base events =", len(q.base.events),
      "| blocks =", sorted(len(b) for b in q.equiv))
print("its saturated configurations are the domain again:",
      poset_isomorphic(epes_dom(q), dom_of_es(es)) is not None)
