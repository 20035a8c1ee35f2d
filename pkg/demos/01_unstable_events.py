"""An event with two interchangeable histories.

Three events a, b, c: both a and b are immediately available, and c becomes
available as soon as *either* has happened.  No single set of causes for c
exists, so the structure is unstable; this script walks through what its
configuration poset still remembers about c.
"""

from weavent import (classify, configurations, dom_of_es, minimal_enablings,
                     algebraicity, interchange_classes, interchangeable,
                     irreducible_elements, primes, weak_primes,
                     ev_of_domain, es_isomorphic, connect_es)
from weavent.fixtures import e_run, e_prime_conflict

es = e_run()
print("events:", sorted(es.events))
print("classification:", classify(es))
print("configurations:")
for c in sorted(configurations(es), key=lambda c: (len(c), sorted(c))):
    print("   ", "{" + ",".join(sorted(c)) + "}")
print("minimal enablings of c:", sorted(map(sorted, minimal_enablings(es, "c"))))

dom = dom_of_es(es)
print("\nthe 7-element configuration poset:")
for a, b in dom.covers():
    print(f"    {a} < {b}")
print("irreducibles:", irreducible_elements(dom))
print("primes:      ", primes(dom))
print("weak primes: ", weak_primes(dom))
print("the two histories of c are interchangeable:",
      interchangeable(dom, "{a,c}", "{b,c}"))
print("interchange classes:", [sorted(c) for c in interchange_classes(dom)])
print("algebraicity:", algebraicity(dom))

back = ev_of_domain(dom)
print("\nreading the events back off the poset:", sorted(back.events))
print("isomorphic to the original:", es_isomorphic(back, es) is not None)

# with a # b the two histories are no longer linked, and the coreflection
# splits c into two events
split = connect_es(e_prime_conflict())
print("\nafter adding a # b, the connected version has events:",
      sorted(split.events))
