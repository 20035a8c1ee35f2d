"""Every connected structure arises from some fusing grammar.

The synthesiser builds one rule per event: a private marker node makes the
rule fire at most once, shared marker nodes encode conflicts, and tuple
nodes get merged into an event's carrier exactly when one of its minimal
enablings has fully happened.  Deriving to depth |events| and reading the
events back recovers the input, up to isomorphism.
"""

from weavent import (es_isomorphic, ev_of_domain, dom_of_es, poset_isomorphic,
                     grammar_from_es, trace_domain)
from weavent.fixtures import e_run, e_five

for name, es in (("or-enabled third event", e_run()),
                 ("five events, joint + solo enabling, one conflict", e_five())):
    print(f"--- {name} ---")
    g = grammar_from_es(es)
    print("rules:", [r.name for r in g.rules])
    print("start graph:", len(g.start.nodes), "nodes:", sorted(g.start.nodes))
    rule = g.rules[-1]
    print(f"rule {rule.name!r}: |L| = {len(rule.L.nodes)} nodes, deletes",
          sorted(rule.L.nodes - {rule.l.node_map[k] for k in rule.K.nodes}),
          "and merges", len(rule.K.nodes) - len(rule.R.nodes), "node(s)")
    dom = trace_domain(g, depth=len(es.events))
    print("trace classes:", len(dom.elements),
          "| configurations:", len(dom_of_es(es).elements))
    print("posets isomorphic:", poset_isomorphic(dom, dom_of_es(es)) is not None)
    print("events recovered:", es_isomorphic(ev_of_domain(dom), es) is not None)
    print()
