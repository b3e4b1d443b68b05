# Comfortable-embedding orders of curves in surfaces, computed from the
# two-chart transition germ by order-by-order normalization.
#
# The two worked examples:
#   * the diagonal P^1 in P^1 x P^1 (normal bundle degree 2),
#   * the conic in P^2 (normal bundle degree 4),
# reach opposite verdicts: the diagonal is 1-comfortable along exactly one
# lifting chain, the conic is not even 1-splitting.

from conedeform.cech import (normalize, p1p1_diagonal, p2_conic,
                             weight_from_order)

for name, t in (("diagonal in P1 x P1", p1p1_diagonal(4)),
                ("conic in P2", p2_conic(4))):
    res = normalize(t, 3)
    w, notes = weight_from_order(res.m_comfortable, dim_D=1)
    print(f"{name}  (normal degree {t.normal_degree})")
    print(f"  m(X,D) = {res.m_comfortable}, {res.verdict}")
    print(f"  predicted deformation weight: {w}")
    for k, dim in sorted(res.ledger.families.items()):
        print(f"  order-{k} lifting family: {dim} parameter(s)")
    print("  obstruction ledger:")
    for e in res.ledger.entries:
        vec = ", ".join(str(c) for c in e.class_vector) or "window empty"
        print(f"    k={e.order} {e.kind:16s} chain[{e.chain}] "
              f"locus {e.locus.kind}: {e.locus.description or '-'}")
    print()

# The interesting phenomenon in the diagonal example: the order-1 lifting
# family is one-dimensional (parameter a).  The order-2 lifting exists only
# along a in {0, -1} (the two product projections), while the 1-comfortable
# structure exists only at a = -1/2 (the symmetric lifting).  No single
# chain does both, so the embedding is 1-linearizable but not
# 2-linearizable, and the comfortable order is exactly 2.
