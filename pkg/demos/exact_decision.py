"""
Deciding equality exactly
=========================

Rational mixing measures are compared by reducing the mixture difference
to polynomial relations on the simplex and degree-elevating them.
"""

from fractions import Fraction

from dirimix.equivalence import decide_equality
from dirimix.exactpoly import degree_elevate, relation_from_measures
from dirimix.witnesses import dirac, expansion_witness

F = Fraction

# a chain of expansions produces a measure with many atoms but the same mixture
pair = expansion_witness((F(1, 3), F(2), F(5, 4)), [0, 2, 1, 0])
print("atoms in G':", len(pair.G1))
cert = decide_equality(pair.G0, pair.G1)
print("verdict:", cert.verdict, "via", cert.method, "residual", cert.residual)
print("sign counts:", cert.sign_counts)

# a genuinely different pair leaves a nonzero elevated coefficient
G, H = dirac((F(1), F(1))), dirac((F(2), F(1)))
(rel,) = relation_from_measures(G, H)
form = degree_elevate(rel)
print("elevated coefficients:", {k: str(v) for k, v in form.coefficients.items()})
print("verdict:", decide_equality(G, H).verdict)
