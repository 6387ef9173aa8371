"""
Discrete models inherit the identity
====================================

Integrating the shift identity against a multinomial or a topic model
gives the same non-identifiability for Dirichlet-multinomial and LDA
marginals, checked here exactly.
"""

from fractions import Fraction

from dirimix.equivalence import decide_equality
from dirimix.witnesses import dm_witness, lda_witness

F = Fraction

pair = dm_witness((F(1, 2), F(3, 2), F(2)), 4)
cert = decide_equality(pair.G0, pair.G1, context=pair.context)
print("Dirichlet-multinomial, n = 4:", cert.verdict, "over", cert.details["support_size"], "count vectors")

beta = ((F(1, 2), F(1, 4), F(1, 4)), (F(1, 6), F(1, 3), F(1, 2)))
pair = lda_witness((F(1), F(5, 2)), beta, (1, 3, 3))
cert = decide_equality(pair.G0, pair.G1, context=pair.context)
print("LDA, three-word documents:", cert.verdict, "over", cert.details["support_size"], "word multisets")
