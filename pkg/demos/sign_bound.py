"""
Sign structure of null relations
================================

Every nonzero null relation among shifted parameters has at least J
terms of one sign. The exact lattice basis and the numerical Gram null
space both show it.
"""

from fractions import Fraction

import numpy as np

from dirimix.equivalence import gram_matrix, gram_spectrum, numerical_null_space
from dirimix.exactpoly import lattice, null_relation_basis, relation_from_vector, sign_counts

J, degree = 3, 2
exps = lattice(J, degree)
basis = null_relation_basis(exps, J)
print(f"J = {J}, degree <= {degree}: {len(exps)} monomials, null dimension {len(basis)}")
for v in basis:
    sc = sign_counts(relation_from_vector(exps, v, J))
    print(f"  {[int(c) for c in v]}  positives {sc.positives}  negatives {sc.negatives}")

# the same lattice seen through the L2 Gram matrix at residue (3/2, 3/4, 2)
r = (Fraction(3, 2), Fraction(3, 4), Fraction(2))
params = [tuple(float(a + n) for a, n in zip(r, e)) for e in exps]
M = gram_matrix(params)
eig, cond = gram_spectrum(M)
print("smallest eigenvalues:", np.sort(eig)[:4])
print("numerical null dimension:", len(numerical_null_space(M)))
