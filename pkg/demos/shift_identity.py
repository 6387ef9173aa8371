"""
The shift identity
==================

A single Dirichlet density equals a finite mixture of shifted Dirichlet
densities, so finite Dirichlet mixtures are not identifiable.
"""

from fractions import Fraction

import numpy as np

from dirimix import kernels as K
from dirimix.witnesses import shift_residual, shift_witness

# build the witness pair for alpha = (1/2, 3/2, 2) in exact arithmetic
alpha = (Fraction(1, 2), Fraction(3, 2), Fraction(2))
pair = shift_witness(alpha)
print("G  =", [(tuple(map(str, a)), str(w)) for a, w in pair.G0.atoms])
print("G' =", [(tuple(map(str, a)), str(w)) for a, w in pair.G1.atoms])

# the two mixtures agree pointwise up to rounding
rng = np.random.default_rng(0)
x = rng.dirichlet(np.ones(3), size=5)
m0 = np.exp(K.mixture_log_density(pair.G0, None, x))
m1 = np.exp(K.mixture_log_density(pair.G1, None, x))
for row, a, b in zip(x, m0, m1):
    print(f"x = {np.round(row, 3)}  m_G = {a:.12f}  m_G' = {b:.12f}")

# the residual of the identity relative to the density
print("max |residual| =", np.max(np.abs(shift_residual(alpha, x))))
