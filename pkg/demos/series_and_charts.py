"""
Series and charts
=================

The inverted Dirichlet density has a convergent power series near the
origin of the orthant, and the log-ratio chart carries Dirichlet densities
to the whole Euclidean space.
"""

import numpy as np

from dirimix import kernels as K
from dirimix.series import h_series_eval
from dirimix.transports import alr_density, alr_inverse, alr_transform

alpha, y = (1.5, 0.8, 2.0), [0.1, 0.2]
exact = np.exp(K.kernel_log_density(K.InvertedDirichlet(alpha), y))
for order in (5, 10, 20, 40):
    value, tail = h_series_eval(alpha, y, order)
    print(f"order {order:2d}: error {abs(value - exact):.2e}  bound {tail:.2e}")

# log-ratio chart: the uniform point goes to the origin
x = np.array([0.2, 0.3, 0.5])
t = alr_transform(x).t
print("alr(x) =", t, " back:", alr_inverse(t).x)
print("transported density at t:", alr_density(alpha, t))
