"""
Identifiable regimes
====================

Each certificate below names a restriction on the atoms under which no
shift relation can survive.
"""

from fractions import Fraction

from dirimix.equivalence import certify
from dirimix.witnesses import MixingMeasure, shift_witness

F = Fraction

measures = {
    "common total": MixingMeasure((((1, 3, 2), F(1, 2)), ((2, 2, 2), F(1, 2)))),
    "narrow box": MixingMeasure((((1, F(3, 2), 9), F(1, 3)), ((F(3, 2), 1, 2), F(2, 3)))),
    "two atoms in J = 3": MixingMeasure((((1, 2, 3), F(1, 2)), ((6, 1, 1), F(1, 2)))),
}
for name, G in measures.items():
    print(f"{name:>20}:", [c.to_json() for c in certify(G)])

# the shift witness escapes all three, as it must
pair = shift_witness((1, 1, 1))
print("shift witness regimes:", certify(pair.G0, pair.G1))
