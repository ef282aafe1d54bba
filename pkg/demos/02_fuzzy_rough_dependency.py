"""Fuzzy-rough dependency measures as data-driven capacities."""

# gamma(B) sums, over instances, the distance to the nearest instance of a
# different class when only the attributes in B are looked at. Attributes
# that separate the classes get large values, and a copy of an attribute
# adds nothing.

import numpy as np

from choquetknn import GammaMeasure, choquet_distance_matrix, dual, symmetrize
from choquetknn.worked_example import PATIENT_LABELS, PATIENT_VALUES

X, y = PATIENT_VALUES, np.array(PATIENT_LABELS)
gamma = GammaMeasure(X, y)
for mask in range(1, 8):
    names = [a for j, a in enumerate(("fever", "fatigue", "cough")) if mask >> j & 1]
    print(f"{str(names):32s} gamma={gamma.evaluate(mask):.3f}  dual={dual(gamma).evaluate(mask):.3f}"
          f"  sym={symmetrize(gamma).evaluate(mask):.3f}")

# alpha moves the distance from the plain capacity (0) to its dual (1).
for alpha in (0.0, 0.5, 1.0):
    print(f"alpha={alpha}")
    print(np.round(choquet_distance_matrix(X, gamma, alpha), 3))

# Duplicating cough leaves every distance unchanged.
Xd = np.column_stack([X, X[:, 2]])
D = choquet_distance_matrix(X, gamma, 0.5)
Dd = choquet_distance_matrix(Xd, GammaMeasure(Xd, y), 0.5)
print("max change after duplicating cough:", np.abs(D - Dd).max())
