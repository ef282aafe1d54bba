"""Monotone measures, duals and the Choquet distance on a small example."""

# Four patients described by fever, fatigue and cough, with a cold / no cold
# decision. The measure below puts half of each attribute's weight on the
# singletons, and rewards fatigue and cough together more than either alone.

import numpy as np

from choquetknn import (
    AdditiveMeasure,
    choquet_distance,
    choquet_distance_matrix,
    dual,
    mobius_transform,
    shapley_values,
    symmetrize,
)
from choquetknn.worked_example import PATIENT_VALUES, example_measure

X = PATIENT_VALUES
mu = example_measure()
print("mu on the full set:", mu.total)
print("Shapley values:", shapley_values(mu))

# The Mobius coefficients show the interactions; fatigue and cough have a
# positive joint coefficient, so they complement each other.
mob = mobius_transform(mu)
print("Mobius coefficient of {fatigue, cough}:", mob.coefficient([1, 2]))

# Choquet distance between x1 and x2
print("d_mu(x1, x2) =", choquet_distance(X[0], X[1], mu))

# The dual measure swaps a subset with its complement. Its mixture with mu at
# 0.5 is self-dual.
s = symmetrize(mu)
masks = np.arange(8)
print("mu      :", mu.evaluate_many(masks))
print("dual mu :", dual(mu).evaluate_many(masks))
print("mu^s    :", s.evaluate_many(masks))

# For an additive measure the distance is plain weighted Manhattan.
w = AdditiveMeasure([0.2, 0.4, 0.4])
print(np.round(choquet_distance_matrix(X, w), 3))
