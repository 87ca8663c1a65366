"""
Prox-projections on a box and on simplexes
==========================================

Every MCSA step is a prox-projection ``argmin <v, z> + B(z, x)``. On a box
with ``xᵀx`` it is a clamp; on simplexes with negative entropy it is a
multiplicative-weights update.
"""

import numpy as np

from mcsa import Box, NegativeEntropy, ProductOfSimplexes, ScaledEuclidean, prox_project

# a gradient-like vector pushing the first coordinate up and the second down
box = Box.unit(2)
x = np.array([0.5, 0.5])
v = np.array([-0.4, 1.6])
print("box step:", prox_project(ScaledEuclidean(1.0), box, x, v))  # [0.7, 0.0] after clamping

# the same vector on a 2-simplex: mass moves toward the cheaper coordinate
simplex = ProductOfSimplexes((2,))
z = prox_project(NegativeEntropy(), simplex, x, v)
print("simplex step:", z, "sum", z.sum())
print("closed form:", x * np.exp(-v) / np.sum(x * np.exp(-v)))

# products of simplexes are handled group by group
blocks = ProductOfSimplexes((2, 3))
y = blocks.center()
print("two blocks:", prox_project(NegativeEntropy(), blocks, y, np.array([1.0, 0.0, 0.0, 2.0, 0.0])))
