"""
Product states and how to detect them
=====================================

A bipartite state is a product when it factors as ``rho (x) delta``. We
check that by rebuilding the state from its two marginals and measuring the
trace-norm gap. Mutual information gives an independent second opinion.
"""

# %%
import numpy as np

from prodchan import states

# %%
# A random product of a qubit state and a qutrit state. Its marginals are the
# factors, so the reconstruction gap vanishes.
rho = states.random_density(2, 2, seed=0)
delta = states.random_density(3, 1, seed=1)
prod = states.product_state(rho, delta)
print("product   distance", states.product_distance(prod))
print("product   mutual information", states.mutual_information(prod))

# %%
# The Bell state has maximally mixed marginals; ``I/4`` is far from it.
bell = states.bell_state()
print("Bell      distance", states.product_distance(bell))
print("Bell      mutual information", states.mutual_information(bell), "= 2 ln 2 =", 2 * np.log(2))

# %%
# Classical correlations are still correlations.
classical = states.DensityMatrix(np.diag([0.5, 0, 0, 0.5]), (2, 2))
print("classical distance", states.product_distance(classical))
print("classical mutual information", states.mutual_information(classical), "= ln 2")

# %%
# A tiny admixture of entanglement is caught at the default tolerance.
two_qubit = states.product_state(rho, states.random_density(2, 2, seed=2))
mixed = states.DensityMatrix(0.999 * two_qubit.mat + 0.001 * bell.mat, (2, 2))
print("0.1% Bell admixture: distance", states.product_distance(mixed), "product?", states.is_product(mixed))
