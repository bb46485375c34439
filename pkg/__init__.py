"""
Jacobi Kernels - Perturbed Jacobi Ensemble Experiments

Christoffel-Darboux kernels of the weight (1 - x^2)^beta (t^2 - x^2)^alpha h(x),
their bulk, hard-edge and double-scaling limits, the Painleve system behind
the transition kernel and an exact sampler for the point process.
"""

__version__ = "0.1.0"

# Avoid imports here to prevent circular dependencies
# Modules should be imported directly when needed
