"""
Jacobi kernels library package.

Numerical layers for the perturbed Jacobi unitary ensemble, bottom-up:
special functions, the weight, orthogonal polynomials and K_n, scaling
limits, the Painleve layer and the DPP sampler.
"""

# Package imports - no sys.path manipulation needed
# Modules within this package should use relative imports:
# - from . import weight
# - from .orthopoly import KernelEvaluator

__all__ = [
    'errors',
    'kernel_utils',
    'specfun',
    'weight',
    'orthopoly',
    'limits',
    'painleve',
    'sampler',
    'result_store',
    'worker_pool',
]
