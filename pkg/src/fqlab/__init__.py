"""fqlab: finite-field harmonic analysis laboratory.

Exact Gauss/Kloosterman/Bessel sums, Mellin transforms on split and twisted
tori, Weyl-equivariant trace data and its centrality checker, Deligne-Lusztig
induction to GL_n(F_q) for n <= 3, and exhaustive coset-sum vanishing sweeps.
"""

from fqlab._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
