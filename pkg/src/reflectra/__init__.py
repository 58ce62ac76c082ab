"""reflectra: numerics for one-dimensional differential-reflection operators.

The package constructs the eigenfunctions of the operators

    T f(x) = f'(x) + (A'/A)(x)(f(x) - f(-x))/2 - eps*rho*f(-x)

for admissible weights A (power, hyperbolic and tabulated families), the
Bessel-kernel transmutation pair and explicit intertwining kernels, the
generalized Fourier transform with its gapped spectral measure, and a
verification suite that checks the structural identities (boundedness,
positivity, inversion, bilinear pairing, exponential type) at desk scale.
"""

from .backend import BACKEND_NAME
from .families import ChebliFamily, check_hypotheses
from .sampling import SampledFunction, symmetric_grid

__all__ = [
    "BACKEND_NAME",
    "ChebliFamily",
    "SampledFunction",
    "check_hypotheses",
    "symmetric_grid",
]

__version__ = "0.1.0"
