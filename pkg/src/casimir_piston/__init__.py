"""Casimir force on a piston I x N with general U(2) x U(2) point interactions.

The longitudinal problem is solved through the one-dimensional scattering
data of the piston wall; the transverse manifold enters only through its
Laplacian spectrum.  Forces are evaluated by mode-wise quadrature of the
logarithmic derivative of the secular function on the imaginary axis.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .boundary import *  # noqa: F401,F403
from .scattering import *  # noqa: F401,F403
from .secular import *  # noqa: F401,F403
from .asymptotics import *  # noqa: F401,F403
from .spectra import *  # noqa: F401,F403
from .zeta_force import *  # noqa: F401,F403
