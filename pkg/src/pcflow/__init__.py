"""Numerical laboratory for the pluriclosed flow of Hermitian metrics on
flat complex tori: curvature/torsion quantities in coordinates, flow
integration, and the functional/monotonicity diagnostics that go with them.
"""

from .grid import ComplexTorusGrid, make_grid

__all__ = ["ComplexTorusGrid", "make_grid"]
__version__ = "0.1.0"
