"""Computer-assisted proof that the compact packing of discs of radius 1 and
r = 0.5451510421... has the highest density among all packings of the two
sizes.

The chain is: certified constants, a vertex-balance enumeration, derivative
bounds near the tangent triangles, and an interval branch and bound over all
remaining Delaunay triangles.
"""

__version__ = "0.1.0"

from .certificate import FAIL, NOT_RUN, PASS, Certificate  # noqa: E402
from .ival import Interval  # noqa: E402

__all__ = ["Certificate", "FAIL", "Interval", "NOT_RUN", "PASS", "__version__"]
