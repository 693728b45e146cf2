"""Exact combinatorics of nilpotent Higgs components on weighted projective lines.

Subpackages
-----------
``starlattice``
    Degree lattice, normal forms, section counts.
``ktheory``
    Numerical Grothendieck lattice, Euler form, positivity, slopes.
``catalog``
    Labels for rigid indecomposable sheaves, Hom/Ext dimensions, twists.
``components``
    Labels and enumeration of irreducible components of the nilpotent locus.
``crystal``
    Operators indexed by rigid sheaves, graphs, axiom checks, connectivity.
``oracle``
    Randomized exact-linear-algebra models validating the combinatorics.
``cli``
    Command-line interface (`loopcrystal`).
"""

from .starlattice import LElement, WeightData

__all__ = ["LElement", "WeightData"]

__version__ = "0.1.0"
