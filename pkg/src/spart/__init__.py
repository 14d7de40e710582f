"""Exact combinatorics of quantum toroidal superalgebra modules.

Subpackages compute module bases (s-partitions, plane s-partitions with
boundaries), symbolic eigenvalues and ladder coefficients, defining-relation
checks at small size, and graded characters with cross-validated formulas.
"""

from .parity_core import Parity
from .exact_math import CharSeries, Monomial, ScalarExpr, SpectralFunction
from .spart_states import FockFamily, FockState, GenPartition
from .plane_states import PlaneState, boundary_vacuum, enumerate_plane
from .characters import (
    char_direct_fock, char_direct_plane, char_fock_fermionic,
    char_fock_rewritten, char_macmahon_product, char_restricted_product,
    char_tableaux, char_vector_window,
)

__all__ = [
    "CharSeries", "FockFamily", "FockState", "GenPartition", "Monomial",
    "Parity", "PlaneState", "ScalarExpr", "SpectralFunction",
    "boundary_vacuum", "char_direct_fock", "char_direct_plane",
    "char_fock_fermionic", "char_fock_rewritten", "char_macmahon_product",
    "char_restricted_product", "char_tableaux", "char_vector_window",
    "enumerate_plane",
]
__version__ = "0.1.0"
