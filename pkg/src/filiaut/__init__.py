"""Automorphisms, local and 2-local automorphisms of the null-filiform
algebra ``mu0`` and the filiform associative algebras ``mu11`` .. ``mu14``."""

from .algebra import (
    AlgebraFamily,
    Family,
    StructureConstants,
    classify_profile,
    make_algebra,
    multiply,
    power_profile,
)
from .linalg import Matrix, invert, mat_vec
from .scalars import Q, nth_roots

__version__ = "0.1.0"
