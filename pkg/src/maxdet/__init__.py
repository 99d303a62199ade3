"""maxdet: exact tools for maximal-determinant {-1,+1} matrices."""

from .core import (
    BlockProfile,
    SignMatrix,
    apply_equivalence_op,
    block_profile,
    determinant,
    excess,
    gram,
    random_equivalent,
    random_sign_matrix,
    row_sum_triples,
)
from .canon import (
    DUAL_PAIR,
    SELF_DUAL,
    are_equivalent,
    automorphism_count,
    canonical_key,
    duality_status,
)
from .errors import (
    DimensionError,
    InvariantError,
    MaxdetError,
    PreconditionError,
    RegistryError,
    StructureError,
)

__version__ = "0.1.0"
