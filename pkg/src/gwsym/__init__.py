"""Symmetric Grothendieck-Witt and Witt rings of finite local commutative
rings with residue field F2, computed exactly from an explicit square-class
presentation, together with brute-force congruence oracles for every
constructive ingredient."""

from .gw import (
    AbelianGroupInfo,
    GWElement,
    gw_group,
    induced_map,
    match_basis,
    multiply,
    pfister1,
    pfister2,
    preferred_basis,
    quotient_by_elements,
    structure_table,
    symmetrisation_element,
    tower_check,
    witt_group,
)
from .oracle import (
    GoodMatrixCertificate,
    RingMatrix,
    SymMatrix,
    classify_small,
    congruent_bfs,
    diagonalize,
    factor_into_good,
    is_good_matrix,
    odd_relation_matrix,
    oracle_relation_check,
    orthogonal_group,
)
from .relations import (
    Presentation,
    Relation,
    build_presentation,
    enumerate_even_relations,
    enumerate_odd_relations,
)
from .rings import (
    CapExceededError,
    NonUnitError,
    RingElement,
    RingSpec,
    SpecMismatchError,
    SpecParseError,
    parse_ring_spec,
)
from .square_classes import (
    SquareClassGroup,
    class_projection,
    compute_square_classes,
    f2_basis,
)

__version__ = "0.1.0"

__all__ = [
    "AbelianGroupInfo",
    "CapExceededError",
    "GWElement",
    "GoodMatrixCertificate",
    "NonUnitError",
    "Presentation",
    "Relation",
    "RingElement",
    "RingMatrix",
    "RingSpec",
    "SpecMismatchError",
    "SpecParseError",
    "SquareClassGroup",
    "SymMatrix",
    "build_presentation",
    "class_projection",
    "classify_small",
    "compute_square_classes",
    "congruent_bfs",
    "diagonalize",
    "enumerate_even_relations",
    "enumerate_odd_relations",
    "f2_basis",
    "factor_into_good",
    "gw_group",
    "induced_map",
    "is_good_matrix",
    "match_basis",
    "multiply",
    "odd_relation_matrix",
    "oracle_relation_check",
    "orthogonal_group",
    "parse_ring_spec",
    "pfister1",
    "pfister2",
    "preferred_basis",
    "quotient_by_elements",
    "structure_table",
    "symmetrisation_element",
    "tower_check",
    "witt_group",
]
