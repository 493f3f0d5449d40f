"""Cayley-Dickson multiplication tables and the finite geometry they carry."""

from .algebra import (
    CDElement,
    MultTable,
    SignedUnit,
    basis_conjugate,
    build_table,
    cd_basis_product,
    element_multiply,
    verify_subalgebra_nesting,
)
from .incidence import (
    ConfigParams,
    IncidenceStructure,
    IsomorphismWitness,
    collinearity_distance,
    count_pasch,
    grassmannian,
    is_binomial,
    isomorphic,
    validate_configuration,
)
from .unit_geometry import (
    Line,
    LineClass,
    Stratification,
    build_pg_model,
    classify_line,
    extract_configuration,
    extract_triples,
    stratify_points,
)
from .veldkamp import (
    Hyperplane,
    check_nesting,
    classify_hyperplane,
    enumerate_hyperplanes,
    veldkamp_space,
    verify_fine_structure,
)

__version__ = "0.1.0"
