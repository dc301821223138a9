"""Graded Betti tables of toric embeddings and explicit Koszul kernel bases."""

from .errors import NotNormalWarning, ToricBettiError
from .linalg import FieldSpec, SparseMatrix, kernel_basis, rank
from .polytope import (
    PointSet,
    Polytope,
    box,
    dilate,
    hull_facets,
    interior_lattice_points,
    interior_profile,
    is_normal,
    lattice_points,
    lattice_width,
    load_polytope,
    minkowski_points,
    parse_polytope,
    polytope_from_points,
    simplex,
    translations_into,
)
from .koszul import (
    BettiTable,
    GradedModuleSpec,
    betti_table,
    build_delta,
    build_delta_i,
    dual_row_check,
    intersect_kernels,
    kernel_dim_delta,
    koszul_cohomology_dim,
)
from .basis import (
    LatticeOrder,
    Monomial,
    TensorElement,
    WedgeTensorElement,
    hypercube_basis,
    iota,
    leading_extract,
    leading_extract_tensor,
    make_xA,
    make_xP,
    monomials,
    support,
    support_i,
    verify_basis_theorem,
)
from .formulas import (
    NOT_COVERED,
    RowNProfile,
    binomial,
    generic_kernel_dim,
    profile_from_polytope,
    row_n_entry,
    segment_kernel_dim,
    tetragonal_row,
    veronese_first_entry,
    width2_entries,
)

__version__ = "0.1.0"
