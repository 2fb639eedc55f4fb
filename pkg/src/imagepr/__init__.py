"""Exact finite machinery for an image partition regularity counterexample."""

from .colouring import (
    STAGED,
    Colour,
    ResidueTable,
    Staged2Adic,
    class_colour,
    colour_of,
    stage_simulation,
    staged_colour,
    two_adic_valuation,
)
from .linalg import (
    DependenceResult,
    ExactMatrix,
    Rational,
    column_space_equal,
    dependence_matrix,
    format_matrix,
    parse_matrix,
    rank,
    row_basis,
    rref,
)
from .systems import (
    SystemInstance,
    SystemKind,
    build_system,
    coefficient_sequence,
    modular_inverse,
    scale_to_second,
    solve_coefficient,
)
from .verify import (
    ColumnsCertificate,
    Exhausted,
    ObstructionReport,
    Witness,
    columns_condition,
    find_monochromatic_image,
    schur_exhaustive,
    validate_witness,
    verify_B_equality,
    verify_image_equality_over_Q,
    verify_obstruction,
)

__version__ = "0.1.0"
