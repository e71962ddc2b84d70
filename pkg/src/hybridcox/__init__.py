"""Ideal right-angled hyperbolic polyhedra, their reflection groups, and hybrid gluings."""

from .arithmetics import (
    ArithmeticConfig,
    ArithmeticityReport,
    FieldFingerprint,
    cycle_products,
    field_fingerprint,
    rational_detect,
    recheck_certificate,
    recheck_witness,
    test_arithmetic_rightangled,
)
from .combinatorics import (
    CombinatorialPolytope,
    antiprism,
    check_andreev,
    cube,
    edge_twist,
    glue,
    glue_antiprisms,
    is_isomorphic,
    isomorphism,
    prism,
    tetrahedron,
    twisted_antiprism,
)
from .errors import BudgetError, DomainError, HybridCoxError, InconsistencyError, SolverError
from .hybrid import (
    CoxeterPolygon,
    GluingSpec,
    HybridReport,
    LinkDescriptor,
    check_even_angle_interface,
    classify_link,
    glue_polygons,
    hybrid_verdict,
)
from .invariants import GramMatrix, gram, lobachevsky, volume_ideal
from .lattice import minimal_polynomial
from .pipeline import analyze
from .realization import Realization, SolverConfig, realize_ideal_right_angled, validate_realization

test_arithmetic_rightangled.__test__ = False

__version__ = "0.1.0"
