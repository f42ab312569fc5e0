"""Exact verification of degenerations and non-degenerations between
Jordan superalgebra structures.

The package works over Q throughout.  `exact` holds the polynomial and
Laurent arithmetic, `superalgebra` the graded structures and their
identities, `action` the basis-change action, `degeneration` the witness
curves, `groebner` the ideal machinery, `certificate` the non-degeneration
certificates, and `formats` the text file grammars.  The `jsdeg` command
(see `cli`) drives all of it.
"""

from .action import BasisChange, SingularMatrixError, act, block_determinants
from .certificate import (
    CERTIFY_LIMITS,
    ClosedSet,
    FeasibilityStatus,
    MembershipResult,
    Outcome,
    RepresentabilityResult,
    StabilityResult,
    StabilityStatus,
    Verdict,
    assemble_verdict,
    b_stability,
    borel_coefficients,
    certify_family,
    certify_pair,
    identity_locus_basis,
    membership,
    representability,
)
from .degeneration import (
    Witness,
    WitnessReport,
    WitnessStatus,
    orbit_equal_test,
    scaling_witness,
    verify_witness,
)
from .exact import LaurentPoly, MPoly, PolyParseError, parse_laurent, parse_poly
from .formats import (
    AlgebraValidationError,
    CatalogueEntry,
    CertificateFile,
    FileFormatError,
    ReferenceTable,
    WitnessFile,
    expand_printed_equation,
    load_catalogue,
    load_shipped_certificates,
    load_shipped_tables,
    parse_algebra_file,
    parse_certificate_file,
    parse_reference_table,
    parse_witness_file,
    serialize_algebra,
    serialize_certificate,
)
from .groebner import (
    GroebnerLimits,
    Ideal,
    MonomialOrder,
    ResourceLimitExceeded,
    Triviality,
    is_trivial,
    saturate_by_unit,
)
from .superalgebra import (
    SuperStructure,
    canonical_triples,
    canonical_variables,
    check_jordan_superidentity,
    check_supercommutativity,
    generic_structure,
    jordan_identity_polynomials,
)

__version__ = "1.0.0"
