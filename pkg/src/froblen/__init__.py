"""froblen: exact Frobenius-semilinear algebra in characteristic p.

Computes lengths of local cohomology modules of diagonal hypersurfaces
in the F-module and D-module senses, via exact finite-field linear
algebra: stable parts, flags of Frobenius-stable subspaces, cycle
decompositions, Fedder's F-purity criterion, and closed-form bounds.
"""

from .errors import (
    FroblenError,
    PolyParseError,
    PreconditionError,
    ResourceLimitError,
    UnsupportedDomainError,
)
from .ff import (
    ExtField,
    ExtFieldElem,
    FieldElem,
    binom_mod_p,
    euler_phi,
    ext_field,
    ext_frobenius,
    is_prime,
    legendre,
    multinomial_mod_p,
    primes_in_range,
)
from .poly import (
    NEG_INF,
    SparsePoly,
    UniPoly,
    fedder_is_f_pure,
    format_poly,
    parse_poly,
    poly_pow,
    uni_frobenius,
)
from .semilinear import (
    FpDomain,
    FpmDomain,
    IterateMatrix,
    PolyDomain,
    Subspace,
    TwistedMatrix,
    apply,
    change_basis,
    cyclic_det3,
    finite_order,
    flag_length,
    is_nilpotent,
    is_triangularizable_nonzero_diag,
    iterate,
    iterate_pow,
    krylov_closure,
    matrix_from_json,
    matrix_to_json,
    reduced_det3_expansion,
    stable_subspace,
    verify_degree_dominance,
)
from .fermat import (
    FermatContext,
    FrobeniusOrbit,
    InverseMonomial,
    WeightedInverseMonomial,
    basis,
    cycles,
    frobenius_image,
    full_matrix,
    orbit_matrix,
    stable_dim_by_count,
    weighted_fermat7_basis,
    weighted_fermat7_cycle_matrix,
    weighted_frobenius_image,
    weighted_nilpotency_steps,
)
from .lengths import (
    LengthReport,
    bernstein_bound,
    calabi_yau_d_length,
    curve_locus_upper_bound,
    d_length_isolated,
    fermat7_expected_table,
    fermat7_lengths,
    hypersurface_bound,
    weighted_fermat7_lengths,
)

__version__ = "0.1.0"
