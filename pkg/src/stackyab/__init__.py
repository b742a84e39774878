"""Finite-scale computational toolkit for central extensions, crossed modules,
true commutators, stacky abelianization, Cartan-matrix fundamental groups and
Artin-Schreier classification over small finite fields."""

__version__ = "0.1.0"

from .groups import (  # noqa: F401
    FiniteAbelian,
    FiniteGroup,
    GroupHom,
    Subgroup,
    abelianization,
    alternating,
    center,
    commutator_subgroup,
    commutator_width,
    cyclic,
    dihedral,
    direct_product,
    find_isomorphism,
    from_permutations,
    from_table,
    heisenberg,
    identity_hom,
    inclusion_hom,
    is_perfect,
    quaternion8,
    quotient,
    sl2,
    subgroup_generated,
    symmetric,
    trivial,
    trivial_hom,
)

from .errors import (  # noqa: F401
    AxiomFailure,
    CapExceeded,
    Deadline,
    DeadlineExceeded,
    MAX_COHOMOLOGY_ORDER,
    MAX_ORDER,
    NO_DEADLINE,
)

from .snf import (  # noqa: F401
    SNFResult,
    cokernel_structure,
    invariant_factors_of_diagonal,
    smith_normal_form,
)

from .cohomology import (  # noqa: F401
    CentralExtension,
    Cocycle2,
    CohomologyGroup,
    DualityReport,
    RestrictionMap,
    coboundary,
    cocycle_from_extension,
    extension_from_cocycle,
    perfect_duality_check,
    qz_cohomology,
    restriction_map,
    schur_multiplier,
    second_cohomology,
)

from .crossed import (  # noqa: F401
    AxiomCheck,
    CheckReport,
    CrossedModule,
    FirstIsoResult,
    QuotientGroupoid,
    StableBracket,
    check_crossed_module,
    check_strictly_stable,
    conjugation_module,
    first_iso,
    inclusion_module,
    quotient_groupoid,
    restriction_of_extension,
    stable_from_lift,
    trivial_module,
)

from .truecomm import (  # noqa: F401
    AunResult,
    P1Report,
    P3Report,
    StackyAbelianization,
    TrueCommutatorResult,
    aun,
    stacky_abelianization,
    true_commutator,
    universal_factorization,
    verify_p1,
    verify_p3,
)

from .rootdata import (  # noqa: F401
    CartanMatrix,
    SimplyConnectedReport,
    cartan_matrix,
    cartan_types,
    fundamental_group_ss,
    simply_connected_check,
)

from .artin_schreier import (  # noqa: F401
    ASClass,
    BiPoly,
    Fq,
    FqPoly,
    as_map,
    as_reduce,
    classify_primitive,
    field_create,
    frobenius_character,
    is_primitive,
    pdisc_check,
)

from .groupio import (  # noqa: F401
    cocycle_from_spec,
    cocycle_to_spec,
    group_from_spec,
    group_to_spec,
    xmod_from_spec,
    xmod_to_spec,
)
