"""Clark-Aleksandrov measures of rational inner functions on the bidisc."""

from .polyalg import (
    GaussianRational,
    ParseError,
    Poly1,
    Poly2,
    PolynomialError,
    parse_poly,
    poly1_roots,
    poly_to_str,
    reflect,
)
from .rif import (
    RationalInnerFunction,
    SingularPointError,
    UnstableDenominatorError,
    build,
    fav_rif,
    monomial_rif,
    torus_singularities,
    verify_inner,
)
from .clark import (
    BranchDegeneracyError,
    ClarkMeasureModel,
    CurveBranch,
    DegenerateLine,
    InvalidRIFError,
    build_model,
    cauchy_transform,
    clark_support,
    degenerate_components,
    poisson,
    v_operator,
    verify_clark_identity,
)
from .spaces import (
    DivergentSliceError,
    HbCertificate,
    MembershipVerdict,
    OrthogonalityResult,
    RationalFunction,
    cauchy_kernel,
    dbr_kernel,
    h2_classify,
    hb_membership_certificate,
    model_space_orthogonality,
    slice_integral_affine,
)
from .groebner import (
    ALL_ORDERS,
    GroebnerBasis,
    L2IdealVerdict,
    MonomialOrder,
    buchberger,
    ideal_member,
    l2_ideal_test,
    normal_form,
)
from .compare import (
    CompareOptions,
    ComparisonVerdict,
    compare,
    proportionality_constant,
)

__version__ = "0.1.0"
