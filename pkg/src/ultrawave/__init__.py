"""Wavelet analysis and spectral equation solving on measured ball trees."""

from .errors import (
    AnchorError,
    DegenerateBallError,
    DivergenceError,
    DomainError,
    FileFormatError,
    IllConditionedError,
    ParameterError,
    SpaceValidationError,
    UltrawaveError,
    UnknownBallError,
    UnsolvableError,
    UnsupportedTailError,
)
from .trees import (
    BallTree,
    RegularSubtree,
    build_padic_tree,
    full_subtree,
    tree_from_leaf_measures,
    validate_regular_subtree,
)
from .wavelets import (
    TestFunction,
    Wavelet,
    WaveletExpansion,
    analyze,
    evaluate,
    normalized_constant,
    synthesize,
    tree_wavelets,
    wavelet_basis,
)
from .operators import (
    ConvergenceReport,
    HomogeneousSymbol,
    Spectrum,
    TableSymbol,
    apply_dense,
    check_convergence,
    eigenvalue,
    operator_matrix,
    spectrum,
)
from .products import (
    TOP,
    AugmentedFactor,
    Edge,
    MultiOperator,
    MultiWavelet,
    ProductSpace,
    decreasing_edges,
    multi_eigenvalue,
    multiwavelet_basis,
    product,
)
from .distributions import (
    GeneralizedFunction,
    LizorkinSeries,
    apply_operator,
    eval_extended,
    eval_on_char,
    eval_on_char_nd,
    eval_on_product,
    eval_on_test,
    lizorkin_pair,
)
from .solver import (
    CauchyProblem,
    Characteristic,
    FreeParam,
    ResidualReport,
    Solution,
    characteristics,
    check_solvability,
    solve,
)

__version__ = "0.1.0"
