"""Linear maps on M_d: representations, positivity, spectra and generated state sets."""
from .analysis import (
    BiorthDecomp,
    ExampleMapSpec,
    SpectrumReport,
    adapted_invariant_basis,
    biorthonormal_decomposition,
    example_map,
    is_completely_copositive,
    is_completely_positive,
    kraus_from_choi,
    positivity_falsify,
    predicted_eigenvalues,
    spectrum,
)
from .errors import (
    BasisError,
    DimensionError,
    InBall,
    NonDiagonalizable,
    NotAProjection,
    NotCP,
    NumericalError,
    PosmapError,
    SpecError,
)
from .maprep import (
    AForm,
    ChoiMatrix,
    KrausForm,
    TransferMatrix,
    apply,
    compose,
    dual,
    identity_map,
    is_selfadjoint,
    is_trace_preserving,
    is_unital,
    map_inner,
    realign,
    reshuffle,
    to_aform,
    to_choi,
    to_transfer,
    transpose_map,
    unreshuffle,
)
from .matspace import (
    OrthonormalBasis,
    fourier_diagonal_basis,
    gell_mann_traceless,
    gell_mann_basis,
    hs_inner,
    matrix_unit_basis,
    projector,
    purity,
    random_density,
    random_pure_state,
)
from .stateclasses import (
    ProjectionSpec,
    Witness,
    ball_map,
    ball_membership,
    ball_witness,
    cone_membership,
    invariant_state,
    isotropic_map,
    isotropic_projectors,
    pinching,
    projection_map,
    projection_membership,
    werner_map,
    werner_projectors,
)

__version__ = "0.1.0"
