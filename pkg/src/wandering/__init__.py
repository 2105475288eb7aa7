"""Wandering subspaces of doubly commuting shift tuples on truncated polydisc spaces."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ArgumentError,
    ConfigurationError,
    GridMismatchError,
    IndexRangeError,
    NotApplicableError,
    WanderingError,
)
from .spaces import (  # noqa: E402
    BERGMAN,
    CUSTOM,
    DIRICHLET,
    HARDY,
    SpaceModel,
    TruncationGrid,
    bergman,
    dirichlet,
    enumerate_basis,
    from_isometric,
    hardy,
    inner_product,
    make_model,
    monomial,
    norm,
    polynomial,
    to_isometric,
    univariate,
)
from .operators import (  # noqa: E402
    OperatorMatrix,
    ShiftTuple,
    adjoint,
    check_concave,
    check_doubly_commuting,
    check_shimorin,
    commutes_with_modulus,
    shift_compressed,
    shift_exact,
)
from .subspaces import (  # noqa: E402
    ShiftRestriction,
    Subspace,
    check_wandering,
    from_generators,
    intersect,
    invariant_closure,
    ominus,
    principal_angles,
    reducing_check,
    wandering_subspace,
    wold,
)

__all__ = [name for name in dir() if not name.startswith("_")]
