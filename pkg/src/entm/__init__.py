"""Two-qubit entanglement toolkit: REE versus negativity."""

from .errors import (
    BadRank,
    DegenerateDelta,
    DomainError,
    EntmError,
    InvalidState,
    NoBracket,
    NonConvergence,
    NotEntangled,
    NotHermitian,
    ParseError,
    RankDeficient,
    RankMismatch,
    SamplingExhausted,
    SupportMismatch,
)
from .qcore import (
    check_density,
    partial_transpose,
    random_density,
    random_pure,
    relative_entropy,
    von_neumann_entropy,
)
from .measures import (
    concurrence,
    entanglement_of_formation,
    log_negativity,
    negativity,
    ppt_projection,
    ree_numeric,
)
from .gh import p_opt, p_opt_approx, ree_ogh, solve_gh_css
from .inverse import boundary_css, inverse_pair, ree_inverse, rho_from_css, sample_boundary
from .extremal import check_extremal_rank2

__version__ = "0.1.0"
