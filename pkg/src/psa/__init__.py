"""Principal subspace analysis.

Gaussian models whose covariance has repeated eigenvalues, fitted by
block-averaging sample eigenvalues, with criteria and strategies for deciding
which eigenvalues to treat as equal and tools for interpreting the resulting
principal subspaces.
"""

from .errors import (
    ConvergenceError,
    DataError,
    PsaError,
    SelectionError,
    SingularModelError,
    UndefinedThresholdError,
)
from .family import (
    Composition,
    block_average,
    enumerate_types,
    hasse_edges,
    is_refinement,
    phi,
)
from .interpret import project_scores, rotate_block, sphere_sample, varimax
from .model import ModelScore, PsaModel, density_log, fit, kappa, log_likelihood, sample, score
from .selection import (
    AuditReport,
    Criterion,
    CriterionKind,
    SelectionResult,
    audit,
    select,
    select_exhaustive,
    select_fixed_d,
    select_hierarchical,
    select_threshold_clustering,
    threshold,
)
from .spectral import SpectralSummary, compute_moments, eigh, regularize, summarize

__version__ = "0.1.0"
