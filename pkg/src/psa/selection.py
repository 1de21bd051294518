"""Choosing which adjacent sample eigenvalues to equalize.

Each information criterion turns the comparison between the full model and
the model with eigenvalues ``j`` and ``j + 1`` merged into a threshold on the
relative eigengap ``(l_j - l_{j+1}) / l_j``. The strategies below search the
``2^(p-1)`` PSA types exhaustively, by chaining thresholds, by agglomerative
clustering of eigenvalues, or by likelihood at a fixed number of blocks.
"""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .errors import SelectionError, SingularModelError, UndefinedThresholdError
from .family import (
    Composition,
    count_types_of_length,
    enumerate_types,
    types_of_length,
)
from .model import score

MAX_FIXED_D_CANDIDATES = 10**6


class CriterionKind(str, Enum):
    BIC = "bic"
    AIC = "aic"
    AICC = "aicc"
    NRT1 = "nrt1"
    NRT2 = "nrt2"

    @property
    def scorable(self):
        """Whether the criterion ranks whole models, not only eigenvalue pairs."""
        return self in (CriterionKind.BIC, CriterionKind.AIC, CriterionKind.AICC)


@dataclass(frozen=True)
class Criterion:
    """A criterion together with the sample context it is evaluated in."""

    kind: CriterionKind
    n: int
    p: int | None = None

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, CriterionKind) else str(self.kind).lower()
        object.__setattr__(self, "kind", CriterionKind(kind))
        if self.n < 2:
            raise SelectionError(f"criterion needs n >= 2, got {self.n}")
        if self.kind is CriterionKind.AICC and self.p is None:
            raise SelectionError("AICc needs the dimension p")

    @classmethod
    def for_summary(cls, kind, summary):
        return cls(CriterionKind(kind), summary.n, summary.p)

    def value(self, model_score):
        """Criterion value of a :class:`ModelScore`; ``inf`` where undefined."""
        if self.kind is CriterionKind.BIC:
            return model_score.bic
        if self.kind is CriterionKind.AIC:
            return model_score.aic
        if self.kind is CriterionKind.AICC:
            return math.inf if model_score.aicc is None else model_score.aicc
        raise SelectionError(f"{self.kind.value} only compares eigenvalue pairs, not models")

    def to_dict(self):
        return {"kind": self.kind.value, "n": self.n, "p": self.p}


def _resolve(criterion, summary):
    if isinstance(criterion, Criterion):
        return criterion
    return Criterion.for_summary(criterion, summary)


def _pair_threshold(penalty):
    # positive root of d^2/4 - (1 - e^a) d + 1 - e^a = 0; with x = e^a - 1 the
    # root 2(e^(a/2) sqrt(x) - x) equals 2 / (1 + sqrt(1 + 1/x)), which avoids
    # cancellation both for small penalties (large n) and large ones (AICc, small n)
    em1 = math.expm1(penalty)
    return 2.0 / (1.0 + math.sqrt(1.0 + 1.0 / em1))


def aicc_correction(n, p):
    """Per-pair AICc penalty ``(4n - 4) / ((n - p(p+3)/2)^2 - 1)``."""
    full = p * (p + 3) / 2.0
    if not n > full + 1:
        raise UndefinedThresholdError(
            f"AICc threshold needs n > p(p+3)/2 + 1 = {full + 1:g}, got n={n}"
        )
    return (4.0 * n - 4.0) / ((n - full) ** 2 - 1.0)


def threshold(criterion):
    """Relative eigengap below which two adjacent eigenvalues should be merged."""
    n = criterion.n
    kind = criterion.kind
    if kind is CriterionKind.BIC:
        return _pair_threshold(2.0 * math.log(n) / n)
    if kind is CriterionKind.AIC:
        return _pair_threshold(4.0 / n)
    if kind is CriterionKind.AICC:
        return _pair_threshold(aicc_correction(n, criterion.p))
    r = math.sqrt(2.0 / n)
    if kind is CriterionKind.NRT1:
        return 2.0 * r / (1.0 + r)
    return 4.0 * r / (1.0 + 2.0 * r)


def relative_gap(upper, lower):
    """``(upper - lower) / upper``, or ``None`` when ``upper <= 0``."""
    if upper <= 0:
        return None
    return (upper - lower) / upper


def relative_eigengaps(eigenvalues):
    ell = np.asarray(eigenvalues, dtype=float)
    return [relative_gap(ell[j], ell[j + 1]) for j in range(ell.shape[0] - 1)]


# Audit ---------------------------------------------------------------------

EQUALIZE, KEEP, UNDEFINED = "equalize", "keep", "undefined"


@dataclass(frozen=True)
class PairVerdict:
    j: int
    ell_j: float
    ell_j1: float
    delta: float | None
    threshold: float | None
    verdict: str

    def to_dict(self):
        return {
            "j": self.j,
            "ell_j": self.ell_j,
            "ell_j1": self.ell_j1,
            "delta": self.delta,
            "threshold": self.threshold,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class AuditReport:
    criterion: Criterion
    threshold: float | None
    pairs: list
    note: str | None = None

    @property
    def verdicts(self):
        return [pair.verdict for pair in self.pairs]

    def to_dict(self):
        return {
            "criterion": self.criterion.to_dict(),
            "threshold": self.threshold,
            "pairs": [pair.to_dict() for pair in self.pairs],
            "note": self.note,
        }


def audit(summary, criterion="bic", max_pairs=25):
    """Compare every leading adjacent eigenvalue pair with the criterion's threshold.

    Pairs ``j = 1 .. min(p - 1, max_pairs)`` are reported (1-based). A pair is
    ``undefined`` when ``l_j <= 0`` or when the criterion has no threshold for
    this sample size.
    """
    if max_pairs < 1:
        raise SelectionError(f"max_pairs must be at least 1, got {max_pairs}")
    criterion = _resolve(criterion, summary)
    note = None
    try:
        thr = threshold(criterion)
    except UndefinedThresholdError as exc:
        thr, note = None, str(exc)
    ell = summary.eigenvalues
    pairs = []
    for j in range(min(summary.p - 1, max_pairs)):
        delta = relative_gap(ell[j], ell[j + 1])
        if delta is None or thr is None:
            verdict = UNDEFINED
        else:
            verdict = EQUALIZE if delta < thr else KEEP
        pairs.append(
            PairVerdict(j + 1, float(ell[j]), float(ell[j + 1]), delta, thr, verdict)
        )
    return AuditReport(criterion, thr, pairs, note)


# Model selection -------------------------------------------------------------


@dataclass
class SelectionResult:
    """Outcome of a selection strategy.

    ``scores`` holds ``(Composition, ModelScore)`` for every candidate that
    could be scored; ``trajectory`` is the full candidate sequence for the
    hierarchical strategy.
    """

    chosen: Composition
    scores: list
    strategy: str
    criterion: Criterion | None
    trajectory: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    linkage: str | None = None

    @property
    def chosen_score(self):
        return dict(self.scores)[self.chosen]

    def to_dict(self):
        return {
            "strategy": self.strategy,
            "criterion": None if self.criterion is None else self.criterion.to_dict(),
            "linkage": self.linkage,
            "chosen": str(self.chosen),
            "n_candidates": len(self.scores),
            "scores": [s.to_dict() for _, s in self.scores],
            "trajectory": [str(g) for g in self.trajectory],
            "warnings": list(self.warnings),
        }


def _tie_key(value, gamma):
    return (value, gamma.d, gamma.parts)


def _score_candidates(summary, candidates):
    scored, skipped = [], 0
    for gamma in candidates:
        try:
            scored.append((gamma, score(summary, gamma)))
        except SingularModelError:
            skipped += 1
    return scored, skipped


def _argmin(scored, key):
    if not scored:
        raise SingularModelError(
            "no candidate type is non-singular; regularize the covariance first"
        )
    values = [(_tie_key(key(s), g), g) for g, s in scored]
    if all(math.isinf(v[0][0]) for v in values):
        raise SelectionError("the criterion is undefined for every candidate")
    return min(values)[1]


def _require_scorable(criterion):
    if not criterion.kind.scorable:
        raise SelectionError(
            f"{criterion.kind.value} is a pairwise rule and cannot rank whole models; "
            "use bic, aic or aicc"
        )


def _skip_warning(skipped):
    return [f"{skipped} singular candidate(s) skipped"] if skipped else []


def select_exhaustive(summary, criterion="bic"):
    """Score every type of dimension ``p`` and keep the criterion minimizer."""
    criterion = _resolve(criterion, summary)
    _require_scorable(criterion)
    scored, skipped = _score_candidates(summary, enumerate_types(summary.p))
    chosen = _argmin(scored, criterion.value)
    return SelectionResult(chosen, scored, "exhaustive", criterion,
                           warnings=_skip_warning(skipped))


def clusters_to_type(merge_flags):
    """Type obtained by merging pair ``j`` wherever ``merge_flags[j]`` is true."""
    parts, run = [], 1
    for merge in merge_flags:
        if merge:
            run += 1
        else:
            parts.append(run)
            run = 1
    parts.append(run)
    return Composition(tuple(parts))


def select_threshold_clustering(summary, criterion="bic"):
    """Merge every adjacent pair whose relative eigengap is below the threshold.

    Merges chain: ``l_1 ~ l_2`` and ``l_2 ~ l_3`` put all three in one block.
    A warning is attached for each block whose overall relative drop exceeds
    the threshold, since chaining can then join clearly distinct eigenvalues.
    """
    criterion = _resolve(criterion, summary)
    thr = threshold(criterion)
    ell = summary.eigenvalues
    gaps = relative_eigengaps(ell)
    gamma = clusters_to_type([g is not None and g < thr for g in gaps])
    warnings = []
    bounds = gamma.bounds
    for k in range(gamma.d):
        first, last = ell[bounds[k]], ell[bounds[k + 1] - 1]
        drop = relative_gap(first, last)
        if drop is not None and drop > thr:
            warnings.append(
                f"block {k + 1} (eigenvalues {bounds[k] + 1}-{bounds[k + 1]}) spans a "
                f"relative drop of {drop:.3f} > threshold {thr:.3f} through chained merges"
            )
    return SelectionResult(gamma, [(gamma, score(summary, gamma))], "threshold",
                           criterion, warnings=warnings)


def _pair_distance(upper, lower):
    if upper == lower:
        return 0.0
    gap = relative_gap(upper, lower)
    return math.inf if gap is None else gap


def linkage_distance(upper, lower, linkage):
    """Distance between two adjacent eigenvalue clusters (``upper`` holds the larger values).

    ``single`` takes the smallest relative eigengap over all cross pairs,
    ``centroid`` the relative eigengap between the cluster means.
    """
    if linkage == "single":
        return min(_pair_distance(a, b) for a in upper for b in lower)
    if linkage == "centroid":
        return _pair_distance(float(np.mean(upper)), float(np.mean(lower)))
    raise SelectionError(f"unknown linkage {linkage!r}; use 'single' or 'centroid'")


def hierarchical_trajectory(eigenvalues, linkage="centroid"):
    """Types visited by agglomerating adjacent eigenvalue clusters, full to isotropic.

    At each step the adjacent pair of clusters at minimal linkage distance is
    merged; ties go to the lowest index.
    """
    ell = [float(v) for v in eigenvalues]
    clusters = [[v] for v in ell]
    trajectory = [Composition((1,) * len(ell))]
    while len(clusters) > 1:
        dist = [linkage_distance(clusters[k], clusters[k + 1], linkage)
                for k in range(len(clusters) - 1)]
        k = int(np.argmin(dist))
        clusters[k : k + 2] = [clusters[k] + clusters[k + 1]]
        trajectory.append(Composition(tuple(len(c) for c in clusters)))
    return trajectory


def select_hierarchical(summary, criterion="bic", linkage="centroid"):
    """Score the ``p`` types along the agglomerative clustering trajectory."""
    criterion = _resolve(criterion, summary)
    _require_scorable(criterion)
    trajectory = hierarchical_trajectory(summary.eigenvalues, linkage)
    scored, skipped = _score_candidates(summary, trajectory)
    chosen = _argmin(scored, criterion.value)
    return SelectionResult(chosen, scored, "hierarchical", criterion,
                           trajectory=trajectory, warnings=_skip_warning(skipped),
                           linkage=linkage)


def select_fixed_d(summary, d):
    """Most likely type among those with exactly ``d`` distinct eigenvalues.

    No complexity penalty is needed since all candidates share ``kappa``.
    """
    p = summary.p
    if not 1 <= d <= p:
        raise SelectionError(f"need 1 <= d <= p, got d={d}, p={p}")
    count = count_types_of_length(p, d)
    if count > MAX_FIXED_D_CANDIDATES:
        raise SelectionError(
            f"C({p - 1}, {d - 1}) = {count} candidates exceeds the limit of "
            f"{MAX_FIXED_D_CANDIDATES}"
        )
    scored, skipped = _score_candidates(summary, types_of_length(p, d))
    chosen = _argmin(scored, lambda s: -s.log_likelihood)
    return SelectionResult(chosen, scored, "fixed-d", None,
                           warnings=_skip_warning(skipped))


def select(summary, strategy="hierarchical", criterion="bic", linkage="centroid", d=None):
    """Dispatch to one of the selection strategies by name."""
    if strategy == "exhaustive":
        return select_exhaustive(summary, criterion)
    if strategy == "threshold":
        return select_threshold_clustering(summary, criterion)
    if strategy == "hierarchical":
        return select_hierarchical(summary, criterion, linkage)
    if strategy == "fixed-d":
        if d is None:
            raise SelectionError("the fixed-d strategy needs d")
        return select_fixed_d(summary, d)
    raise SelectionError(f"unknown strategy {strategy!r}")

