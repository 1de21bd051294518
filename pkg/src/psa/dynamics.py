"""Selection frequencies of exhaustive BIC selection as the sample size grows."""

from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .family import MAX_ENUMERATION_P, Composition
from .model import PsaModel, sample
from .selection import Criterion, select_exhaustive
from .spectral import summarize


@dataclass(frozen=True)
class DynamicsSpec:
    true_eigenvalues: tuple
    n_grid: tuple
    replications: int = 20
    seed: int = 0

    def __post_init__(self):
        lam = np.asarray(self.true_eigenvalues, dtype=float)
        if lam.ndim != 1 or lam.size == 0 or np.any(lam <= 0) or np.any(np.diff(lam) > 0):
            raise DataError("true eigenvalues must be positive and non-increasing")
        if lam.size > MAX_ENUMERATION_P:
            raise DataError(f"p={lam.size} exceeds the exhaustive enumeration limit")
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or grid[0] < 2 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise DataError("n_grid must be strictly ascending sample sizes >= 2")
        if self.replications < 1:
            raise DataError("replications must be at least 1")
        object.__setattr__(self, "true_eigenvalues", tuple(lam.tolist()))
        object.__setattr__(self, "n_grid", grid)


@dataclass
class DynamicsResult:
    spec: DynamicsSpec
    counts: dict = field(default_factory=dict)
    mean_bic: dict = field(default_factory=dict)

    def modal(self, n):
        """Most frequently chosen type at sample size ``n`` (ties: coarsest, then lexicographic)."""
        counts = self.counts[n]
        return min(counts, key=lambda g: (-counts[g], g.d, g.parts))

    def frequency(self, n, gamma):
        return self.counts[n].get(gamma, 0) / self.spec.replications

    def to_dict(self):
        return {
            "true_eigenvalues": list(self.spec.true_eigenvalues),
            "replications": self.spec.replications,
            "seed": self.spec.seed,
            "rows": [
                {
                    "n": n,
                    "modal": str(self.modal(n)),
                    "counts": {str(g): c for g, c in sorted(self.counts[n].items())},
                    "mean_bic": {str(g): v for g, v in sorted(self.mean_bic[n].items())},
                }
                for n in self.spec.n_grid
            ],
        }


def simulate_dynamics(spec):
    """Repeat exhaustive BIC selection on Gaussian samples with diagonal covariance.

    Replication ``r`` at grid position ``i`` draws from seed ``(seed, i, r)``.
    """
    lam = np.asarray(spec.true_eigenvalues)
    p = lam.size
    truth = PsaModel(Composition((1,) * p), np.zeros(p), lam, np.eye(p))
    result = DynamicsResult(spec)
    for i, n in enumerate(spec.n_grid):
        counts = Counter()
        bic_sum = defaultdict(float)
        for r in range(spec.replications):
            x = sample(truth, n, seed=(spec.seed, i, r))
            summary = summarize(x)
            sel = select_exhaustive(summary, Criterion("bic", n, p))
            counts[sel.chosen] += 1
            for gamma, s in sel.scores:
                bic_sum[gamma] += s.bic
        result.counts[n] = dict(counts)
        result.mean_bic[n] = {g: v / spec.replications for g, v in bic_sum.items()}
    return result
