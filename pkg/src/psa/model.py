"""The PSA Gaussian model: closed-form fit, complexity, scores and sampling.

A PSA model of type ``gamma`` is a Gaussian whose covariance
``Q diag(lambda_1 I_{gamma_1}, ..., lambda_d I_{gamma_d}) Q^T`` has ``d``
distinct eigenvalues with multiplicities ``gamma``. Its maximum-likelihood
estimate averages the sample covariance eigenvalues block by block and keeps
the sample eigenvectors.
"""

from dataclasses import dataclass
import json
import math

import numpy as np

from . import _random
from .errors import DataError, SingularModelError
from .family import Composition, as_composition, block_average

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class PsaModel:
    """Fitted PSA parameters.

    Attributes
    ----------
    gamma : Composition
    mean : ndarray, shape (p,)
    block_eigenvalues : ndarray, shape (d,)
        Non-increasing and strictly positive.
    basis : ndarray, shape (p, p)
        Orthogonal; columns grouped into frames by ``gamma``.
    n : int
        Sample count used by the fit (0 for a model built by hand).
    """

    gamma: Composition
    mean: np.ndarray
    block_eigenvalues: np.ndarray
    basis: np.ndarray
    n: int = 0

    def __post_init__(self):
        gamma = as_composition(self.gamma)
        object.__setattr__(self, "gamma", gamma)
        mean = np.asarray(self.mean, dtype=float)
        lam = np.asarray(self.block_eigenvalues, dtype=float)
        basis = np.asarray(self.basis, dtype=float)
        p = gamma.p
        if mean.shape != (p,) or lam.shape != (gamma.d,) or basis.shape != (p, p):
            raise DataError(
                f"shape mismatch for type {gamma}: mean {mean.shape}, "
                f"eigenvalues {lam.shape}, basis {basis.shape}"
            )
        if not np.all(lam > 0):
            raise SingularModelError("block eigenvalues must be strictly positive")
        if np.any(np.diff(lam) > 0):
            raise DataError("block eigenvalues must be non-increasing")
        if np.max(np.abs(basis.T @ basis - np.eye(p))) > 1e-8:
            raise DataError("basis is not orthogonal")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "block_eigenvalues", lam)
        object.__setattr__(self, "basis", basis)

    @property
    def p(self):
        return self.gamma.p

    @property
    def d(self):
        return self.gamma.d

    @property
    def frames(self):
        """Orthonormal frames ``Q_1, ..., Q_d`` (0-based list)."""
        b = self.gamma.bounds
        return [self.basis[:, b[k] : b[k + 1]] for k in range(self.d)]

    @property
    def eigenvalues(self):
        """Covariance eigenvalues with multiplicity, length ``p``."""
        return np.repeat(self.block_eigenvalues, self.gamma.parts)

    @property
    def covariance(self):
        return (self.basis * self.eigenvalues) @ self.basis.T

    @property
    def noise_variance(self):
        """Variance of the isotropic noise term, the smallest block eigenvalue."""
        return float(self.block_eigenvalues[-1])

    @property
    def scales(self):
        """Latent scaling factors ``sqrt(lambda_k - lambda_d)`` for ``k < d``."""
        lam = self.block_eigenvalues
        return np.sqrt(lam[:-1] - lam[-1])

    @property
    def boundary_degenerate(self):
        """True when two adjacent blocks share an eigenvalue.

        Such a fit lies on the closure of the type rather than inside it.
        """
        return bool(np.any(np.diff(self.block_eigenvalues) == 0))

    def projector(self, k):
        q = self.frames[k]
        return q @ q.T

    def with_frame(self, k, frame):
        """Copy of the model with frame ``k`` replaced by another basis of the same subspace."""
        frame = np.asarray(frame, dtype=float)
        b = self.gamma.bounds
        if frame.shape != (self.p, self.gamma[k]):
            raise DataError(f"frame {k} must have shape {(self.p, self.gamma[k])}")
        basis = self.basis.copy()
        basis[:, b[k] : b[k + 1]] = frame
        return PsaModel(self.gamma, self.mean, self.block_eigenvalues, basis, self.n)

    def to_dict(self):
        return {
            "gamma": list(self.gamma.parts),
            "mean": self.mean.tolist(),
            "block_eigenvalues": self.block_eigenvalues.tolist(),
            "basis": self.basis.tolist(),
            "n": int(self.n),
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(
                gamma=Composition(tuple(doc["gamma"])),
                mean=np.array(doc["mean"], dtype=float),
                block_eigenvalues=np.array(doc["block_eigenvalues"], dtype=float),
                basis=np.array(doc["basis"], dtype=float),
                n=int(doc.get("n", 0)),
            )
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed model document: {exc}") from None

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ModelScore:
    """Maximized log-likelihood and information criteria of one type.

    ``aicc`` is ``None`` when ``n <= kappa + 1``.
    """

    gamma: Composition
    log_likelihood: float
    kappa: int
    bic: float
    aic: float
    aicc: float | None
    n: int
    p: int

    def to_dict(self):
        return {
            "gamma": str(self.gamma),
            "log_likelihood": self.log_likelihood,
            "kappa": self.kappa,
            "bic": self.bic,
            "aic": self.aic,
            "aicc": self.aicc,
            "n": self.n,
            "p": self.p,
        }


def kappa(gamma):
    """Number of free parameters of the PSA model of type ``gamma``.

    Mean (``p``), block eigenvalues (``d``) and the dimension of the flag
    manifold ``O(p) / (O(gamma_1) x ... x O(gamma_d))``.
    """
    gamma = as_composition(gamma)
    p, d = gamma.p, gamma.d
    return p + d + p * (p - 1) // 2 - sum(g * (g - 1) // 2 for g in gamma.parts)


def _positive_block_means(summary, gamma):
    gamma = as_composition(gamma)
    if gamma.p != summary.p:
        raise DataError(f"type {gamma} does not match dimension p={summary.p}")
    lam = block_average(summary.eigenvalues, gamma)
    if not np.all(lam > 0):
        raise SingularModelError(
            f"type {gamma} has a block of zero eigenvalues; the model is singular. "
            "Regularize the covariance (add a small constant to its eigenvalues) first."
        )
    return gamma, lam


def fit(summary, gamma):
    """Maximum-likelihood PSA model of type ``gamma``."""
    gamma, lam = _positive_block_means(summary, gamma)
    return PsaModel(
        gamma=gamma,
        mean=summary.mean.copy(),
        block_eigenvalues=lam,
        basis=summary.eigenvectors.copy(),
        n=summary.n,
    )


def log_likelihood(summary, gamma):
    """Maximized log-likelihood ``-n/2 (p ln 2pi + sum_k gamma_k ln lambda_k + p)``."""
    gamma, lam = _positive_block_means(summary, gamma)
    p = gamma.p
    logdet = float(np.dot(gamma.parts, np.log(lam)))
    return -0.5 * summary.n * (p * LOG_2PI + logdet + p)


def score(summary, gamma):
    gamma = as_composition(gamma)
    ll = log_likelihood(summary, gamma)
    k = kappa(gamma)
    n = summary.n
    aicc = 2.0 * k * n / (n - k - 1) - 2.0 * ll if n > k + 1 else None
    return ModelScore(
        gamma=gamma,
        log_likelihood=ll,
        kappa=k,
        bic=k * math.log(n) - 2.0 * ll,
        aic=2.0 * k - 2.0 * ll,
        aicc=aicc,
        n=n,
        p=gamma.p,
    )


def density_log(model, x):
    """Gaussian log-density of ``x`` under ``model``, via the eigen-decomposed covariance.

    ``x`` may be one point of shape (p,) or a batch of shape (m, p).
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.p or x.ndim > 2:
        raise DataError(f"points must have {model.p} coordinates, got shape {x.shape}")
    coords = (x - model.mean) @ model.basis
    maha = (coords**2) @ (1.0 / model.eigenvalues)
    logdet = float(np.dot(model.gamma.parts, np.log(model.block_eigenvalues)))
    return -0.5 * (model.p * LOG_2PI + logdet + maha)


def sample(model, count, seed=0):
    """Draw ``count`` points ``mu + Q diag(sqrt(lambda)) z`` with standard normal ``z``.

    Returns an array of shape (count, p).
    """
    if count < 1:
        raise DataError(f"count must be positive, got {count}")
    rng = _random.make_rng(seed)
    z = _random.standard_normal(rng, (count, model.p))
    return model.mean + (z * np.sqrt(model.eigenvalues)) @ model.basis.T
