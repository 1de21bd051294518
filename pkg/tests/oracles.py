"""Reference computations that share no code path with the library."""

import numpy as np

from psa.spectral import SpectralSummary

from conftest import random_orthogonal


def dense_log_density(x, mean, cov):
    p = mean.shape[0]
    sign, logdet = np.linalg.slogdet(cov)
    assert sign > 0
    diff = np.atleast_2d(x) - mean
    maha = np.einsum("ij,jk,ik->i", diff, np.linalg.inv(cov), diff)
    return -0.5 * (p * np.log(2 * np.pi) + logdet + maha)


def gaussian_log_likelihood(summary, means, bases, eigenvalues):
    """Log-likelihood of a batch of Gaussians from the data's sufficient statistics.

    ``bases`` has shape (B, p, p) and ``eigenvalues`` (B, p) holds the
    covariance eigenvalues with multiplicity; ``means`` is (B, p).
    """
    n, p = summary.n, summary.p
    s_cov = (summary.eigenvectors * summary.eigenvalues) @ summary.eigenvectors.T
    # tr(Sigma^-1 S) = sum_j (q_j^T S q_j) / lambda_j
    quad = np.einsum("bij,ik,bkj->bj", bases, s_cov, bases)
    trace = np.sum(quad / eigenvalues, axis=1)
    diff = summary.mean - means
    coords = np.einsum("bi,bij->bj", diff, bases)
    maha = np.sum(coords**2 / eigenvalues, axis=1)
    logdet = np.sum(np.log(eigenvalues), axis=1)
    return -0.5 * n * (p * np.log(2 * np.pi) + logdet + trace + maha)


def random_summary(rng, p, n=None):
    ell = np.sort(rng.exponential(1.0, p) + 1e-3)[::-1]
    return SpectralSummary(
        mean=rng.standard_normal(p),
        eigenvalues=ell,
        eigenvectors=random_orthogonal(rng, p),
        n=int(rng.integers(10, 1000)) if n is None else n,
    )


def perturbed_parameters(rng, summary, gamma, count):
    """Type-respecting perturbations of the closed-form estimate, at many scales."""
    p = summary.p
    lam_hat = np.array([summary.eigenvalues[b:e].mean()
                        for b, e in zip(gamma.bounds[:-1], gamma.bounds[1:])])
    scale = 10.0 ** rng.uniform(-6, 0.5, size=(count, 1))
    skew = rng.standard_normal((count, p, p))
    skew = (skew - np.transpose(skew, (0, 2, 1))) * scale[:, :, None]
    rot, r = np.linalg.qr(np.eye(p) + skew)
    rot = rot * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]
    bases = summary.eigenvectors @ rot
    lam = np.sort(lam_hat * np.exp(scale * rng.standard_normal((count, gamma.d))), axis=1)[:, ::-1]
    eigenvalues = np.repeat(lam, gamma.parts, axis=1)
    means = summary.mean + scale * rng.standard_normal((count, p))
    return means, bases, eigenvalues
