"""Sample moments and a deterministic symmetric eigensolver.

The covariance convention is the maximum-likelihood one (divisor ``n``).
Eigendecompositions use cyclic Jacobi sweeps so that results are bit-stable
for a given input and do not depend on the LAPACK build.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ConvergenceError, DataError

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-8
NEGATIVE_CLAMP = 1e-10


def as_dataset(samples):
    """Validate an ``n x p`` sample matrix and return it as a float array.

    Raises
    ------
    DataError
        If the array is not 2-D, has fewer than two rows or no columns, or
        contains non-finite entries.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2:
        raise DataError(f"dataset must be a 2-D array, got shape {x.shape}")
    n, p = x.shape
    if n < 2:
        raise DataError(f"dataset needs at least 2 samples, got {n}")
    if p < 1:
        raise DataError("dataset needs at least 1 feature")
    if not np.all(np.isfinite(x)):
        rows, cols = np.nonzero(~np.isfinite(x))
        raise DataError(
            f"dataset contains non-finite values (first at row {rows[0]}, column {cols[0]})"
        )
    return x


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Sufficient statistics of a dataset in eigen-coordinates.

    Attributes
    ----------
    mean : ndarray, shape (p,)
    eigenvalues : ndarray, shape (p,)
        Sample covariance eigenvalues, non-increasing.
    eigenvectors : ndarray, shape (p, p)
        Orthogonal matrix; column ``j`` goes with ``eigenvalues[j]``.
    n : int
        Number of samples the moments were computed from.
    """

    mean: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    n: int

    @property
    def p(self):
        return self.eigenvalues.shape[0]

    @property
    def covariance(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def compute_moments(data):
    """Return the sample mean and the ML sample covariance (divisor ``n``).

    Both are invariant to the row order of ``data`` down to the last bit: the
    mean uses correctly rounded summation and each covariance entry sums its
    sorted products.
    """
    x = as_dataset(data)
    n, p = x.shape
    mean = np.array([math.fsum(col) / n for col in x.T])
    xc = x - mean
    cov = np.empty((p, p))
    for i in range(p):
        prods = np.sort(xc[:, i : i + 1] * xc[:, i:], axis=0)
        cov[i, i:] = prods.sum(axis=0) / n
        cov[i:, i] = cov[i, i:]
    return mean, cov


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return math.sqrt(float(np.sum(off * off)))


def eigh(matrix, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    matrix : array_like, shape (p, p)
        Symmetric up to ``1e-8`` relative to its largest entry.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm is at most
        ``tol`` times the Frobenius norm of the input.
    max_sweeps : int

    Returns
    -------
    eigenvalues : ndarray, shape (p,)
        Non-increasing.
    eigenvectors : ndarray, shape (p, p)
        Orthogonal; each column has its largest-magnitude entry positive
        (first such entry on ties).
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DataError(f"eigh needs a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DataError("eigh input contains non-finite values")
    scale = float(np.max(np.abs(a)))
    asym = float(np.max(np.abs(a - a.T)))
    if asym > SYMMETRY_TOL * scale:
        raise DataError(f"matrix is not symmetric (max |A - A^T| = {asym:.3g})")
    a = 0.5 * (a + a.T)
    p = a.shape[0]
    v = np.eye(p)
    target = tol * math.sqrt(float(np.sum(a * a)))

    off = _off_norm(a)
    sweeps = 0
    while off > target:
        if sweeps == max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3g})",
                residual=off,
            )
        for i in range(p - 1):
            for j in range(i + 1, p):
                aij = a[i, j]
                if aij == 0.0:
                    continue
                g = 100.0 * abs(aij)
                if abs(a[i, i]) + g == abs(a[i, i]) and abs(a[j, j]) + g == abs(a[j, j]):
                    # negligible against both diagonal entries
                    a[i, j] = a[j, i] = 0.0
                    continue
                h = a[j, j] - a[i, i]
                if abs(h) + g == abs(h):
                    t = aij / h
                else:
                    tau = 0.5 * h / aij
                    t = 1.0 / (abs(tau) + math.hypot(1.0, tau))
                    if tau < 0:
                        t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ai, aj = a[:, i].copy(), a[:, j].copy()
                a[:, i] = c * ai - s * aj
                a[:, j] = s * ai + c * aj
                ai, aj = a[i, :].copy(), a[j, :].copy()
                a[i, :] = c * ai - s * aj
                a[j, :] = s * ai + c * aj
                a[i, j] = a[j, i] = 0.0
                vi, vj = v[:, i].copy(), v[:, j].copy()
                v[:, i] = c * vi - s * vj
                v[:, j] = s * vi + c * vj
        sweeps += 1
        off = _off_norm(a)

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    v = v[:, order]
    lead = np.argmax(np.abs(v), axis=0)
    signs = np.where(v[lead, np.arange(p)] < 0, -1.0, 1.0)
    return values, v * signs


def summarize(data):
    """Mean, eigenvalues and eigenvectors of the sample covariance of ``data``.

    Round-off negatives no larger than ``1e-10 * l_1`` in magnitude are
    clamped to zero; larger negatives mean the moments are corrupt.
    """
    x = as_dataset(data)
    mean, cov = compute_moments(x)
    values, vectors = eigh(cov)
    floor = NEGATIVE_CLAMP * max(abs(values[0]), abs(values[-1]))
    if values[-1] < -floor:
        raise DataError(f"covariance has a negative eigenvalue {values[-1]:.3g}")
    values = np.where(values < 0, 0.0, values)
    return SpectralSummary(mean=mean, eigenvalues=values, eigenvectors=vectors, n=x.shape[0])


def regularize(summary, epsilon):
    """Shift every eigenvalue up by ``epsilon`` (an isotropic covariance ridge)."""
    if not epsilon > 0:
        raise DataError(f"regularization epsilon must be positive, got {epsilon}")
    return SpectralSummary(
        mean=summary.mean,
        eigenvalues=summary.eigenvalues + epsilon,
        eigenvectors=summary.eigenvectors,
        n=summary.n,
    )
