"""Reading a fitted principal subspace: varimax rotation, sphere sampling, scores."""

from dataclasses import dataclass
import math

import numpy as np

from . import _random
from .errors import DataError
from .spectral import as_dataset

ORTHONORMAL_TOL = 1e-8


def _check_frame(frame):
    q = np.asarray(frame, dtype=float)
    if q.ndim != 2 or q.shape[1] == 0:
        raise DataError(f"frame must be a p x m matrix with m >= 1, got shape {q.shape}")
    err = np.max(np.abs(q.T @ q - np.eye(q.shape[1])))
    if err > ORTHONORMAL_TOL:
        raise DataError(f"frame columns are not orthonormal (max error {err:.3g})")
    return q


def varimax_criterion(loadings):
    """Raw varimax objective: sum over columns of the variance of squared loadings."""
    sq = np.asarray(loadings, dtype=float) ** 2
    return float(np.sum(np.mean(sq**2, axis=0) - np.mean(sq, axis=0) ** 2))


@dataclass(frozen=True, eq=False)
class RotationResult:
    rotated_frame: np.ndarray
    rotation: np.ndarray
    criterion_trace: list
    converged: bool


def _planar_angle(x, y):
    # maximizer of the two-column varimax objective over rotations of (x, y)
    p = x.shape[0]
    u = x * x - y * y
    v = 2.0 * x * y
    su, sv = u.sum(), v.sum()
    num = 2.0 * (np.dot(u, v) - su * sv / p)
    den = np.dot(u, u) - np.dot(v, v) - (su * su - sv * sv) / p
    return 0.25 * math.atan2(num, den)


def _canonicalize(frame, rotation):
    order = np.argsort(-np.max(np.abs(frame), axis=0), kind="stable")
    frame, rotation = frame[:, order], rotation[:, order]
    lead = np.argmax(np.abs(frame), axis=0)
    signs = np.where(frame[lead, np.arange(frame.shape[1])] < 0, -1.0, 1.0)
    return frame * signs, rotation * signs


def varimax(frame, max_iter=1000, tol=1e-8):
    """Rotate an orthonormal frame to maximize the raw varimax criterion.

    Sweeps over all column pairs, applying the optimal planar rotation to
    each, until one sweep gains less than ``tol``. No Kaiser row
    normalization is applied. The result is put in a canonical signed
    permutation: columns by decreasing largest absolute loading, each with its
    dominant loading positive.
    """
    q = _check_frame(frame)
    m = q.shape[1]
    b = q.copy()
    t = np.eye(m)
    trace = [varimax_criterion(b)]
    converged = m == 1
    for _ in range(max_iter if m > 1 else 0):
        for i in range(m - 1):
            for j in range(i + 1, m):
                theta = _planar_angle(b[:, i], b[:, j])
                c, s = math.cos(theta), math.sin(theta)
                before = varimax_criterion(b[:, [i, j]])
                r = np.array([[c, -s], [s, c]])
                pair = b[:, [i, j]] @ r
                if varimax_criterion(pair) < before:
                    continue
                b[:, [i, j]] = pair
                t[:, [i, j]] = t[:, [i, j]] @ r
        trace.append(varimax_criterion(b))
        if trace[-1] - trace[-2] < tol:
            converged = True
            break
    # re-derive from the accumulated rotation so that rotated = frame @ rotation holds exactly
    b = q @ t
    b, t = _canonicalize(b, t)
    return RotationResult(b, t, trace, converged)


def sphere_sample(frame, count, seed=0, equally_spaced=False):
    """Points of the unit sphere of the subspace spanned by ``frame``.

    Random mode maps normalized standard normal vectors through ``frame``,
    giving the uniform distribution on the sphere. ``equally_spaced`` (2-D
    subspaces only) returns ``frame @ (cos t, sin t)`` at ``t = 2 pi i / count``.

    Returns an array of shape (count, p) with unit-norm rows.
    """
    q = _check_frame(frame)
    if count < 1:
        raise DataError(f"count must be positive, got {count}")
    m = q.shape[1]
    if equally_spaced:
        if m != 2:
            raise DataError("equally spaced sampling needs a 2-dimensional subspace")
        angles = 2.0 * np.pi * np.arange(count) / count
        u = np.column_stack([np.cos(angles), np.sin(angles)])
    else:
        u = _random.standard_normal(_random.make_rng(seed), (count, m))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
    points = u @ q.T
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def _check_block(model, block):
    if not 0 <= block < model.d:
        raise DataError(f"block index must be in [0, {model.d - 1}], got {block}")


def project_scores(data, model, block):
    """Centered coordinates ``(X - mu) Q_k`` of each sample in subspace ``block`` (0-based)."""
    x = as_dataset(data)
    if x.shape[1] != model.p:
        raise DataError(f"data has {x.shape[1]} columns, model expects {model.p}")
    _check_block(model, block)
    return (x - model.mean) @ model.frames[block]


def rotate_block(model, block, max_iter=1000, tol=1e-8):
    """Varimax-rotate one frame of ``model``; returns the new model and the rotation result."""
    _check_block(model, block)
    result = varimax(model.frames[block], max_iter=max_iter, tol=tol)
    return model.with_frame(block, result.rotated_frame), result
