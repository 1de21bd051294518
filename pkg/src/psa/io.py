"""CSV ingestion and JSON/CSV emission."""

import csv
import io as _io
import json
import math

import numpy as np

from .errors import DataError
from .model import PsaModel


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, standardize=False, transpose=False, remove_row_mean=False):
    """Read a numeric CSV file into an ``n x p`` sample matrix (rows are samples).

    A first row containing any non-numeric cell is taken as a header. Blank
    lines are ignored.

    Parameters
    ----------
    standardize : bool
        Divide each column by its standard deviation (divisor ``n``).
    transpose : bool
        Treat rows of the file as features instead of samples.
    remove_row_mean : bool
        Subtract from each sample its mean over features (DC removal for
        image patches).

    Returns
    -------
    data : ndarray
    header : list of str or None
    """
    try:
        with open(path, newline="") as fh:
            rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    rows = [(line, [c.strip() for c in row]) for line, row in rows
            if any(c.strip() for c in row)]
    header = None
    if rows and not all(_is_number(c) for c in rows[0][1]):
        header = rows[0][1]
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: no numeric rows")
    width = len(header) if header is not None else len(rows[0][1])
    values = []
    for line, row in rows:
        if len(row) != width:
            raise DataError(f"{path}, line {line}: expected {width} fields, got {len(row)}")
        parsed = []
        for col, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}, line {line}, column {col + 1}: non-numeric value {cell!r}"
                ) from None
            if not math.isfinite(v):
                raise DataError(f"{path}, line {line}, column {col + 1}: non-finite value {cell!r}")
            parsed.append(v)
        values.append(parsed)
    x = np.array(values, dtype=float)
    if transpose:
        x = x.T
        header = None
    if x.shape[0] < 2:
        raise DataError(f"{path}: need at least 2 samples, got {x.shape[0]}")
    if remove_row_mean:
        x = x - x.mean(axis=1, keepdims=True)
    if standardize:
        std = x.std(axis=0)
        for col in np.flatnonzero(std == 0):
            name = header[col] if header else f"column {col + 1}"
            raise DataError(f"{path}: cannot standardize {name!s}, it has zero variance")
        x = x / std
    return x, header


def format_float(v):
    return repr(float(v))


def matrix_csv(matrix, header=None):
    """Render a 2-D array as CSV text with round-trip float formatting."""
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    for row in np.atleast_2d(matrix):
        writer.writerow([format_float(v) for v in row])
    return out.getvalue()


def dumps(doc):
    return json.dumps(doc, indent=2) + "\n"


def load_model(path):
    """Load a model saved by ``psa fit --format json`` (bare or wrapped under ``"model"``)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from None
    if isinstance(doc, dict) and "model" in doc:
        doc = doc["model"]
    return PsaModel.from_dict(doc)
