"""CSV ingestion and JSON/CSV report writers."""
import csv
import json
import math
import os

import numpy as np

from .core import SignalData
from .exceptions import IngestionError

__all__ = ["ingest_csv", "read_series", "write_json", "write_csv", "read_config", "SCHEMA_VERSION"]

SCHEMA_VERSION = "1.0"


def _int_value(text, row, K):
    try:
        v = float(text)
    except ValueError:
        raise IngestionError(f"y = {text!r} is not a number", row) from None
    if not math.isfinite(v) or v != math.floor(v):
        raise IngestionError(f"y = {text!r} is not an integer", row)
    v = int(v)
    if v < 0:
        raise IngestionError(f"y = {v} is negative", row)
    if K is not None and v > K:
        raise IngestionError(f"y = {v} exceeds K = {K}", row)
    return v


def ingest_csv(path, K, covariates=None):
    """Read a signal from a CSV file with a header row.

    Parameters
    ----------
    path : str or path-like
    K : int
        Upper bound of the count scale. It must be declared: the largest
        observed value is not a safe substitute.
    covariates : list of str, optional
        Covariate columns in order. Defaults to every column other than ``y``.

    Returns
    -------
    SignalData

    Raises
    ------
    IngestionError
        On a missing ``y`` column, ragged rows, or ``y`` outside ``{0..K}``.
        Row numbers count the header as row 1.
    """
    if K is None or int(K) < 1:
        raise IngestionError("K must be declared as a positive integer")
    K = int(K)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestionError("file is empty", 1) from None
        if "y" not in header:
            raise IngestionError("missing required column 'y'", 1)
        cols = [h for h in header if h != "y"] if covariates is None else list(covariates)
        for c in cols:
            if c not in header:
                raise IngestionError(f"missing covariate column {c!r}", 1)
        iy = header.index("y")
        ix = [header.index(c) for c in cols]
        ys, xs = [], []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != len(header):
                raise IngestionError(f"expected {len(header)} fields, found {len(row)}", row_no)
            ys.append(_int_value(row[iy].strip(), row_no, K))
            try:
                xs.append([float(row[i]) for i in ix])
            except ValueError:
                raise IngestionError("non-numeric covariate value", row_no) from None
    if not ys:
        raise IngestionError("no data rows", 2)
    X = np.array(xs, dtype=float).reshape(len(ys), len(cols))
    return SignalData(np.array(ys, dtype=np.int64), K, X)


def read_series(path, column=None):
    """Read one numeric column (or a bare single-column file) as a float array."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(f.strip() for f in r)]
    if not rows:
        raise IngestionError("file is empty", 1)
    start = 0
    idx = 0
    try:
        float(rows[0][0])
    except ValueError:
        header = [h.strip() for h in rows[0]]
        start = 1
        if column is not None:
            if column not in header:
                raise IngestionError(f"missing column {column!r}", 1)
            idx = header.index(column)
    out = []
    for row_no, row in enumerate(rows[start:], start=start + 1):
        try:
            out.append([float(f) for f in row] if column is None and len(row) > 1 else float(row[idx]))
        except (ValueError, IndexError):
            raise IngestionError("non-numeric value", row_no) from None
    return np.array(out, dtype=float)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # JSON has no inf/nan
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, command, payload):
    """Write a report ``{"schema_version", "command", ...payload}``."""
    doc = {"schema_version": SCHEMA_VERSION, "command": command}
    doc.update(_jsonable(payload))
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
    return doc


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def read_config(path):
    """Parse a ``key = value`` file; ``#`` starts a comment, keys use dashes or underscores."""
    out = {}
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out
