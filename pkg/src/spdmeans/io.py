"""Matrix and report serialization.

Matrices use ``{"dim": n, "rows": [[...], ...]}``. Report files are JSON
arrays of records written with sorted keys and fixed indentation, so equal
inputs give byte-identical files.
"""
import json

import numpy as np

from .exceptions import NonSquareError, NotPositiveDefiniteError, SpdError
from .linalg import validate_spd
from .properties import record_from_dict


def matrix_to_dict(M):
    M = np.asarray(M, dtype=float)
    return {"dim": int(M.shape[0]), "rows": M.tolist()}


def matrix_from_dict(d, semidefinite=True):
    """Parse matrix JSON into an :class:`SpdMatrix`.

    Strictly definite input is validated as such. Singular PSD input falls
    back to the semidefinite path when ``semidefinite`` is true; metrics
    that need strict definiteness reject it later.
    """
    if not isinstance(d, dict) or "rows" not in d:
        raise SpdError('matrix JSON must be an object with "dim" and "rows"')
    rows = np.asarray(d["rows"], dtype=float)
    dim = d.get("dim", rows.shape[0] if rows.ndim else 0)
    if rows.ndim != 2 or rows.shape != (dim, dim):
        raise NonSquareError(f'"rows" has shape {rows.shape}, expected ({dim}, {dim})')
    try:
        return validate_spd(rows)
    except NotPositiveDefiniteError:
        if not semidefinite:
            raise
        return validate_spd(rows, semidefinite=True)


def read_matrix(path, semidefinite=True):
    with open(path, encoding="utf-8") as fh:
        return matrix_from_dict(json.load(fh), semidefinite=semidefinite)


def write_matrix(M, fh):
    json.dump(matrix_to_dict(M), fh)
    fh.write("\n")


def dumps_records(records):
    """Deterministic JSON array of reports and observations."""
    return json.dumps([r.to_dict() for r in records], indent=2, sort_keys=True) + "\n"


def loads_records(text):
    return [record_from_dict(d) for d in json.loads(text)]


def dumps_line(record):
    """One compact JSON line (for streamed hunt output)."""
    return json.dumps(record.to_dict(), sort_keys=True)
