"""Input validation helpers for array-facing entry points."""

from __future__ import annotations

import numpy as np

RECORD_COLUMNS = ("t", "va", "vb", "vc", "ia", "ib", "ic", "Tm", "wm")
DQ_COLUMNS = ("t", "vq", "vd", "vz", "iq", "id", "iz", "Tm", "wm")


def check_record_array(x, columns=RECORD_COLUMNS, name="X") -> np.ndarray:
    """Validate a sampled measurement record of shape (n, 9).

    Checks dtype, width, finiteness (naming the offending column) and a
    strictly increasing, uniform time grid.  Returns the validated float
    array.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[1] != len(columns):
        raise ValueError(
            f"{name} must have {len(columns)} columns "
            f"{','.join(columns)}, got {arr.shape[1]}"
        )
    if arr.shape[0] < 2:
        raise ValueError(f"{name} needs at least 2 samples, got {arr.shape[0]}")
    bad = ~np.isfinite(arr)
    if bad.any():
        col = columns[int(np.argwhere(bad)[0][1])]
        raise ValueError(f"{name} contains non-finite values in column {col!r}")
    steps = np.diff(arr[:, 0])
    if np.any(steps <= 0.0):
        raise ValueError(f"{name} time column must be strictly increasing")
    if np.max(steps) - np.min(steps) > 1e-9 * np.max(steps):
        raise ValueError(f"{name} time column must be uniformly sampled")
    return arr
