"""Regression metrics and free-run simulation over a signal record."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import build_windows
from .errors import DegenerateTargetError, ShapeError
from .network import Network, network_forward

__all__ = ["EvalResult", "rmse", "nrmse", "simulate"]


@dataclass
class EvalResult:
    """Scores of a simulation run; ``n_points`` counts scored time samples."""

    rmse: float
    nrmse: float
    n_points: int


def _paired(y, yhat) -> tuple[np.ndarray, np.ndarray]:
    ya = np.asarray(y, dtype=np.float64)
    pa = np.asarray(yhat, dtype=np.float64)
    if ya.shape != pa.shape:
        raise ShapeError(f"shape mismatch: y {ya.shape} vs yhat {pa.shape}")
    if ya.size == 0:
        raise ShapeError("empty inputs")
    return ya, pa


def rmse(y, yhat) -> float:
    """Root mean squared pointwise difference, over all coordinates."""
    ya, pa = _paired(y, yhat)
    return float(np.sqrt(np.mean((ya - pa) ** 2)))


def nrmse(y, yhat) -> float:
    """RMSE divided by the population standard deviation of ``y``.

    Reported as a fraction; multiply by 100 to print a percentage.
    Constant targets have no scale to normalize by and are rejected.
    """
    ya, pa = _paired(y, yhat)
    sigma = float(np.std(ya))
    if sigma == 0.0:
        raise DegenerateTargetError("target standard deviation is zero")
    return rmse(ya, pa) / sigma


def simulate(net: Network, rec, m: int, n: int, stride: int | None = None):
    """Predict a record's outputs from its inputs alone, window by window.

    With the default ``stride = n`` windows tile the record so every
    scored output sample is predicted exactly once.  The first
    ``max(m, n) - n`` samples cannot be covered by a full input window
    and are excluded, as is any tail shorter than one stride.

    Returns ``(yhat, result)`` where ``yhat`` is [P, D_out] aligned with
    record rows ``max(m, n) - n .. max(m, n) - n + P``.
    """
    if stride is None:
        stride = n
    ds = build_windows(rec, m, n, stride)
    preds = network_forward(net, ds.inputs)
    yhat = preds.reshape(-1, preds.shape[-1])
    ymeas = ds.targets.reshape(-1, ds.targets.shape[-1])
    r = rmse(ymeas, yhat)
    nr = nrmse(ymeas, yhat)
    return yhat, EvalResult(rmse=r, nrmse=nr, n_points=yhat.shape[0])
