"""Power-law exponent fits of norm time series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DecayDataError(ValueError):
    """Series unsuitable for a power-law fit."""


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    prefactor: float
    corrected_exponent: float | None
    window: tuple[float, float]
    n_samples: int
    residual: float


def log_factor(t):
    """``max{1, ln(1+t)}``."""
    return np.maximum(1.0, np.log1p(np.asarray(t, dtype=float)))


def default_window(times, fraction=0.7):
    """Last ``fraction`` of the sampled range measured in ``log(1+t)``."""
    lt = np.log1p(np.asarray(times, dtype=float))
    lo = lt[-1] - fraction * (lt[-1] - lt[0])
    return float(np.expm1(lo)), float(np.asarray(times, dtype=float)[-1])


def fit_decay(series, window=None, allow_log=False, min_samples=8):
    """Least-squares slope of ``log(value)`` against ``log(1+t)``.

    ``series`` is a sequence of ``(t, value)`` pairs. With ``allow_log`` the
    fit is repeated on ``value / max{1, ln(1+t)}`` and reported as
    ``corrected_exponent``.
    """
    data = np.asarray(series, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise DecayDataError("series must be a sequence of (t, value) pairs")
    t, v = data[:, 0], data[:, 1]
    if window is None:
        window = default_window(t)
    lo, hi = window
    sel = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    if sel.sum() < min_samples:
        raise DecayDataError(f"only {int(sel.sum())} samples in window [{lo:g}, {hi:g}], need {min_samples}")
    t, v = t[sel], v[sel]
    if np.any(~np.isfinite(v)) or np.any(v <= 0):
        raise DecayDataError("values in the fit window must be positive and finite")
    x = np.log1p(t)
    slope, icpt = np.polyfit(x, np.log(v), 1)
    resid = float(np.sqrt(np.mean((np.log(v) - (slope * x + icpt)) ** 2)))
    corrected = None
    if allow_log:
        corrected = float(np.polyfit(x, np.log(v / log_factor(t)), 1)[0])
    return DecayFit(float(slope), float(np.exp(icpt)), corrected, (float(t[0]), float(t[-1])), int(t.size), resid)
