"""Membership functions evaluated over 3x3 windows.

The scalar functions accept numbers or arrays. ``window_grid`` picks
per-window parameters when none are given: S and Z use the window minimum
and maximum as knees, the Gaussian uses the window mean as centre and the
population standard deviation as spread.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .lbp import as_windows

KINDS = ("S", "Z", "Gaussian", "New")


@dataclass(frozen=True)
class MfParams:
    kind: str
    a: float = 0.0
    b: float = 1.0
    sigma: float = 1.0
    c: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown membership kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("S", "Z") and self.a > self.b:
            raise ParameterError(f"{self.kind}-MF needs a <= b, got a={self.a}, b={self.b}")
        if self.kind == "Gaussian" and not self.sigma > 0:
            raise ParameterError(f"Gaussian MF needs sigma > 0, got {self.sigma}")


def _scalar_or_array(out, x):
    return float(out) if np.ndim(x) == 0 else out


def s_mf(x, a: float, b: float):
    """S-shaped spline membership. With a == b it is a step that is 1 from b on."""
    if a > b:
        raise ParameterError(f"S-MF needs a <= b, got a={a}, b={b}")
    xs = np.asarray(x, dtype=np.float64)
    if a == b:
        return _scalar_or_array(np.where(xs >= b, 1.0, 0.0), x)
    span = b - a
    mid = (a + b) / 2.0
    rise = 2.0 * ((xs - a) / span) ** 2
    fall = 1.0 - 2.0 * ((xs - b) / span) ** 2
    out = np.where(xs <= a, 0.0, np.where(xs <= mid, rise, np.where(xs < b, fall, 1.0)))
    return _scalar_or_array(out, x)


def z_mf(x, a: float, b: float):
    """Z-shaped spline membership. With a == b it is a step that is 1 up to a."""
    if a > b:
        raise ParameterError(f"Z-MF needs a <= b, got a={a}, b={b}")
    xs = np.asarray(x, dtype=np.float64)
    if a == b:
        return _scalar_or_array(np.where(xs <= a, 1.0, 0.0), x)
    span = b - a
    mid = (a + b) / 2.0
    fall = 1.0 - 2.0 * ((xs - a) / span) ** 2
    tail = 2.0 * ((xs - b) / span) ** 2
    out = np.where(xs <= a, 1.0, np.where(xs <= mid, fall, np.where(xs < b, tail, 0.0)))
    return _scalar_or_array(out, x)


def gaussian_mf(x, sigma: float, c: float):
    """Gaussian bell exp(-(x - c)^2 / (2 sigma^2)); sigma acts as a standard deviation."""
    if not sigma > 0:
        raise ParameterError(f"Gaussian MF needs sigma > 0, got {sigma}")
    xs = np.asarray(x, dtype=np.float64)
    return _scalar_or_array(np.exp(-((xs - c) ** 2) / (2.0 * sigma**2)), x)


def new_mf(w) -> np.ndarray:
    """|I - window mean| / window max, cellwise; an all-black window gives zeros."""
    win = as_windows(w)
    avg = win.mean(axis=(-2, -1), keepdims=True)
    peak = win.max(axis=(-2, -1), keepdims=True)
    dev = np.abs(win - avg)
    safe = np.where(peak > 0, peak, 1.0)
    return np.where(peak > 0, dev / safe, 0.0)


def auto_params(w, kind: str) -> MfParams:
    """Per-window parameters for a single window."""
    win = as_windows(w)
    if win.shape != (3, 3):
        raise ParameterError("auto_params works on a single 3x3 window")
    if kind in ("S", "Z"):
        return MfParams(kind, a=float(win.min()), b=float(win.max()))
    if kind == "Gaussian":
        sigma = 0.0 if np.ptp(win) == 0 else float(win.std())
        # sigma == 0 is handled by window_grid; keep MfParams valid here
        return MfParams(kind, sigma=sigma if sigma > 0 else 1.0, c=float(win.mean()))
    return MfParams(kind)


def window_grid(w, kind: str, params: Optional[MfParams] = None) -> np.ndarray:
    """Membership grid for one window or a stack of windows.

    Without ``params`` each window gets its own auto-parameters (vectorized
    over the stack). Constant windows, where a == b or sigma == 0, get full
    membership 1 everywhere for S, Z and Gaussian.
    """
    if kind not in KINDS:
        raise ParameterError(f"unknown membership kind {kind!r}; expected one of {KINDS}")
    win = as_windows(w)
    if kind == "New":
        return new_mf(win)
    if params is not None:
        if params.kind != kind:
            raise ParameterError(f"params are for {params.kind!r}, not {kind!r}")
        if kind == "S":
            return np.asarray(s_mf(win, params.a, params.b))
        if kind == "Z":
            return np.asarray(z_mf(win, params.a, params.b))
        return np.asarray(gaussian_mf(win, params.sigma, params.c))

    axes = (-2, -1)
    if kind == "Gaussian":
        c = win.mean(axis=axes, keepdims=True)
        sigma = win.std(axis=axes, keepdims=True)
        flat = (sigma == 0) | (np.ptp(win, axis=axes, keepdims=True) == 0)
        safe = np.where(flat, 1.0, sigma)
        return np.where(flat, 1.0, np.exp(-((win - c) ** 2) / (2.0 * safe**2)))

    a = win.min(axis=axes, keepdims=True)
    b = win.max(axis=axes, keepdims=True)
    flat = a == b
    span = np.where(flat, 1.0, b - a)
    mid = (a + b) / 2.0
    lo = 2.0 * ((win - a) / span) ** 2
    hi = 2.0 * ((win - b) / span) ** 2
    if kind == "S":
        grid = np.where(win <= a, 0.0, np.where(win <= mid, lo, np.where(win < b, 1.0 - hi, 1.0)))
    else:
        grid = np.where(win <= a, 1.0, np.where(win <= mid, 1.0 - lo, np.where(win < b, hi, 0.0)))
    return np.where(flat, 1.0, grid)
