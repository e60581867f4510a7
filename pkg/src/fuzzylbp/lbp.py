"""Basic 3x3 local binary pattern code of a window.

Windows are arrays whose last two axes are (3, 3), so a single window and a
stack of windows go through the same code path.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError

# Flat cell indices of the eight neighbours, clockwise from the top-left cell:
# TL, T, TR, R, BR, B, BL, L.
NEIGHBOR_ORDER = (0, 1, 2, 5, 8, 7, 6, 3)
CENTER = 4

WEIGHT_MODES = ("paper", "classic")


def neighbor_weights(mode: str = "paper") -> np.ndarray:
    """Bit weights for neighbours 1..8.

    ``paper`` uses 2**n (codes 0..510, always even); ``classic`` uses
    2**(n - 1) (codes 0..255).
    """
    if mode == "paper":
        return 2 ** np.arange(1, 9, dtype=np.int64)
    if mode == "classic":
        return 2 ** np.arange(0, 8, dtype=np.int64)
    raise ContractError(f"unknown LBP weighting {mode!r}; expected one of {WEIGHT_MODES}")


def max_code(mode: str = "paper") -> int:
    return int(neighbor_weights(mode).sum())


def sign(x):
    """Threshold function: 1 where x >= 0, else 0."""
    return (np.asarray(x) >= 0).astype(np.int64)


def as_windows(w) -> np.ndarray:
    arr = np.asarray(w, dtype=np.float64)
    if arr.shape[-2:] != (3, 3):
        raise ContractError(f"expected trailing (3, 3) window axes, got shape {arr.shape}")
    return arr


def neighbor_bits(w) -> np.ndarray:
    """Comparison bits in neighbour order, shape (..., 8)."""
    flat = as_windows(w).reshape(*np.shape(w)[:-2], 9)
    center = flat[..., CENTER : CENTER + 1]
    return sign(flat[..., NEIGHBOR_ORDER] - center)


def lbp_code(w, mode: str = "paper"):
    """Decimal LBP code of one window (int) or of a stack of windows (int array)."""
    codes = neighbor_bits(w) @ neighbor_weights(mode)
    if np.ndim(codes) == 0:
        return int(codes)
    return codes
