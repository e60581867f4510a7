"""Per-window fuzzy LBP features.

An image is cut into non-overlapping 3x3 windows in row-major order and
each window yields one scalar. For the four membership descriptors the
scalar is

    sum(window * membership) * lbp_code * center

and for RMS it is

    sqrt(center**2 + fuzzifier) * center * lbp_code

where the fuzzifier is sum(d**4) / sum(d**2) over deviations d of the
cells from a reference intensity (window mean, min or max).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .image_io import GrayImage
from .lbp import as_windows, lbp_code
from .membership import window_grid

IREF_KINDS = ("avg", "min", "max")


class DescriptorKind(str, enum.Enum):
    SMF = "SMF"
    ZMF = "ZMF"
    GaussMF = "GaussMF"
    NewMF = "NewMF"
    RMS = "RMS"

    @property
    def membership(self):
        return _MEMBERSHIP.get(self)

    @property
    def label(self) -> str:
        return _LABELS[self]


_MEMBERSHIP = {
    DescriptorKind.SMF: "S",
    DescriptorKind.ZMF: "Z",
    DescriptorKind.GaussMF: "Gaussian",
    DescriptorKind.NewMF: "New",
}
_LABELS = {
    DescriptorKind.SMF: "SMF",
    DescriptorKind.ZMF: "ZMF",
    DescriptorKind.GaussMF: "Gauss MF",
    DescriptorKind.NewMF: "New MF",
    DescriptorKind.RMS: "RMS",
}

# Short names used on the command line.
DESCRIPTOR_NAMES = {
    "s": DescriptorKind.SMF,
    "z": DescriptorKind.ZMF,
    "gauss": DescriptorKind.GaussMF,
    "new": DescriptorKind.NewMF,
    "rms": DescriptorKind.RMS,
}


@dataclass(frozen=True)
class FeatureVector:
    descriptor: DescriptorKind
    values: np.ndarray
    source_dims: tuple  # (width, height)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class Fuzzifier:
    value: float
    ref_kind: str


def partition(img) -> np.ndarray:
    """Split an image into (h/3 * w/3, 3, 3) windows in row-major order."""
    pixels = img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=np.float64)
    if pixels.ndim != 2:
        raise ContractError("partition expects a 2-D image")
    h, w = pixels.shape
    if h % 3 or w % 3 or h == 0 or w == 0:
        raise ContractError(f"image {w}x{h} is not a multiple of 3 on both sides")
    return pixels.reshape(h // 3, 3, w // 3, 3).swapaxes(1, 2).reshape(-1, 3, 3)


def information_set(w, mu) -> np.ndarray:
    """Sum of the elementwise product of window intensities and memberships."""
    win = as_windows(w)
    mu = np.asarray(mu, dtype=np.float64)
    if mu.shape != win.shape:
        raise ContractError(f"membership grid {mu.shape} does not match window {win.shape}")
    total = (win * mu).sum(axis=(-2, -1))
    return float(total) if total.ndim == 0 else total


def _center(win: np.ndarray) -> np.ndarray:
    return win[..., 1, 1]


def _as_kind(kind) -> DescriptorKind:
    try:
        return DescriptorKind(kind)
    except ValueError:
        raise ContractError(f"unknown descriptor {kind!r}") from None


def mf_feature(w, kind, lbp_weights: str = "paper"):
    """Information set x LBP code x center pixel."""
    kind = _as_kind(kind)
    if kind.membership is None:
        raise ContractError(f"{kind.value} is not a membership descriptor")
    win = as_windows(w)
    h = information_set(win, window_grid(win, kind.membership))
    out = h * lbp_code(win, lbp_weights) * _center(win)
    return float(out) if np.ndim(out) == 0 else out


def _reference(win: np.ndarray, ref_kind: str) -> np.ndarray:
    axes = (-2, -1)
    if ref_kind == "avg":
        return win.mean(axis=axes, keepdims=True)
    if ref_kind == "min":
        return win.min(axis=axes, keepdims=True)
    if ref_kind == "max":
        return win.max(axis=axes, keepdims=True)
    raise ContractError(f"unknown reference {ref_kind!r}; expected one of {IREF_KINDS}")


def fuzzifier_values(w, ref_kind: str = "avg") -> np.ndarray:
    """Vectorized fuzzifier for a window stack; 0/0 (all cells at the reference) gives 0."""
    win = as_windows(w)
    d2 = (_reference(win, ref_kind) - win) ** 2
    num = (d2 * d2).sum(axis=(-2, -1))
    den = d2.sum(axis=(-2, -1))
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def fuzzifier(w, ref_kind: str = "avg") -> Fuzzifier:
    win = as_windows(w)
    if win.shape != (3, 3):
        raise ContractError("fuzzifier works on a single 3x3 window; use fuzzifier_values for stacks")
    return Fuzzifier(float(fuzzifier_values(win, ref_kind)), ref_kind)


def rms_feature(w, lbp_weights: str = "paper", ref_kind: str = "avg"):
    win = as_windows(w)
    ic = _center(win)
    out = np.sqrt(ic**2 + fuzzifier_values(win, ref_kind)) * ic * lbp_code(win, lbp_weights)
    return float(out) if np.ndim(out) == 0 else out


def extract(img, kind, lbp_weights: str = "paper", ref_kind: str = "avg") -> FeatureVector:
    """One feature per window of a normalized image, row-major window order."""
    kind = _as_kind(kind)
    if not isinstance(img, GrayImage):
        img = GrayImage(img)
    windows = partition(img)
    if kind is DescriptorKind.RMS:
        values = rms_feature(windows, lbp_weights, ref_kind)
    else:
        values = mf_feature(windows, kind, lbp_weights)
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    values.setflags(write=False)
    return FeatureVector(kind, values, (img.width, img.height))
