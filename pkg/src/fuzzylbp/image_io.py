"""Grayscale PGM decoding, max normalization and bilinear resizing.

Preprocessing order is decode -> normalize -> resize. Normalizing first
means the resized image can have a maximum slightly below 1.0, because
bilinear averaging smooths the brightest pixel.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, DecodeError

_WHITESPACE = b" \t\n\r\v\f"


@dataclass(frozen=True, eq=False)
class RawImage:
    """8-bit grayscale image exactly as stored on disk."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width) uint8

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.uint8)
        if pixels.shape != (self.height, self.width):
            raise ContractError(
                f"pixel grid {pixels.shape} does not match {self.height}x{self.width}"
            )
        if self.width < 3 or self.height < 3:
            raise ContractError(f"image {self.width}x{self.height} is smaller than 3x3")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    def __eq__(self, other):
        if not isinstance(other, RawImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True)
class GrayImage:
    """Normalized intensities in [0, 1] with both sides a multiple of 3."""

    pixels: np.ndarray  # (height, width) float64

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=np.float64)
        if pixels.ndim != 2:
            raise ContractError("GrayImage needs a 2-D grid")
        h, w = pixels.shape
        if h % 3 or w % 3 or h == 0 or w == 0:
            raise ContractError(f"GrayImage dimensions {w}x{h} must be positive multiples of 3")
        if not np.all((pixels >= 0.0) & (pixels <= 1.0)):
            raise ContractError("GrayImage intensities must lie in [0, 1]")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


class _HeaderReader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def token(self, what: str) -> bytes:
        data = self.data
        while self.pos < len(data):
            ch = data[self.pos : self.pos + 1]
            if ch in _WHITESPACE and ch:
                self.pos += 1
            elif ch == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            else:
                break
        start = self.pos
        while self.pos < len(data) and data[self.pos : self.pos + 1] not in _WHITESPACE:
            self.pos += 1
        if start == self.pos:
            raise DecodeError(f"malformed header: missing {what}", start)
        return data[start : self.pos]

    def integer(self, what: str) -> int:
        start = self.pos
        tok = self.token(what)
        if not tok.isdigit():
            raise DecodeError(f"malformed header: {what} {tok!r} is not an integer", start)
        return int(tok)


def decode_pgm(data: bytes) -> RawImage:
    """Decode a binary (P5) or ASCII (P2) PGM with maxval <= 255."""
    reader = _HeaderReader(bytes(data))
    magic = reader.token("magic number")
    if magic not in (b"P2", b"P5"):
        raise DecodeError(f"unsupported magic number {magic!r}", 0)
    width = reader.integer("width")
    height = reader.integer("height")
    maxval_at = reader.pos
    maxval = reader.integer("maxval")
    if not 0 < maxval <= 255:
        raise DecodeError(f"unsupported maxval {maxval}", maxval_at)
    if width < 3 or height < 3:
        raise DecodeError(f"image {width}x{height} is smaller than 3x3", 0)
    count = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        start = reader.pos + 1
        raster = reader.data[start : start + count]
        if len(raster) < count:
            raise DecodeError(
                f"truncated pixel data: {len(raster)} of {count} bytes", start + len(raster)
            )
        pixels = np.frombuffer(raster, dtype=np.uint8)
    else:
        values = []
        for _ in range(count):
            at = reader.pos
            try:
                tok = reader.token("pixel")
            except DecodeError:
                raise DecodeError(
                    f"truncated pixel data: {len(values)} of {count} values", at
                ) from None
            if not tok.isdigit():
                raise DecodeError(f"malformed pixel value {tok!r}", at)
            values.append(int(tok))
        pixels = np.array(values, dtype=np.int64)

    if pixels.max(initial=0) > maxval:
        raise DecodeError(f"pixel value exceeds maxval {maxval}", maxval_at)
    return RawImage(width, height, pixels.astype(np.uint8).reshape(height, width))


def encode_pgm(img: RawImage) -> bytes:
    """Binary P5 encoding; used for synthetic datasets and debugging dumps."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(img.pixels, dtype=np.uint8).tobytes()


def read_pgm(path) -> RawImage:
    path = Path(path)
    try:
        return decode_pgm(path.read_bytes())
    except DecodeError as exc:
        raise DecodeError(f"{path}: {exc}") from exc


def write_pgm(path, img: RawImage) -> None:
    Path(path).write_bytes(encode_pgm(img))


def normalize(img: RawImage) -> np.ndarray:
    """Divide every pixel by the image maximum; an all-zero image stays zero."""
    pixels = img.pixels.astype(np.float64)
    peak = pixels.max()
    if peak == 0:
        return np.zeros_like(pixels)
    return pixels / peak


def resize_to_multiple_of_3(grid, target_w: int, target_h: int) -> GrayImage:
    """Bilinear resample with pixel-center alignment and edge clamping."""
    if target_w < 3 or target_h < 3 or target_w % 3 or target_h % 3:
        raise ContractError(f"target size {target_w}x{target_h} must be multiples of 3 and >= 3")
    src = np.asarray(grid, dtype=np.float64)
    if src.ndim != 2:
        raise ContractError("resize expects a 2-D grid")
    if src.shape == (target_h, target_w):
        return GrayImage(src)

    rows = _resample_axis(src, target_h, axis=0)
    out = _resample_axis(rows, target_w, axis=1)
    return GrayImage(np.clip(out, 0.0, 1.0))


def _resample_axis(src: np.ndarray, n_out: int, axis: int) -> np.ndarray:
    n_in = src.shape[axis]
    pos = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    pos = np.clip(pos, 0.0, n_in - 1)
    lo = np.floor(pos).astype(np.intp)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = pos - lo
    a = np.take(src, lo, axis=axis)
    b = np.take(src, hi, axis=axis)
    shape = [1, 1]
    shape[axis] = n_out
    frac = frac.reshape(shape)
    return a * (1.0 - frac) + b * frac


def load_gray(path, target_w: int, target_h: int) -> GrayImage:
    """Read a PGM and run the full preprocessing chain."""
    return resize_to_multiple_of_3(normalize(read_pgm(path)), target_w, target_h)
