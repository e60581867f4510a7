"""Class-per-folder datasets and the binary feature store.

Layout: ``root/<class_name>/<image>.pgm``. Classes are sorted by folder
name and get dense ids from 0; samples within a class are sorted by file
name. Feature rows always follow that order.

Feature store (``.flbp``), all integers little-endian::

    magic        4 bytes  b"FLBP"
    version      uint16   (1)
    tag_len      uint16   descriptor tag, UTF-8
    params_len   uint16   extraction parameters, UTF-8 "key=value;..."
    rows, cols   uint32 x 2
    width,height uint32 x 2   image dims the features were computed at
    manifest     32 bytes SHA-256 of the manifest
    labels       int32 x rows
    values       float64 x rows*cols, row-major
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetError, DecodeError, StoreError
from .image_io import read_pgm

STORE_MAGIC = b"FLBP"
STORE_VERSION = 1
_FIXED = struct.Struct("<4sHHH")
_DIMS = struct.Struct("<IIII")
IMAGE_SUFFIXES = (".pgm",)


@dataclass(frozen=True)
class DatasetManifest:
    root: Path
    class_names: tuple
    samples: tuple  # ((class_id, relative path), ...) in dataset order
    dims: tuple  # (width, height) features are computed at

    @property
    def labels(self) -> np.ndarray:
        return np.array([cid for cid, _ in self.samples], dtype=np.int64)

    @property
    def paths(self) -> list:
        return [self.root / rel for _, rel in self.samples]

    def __len__(self):
        return len(self.samples)

    def digest(self) -> bytes:
        h = hashlib.sha256()
        h.update(f"{self.dims[0]}x{self.dims[1]}\n".encode())
        for name in self.class_names:
            h.update(f"class {name}\n".encode())
        for cid, rel in self.samples:
            h.update(f"{cid} {rel}\n".encode())
        return h.digest()


def scan(root, dims=(63, 63), validate: bool = True) -> DatasetManifest:
    """Index a class-per-folder tree, decoding each image once to catch corrupt files."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"{root}: dataset root is not a directory")
    folders = sorted(p for p in root.iterdir() if p.is_dir())
    if not folders:
        raise DatasetError(f"{root}: no class folders found")
    names, samples = [], []
    for folder in folders:
        files = sorted(
            p for p in folder.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
        )
        if not files:
            raise DatasetError(f"{folder}: class folder has no PGM images")
        cid = len(names)
        names.append(folder.name)
        for path in files:
            if validate:
                try:
                    read_pgm(path)
                except (DecodeError, OSError) as exc:
                    raise DatasetError(f"{path}: unreadable image: {exc}") from exc
            samples.append((cid, path.relative_to(root).as_posix()))
    return DatasetManifest(root, tuple(names), tuple(samples), tuple(dims))


@dataclass
class FeatureStore:
    descriptor: str
    values: np.ndarray  # (n_samples, n_features) float64
    labels: np.ndarray  # (n_samples,) int
    dims: tuple
    manifest_hash: bytes
    params: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.values.ndim != 2 or self.values.shape[0] != self.labels.shape[0]:
            raise StoreError("feature matrix and labels do not line up")
        if len(self.manifest_hash) != 32:
            raise StoreError("manifest hash must be 32 bytes")


def save_features(store: FeatureStore, path) -> None:
    rows, cols = store.values.shape
    if rows == 0 or cols == 0:
        raise StoreError(f"{path}: refusing to save an empty feature store")
    tag = store.descriptor.encode("utf-8")
    params = store.params.encode("utf-8")
    parts = [
        _FIXED.pack(STORE_MAGIC, STORE_VERSION, len(tag), len(params)),
        tag,
        params,
        _DIMS.pack(rows, cols, store.dims[0], store.dims[1]),
        store.manifest_hash,
        store.labels.astype("<i4").tobytes(),
        store.values.astype("<f8").tobytes(),
    ]
    Path(path).write_bytes(b"".join(parts))


def load_features(path, expected_hash: bytes = None) -> FeatureStore:
    """Read a store; with ``expected_hash`` a manifest mismatch is an error."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise StoreError(f"{path}: {exc}") from exc

    def take(pos, n, what):
        if pos + n > len(data):
            raise StoreError(f"{path}: truncated store while reading {what}")
        return data[pos : pos + n], pos + n

    head, pos = take(0, _FIXED.size, "header")
    magic, version, tag_len, params_len = _FIXED.unpack(head)
    if magic != STORE_MAGIC:
        raise StoreError(f"{path}: not a feature store")
    if version != STORE_VERSION:
        raise StoreError(f"{path}: unsupported store version {version}")
    tag, pos = take(pos, tag_len, "descriptor tag")
    params, pos = take(pos, params_len, "parameters")
    dims, pos = take(pos, _DIMS.size, "dimensions")
    rows, cols, width, height = _DIMS.unpack(dims)
    digest, pos = take(pos, 32, "manifest hash")
    labels, pos = take(pos, 4 * rows, "labels")
    values, pos = take(pos, 8 * rows * cols, "feature values")
    if pos != len(data):
        raise StoreError(f"{path}: {len(data) - pos} unexpected trailing bytes")
    if expected_hash is not None and digest != expected_hash:
        raise StoreError(f"{path}: features were extracted from a different dataset manifest")
    return FeatureStore(
        tag.decode("utf-8"),
        np.frombuffer(values, dtype="<f8").reshape(rows, cols).astype(np.float64),
        np.frombuffer(labels, dtype="<i4").astype(np.int64),
        (width, height),
        digest,
        params.decode("utf-8"),
    )


def export_csv(store: FeatureStore, path, manifest: DatasetManifest = None) -> None:
    """Interoperability dump; repr-formatted floats so values survive a reparse."""
    cols = store.values.shape[1]
    header = ["label"] + (["path"] if manifest is not None else []) + [f"f{i}" for i in range(cols)]
    lines = [",".join(header)]
    for n, (label, row) in enumerate(zip(store.labels, store.values)):
        cells = [str(label)]
        if manifest is not None:
            cells.append(manifest.samples[n][1])
        cells += [repr(float(v)) for v in row]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
