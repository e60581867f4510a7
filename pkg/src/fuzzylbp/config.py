"""Run configuration and its key-value text format.

One ``key = value`` per line, keys spelled like the long command-line flags
without the leading dashes. Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .errors import ParameterError
from .features import DESCRIPTOR_NAMES, IREF_KINDS
from .lbp import WEIGHT_MODES


def parse_dims(text: str) -> tuple:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ParameterError(f"dims {text!r} must look like WxH, e.g. 63x63") from None
    if w < 3 or h < 3 or w % 3 or h % 3:
        raise ParameterError(f"dims {w}x{h} must be multiples of 3 and at least 3")
    return w, h


def parse_descriptors(text: str) -> tuple:
    names = tuple(n.strip().lower() for n in text.split(",") if n.strip())
    bad = [n for n in names if n not in DESCRIPTOR_NAMES]
    if bad or not names:
        raise ParameterError(
            f"unknown descriptor(s) {', '.join(bad) or '(none)'}; valid names: {','.join(DESCRIPTOR_NAMES)}"
        )
    # canonical order, duplicates dropped
    return tuple(n for n in DESCRIPTOR_NAMES if n in names)


def parse_degrees(text: str) -> tuple:
    try:
        degrees = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ParameterError(f"SVM degrees {text!r} must be comma-separated integers") from None
    if not degrees or any(d < 1 for d in degrees):
        raise ParameterError(f"SVM degrees must be positive integers, got {text!r}")
    return degrees


@dataclass(frozen=True)
class RunConfig:
    root: Optional[str] = None
    dims: tuple = (63, 63)
    descriptors: tuple = tuple(DESCRIPTOR_NAMES)
    lbp_weights: str = "paper"
    iref: str = "avg"
    svm_c: float = 1.0
    svm_degrees: tuple = (1, 2)
    svm_gamma: Optional[float] = None  # None means 1 / feature count
    svm_coef0: float = 1.0
    svm_tol: float = 1e-3
    svm_max_passes: int = 10
    knn_k: int = 1
    kfold: int = 10
    seed: int = 0
    out: str = "fuzzylbp-out"
    workers: int = 1

    def __post_init__(self):
        if self.lbp_weights not in WEIGHT_MODES:
            raise ParameterError(f"lbp-weights must be one of {WEIGHT_MODES}")
        if self.iref not in IREF_KINDS:
            raise ParameterError(f"iref must be one of {IREF_KINDS}")
        if not self.svm_c > 0 or not self.svm_tol > 0 or self.svm_max_passes < 1:
            raise ParameterError("svm-c and svm-tol must be positive and svm-max-passes at least 1")
        if self.svm_gamma is not None and not self.svm_gamma > 0:
            raise ParameterError("svm-gamma must be positive or 'auto'")
        if self.knn_k < 1:
            raise ParameterError("knn-k must be at least 1")
        if self.kfold == 1 or self.kfold < 0:
            raise ParameterError("kfold must be 0 (disabled) or at least 2")
        if self.workers < 1:
            raise ParameterError("workers must be at least 1")
        parse_dims(f"{self.dims[0]}x{self.dims[1]}")
        parse_descriptors(",".join(self.descriptors))

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_text(self) -> str:
        lines = ["# fuzzylbp run configuration"]
        for f in fields(self):
            lines.append(f"{f.name.replace('_', '-')} = {_format_value(f.name, getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        values = {}
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"config line {n}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            name = key.replace("-", "_")
            if name not in known:
                raise ParameterError(f"config line {n}: unknown key {key!r}")
            values[name] = _parse_value(name, value)
        return cls(**values)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def _format_value(name, value) -> str:
    if name == "dims":
        return f"{value[0]}x{value[1]}"
    if name in ("descriptors", "svm_degrees"):
        return ",".join(str(v) for v in value)
    if value is None:
        return "auto" if name == "svm_gamma" else ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(name, text):
    try:
        if name == "dims":
            return parse_dims(text)
        if name == "descriptors":
            return parse_descriptors(text)
        if name == "svm_degrees":
            return parse_degrees(text)
        if name == "svm_gamma":
            return None if text in ("", "auto") else float(text)
        if name == "root":
            return text or None
        if name in ("svm_c", "svm_coef0", "svm_tol"):
            return float(text)
        if name in ("svm_max_passes", "knn_k", "kfold", "seed", "workers"):
            return int(text)
    except ValueError:
        raise ParameterError(f"bad value {text!r} for {name.replace('_', '-')}") from None
    return text
