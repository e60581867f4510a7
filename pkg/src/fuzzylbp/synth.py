"""Seeded procedural texture dataset for runs without licensed face data.

Every class is a sum of two oriented sinusoidal gratings with its own
orientation, spatial frequency and phase. Each image perturbs the class
phase and orientation slightly and adds Gaussian pixel noise.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .image_io import RawImage, write_pgm


def class_params(seed: int, class_id: int) -> dict:
    rng = np.random.default_rng([seed, class_id, 0])
    return {
        "theta": rng.uniform(0.0, np.pi, size=2),
        "freq": rng.uniform(0.05, 0.25, size=2),
        "phase": rng.uniform(0.0, 2 * np.pi, size=2),
        "weight": rng.uniform(0.4, 1.0, size=2),
    }


def texture(params: dict, rng, size=(63, 63), jitter: float = 0.08, noise: float = 6.0) -> np.ndarray:
    h, w = size
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    img = np.zeros((h, w))
    for k in range(2):
        theta = params["theta"][k] + rng.normal(0.0, jitter / 4)
        phase = params["phase"][k] + rng.normal(0.0, jitter)
        u = xx * np.cos(theta) + yy * np.sin(theta)
        img += params["weight"][k] * np.sin(2 * np.pi * params["freq"][k] * u + phase)
    img = 128.0 + 60.0 * img + rng.normal(0.0, noise, size=(h, w))
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def generate(out_dir, n_classes: int = 10, per_class: int = 10, size=(63, 63), seed: int = 0) -> list:
    """Write ``out_dir/class_XX/img_YY.pgm``; returns the written paths in dataset order."""
    out = Path(out_dir)
    width, height = size
    paths = []
    for c in range(n_classes):
        params = class_params(seed, c)
        folder = out / f"class_{c:02d}"
        folder.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            rng = np.random.default_rng([seed, c, i + 1])
            pixels = texture(params, rng, (height, width))
            path = folder / f"img_{i:02d}.pgm"
            write_pgm(path, RawImage(width, height, pixels))
            paths.append(path)
    return paths
