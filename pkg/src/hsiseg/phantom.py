"""Synthetic labeled hyperspectral scenes for benchmarking without real data.

Each material is a sum of 1-3 Gaussian bumps over the band axis, resampled
until all pairwise spectral angles are at least MIN_PAIR_ANGLE. Pixels get a
multiplicative brightness jitter (so scale-invariant metrics have an edge
over raw distances, mirroring shading variability) plus additive Gaussian
noise, clamped to stay non-negative.

All randomness is counter-based (see rng.py): a draw depends only on
(seed, stream, counter), never on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .cube import HyperCube, LabelMap
from .spectral import spectral_angle

MIN_PAIR_ANGLE = 0.15  # radians, guarantees class separability bounds

# stream ids (documented constants; changing them changes every phantom)
_STREAM_SPECTRA = 1
_STREAM_REGIONS = 2
_STREAM_BRIGHTNESS = 3
_STREAM_NOISE = 4

_MAX_RESAMPLE_ATTEMPTS = 4096
_BLOBS_PER_MATERIAL = 2


@dataclass(frozen=True)
class PhantomSpec:
    height: int
    width: int
    bands: int
    n_materials: int = 3
    noise_sigma: float = 0.0
    seed: int = 0
    region_style: str = "voronoi"  # or "blobs"
    brightness_jitter: bool = True

    def __post_init__(self):
        if self.height < 1 or self.width < 1 or self.bands < 1:
            raise ValueError("height, width and bands must all be >= 1")
        if self.n_materials < 2:
            raise ValueError("need at least 2 materials")
        if self.n_materials > self.height * self.width:
            raise ValueError("more materials than pixels")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.region_style not in ("voronoi", "blobs"):
            raise ValueError(f"unknown region_style {self.region_style!r}")


def _bump_spectrum(spec: PhantomSpec, material: int, attempt: int) -> np.ndarray:
    """Candidate material spectrum: 1-3 Gaussian bumps over the band axis."""
    base_counter = (material * _MAX_RESAMPLE_ATTEMPTS + attempt) * 16
    draws = rng.random_uniform(spec.seed, _STREAM_SPECTRA,
                               np.arange(base_counter, base_counter + 10))
    n_bumps = 1 + int(draws[0] * 3.0)  # 1..3
    bands = np.arange(spec.bands, dtype=np.float64)
    values = np.zeros(spec.bands, dtype=np.float64)
    for i in range(n_bumps):
        amp = 0.6 + 0.9 * draws[1 + 3 * i]
        center = draws[2 + 3 * i] * (spec.bands - 1)
        width = max(0.35, spec.bands * (1 / 16 + draws[3 + 3 * i] * (1 / 6 - 1 / 16)))
        values += amp * np.exp(-((bands - center) ** 2) / (2.0 * width**2))
    return values


def material_spectra(spec: PhantomSpec) -> np.ndarray:
    """n_materials x bands matrix with pairwise angles >= MIN_PAIR_ANGLE."""
    accepted: list[np.ndarray] = []
    for m in range(spec.n_materials):
        for attempt in range(_MAX_RESAMPLE_ATTEMPTS):
            candidate = _bump_spectrum(spec, m, attempt)
            if all(spectral_angle(candidate, prev) >= MIN_PAIR_ANGLE for prev in accepted):
                accepted.append(candidate)
                break
        else:
            raise RuntimeError(
                f"could not find {spec.n_materials} separable spectra with "
                f"{spec.bands} bands (material {m})"
            )
    return np.stack(accepted)


def _voronoi_labels(spec: PhantomSpec) -> np.ndarray:
    h, w = spec.height, spec.width
    seeds: list[tuple[int, int]] = []
    for m in range(spec.n_materials):
        for attempt in range(_MAX_RESAMPLE_ATTEMPTS):
            counter = (m * _MAX_RESAMPLE_ATTEMPTS + attempt) * 2
            u = rng.random_uniform(spec.seed, _STREAM_REGIONS, [counter, counter + 1])
            point = (min(h - 1, int(u[0] * h)), min(w - 1, int(u[1] * w)))
            if point not in seeds:
                seeds.append(point)
                break
        else:  # pragma: no cover - n_materials <= H*W makes this reachable only in theory
            raise RuntimeError("could not place distinct region seeds")
    rows = np.arange(h)[:, None, None]
    cols = np.arange(w)[None, :, None]
    sr = np.array([s[0] for s in seeds])[None, None, :]
    sc = np.array([s[1] for s in seeds])[None, None, :]
    dist = (rows - sr) ** 2 + (cols - sc) ** 2
    return np.argmin(dist, axis=2).astype(np.int64)  # ties -> smallest material


def _blob_labels(spec: PhantomSpec) -> np.ndarray:
    h, w = spec.height, spec.width
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    intensity = np.zeros((spec.n_materials, h, w))
    centers: list[tuple[int, int]] = []
    for m in range(spec.n_materials):
        base = m * 16  # 4 draws per blob, 2 blobs, headroom to 16
        u = rng.random_uniform(spec.seed, _STREAM_REGIONS,
                               np.arange(10_000_000 + base, 10_000_000 + base + 8))
        for k in range(_BLOBS_PER_MATERIAL):
            cr = u[4 * k] * (h - 1)
            cc = u[4 * k + 1] * (w - 1)
            scale = (0.15 + 0.3 * u[4 * k + 2]) * max(min(h, w), 2)
            weight = 0.5 + u[4 * k + 3]
            intensity[m] += weight * np.exp(
                -((rows - cr) ** 2 + (cols - cc) ** 2) / (2.0 * scale**2)
            )
            if k == 0:
                centers.append((int(round(cr)), int(round(cc))))
    labels = np.argmax(intensity, axis=0).astype(np.int64)
    # stamp each material's first blob center so every class is present
    for m, (r, c) in enumerate(centers):
        labels[r, c] = m
    return labels


def generate(spec: PhantomSpec) -> tuple[HyperCube, LabelMap]:
    """Deterministic (cube, labels) pair for the given spec."""
    spectra = material_spectra(spec)
    labels = _voronoi_labels(spec) if spec.region_style == "voronoi" else _blob_labels(spec)

    h, w, c = spec.height, spec.width, spec.bands
    data = spectra[labels.ravel()].reshape(h, w, c)

    if spec.brightness_jitter:
        pix = np.arange(h * w)
        brightness = 0.5 + rng.random_uniform(spec.seed, _STREAM_BRIGHTNESS, pix)
        data = data * brightness.reshape(h, w, 1)

    if spec.noise_sigma > 0:
        noise = rng.random_normal(spec.seed, _STREAM_NOISE, np.arange(h * w * c))
        data = data + spec.noise_sigma * noise.reshape(h, w, c)
        data = np.maximum(data, 0.0)

    ignore = 255 if spec.n_materials <= 255 else spec.n_materials
    return HyperCube(data), LabelMap(labels, ignore_index=ignore)
