"""Core data model: reflectance cubes, label maps and pseudo-RGB projection.

A cube is stored row-major as (row, col, band) float64 regardless of the
on-disk interleave, so extracting a pixel spectrum is a contiguous slice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORMALIZE_MODES = ("none", "per_band_minmax", "global_minmax")


@dataclass(frozen=True)
class HyperCube:
    """Immutable H x W x C reflectance volume."""

    data: np.ndarray
    wavelengths: tuple[float, ...] | None = None

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"cube data must be 3-D (H, W, C), got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValueError(f"cube dimensions must all be >= 1, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("cube data contains NaN or Inf")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        if self.wavelengths is not None:
            wl = tuple(float(w) for w in self.wavelengths)
            if len(wl) != arr.shape[2]:
                raise ValueError(
                    f"wavelength count {len(wl)} does not match band count {arr.shape[2]}"
                )
            object.__setattr__(self, "wavelengths", wl)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def bands(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class LabelMap:
    """H x W integer class map; `ignore_index` marks unlabeled pixels."""

    labels: np.ndarray
    ignore_index: int

    def __post_init__(self):
        arr = np.asarray(self.labels)
        if arr.ndim != 2:
            raise ValueError(f"labels must be 2-D, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"labels must be integer-valued, got dtype {arr.dtype}")
        if arr.size and arr.min() < 0:
            raise ValueError("labels must be non-negative")
        arr = np.ascontiguousarray(arr.astype(np.int64))
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    def valid_classes(self) -> list[int]:
        """Sorted class ids present in the map, excluding the ignore index."""
        return [int(c) for c in np.unique(self.labels) if c != self.ignore_index]

    def validate_against(self, cube: HyperCube) -> None:
        if (self.height, self.width) != (cube.height, cube.width):
            raise ValueError(
                f"label dims {(self.height, self.width)} do not match "
                f"cube dims {(cube.height, cube.width)}"
            )


@dataclass(frozen=True)
class PseudoRgb:
    """H x W x 3 display image with channels in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"pseudo-RGB must be (H, W, 3), got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("pseudo-RGB contains NaN or Inf")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("pseudo-RGB values must lie in [0, 1]")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class BandTriple:
    """0-based band indices used for the fixed-band RGB projection."""

    r: int
    g: int
    b: int

    def validate(self, bands: int) -> None:
        for name, idx in (("r", self.r), ("g", self.g), ("b", self.b)):
            if not 0 <= idx < bands:
                raise IndexError(f"band index {name}={idx} out of range for {bands} bands")

    @classmethod
    def default_for(cls, bands: int) -> "BandTriple":
        """First / middle / last band: a serviceable display default."""
        return cls(0, bands // 2, bands - 1)


def spectrum_at(cube: HyperCube, row: int, col: int) -> np.ndarray:
    """Spectrum of one pixel as a C-length float64 vector."""
    if not (0 <= row < cube.height and 0 <= col < cube.width):
        raise IndexError(
            f"pixel ({row}, {col}) out of bounds for {cube.height}x{cube.width} image"
        )
    return cube.data[row, col].copy()


def pseudo_rgb(cube: HyperCube, bands: BandTriple, normalize: str = "per_band_minmax") -> PseudoRgb:
    """Project three cube bands onto an RGB image in [0, 1].

    `per_band_minmax` stretches each channel independently, `global_minmax`
    uses one range for all three, `none` requires the source bands to already
    lie in [0, 1]. A constant channel under min-max stretching maps to 0.
    """
    if normalize not in NORMALIZE_MODES:
        raise ValueError(f"unknown normalize mode {normalize!r}; expected one of {NORMALIZE_MODES}")
    bands.validate(cube.bands)
    sel = cube.data[:, :, [bands.r, bands.g, bands.b]].astype(np.float64)

    if normalize == "none":
        if sel.min() < 0.0 or sel.max() > 1.0:
            raise ValueError("normalize='none' requires band values already in [0, 1]")
        out = sel
    elif normalize == "per_band_minmax":
        out = np.empty_like(sel)
        for ch in range(3):
            out[:, :, ch] = _minmax_scale(sel[:, :, ch])
    else:
        out = _minmax_scale(sel)
    return PseudoRgb(out)


def _minmax_scale(values: np.ndarray) -> np.ndarray:
    lo = values.min()
    hi = values.max()
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)
