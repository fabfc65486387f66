"""Spectral comparison functions and click-aggregated score maps.

Two untrained pixel-vs-reference metrics (spectral angle and Pearson
correlation) plus a contrast-equalized variant of the angle map. Per-click
maps are reduced by pixel-wise maximum, so adding clicks can only raise
scores.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .cube import HyperCube
from .imgproc import histogram_equalize


class ScfKind(enum.Enum):
    PCC = "pcc"
    SA = "sa"
    SA_EQUALIZED = "sa-eq"


@dataclass(frozen=True)
class ClickSet:
    """Ordered, duplicate-free list of (row, col) click coordinates."""

    points: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pts = tuple((int(r), int(c)) for r, c in self.points)
        if len(set(pts)) != len(pts):
            raise ValueError("click set contains duplicate points")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, point) -> bool:
        return tuple(point) in self.points

    def with_click(self, row: int, col: int) -> "ClickSet":
        return ClickSet(self.points + ((int(row), int(col)),))

    def validate_bounds(self, height: int, width: int) -> None:
        for r, c in self.points:
            if not (0 <= r < height and 0 <= c < width):
                raise IndexError(
                    f"click ({r}, {c}) out of bounds for {height}x{width} image"
                )

    @classmethod
    def of(cls, *points) -> "ClickSet":
        return cls(tuple(points))


def spectral_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Angle in radians between two spectra; 0 for parallel, pi/2 orthogonal.

    Scale-invariant. Computed as 2*atan2(|u - v|, |u + v|) on the normalized
    vectors rather than arccos of the clamped cosine: the two agree exactly
    in real arithmetic, but arccos loses ~1e-8 near parallel vectors while
    this form stays accurate over the whole [0, pi] range.
    """
    va = np.asarray(a, dtype=np.float64).ravel()
    vb = np.asarray(b, dtype=np.float64).ravel()
    if va.shape != vb.shape:
        raise ValueError(f"spectrum lengths differ: {va.size} vs {vb.size}")
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ValueError("spectral angle is undefined for a zero-norm spectrum")
    ua = va / na
    ub = vb / nb
    return float(2.0 * np.arctan2(np.linalg.norm(ua - ub), np.linalg.norm(ua + ub)))


def pcc(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation between two spectra, clamped to [-1, 1]."""
    va = np.asarray(a, dtype=np.float64).ravel()
    vb = np.asarray(b, dtype=np.float64).ravel()
    if va.shape != vb.shape:
        raise ValueError(f"spectrum lengths differ: {va.size} vs {vb.size}")
    if va.size < 2:
        raise ValueError("correlation needs at least 2 bands")
    da = va - va.mean()
    db = vb - vb.mean()
    na = np.linalg.norm(da)
    nb = np.linalg.norm(db)
    if na == 0.0 or nb == 0.0:
        raise ValueError("correlation is undefined for a constant spectrum")
    return float(np.clip(np.dot(da, db) / (na * nb), -1.0, 1.0))


def _sa_click_map(flat: np.ndarray, norms: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """1 - angle/pi against one reference, for every pixel spectrum in `flat`.

    Same atan2 form as spectral_angle so same-class pixels under pure
    brightness scaling score exactly 1."""
    ref_norm = np.linalg.norm(ref)
    if ref_norm == 0.0:
        raise ValueError("clicked pixel has a zero-norm spectrum")
    scores = np.zeros(flat.shape[0], dtype=np.float64)
    ok = norms > 0.0
    unit = flat[ok] / norms[ok, None]
    ref_unit = ref / ref_norm
    theta = 2.0 * np.arctan2(
        np.linalg.norm(unit - ref_unit, axis=1),
        np.linalg.norm(unit + ref_unit, axis=1),
    )
    # dead (all-zero) pixels keep score 0: maximally dissimilar
    scores[ok] = 1.0 - theta / np.pi
    return scores


def _pcc_click_map(dev: np.ndarray, dev_norms: np.ndarray, ref_dev: np.ndarray) -> np.ndarray:
    """(rho + 1) / 2 against one mean-centered reference."""
    ref_norm = np.linalg.norm(ref_dev)
    if ref_norm == 0.0:
        raise ValueError("clicked pixel has a constant spectrum")
    rho = np.zeros(dev.shape[0], dtype=np.float64)  # neutral rho for flat pixels
    ok = dev_norms > 0.0
    rho[ok] = np.clip(dev[ok] @ ref_dev / (dev_norms[ok] * ref_norm), -1.0, 1.0)
    return (rho + 1.0) / 2.0


def scf_map(cube: HyperCube, clicks: ClickSet, kind: ScfKind) -> np.ndarray:
    """Click-conditioned similarity map in [0, 1] over the whole cube.

    SA maps are 1 - angle/pi; PCC maps are (rho + 1) / 2 so both share the
    ScoreMap range contract. Multi-click maps are the pixel-wise maximum of
    the single-click maps; the equalized variant applies histogram
    equalization to that aggregated map.
    """
    if len(clicks) == 0:
        raise ValueError("click set is empty")
    clicks.validate_bounds(cube.height, cube.width)

    h, w, c = cube.data.shape
    flat = cube.data.reshape(h * w, c)

    if kind in (ScfKind.SA, ScfKind.SA_EQUALIZED):
        norms = np.linalg.norm(flat, axis=1)
        best = np.zeros(h * w, dtype=np.float64)
        for r, col in clicks:
            np.maximum(best, _sa_click_map(flat, norms, cube.data[r, col]), out=best)
        out = best.reshape(h, w)
        if kind is ScfKind.SA_EQUALIZED:
            out = histogram_equalize(out)
        return out

    if kind is ScfKind.PCC:
        if c < 2:
            raise ValueError("correlation needs at least 2 bands")
        dev = flat - flat.mean(axis=1, keepdims=True)
        dev_norms = np.linalg.norm(dev, axis=1)
        best = np.zeros(h * w, dtype=np.float64)
        for r, col in clicks:
            ref_dev = dev[r * w + col]
            np.maximum(best, _pcc_click_map(dev, dev_norms, ref_dev), out=best)
        return best.reshape(h, w)

    raise ValueError(f"unknown SCF kind: {kind!r}")
