"""Image kernels backing the interaction protocol: histogram equalization,
connected components, exact Euclidean distance transform, bilinear resize."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

_NEIGHBORS_4 = ((-1, 0), (1, 0), (0, -1), (0, 1))
_NEIGHBORS_8 = _NEIGHBORS_4 + ((-1, -1), (-1, 1), (1, -1), (1, 1))


def histogram_equalize(score_map: np.ndarray, bins: int = 256) -> np.ndarray:
    """Contrast-stretch a score map by histogram equalization.

    Values are binned uniformly over [min, max] of the input; the output is
    (cdf(bin) - cdf_min) / (N - cdf_min), which maps the occupied range onto
    [0, 1]. A constant map is returned unchanged. The mapping is monotone
    non-decreasing, so thresholded masks stay nested.
    """
    arr = np.asarray(score_map, dtype=np.float64)
    if bins < 1:
        raise ValueError("bins must be >= 1")
    lo = arr.min()
    hi = arr.max()
    if hi == lo:
        return arr.copy()

    idx = np.minimum((arr - lo) / (hi - lo) * bins, bins - 1).astype(np.int64)
    hist = np.bincount(idx.ravel(), minlength=bins)
    cdf = np.cumsum(hist)
    n = arr.size
    cdf_min = cdf[np.nonzero(hist)[0][0]]
    if n == cdf_min:
        # every pixel in one bin (only possible for bins == 1)
        return arr.copy()
    return (cdf[idx] - cdf_min) / float(n - cdf_min)


@dataclass(frozen=True)
class ComponentLabeling:
    """Labels: 0 = background, 1..n = components in row-major first-encounter
    order. ``sizes[k]`` is the pixel count of component k+1."""

    labels: np.ndarray
    sizes: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.sizes)


def connected_components(mask: np.ndarray, connectivity: int = 4) -> ComponentLabeling:
    """Label the true pixels of a binary mask by BFS flood fill."""
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    m = np.asarray(mask, dtype=bool)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    neighbors = _NEIGHBORS_4 if connectivity == 4 else _NEIGHBORS_8

    h, w = m.shape
    labels = np.zeros((h, w), dtype=np.int32)
    sizes: list[int] = []
    for r0 in range(h):
        for c0 in range(w):
            if not m[r0, c0] or labels[r0, c0]:
                continue
            label = len(sizes) + 1
            size = 0
            queue = deque([(r0, c0)])
            labels[r0, c0] = label
            while queue:
                r, c = queue.popleft()
                size += 1
                for dr, dc in neighbors:
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < h and 0 <= cc < w and m[rr, cc] and not labels[rr, cc]:
                        labels[rr, cc] = label
                        queue.append((rr, cc))
            sizes.append(size)
    return ComponentLabeling(labels, tuple(sizes))


def _edt_1d(f: np.ndarray) -> np.ndarray:
    """Felzenszwalb-Huttenlocher 1-D squared distance transform."""
    n = f.shape[0]
    d = np.empty(n, dtype=np.int64)
    v = np.empty(n, dtype=np.int64)  # parabola foci
    z = np.empty(n + 1, dtype=np.float64)  # envelope boundaries
    k = 0
    v[0] = 0
    z[0] = -np.inf
    z[1] = np.inf
    for q in range(1, n):
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        d[q] = (q - v[k]) ** 2 + f[v[k]]
    return d


def distance_transform_squared(mask: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distance to the nearest false pixel.

    The image border counts as false, so a true pixel on the edge has
    squared distance 1. False pixels map to 0. Integer-exact.
    """
    m = np.asarray(mask, dtype=bool)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    h, w = m.shape
    # pad with a false ring so the border acts as background
    inf = np.int64((h + 2) ** 2 + (w + 2) ** 2)
    f = np.zeros((h + 2, w + 2), dtype=np.int64)
    f[1:-1, 1:-1] = np.where(m, inf, 0)

    for c in range(w + 2):
        f[:, c] = _edt_1d(f[:, c])
    for r in range(h + 2):
        f[r, :] = _edt_1d(f[r, :])
    return f[1:-1, 1:-1]


def distance_transform(mask: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance to the nearest false pixel (border = false)."""
    return np.sqrt(distance_transform_squared(mask).astype(np.float64))


def largest_component_center(mask: np.ndarray, connectivity: int = 4) -> tuple[int, int]:
    """Interior-most pixel of the largest connected component.

    Size ties pick the component first encountered in row-major order;
    distance ties pick the smallest row, then the smallest column. The
    distance transform is computed on the full mask, restricted to the
    chosen component.
    """
    m = np.asarray(mask, dtype=bool)
    labeling = connected_components(m, connectivity=connectivity)
    if labeling.count == 0:
        raise ValueError("mask has no true pixels")
    # np.argmax returns the first (smallest) index on ties
    target = 1 + int(np.argmax(np.asarray(labeling.sizes)))
    dsq = distance_transform_squared(m)
    dsq = np.where(labeling.labels == target, dsq, -1)
    flat = int(np.argmax(dsq))
    return flat // m.shape[1], flat % m.shape[1]


def resize_bilinear(score_map: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Corner-aligned bilinear resampling of a 2-D map.

    Output corners sample input corners exactly; all outputs are convex
    combinations of inputs, so the result never leaves the input's range.
    """
    arr = np.asarray(score_map, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D map, got shape {arr.shape}")
    if out_h < 1 or out_w < 1:
        raise ValueError("output dimensions must be >= 1")
    in_h, in_w = arr.shape
    if (out_h, out_w) == (in_h, in_w):
        return arr.copy()

    def _coords(n_out, n_in):
        if n_out == 1 or n_in == 1:
            return np.zeros(n_out, dtype=np.float64)
        return np.arange(n_out, dtype=np.float64) * (n_in - 1) / (n_out - 1)

    ry = _coords(out_h, in_h)
    rx = _coords(out_w, in_w)
    y0 = np.floor(ry).astype(np.int64)
    x0 = np.floor(rx).astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (ry - y0)[:, None]
    fx = (rx - x0)[None, :]

    top = arr[np.ix_(y0, x0)] * (1 - fx) + arr[np.ix_(y0, x1)] * fx
    bottom = arr[np.ix_(y1, x0)] * (1 - fx) + arr[np.ix_(y1, x1)] * fx
    return top * (1 - fy) + bottom * fy
