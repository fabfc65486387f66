"""Segmentation backends: built-in spectral ones and a remote HTTP client.

Every backend maps (cube, pseudo-RGB, clicks) to an H x W score map in
[0, 1]. The remote backend ships a fusion input (pseudo-RGB + equalized
spectral-angle prompt + clicks) over a small JSON/base64 wire format and
refuses to hand back anything that violates the score-map contract.
"""

from __future__ import annotations

import base64
import binascii
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
import requests

from .cube import HyperCube, PseudoRgb
from .imgproc import resize_bilinear
from .spectral import ClickSet, ScfKind, scf_map


@runtime_checkable
class SegmentationBackend(Protocol):
    def segment(self, cube: HyperCube, rgb: PseudoRgb, clicks: ClickSet) -> np.ndarray:
        """Score map with the cube's dims, values in [0, 1], deterministic."""
        ...  # pragma: no cover


class RemoteBackendError(RuntimeError):
    """Base class for remote-backend failures (never silently swallowed)."""


class RemoteTimeoutError(RemoteBackendError):
    pass


class RemoteTransportError(RemoteBackendError):
    pass


class RemoteStatusError(RemoteBackendError):
    def __init__(self, status: int, message: str):
        super().__init__(f"remote backend returned status {status}: {message}")
        self.status = status


class RemoteProtocolError(RemoteBackendError):
    """Response parsed but violates the wire contract (shape/range/encoding)."""


def encode_f32(arr: np.ndarray) -> str:
    """Raw little-endian float32 bytes, base64-encoded, C order."""
    return base64.b64encode(
        np.ascontiguousarray(arr, dtype="<f4").tobytes()
    ).decode("ascii")


def decode_f32(data: str, count: int) -> np.ndarray:
    """Inverse of encode_f32; validates the element count."""
    try:
        raw = base64.b64decode(data, validate=True)
    except (binascii.Error, TypeError, ValueError) as exc:
        raise RemoteProtocolError(f"invalid base64 payload: {exc}") from exc
    if len(raw) != 4 * count:
        raise RemoteProtocolError(
            f"payload has {len(raw)} bytes, expected {4 * count} (= {count} float32)"
        )
    return np.frombuffer(raw, dtype="<f4").astype(np.float64)


@dataclass(frozen=True)
class FusionInput:
    """What the learned backend consumes: pseudo-RGB, the equalized
    spectral-angle prompt resampled to RGB resolution, and the clicks
    mapped into that coordinate frame."""

    rgb: PseudoRgb
    spectral_prompt: np.ndarray
    clicks: ClickSet

    def __post_init__(self):
        prompt = np.asarray(self.spectral_prompt, dtype=np.float64)
        if prompt.shape != (self.rgb.height, self.rgb.width):
            raise ValueError(
                f"prompt dims {prompt.shape} do not match rgb dims "
                f"{(self.rgb.height, self.rgb.width)}"
            )
        if prompt.min() < 0.0 or prompt.max() > 1.0:
            raise ValueError("spectral prompt values must lie in [0, 1]")
        object.__setattr__(self, "spectral_prompt", prompt)

    def to_wire(self) -> dict:
        return {
            "height": self.rgb.height,
            "width": self.rgb.width,
            "clicks": [[r, c] for r, c in self.clicks],
            "rgb_b64": encode_f32(self.rgb.data),
            "prompt_b64": encode_f32(self.spectral_prompt),
        }


def _rescale_clicks(clicks: ClickSet, from_hw: tuple[int, int], to_hw: tuple[int, int]) -> ClickSet:
    """Proportional click mapping with nearest-pixel rounding.

    Distinct clicks can collapse onto one target pixel when downscaling;
    duplicates are dropped, keeping first-click order.
    """
    if from_hw == to_hw:
        return clicks
    sy = to_hw[0] / from_hw[0]
    sx = to_hw[1] / from_hw[1]
    seen: list[tuple[int, int]] = []
    for r, c in clicks:
        rr = min(to_hw[0] - 1, int(np.floor(r * sy + 0.5)))
        cc = min(to_hw[1] - 1, int(np.floor(c * sx + 0.5)))
        if (rr, cc) not in seen:
            seen.append((rr, cc))
    return ClickSet(tuple(seen))


def build_fusion_input(cube: HyperCube, rgb: PseudoRgb, clicks: ClickSet) -> FusionInput:
    """Equalized spectral-angle map resized to RGB resolution + mapped clicks."""
    prompt = scf_map(cube, clicks, ScfKind.SA_EQUALIZED)
    if (cube.height, cube.width) != (rgb.height, rgb.width):
        prompt = resize_bilinear(prompt, rgb.height, rgb.width)
    mapped = _rescale_clicks(clicks, (cube.height, cube.width), (rgb.height, rgb.width))
    return FusionInput(rgb=rgb, spectral_prompt=prompt, clicks=mapped)


@dataclass(frozen=True)
class ScfBackend:
    """Spectral-only backend; ignores the pseudo-RGB entirely."""

    kind: ScfKind

    def segment(self, cube: HyperCube, rgb: PseudoRgb, clicks: ClickSet) -> np.ndarray:
        return scf_map(cube, clicks, self.kind)


def scf_backend(kind: ScfKind) -> ScfBackend:
    return ScfBackend(kind)


@dataclass(frozen=True)
class RemoteBackend:
    """Client for an external learned backend speaking the fusion wire format.

    POSTs to ``{endpoint}/segment`` and validates the response before anything
    reaches the evaluation harness. Failures raise typed errors; there is no
    silent fallback to a spectral backend.
    """

    endpoint: str
    timeout: float = 30.0

    def segment(self, cube: HyperCube, rgb: PseudoRgb, clicks: ClickSet) -> np.ndarray:
        fusion = build_fusion_input(cube, rgb, clicks)
        url = self.endpoint.rstrip("/") + "/segment"
        try:
            resp = requests.post(url, json=fusion.to_wire(), timeout=self.timeout)
        except requests.exceptions.Timeout as exc:
            raise RemoteTimeoutError(f"remote backend timed out after {self.timeout}s") from exc
        except requests.exceptions.RequestException as exc:
            raise RemoteTransportError(f"cannot reach remote backend: {exc}") from exc

        if resp.status_code != 200:
            try:
                message = resp.json().get("error", resp.text)
            except ValueError:
                message = resp.text
            raise RemoteStatusError(resp.status_code, str(message)[:500])

        try:
            doc = resp.json()
        except ValueError as exc:
            raise RemoteProtocolError(f"response is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict) or not {"height", "width", "scores_b64"} <= doc.keys():
            raise RemoteProtocolError("response missing height/width/scores_b64")

        if (doc["height"], doc["width"]) != (rgb.height, rgb.width):
            raise RemoteProtocolError(
                f"response shape mismatch: got {doc['height']}x{doc['width']}, "
                f"expected {rgb.height}x{rgb.width}"
            )
        scores = decode_f32(doc["scores_b64"], rgb.height * rgb.width)
        scores = scores.reshape(rgb.height, rgb.width)
        if not np.isfinite(scores).all():
            raise RemoteProtocolError("score map contains NaN or Inf")
        if scores.min() < 0.0 or scores.max() > 1.0:
            raise RemoteProtocolError(
                f"score out of range [0, 1]: min {scores.min()}, max {scores.max()}"
            )
        if (cube.height, cube.width) != (rgb.height, rgb.width):
            scores = np.clip(resize_bilinear(scores, cube.height, cube.width), 0.0, 1.0)
        return scores


def remote_backend(endpoint: str, timeout: float = 30.0) -> RemoteBackend:
    return RemoteBackend(endpoint=endpoint, timeout=timeout)


METHOD_NAMES = ("pcc", "sa", "sa-eq")


def backend_from_name(name: str, remote_timeout: float = 30.0) -> SegmentationBackend:
    """Map a CLI/service method string to a backend.

    Accepts ``pcc``, ``sa``, ``sa-eq`` or ``remote:<url>``.
    """
    if name == "pcc":
        return ScfBackend(ScfKind.PCC)
    if name == "sa":
        return ScfBackend(ScfKind.SA)
    if name == "sa-eq":
        return ScfBackend(ScfKind.SA_EQUALIZED)
    if name.startswith("remote:"):
        url = name[len("remote:"):]
        if not url:
            raise ValueError("remote method needs a URL: remote:<url>")
        return RemoteBackend(endpoint=url, timeout=remote_timeout)
    raise ValueError(
        f"unknown method {name!r}; valid methods: {', '.join(METHOD_NAMES)}, remote:<url>"
    )
