"""HTTP service exposing datasets and interactive segmentation to the UI.

Sessions are stateless: every request carries the full click list, so
concurrent clients can never corrupt each other and undo is free. Score
maps travel as raw little-endian float32 in base64 (the same convention as
the remote-backend wire format); PNG is used only for previews.
"""

from __future__ import annotations

import io
import logging
import os
import threading
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image
from pydantic import BaseModel

from . import envi
from .backends import RemoteBackend, RemoteBackendError, backend_from_name, encode_f32
from .cube import BandTriple, HyperCube, LabelMap, pseudo_rgb
from .evaluation import dice, dice_at_max
from .spectral import ClickSet

log = logging.getLogger("hsiseg.service")


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class DatasetEntry:
    image_id: str
    header_path: str
    labels_path: str | None
    height: int
    width: int
    bands: int

    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _cube: HyperCube | None = field(default=None, repr=False)
    _labels: LabelMap | None = field(default=None, repr=False)

    def cube(self) -> HyperCube:
        with self._lock:
            if self._cube is None:
                self._cube = envi.load_envi(self.header_path)
            return self._cube

    def labels(self, ignore_index: int) -> LabelMap | None:
        if self.labels_path is None:
            return None
        with self._lock:
            if self._labels is None:
                self._labels = envi.load_labels(self.labels_path, ignore_index=ignore_index)
            return self._labels


def scan_dataset(data_dir: str) -> dict[str, DatasetEntry]:
    """Find cube/label header pairs; unreadable files are skipped with a warning.

    Convention: ``<id>.hdr`` is a cube, ``<id>_labels.hdr`` its label raster.
    """
    entries: dict[str, DatasetEntry] = {}
    if not os.path.isdir(data_dir):
        raise NotADirectoryError(f"data dir not found: {data_dir}")
    headers = sorted(
        f for f in os.listdir(data_dir)
        if f.lower().endswith(".hdr") and not f.lower().endswith("_labels.hdr")
    )
    for name in headers:
        stem = name[:-4]
        path = os.path.join(data_dir, name)
        try:
            header = envi.read_header(path)
            envi._binary_path_for(path)
        except Exception as exc:  # noqa: BLE001 - skip-and-warn per contract
            log.warning("skipping unreadable raster %s: %s", path, exc)
            continue
        labels_path = os.path.join(data_dir, stem + "_labels.hdr")
        if not os.path.isfile(labels_path):
            labels_path = None
        entries[stem] = DatasetEntry(
            image_id=stem,
            header_path=path,
            labels_path=labels_path,
            height=header["lines"],
            width=header["samples"],
            bands=header["bands"],
        )
    return entries


class SegmentRequest(BaseModel):
    method: str
    clicks: list[tuple[int, int]]
    class_id: int | None = None


def create_app(
    data_dir: str,
    remote_url: str | None = None,
    cors_origin: str | None = None,
    ui_dir: str | None = None,
    ignore_index: int = 255,
    remote_timeout: float = 30.0,
    remote_inflight: int = 4,
) -> FastAPI:
    app = FastAPI(title="hsiseg service")
    entries = scan_dataset(data_dir)
    remote_gate = threading.Semaphore(max(1, remote_inflight))

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware, allow_origins=[cors_origin],
            allow_methods=["*"], allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"error": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    def _entry(image_id: str) -> DatasetEntry:
        if image_id not in entries:
            raise ApiError(404, f"unknown image id {image_id!r}")
        return entries[image_id]

    def _backend(method: str):
        if method == "remote":
            if not remote_url:
                raise ApiError(400, "no remote backend configured (start with --remote <url>)")
            return RemoteBackend(endpoint=remote_url, timeout=remote_timeout)
        try:
            return backend_from_name(method, remote_timeout=remote_timeout)
        except ValueError as exc:
            raise ApiError(400, str(exc))

    @app.get("/api/images")
    def list_images():
        return [
            {
                "id": e.image_id,
                "height": e.height,
                "width": e.width,
                "bands": e.bands,
                "has_labels": e.labels_path is not None,
            }
            for e in entries.values()
        ]

    @app.get("/api/images/{image_id}/preview")
    def preview(image_id: str, bands: str | None = None):
        entry = _entry(image_id)
        cube = entry.cube()
        if bands is None:
            triple = BandTriple.default_for(cube.bands)
        else:
            try:
                r, g, b = (int(x) for x in bands.split(","))
                triple = BandTriple(r, g, b)
            except ValueError:
                raise ApiError(400, f"bands must be 'r,g,b' integers, got {bands!r}")
        try:
            rgb = pseudo_rgb(cube, triple, normalize="per_band_minmax")
        except IndexError as exc:
            raise ApiError(400, str(exc))
        img = Image.fromarray(np.round(rgb.data * 255.0).astype(np.uint8))
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    @app.get("/api/images/{image_id}/spectrum")
    def spectrum(image_id: str, row: int, col: int):
        entry = _entry(image_id)
        cube = entry.cube()
        if not (0 <= row < cube.height and 0 <= col < cube.width):
            raise ApiError(400, f"pixel ({row}, {col}) out of bounds")
        doc = {"values": cube.data[row, col].tolist()}
        if cube.wavelengths is not None:
            doc["wavelengths"] = list(cube.wavelengths)
        return doc

    @app.post("/api/images/{image_id}/segment")
    def segment(image_id: str, req: SegmentRequest):
        entry = _entry(image_id)
        cube = entry.cube()
        if not req.clicks:
            raise ApiError(400, "click list is empty")
        try:
            clicks = ClickSet(tuple(req.clicks))
            clicks.validate_bounds(cube.height, cube.width)
        except (ValueError, IndexError) as exc:
            raise ApiError(400, str(exc))
        backend = _backend(req.method)
        rgb = pseudo_rgb(cube, BandTriple.default_for(cube.bands), "per_band_minmax")
        try:
            if isinstance(backend, RemoteBackend):
                with remote_gate:  # bound concurrent upstream calls
                    scores = backend.segment(cube, rgb, clicks)
            else:
                scores = backend.segment(cube, rgb, clicks)
        except RemoteBackendError as exc:
            raise ApiError(502, str(exc))
        except (ValueError, IndexError) as exc:
            raise ApiError(400, str(exc))

        doc = {"scores_b64": encode_f32(scores)}
        labels = entry.labels(ignore_index) if req.class_id is not None else None
        if labels is not None:
            foreground = labels.labels == req.class_id
            valid = labels.labels != labels.ignore_index
            d_max, best_tau = dice_at_max(scores, foreground, valid)
            doc["dice"] = {
                "at_05": dice(scores > 0.5, foreground, valid),
                "at_max": d_max,
                "best_tau": best_tau,
            }
        return doc

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
