"""Command-line entry point: eval, segment, synth, convert, serve.

Configuration precedence is flags > manifest file > defaults; the manifest
is plain JSON with keys named after the long flags. Every command is
deterministic given its inputs and seed, so rerunning overwrites identical
outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import socket
import sys

import numpy as np

from . import envi
from .backends import backend_from_name
from .cube import BandTriple, pseudo_rgb
from .evaluation import EvalConfig, evaluate_dataset
from .phantom import PhantomSpec, generate
from .spectral import ClickSet

_EVAL_DEFAULTS = {
    "data_dir": None,
    "method": "sa",
    "max_clicks": 5,
    "threshold": 0.5,
    "ignore_index": 255,
    "bands": None,  # "r,g,b" or None for first/middle/last
    "jobs": 1,
    "seed": 0,
    "out": "report",
}


def _parse_bands(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"expected 'r,g,b', got {text!r}")
    r, g, b = (int(p) for p in parts)
    return r, g, b


def _parse_clicks(text: str) -> ClickSet:
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'row,col' pairs separated by ';', got {chunk!r}")
        points.append((int(parts[0]), int(parts[1])))
    if not points:
        raise ValueError("no clicks given")
    return ClickSet(tuple(points))


def _scan_pairs(data_dir: str) -> list[tuple[str, str, str]]:
    """(image id, cube header, labels header) for every labeled cube."""
    if not os.path.isdir(data_dir):
        raise NotADirectoryError(f"data dir not found: {data_dir}")
    pairs = []
    for name in sorted(os.listdir(data_dir)):
        if not name.lower().endswith(".hdr") or name.lower().endswith("_labels.hdr"):
            continue
        stem = name[:-4]
        labels = os.path.join(data_dir, stem + "_labels.hdr")
        if os.path.isfile(labels):
            pairs.append((stem, os.path.join(data_dir, name), labels))
    if not pairs:
        raise FileNotFoundError(
            f"no cube/label pairs (<id>.hdr + <id>_labels.hdr) found in {data_dir}"
        )
    return pairs


def _merge_config(args: argparse.Namespace, defaults: dict) -> dict:
    merged = dict(defaults)
    manifest_path = getattr(args, "manifest", None)
    if manifest_path:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        unknown = set(manifest) - set(defaults)
        if unknown:
            raise ValueError(f"unknown manifest keys: {sorted(unknown)}")
        merged.update(manifest)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _merge_config(args, _EVAL_DEFAULTS)
    if not cfg["data_dir"]:
        raise ValueError("--data-dir is required (flag or manifest)")

    pairs = _scan_pairs(cfg["data_dir"])
    backend = backend_from_name(cfg["method"])
    config = EvalConfig(
        max_clicks=int(cfg["max_clicks"]),
        threshold=float(cfg["threshold"]),
        ignore_index=int(cfg["ignore_index"]),
    )
    bands = _parse_bands(cfg["bands"]) if cfg["bands"] else None

    dataset = []
    image_ids = []
    for image_id, cube_path, labels_path in pairs:
        cube = envi.load_envi(cube_path)
        labels = envi.load_labels(labels_path, ignore_index=config.ignore_index)
        labels.validate_against(cube)
        triple = BandTriple(*bands) if bands else BandTriple.default_for(cube.bands)
        rgb = pseudo_rgb(cube, triple, normalize="per_band_minmax")
        dataset.append((cube, labels, rgb))
        image_ids.append(image_id)

    report = evaluate_dataset(
        backend,
        dataset,
        config,
        method=cfg["method"],
        dataset_name=os.path.basename(os.path.normpath(cfg["data_dir"])),
        image_ids=image_ids,
        jobs=int(cfg["jobs"]),
    )

    out = cfg["out"]
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    with open(out + ".json", "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    with open(out + ".csv", "w", encoding="utf-8") as fh:
        fh.write(report.to_csv())
    print(report.summary_line())
    return 0


def cmd_segment(args: argparse.Namespace) -> int:
    from PIL import Image

    cube = envi.load_envi(args.cube)
    clicks = _parse_clicks(args.clicks)
    clicks.validate_bounds(cube.height, cube.width)
    backend = backend_from_name(args.method)
    triple = (BandTriple(*_parse_bands(args.bands)) if args.bands
              else BandTriple.default_for(cube.bands))
    rgb = pseudo_rgb(cube, triple, normalize="per_band_minmax")
    scores = backend.segment(cube, rgb, clicks)

    envi.write_envi(scores[:, :, None], args.out + ".hdr", interleave="bsq", data_type=4)
    preview = np.round(scores * 255.0).astype(np.uint8)
    Image.fromarray(preview, mode="L").save(args.out + ".png")
    print(f"wrote {args.out}.hdr / .img and {args.out}.png")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = PhantomSpec(
        height=args.height,
        width=args.width,
        bands=args.bands,
        n_materials=args.materials,
        noise_sigma=args.noise_sigma,
        seed=args.seed,
        region_style=args.region_style,
        brightness_jitter=not args.no_brightness_jitter,
    )
    cube, labels = generate(spec)
    out = args.out
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    wavelengths = np.linspace(400.0, 1000.0, spec.bands)
    envi.write_envi(cube.data, out + ".hdr", interleave="bsq", data_type=5,
                    wavelengths=wavelengths)
    envi.write_labels(labels, out + "_labels.hdr")
    manifest = dataclasses.asdict(spec) | {"ignore_index": labels.ignore_index}
    with open(out + ".json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out}.hdr / .img, {out}_labels.hdr / .img, {out}.json")
    return 0


def cmd_convert(args: argparse.Namespace) -> int:
    arr, header = envi._read_raw(args.input)
    data_type = args.data_type if args.data_type is not None else header["data_type"]
    byte_order = args.byte_order if args.byte_order is not None else header["byte_order"]
    envi.write_envi(
        arr.astype(np.float64),
        args.output,
        interleave=args.interleave,
        data_type=data_type,
        byte_order=byte_order,
        wavelengths=header["wavelengths"],
    )
    print(f"wrote {args.output} ({args.interleave}, type {data_type})")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    host, _, port_text = args.bind.rpartition(":")
    host = host or "127.0.0.1"
    port = int(port_text)

    # fail fast with a clean diagnostic instead of a uvicorn traceback
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise OSError(f"cannot bind {args.bind}: {exc}") from exc
    finally:
        probe.close()

    app = create_app(
        args.data_dir,
        remote_url=args.remote,
        cors_origin=args.cors,
        ui_dir=args.ui_dir,
        ignore_index=args.ignore_index,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsiseg",
        description="Interactive hyperspectral segmentation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="run the simulated-click benchmark over a dataset dir")
    p.add_argument("--data-dir", dest="data_dir", help="directory of <id>.hdr + <id>_labels.hdr pairs")
    p.add_argument("--manifest", help="JSON manifest; flags override its values")
    p.add_argument("--method", help="pcc | sa | sa-eq | remote:<url>")
    p.add_argument("--max-clicks", dest="max_clicks", type=int, help="interaction steps per task (default 5)")
    p.add_argument("--threshold", type=float, help="fixed decision threshold (default 0.5)")
    p.add_argument("--ignore-index", dest="ignore_index", type=int, help="label value to exclude (default 255)")
    p.add_argument("--bands", help="pseudo-RGB bands as 'r,g,b' (default first,middle,last)")
    p.add_argument("--jobs", type=int, help="parallel sessions (default 1); results identical for any value")
    p.add_argument("--seed", type=int, help="recorded in outputs; evaluation itself is deterministic")
    p.add_argument("--out", help="output stem; writes <out>.json and <out>.csv (default report)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("segment", help="segment one cube from a click list")
    p.add_argument("--cube", required=True, help="ENVI header of the input cube")
    p.add_argument("--clicks", required=True, help="clicks as 'row,col;row,col;...'")
    p.add_argument("--method", default="sa", help="pcc | sa | sa-eq | remote:<url>")
    p.add_argument("--bands", help="pseudo-RGB bands as 'r,g,b'")
    p.add_argument("--out", required=True, help="output stem; writes <out>.hdr/.img (f32) and <out>.png")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("synth", help="generate a synthetic labeled phantom scene")
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--bands", type=int, default=32)
    p.add_argument("--materials", type=int, default=3)
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--region-style", dest="region_style", default="voronoi", choices=["voronoi", "blobs"])
    p.add_argument("--no-brightness-jitter", dest="no_brightness_jitter", action="store_true",
                   help="disable the per-pixel multiplicative brightness factor")
    p.add_argument("--out", required=True, help="output stem; writes cube, labels and a JSON manifest")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("convert", help="rewrite an ENVI raster with a different interleave")
    p.add_argument("input", help="input .hdr path")
    p.add_argument("output", help="output .hdr path")
    p.add_argument("--interleave", required=True, choices=["bsq", "bil", "bip"])
    p.add_argument("--data-type", dest="data_type", type=int, choices=sorted(envi.DTYPE_CODES),
                   help="override the ENVI data type code (default: keep)")
    p.add_argument("--byte-order", dest="byte_order", type=int, choices=[0, 1],
                   help="override byte order (default: keep)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("serve", help="serve datasets and segmentation over HTTP")
    p.add_argument("--bind", default="127.0.0.1:8000", help="host:port to listen on")
    p.add_argument("--data-dir", dest="data_dir", required=True)
    p.add_argument("--remote", help="URL of an external learned backend")
    p.add_argument("--cors", help="allowed CORS origin")
    p.add_argument("--ui-dir", dest="ui_dir", help="static frontend assets to serve at /")
    p.add_argument("--ignore-index", dest="ignore_index", type=int, default=255)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
