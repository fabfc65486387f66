"""ENVI raster reader/writer (BSQ / BIL / BIP, header + raw binary pair).

Header parsing is deliberately tolerant: keys are case-insensitive,
whitespace does not matter, ``{...}`` list values may span lines and are
ignored except for ``wavelength``, and unknown keys are skipped. Real-world
headers vary too much for anything stricter.
"""

from __future__ import annotations

import os

import numpy as np

from .cube import HyperCube, LabelMap

# ENVI `data type` codes -> numpy dtypes (unsupported codes rejected)
DTYPE_CODES = {
    1: np.uint8,
    2: np.int16,
    3: np.int32,
    4: np.float32,
    5: np.float64,
    12: np.uint16,
}
INTEGER_CODES = (1, 2, 3, 12)
INTERLEAVES = ("bsq", "bil", "bip")

_REQUIRED_FIELDS = ("samples", "lines", "bands", "interleave", "data type")
_BINARY_SUFFIXES = ("", ".img", ".raw", ".dat", ".bin")


class EnviFormatError(ValueError):
    """Malformed header or binary that does not match its header."""


def parse_header_text(text: str) -> dict:
    """Parse ENVI header text into a dict of lowercase keys -> string values.

    ``{...}`` values are kept verbatim (braces stripped); everything is left
    as a string for the caller to interpret.
    """
    fields: dict[str, str] = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i]
        i += 1
        if "=" not in line:
            continue  # "ENVI" magic, comments, blank lines
        key, _, value = line.partition("=")
        key = " ".join(key.strip().lower().split())
        value = value.strip()
        if value.startswith("{"):
            while "}" not in value and i < len(lines):
                value += " " + lines[i].strip()
                i += 1
            value = value.strip()
            if not value.endswith("}"):
                raise EnviFormatError(f"unterminated {{...}} value for header key {key!r}")
            value = value[1:-1].strip()
        fields[key] = value
    return fields


def read_header(header_path: str) -> dict:
    """Read and interpret a .hdr file.

    Returns a dict with keys: samples, lines, bands, interleave, data_type,
    byte_order, header_offset, wavelengths (or None). Raises EnviFormatError
    on missing required fields or unsupported codes.
    """
    with open(header_path, "r", encoding="utf-8", errors="replace") as fh:
        fields = parse_header_text(fh.read())

    for name in _REQUIRED_FIELDS:
        if name not in fields:
            raise EnviFormatError(f"missing required header field {name!r} in {header_path}")

    def _int_field(name):
        try:
            return int(fields[name])
        except ValueError:
            raise EnviFormatError(f"header field {name!r} is not an integer: {fields[name]!r}")

    samples = _int_field("samples")
    lines = _int_field("lines")
    bands = _int_field("bands")
    data_type = _int_field("data type")
    interleave = fields["interleave"].lower()

    if interleave not in INTERLEAVES:
        raise EnviFormatError(f"unknown interleave {interleave!r}")
    if data_type not in DTYPE_CODES:
        raise EnviFormatError(f"unsupported data type code {data_type}")
    byte_order = int(fields.get("byte order", "0"))
    if byte_order not in (0, 1):
        raise EnviFormatError(f"byte order must be 0 or 1, got {byte_order}")
    header_offset = int(fields.get("header offset", "0"))

    wavelengths = None
    if "wavelength" in fields and fields["wavelength"]:
        try:
            wavelengths = [float(w) for w in fields["wavelength"].split(",")]
        except ValueError:
            raise EnviFormatError("wavelength list contains a non-numeric entry")
        if len(wavelengths) != bands:
            raise EnviFormatError(
                f"wavelength list has {len(wavelengths)} entries for {bands} bands"
            )

    return {
        "samples": samples,
        "lines": lines,
        "bands": bands,
        "interleave": interleave,
        "data_type": data_type,
        "byte_order": byte_order,
        "header_offset": header_offset,
        "wavelengths": wavelengths,
    }


def _binary_path_for(header_path: str) -> str:
    stem = header_path[:-4] if header_path.lower().endswith(".hdr") else header_path
    for suffix in _BINARY_SUFFIXES:
        candidate = stem + suffix
        if candidate != header_path and os.path.isfile(candidate):
            return candidate
    raise FileNotFoundError(f"no binary companion found for header {header_path}")


def _read_raw(header_path: str) -> tuple[np.ndarray, dict]:
    """Load the raw array in (row, col, band) order without widening."""
    header = read_header(header_path)
    binary_path = _binary_path_for(header_path)

    dtype = np.dtype(DTYPE_CODES[header["data_type"]])
    dtype = dtype.newbyteorder("<" if header["byte_order"] == 0 else ">")
    lines, samples, bands = header["lines"], header["samples"], header["bands"]
    count = lines * samples * bands
    expected = count * dtype.itemsize

    with open(binary_path, "rb") as fh:
        fh.seek(header["header_offset"])
        buf = fh.read()
    if len(buf) != expected:
        raise EnviFormatError(
            f"binary size mismatch for {binary_path}: expected {expected} bytes "
            f"({lines}x{samples}x{bands} of {dtype.itemsize}), got {len(buf)}"
        )
    flat = np.frombuffer(buf, dtype=dtype)

    interleave = header["interleave"]
    if interleave == "bsq":
        arr = flat.reshape(bands, lines, samples).transpose(1, 2, 0)
    elif interleave == "bil":
        arr = flat.reshape(lines, bands, samples).transpose(0, 2, 1)
    else:  # bip
        arr = flat.reshape(lines, samples, bands)
    return np.ascontiguousarray(arr), header


def load_envi(header_path: str) -> HyperCube:
    """Load an ENVI raster as a float64 HyperCube."""
    arr, header = _read_raw(header_path)
    data = arr.astype(np.float64)
    if header["data_type"] in (4, 5) and not np.isfinite(data).all():
        raise EnviFormatError(f"float data in {header_path} contains NaN or Inf")
    wl = header["wavelengths"]
    return HyperCube(data, wavelengths=tuple(wl) if wl else None)


def load_labels(header_path: str, ignore_index: int) -> LabelMap:
    """Load a single-band integer ENVI raster as a LabelMap."""
    arr, header = _read_raw(header_path)
    if header["bands"] != 1:
        raise EnviFormatError(
            f"label raster must have exactly 1 band, got {header['bands']}"
        )
    if header["data_type"] not in INTEGER_CODES:
        raise EnviFormatError(
            f"label raster must use an integer data type, got code {header['data_type']}"
        )
    return LabelMap(arr[:, :, 0].astype(np.int64), ignore_index=ignore_index)


def _encode(values: np.ndarray, data_type: int) -> np.ndarray:
    """Cast to the on-disk dtype; integer targets must be exactly representable."""
    dtype = np.dtype(DTYPE_CODES[data_type])
    cast = values.astype(dtype)
    if data_type in INTEGER_CODES and not np.array_equal(cast.astype(np.float64), values):
        raise EnviFormatError(
            f"data is not exactly representable as ENVI data type {data_type}"
        )
    return cast


def write_envi(
    data: np.ndarray,
    header_path: str,
    interleave: str = "bsq",
    data_type: int = 5,
    byte_order: int = 0,
    wavelengths=None,
) -> str:
    """Write an (H, W, C) array as an ENVI header + raw binary pair.

    Returns the binary path (header stem + ``.img``). Float targets may lose
    precision; integer targets reject non-representable values.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 3:
        raise ValueError(f"expected (H, W, C) array, got shape {arr.shape}")
    if interleave not in INTERLEAVES:
        raise ValueError(f"unknown interleave {interleave!r}")
    if data_type not in DTYPE_CODES:
        raise ValueError(f"unsupported data type code {data_type}")
    if byte_order not in (0, 1):
        raise ValueError("byte order must be 0 or 1")

    lines, samples, bands = arr.shape
    cast = _encode(arr, data_type)
    cast = cast.astype(cast.dtype.newbyteorder("<" if byte_order == 0 else ">"))
    if interleave == "bsq":
        on_disk = cast.transpose(2, 0, 1)
    elif interleave == "bil":
        on_disk = cast.transpose(0, 2, 1)
    else:
        on_disk = cast

    stem = header_path[:-4] if header_path.lower().endswith(".hdr") else header_path
    binary_path = stem + ".img"

    header_lines = [
        "ENVI",
        "file type = ENVI Standard",
        f"samples = {samples}",
        f"lines = {lines}",
        f"bands = {bands}",
        f"data type = {data_type}",
        f"interleave = {interleave}",
        f"byte order = {byte_order}",
        "header offset = 0",
    ]
    if wavelengths is not None:
        wl = ", ".join(f"{float(w):g}" for w in wavelengths)
        header_lines.append(f"wavelength = {{ {wl} }}")

    with open(header_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(header_lines) + "\n")
    with open(binary_path, "wb") as fh:
        fh.write(np.ascontiguousarray(on_disk).tobytes())
    return binary_path


def write_cube(cube: HyperCube, header_path: str, interleave: str = "bsq",
               data_type: int = 5, byte_order: int = 0) -> str:
    return write_envi(cube.data, header_path, interleave=interleave,
                      data_type=data_type, byte_order=byte_order,
                      wavelengths=cube.wavelengths)


def write_labels(labels: LabelMap, header_path: str) -> str:
    """Write a LabelMap as a single-band integer raster (u8 when it fits)."""
    arr = labels.labels
    hi = max(int(arr.max(initial=0)), labels.ignore_index)
    code = 1 if hi <= 255 else 3
    return write_envi(arr[:, :, None].astype(np.float64), header_path,
                      interleave="bsq", data_type=code, byte_order=0)
