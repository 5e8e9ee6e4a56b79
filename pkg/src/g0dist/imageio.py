"""
Readers and writers for intensity rasters.

Graymaps (PGM, PNG, TIFF and the other single-band formats Pillow knows) are
read through Pillow. Headerless little-endian float32 rasters are described by
a JSON sidecar ``{"rows": m, "cols": n, "looks": L}`` stored at ``<raster>.json``.
"""

from __future__ import annotations

import io
import json
import logging
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from PIL import Image, UnidentifiedImageError

from .edge import ImageStrip
from .exceptions import DataFormatError, DomainError
from .model import sidecar_path
from .utils import atomic_write_bytes, atomic_write_text

logger = logging.getLogger(__name__)

GRAY_MODES = ("L", "I", "I;16", "I;16B", "I;16L", "F")
RAW_SUFFIXES = (".raw", ".f32", ".bin")


def read_image(path: Path) -> NDArray[np.float64]:
    """Read a single-band image as a float array of shape (rows, cols)."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.mode not in GRAY_MODES:
                raise DataFormatError(
                    f"Unsupported image mode '{img.mode}' in {path}; expected a single-band graymap"
                )
            pixels = np.asarray(img, dtype=np.float64)
    except UnidentifiedImageError as e:
        raise DataFormatError(f"Unrecognised image format in {path}: {e}")
    except OSError as e:
        raise DataFormatError(f"Could not read image {path}: {e}")
    logger.debug(f"Read {path}: {pixels.shape[0]} rows x {pixels.shape[1]} cols")
    return pixels


def write_image(pixels: NDArray[np.float64], path: Path) -> Path:
    """Write integer-valued pixels as an 8-bit or 16-bit graymap in the format of the suffix."""
    path = Path(path)
    values = np.asarray(pixels)
    if values.ndim != 2:
        raise DomainError(f"Images are two-dimensional, got shape {values.shape}")
    ints = np.rint(values)
    if ints.min() < 0 or ints.max() > 65535:
        raise DomainError("Graymap pixels must lie in [0, 65535]")
    fmt = Image.registered_extensions().get(path.suffix.lower())
    if fmt is None:
        raise DomainError(f"No image writer for '{path.suffix}'")

    img = Image.fromarray(ints.astype(np.uint8) if ints.max() < 256 else ints.astype(np.int32))
    buf = io.BytesIO()
    img.save(buf, format=fmt)
    return atomic_write_bytes(path, buf.getvalue())


def read_raw(path: Path, sidecar: Path | None = None) -> tuple[NDArray[np.float64], float]:
    """Read a float32 raster and its sidecar; returns the pixels and the looks."""
    path = Path(path)
    sidecar = Path(sidecar) if sidecar is not None else sidecar_path(path)
    try:
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
        rows, cols = int(meta["rows"]), int(meta["cols"])
        looks = float(meta.get("looks", 1.0))
    except FileNotFoundError:
        raise DataFormatError(f"Raster {path} has no sidecar {sidecar}")
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"Invalid sidecar {sidecar}: {e}")
    try:
        pixels = np.fromfile(path, dtype="<f4").astype(np.float64)
    except OSError as e:
        raise DataFormatError(f"Could not read raster {path}: {e}")
    if pixels.size != rows * cols:
        raise DataFormatError(f"{path} holds {pixels.size} values, sidecar says {rows}x{cols}")
    return pixels.reshape(rows, cols), looks


def write_raw(strip: ImageStrip, path: Path) -> list[Path]:
    """Write a strip as little-endian float32 plus its sidecar."""
    path = Path(path)
    atomic_write_bytes(path, strip.pixels.astype("<f4").tobytes())
    meta = {"rows": strip.rows, "cols": strip.cols, "looks": strip.looks}
    sidecar = atomic_write_text(sidecar_path(path), json.dumps(meta, indent=2) + "\n")
    return [path, sidecar]


def read_strip(path: Path, sidecar: Path | None = None, looks: float | None = None) -> ImageStrip:
    """Load a graymap or raw raster as an :class:`ImageStrip`.

    ``looks`` overrides the sidecar; graymaps without one default to a single look.
    """
    path = Path(path)
    if path.suffix.lower() in RAW_SUFFIXES:
        pixels, file_looks = read_raw(path, sidecar)
    else:
        pixels = read_image(path)
        side = Path(sidecar) if sidecar is not None else sidecar_path(path)
        file_looks = 1.0
        if side.exists():
            try:
                file_looks = float(json.loads(side.read_text(encoding="utf-8")).get("looks", 1.0))
            except (json.JSONDecodeError, TypeError, ValueError) as e:
                raise DataFormatError(f"Invalid sidecar {side}: {e}")
    try:
        return ImageStrip(pixels=pixels, looks=looks if looks is not None else file_looks)
    except DomainError as e:
        raise DataFormatError(f"Invalid image {path}: {e}")
