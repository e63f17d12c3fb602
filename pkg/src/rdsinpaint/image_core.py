"""Image grids, masks, mirrored boundary reads and image file I/O.

Images are plain ``float64`` numpy arrays.  A scalar image has shape
``(height, width)`` and is indexed ``img[j, i]`` with ``i`` the x index; a
multi-channel image has shape ``(n_channels, height, width)``.  Values are
grey levels in the nominal range [0, 255].  Masks are boolean arrays of
shape ``(height, width)`` where ``True`` marks a known pixel.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

MIN_SIZE = 3
DEFAULT_MASK_THRESHOLD = 127.5


class ImageFormatError(ValueError):
    """Raised for unreadable, truncated or unsupported image files."""


def as_image(values, copy: bool = False) -> np.ndarray:
    """Validate a scalar image and return it as a float64 array."""
    arr = np.array(values, dtype=np.float64, copy=copy) if copy else np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"scalar image must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < MIN_SIZE or arr.shape[1] < MIN_SIZE:
        raise ValueError(f"image must be at least {MIN_SIZE}x{MIN_SIZE}, got {arr.shape[1]}x{arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    return arr


def as_channels(values, copy: bool = False) -> np.ndarray:
    """Validate a (multi-channel) image and return a ``(n_c, H, W)`` float64 array.

    A 2-D input is promoted to a single channel.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[np.newaxis]
    if arr.ndim != 3 or arr.shape[0] < 1:
        raise ValueError(f"multi-channel image must have shape (n_c, H, W), got {arr.shape}")
    for channel in arr:
        as_image(channel)
    return arr.copy() if copy else arr


def as_mask(values, shape: tuple[int, int] | None = None) -> np.ndarray:
    mask = np.asarray(values)
    if mask.dtype != np.bool_:
        raise TypeError(f"mask must be boolean, got dtype {mask.dtype}")
    if mask.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {mask.shape}")
    if shape is not None and mask.shape != tuple(shape):
        raise ValueError(f"mask shape {mask.shape} does not match image shape {tuple(shape)}")
    return mask


def reflect(index: int, n: int) -> int:
    """Map a signed index into ``[0, n)`` by mirroring with duplicated boundary cells.

    ``-1 -> 0``, ``-2 -> 1``, ``n -> n - 1``, ``n + 1 -> n - 2``.
    """
    period = 2 * n
    index %= period
    return period - 1 - index if index >= n else index


def mirror_read(img: np.ndarray, i: int, j: int) -> float:
    """Read ``img`` at column ``i`` and row ``j``, mirroring across the borders."""
    height, width = img.shape
    return float(img[reflect(j, height), reflect(i, width)])


def pad_mirror(img: np.ndarray, radius: int) -> np.ndarray:
    """Materialise a read-only mirrored border of ``radius`` dummy pixels."""
    padded = np.pad(img, radius, mode="symmetric")
    padded.flags.writeable = False
    return padded


def _decode(pil: Image.Image, path) -> np.ndarray:
    if pil.mode in ("1", "L"):
        return np.asarray(pil.convert("L"), dtype=np.float64)[np.newaxis]
    if pil.mode == "RGB":
        return np.moveaxis(np.asarray(pil, dtype=np.float64), -1, 0).copy()
    if pil.mode in ("LA", "RGBA", "P", "PA"):
        raise ImageFormatError(f"{path}: palette or alpha images are not supported (mode {pil.mode})")
    raise ImageFormatError(f"{path}: unsupported bit depth or pixel format (mode {pil.mode}); only 8-bit grey or RGB")


def load_image(path) -> np.ndarray:
    """Load a PGM, PPM or 8-bit PNG file as a ``(n_c, H, W)`` array of grey levels."""
    path = Path(path)
    if not path.is_file():
        raise ImageFormatError(f"{path}: no such file")
    try:
        with Image.open(path) as pil:
            pil.load()
            arr = _decode(pil, path)
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"{path}: unrecognised image format") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        if isinstance(exc, ImageFormatError):
            raise
        msg = str(exc)
        if "truncated" in msg or "not enough" in msg or "broken" in msg or "buffer" in msg:
            raise ImageFormatError(f"{path}: unexpected end of file") from exc
        raise ImageFormatError(f"{path}: {msg or 'unreadable image'}") from exc
    return arr


def load_mask(path, threshold: float = DEFAULT_MASK_THRESHOLD) -> np.ndarray:
    """Load a single-channel image and mark pixels brighter than ``threshold`` as known."""
    arr = load_image(path)
    if arr.shape[0] != 1:
        raise ImageFormatError(f"{path}: mask must be single-channel, got {arr.shape[0]} channels")
    return arr[0] > threshold


def quantise(img: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round to the nearest integer."""
    return np.rint(np.clip(img, 0.0, 255.0)).astype(np.uint8)


_FORMATS = {".pgm": "PPM", ".ppm": "PPM", ".pnm": "PPM", ".png": "PNG"}


def save_image(img, path) -> None:
    """Write a scalar or multi-channel image; the format follows the file extension."""
    arr = as_channels(img)
    path = Path(path)
    ext = path.suffix.lower()
    if ext not in _FORMATS:
        raise ImageFormatError(f"{path}: unsupported output extension {ext!r}")
    n_c = arr.shape[0]
    if n_c == 1:
        pil = Image.fromarray(quantise(arr[0]), mode="L")
    elif n_c == 3:
        pil = Image.fromarray(np.ascontiguousarray(np.moveaxis(quantise(arr), 0, -1)), mode="RGB")
    else:
        raise ImageFormatError(f"{path}: cannot store {n_c} channels; use 1 or 3")
    if ext == ".pgm" and n_c != 1:
        raise ImageFormatError(f"{path}: PGM holds a single channel")
    if ext == ".ppm" and n_c != 3:
        raise ImageFormatError(f"{path}: PPM holds three channels")
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        pil.save(path, format=_FORMATS[ext])
    except OSError as exc:
        raise OSError(f"{path}: cannot write image ({exc})") from exc


def save_mask(mask, path) -> None:
    save_image(np.where(as_mask(mask), 255.0, 0.0), path)


def write_key_values(pairs: dict, path) -> None:
    """Write a line-oriented ``key=value`` text file."""
    lines = [f"{key}={value}" for key, value in pairs.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_key_values(path) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    result = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{os.fspath(path)}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        result[key.strip()] = value.strip()
    return result
