"""Decode image files into 8-bit RGB pixel grids.

Alpha channels are dropped and grayscale is expanded to RGB. Sixteen-bit
samples are reduced to eight bits by keeping the high byte.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .sampler import ImagePixels

SUPPORTED_FORMATS = frozenset({"PNG", "JPEG", "BMP", "GIF", "TIFF"})

_SIXTEEN_BIT_MODES = {"I;16", "I;16L", "I;16B", "I;16N", "I"}


class ImageInputError(Exception):
    pass


class ImageNotFoundError(ImageInputError, FileNotFoundError):
    pass


class UnsupportedFormatError(ImageInputError):
    pass


class ImageDecodeError(ImageInputError):
    pass


def _to_rgb_array(im: Image.Image) -> np.ndarray:
    if im.mode in _SIXTEEN_BIT_MODES:
        gray = (np.asarray(im).astype(np.int64) >> 8).clip(0, 255).astype(np.uint8)
        return np.repeat(gray[..., None], 3, axis=-1)
    if im.mode == "F":
        raise ImageDecodeError("floating-point images are not supported")
    return np.asarray(im.convert("RGB"), dtype=np.uint8)


def ingest_image(path: str | Path) -> ImagePixels:
    path = Path(path)
    if not path.is_file():
        raise ImageNotFoundError(f"no such image file: {path}")
    try:
        with Image.open(path) as im:
            if im.format not in SUPPORTED_FORMATS:
                raise UnsupportedFormatError(f"unsupported image format {im.format!r} in {path}")
            im.load()
            arr = _to_rgb_array(im)
    except UnidentifiedImageError:
        raise ImageDecodeError(f"cannot identify image file {path}") from None
    except (OSError, SyntaxError, ValueError) as exc:
        if isinstance(exc, ImageInputError):
            raise
        raise ImageDecodeError(f"cannot decode {path}: {exc}") from None
    return ImagePixels.from_array(arr)
