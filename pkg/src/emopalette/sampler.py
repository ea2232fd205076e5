"""Random pixel subsets: with replacement, without replacement, or a full scan.

Sampling picks pixel *positions*, so a color's chance of being drawn is
proportional to the area it covers. Every draw comes from a seeded
``numpy.random.Generator`` over PCG64, so a given ``(image, spec)`` always
yields the same sample.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .color import PixelColor

RNG_ALGORITHM = "numpy.PCG64"

_SEED_LIMIT = 2**64


class SamplingError(ValueError):
    pass


class Regime(str, enum.Enum):
    WITH_REPLACEMENT = "with"
    WITHOUT_REPLACEMENT = "without"
    FULL_SCAN = "full"

    @classmethod
    def parse(cls, value: str | Regime) -> Regime:
        if isinstance(value, Regime):
            return value
        aliases = {
            "with_replacement": cls.WITH_REPLACEMENT,
            "without_replacement": cls.WITHOUT_REPLACEMENT,
            "full_scan": cls.FULL_SCAN,
        }
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise SamplingError(f"unknown regime {value!r}") from None


@dataclass(frozen=True)
class ImagePixels:
    """Row-major 8-bit RGB pixel grid; ``pixels`` has shape ``(width * height, 3)``."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be positive, got {self.width}x{self.height}")
        px = np.ascontiguousarray(self.pixels, dtype=np.uint8).reshape(-1, 3)
        if len(px) != self.width * self.height:
            raise ValueError(f"{len(px)} pixels for a {self.width}x{self.height} image")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def n_pixels(self) -> int:
        return self.width * self.height

    @classmethod
    def from_array(cls, arr: np.ndarray) -> ImagePixels:
        """Build from an ``(height, width, 3)`` array."""
        arr = np.asarray(arr)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (height, width, 3) array, got shape {arr.shape}")
        return cls(arr.shape[1], arr.shape[0], arr.reshape(-1, 3))

    @classmethod
    def uniform(cls, color: tuple[int, int, int], width: int, height: int = 1) -> ImagePixels:
        return cls(width, height, np.tile(np.array(color, dtype=np.uint8), (width * height, 1)))


@dataclass(frozen=True)
class SampleSpec:
    n: int = 100
    regime: Regime = Regime.WITH_REPLACEMENT
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "regime", Regime.parse(self.regime))
        if not 0 <= self.seed < _SEED_LIMIT:
            raise SamplingError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.regime is not Regime.FULL_SCAN and self.n < 1:
            raise SamplingError(f"sample size must be at least 1, got {self.n}")

    def effective_n(self, n_pixels: int) -> int:
        return n_pixels if self.regime is Regime.FULL_SCAN else self.n


def derive_seed(master: int, *keys: int) -> int:
    """Deterministic child seed for trial ``keys`` under ``master``."""
    ss = np.random.SeedSequence(master, spawn_key=keys)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _partial_fisher_yates(rng: np.random.Generator, n_pixels: int, n: int) -> np.ndarray:
    # Virtual array 0..N-1; only displaced slots are stored, so extra space is O(n).
    targets = rng.integers(np.arange(n), n_pixels)
    displaced: dict[int, int] = {}
    out = np.empty(n, dtype=np.int64)
    for i, j in enumerate(targets.tolist()):
        vi = displaced.get(i, i)
        vj = displaced.get(j, j)
        out[i] = vj
        displaced[j] = vi
    return out


def sample_positions(n_pixels: int, spec: SampleSpec) -> np.ndarray:
    """Pixel positions (row-major indices) selected by ``spec``."""
    if spec.regime is Regime.FULL_SCAN:
        return np.arange(n_pixels, dtype=np.int64)
    if spec.regime is Regime.WITHOUT_REPLACEMENT and spec.n > n_pixels:
        raise SamplingError(f"cannot draw {spec.n} distinct pixels from an image of {n_pixels}")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if spec.regime is Regime.WITH_REPLACEMENT:
        return rng.integers(0, n_pixels, size=spec.n, dtype=np.int64)
    return _partial_fisher_yates(rng, n_pixels, spec.n)


def sample_pixels(img: ImagePixels, spec: SampleSpec) -> np.ndarray:
    """The sampled pixels as an ``(n, 3)`` uint8 array, in draw order."""
    return img.pixels[sample_positions(img.n_pixels, spec)]


def pack_rgb(pixels: np.ndarray) -> np.ndarray:
    px = np.asarray(pixels, dtype=np.uint32).reshape(-1, 3)
    return (px[:, 0] << 16) | (px[:, 1] << 8) | px[:, 2]


def unpack_rgb(packed: np.ndarray) -> np.ndarray:
    packed = np.asarray(packed, dtype=np.uint32)
    return np.stack([(packed >> 16) & 255, (packed >> 8) & 255, packed & 255], axis=-1).astype(np.uint8)


def unique_colors(img: ImagePixels) -> tuple[np.ndarray, np.ndarray]:
    """Distinct colors as an ``(u, 3)`` array with their pixel counts, sorted by packed RGB."""
    packed, counts = np.unique(pack_rgb(img.pixels), return_counts=True)
    return unpack_rgb(packed), counts


def color_histogram(img: ImagePixels) -> dict[PixelColor, int]:
    colors, counts = unique_colors(img)
    return {PixelColor(*map(int, c)): int(k) for c, k in zip(colors, counts)}
