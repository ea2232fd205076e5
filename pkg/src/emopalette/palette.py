"""Color-emotion palette: file parsing, validation and nearest-color lookup.

Palette files are UTF-8 text, one record per line::

    # comment
    Dark Brick Red ; 125, 45, 35 ; earthy, friendly, robust, strong, tasty, warm

Whitespace around separators is ignored and words are lowercased on load.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .color import LabColor, PixelColor, delta_e, srgb_array_to_lab, srgb_to_lab

STANDIN_PALETTE = "standin_palette.txt"

# rows of pixels matched per block in nearest_entries; bounds the distance matrix size
_MATCH_BLOCK = 4096


class PaletteError(ValueError):
    """Base class for palette loading problems."""


class PaletteParseError(PaletteError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class PaletteValidationError(PaletteError):
    pass


@dataclass(frozen=True)
class PaletteEntry:
    name: str
    color: PixelColor
    lab: LabColor
    words: tuple[str, ...]


@dataclass(frozen=True)
class Palette:
    entries: tuple[PaletteEntry, ...]
    palette_id: str = ""
    vocabulary: frozenset[str] = field(init=False)
    # sorted vocabulary; column order of `incidence`
    words: tuple[str, ...] = field(init=False, repr=False)
    lab_array: np.ndarray = field(init=False, repr=False, compare=False)
    incidence: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.entries:
            raise PaletteValidationError("palette must have at least one entry")
        names: set[str] = set()
        colors: set[PixelColor] = set()
        for e in self.entries:
            if e.name in names:
                raise PaletteValidationError(f"duplicate entry name {e.name!r}")
            if e.color in colors:
                raise PaletteValidationError(f"duplicate color {tuple(e.color)} at {e.name!r}")
            if not e.words:
                raise PaletteValidationError(f"entry {e.name!r} has no words")
            if len(set(e.words)) != len(e.words):
                raise PaletteValidationError(f"entry {e.name!r} repeats a word")
            names.add(e.name)
            colors.add(e.color)

        vocab = frozenset(w for e in self.entries for w in e.words)
        words = tuple(sorted(vocab))
        column = {w: j for j, w in enumerate(words)}
        incidence = np.zeros((len(self.entries), len(words)), dtype=np.int64)
        for i, e in enumerate(self.entries):
            incidence[i, [column[w] for w in e.words]] = 1
        lab = np.array([e.lab for e in self.entries], dtype=np.float64)
        lab.flags.writeable = False
        incidence.flags.writeable = False

        object.__setattr__(self, "vocabulary", vocab)
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "lab_array", lab)
        object.__setattr__(self, "incidence", incidence)

    def __len__(self) -> int:
        return len(self.entries)

    def index_of(self, name: str) -> int:
        for i, e in enumerate(self.entries):
            if e.name == name:
                return i
        raise KeyError(name)

    @classmethod
    def from_records(
        cls, records: list[tuple[str, tuple[int, int, int], list[str]]], palette_id: str = ""
    ) -> Palette:
        entries = []
        for name, rgb, words in records:
            color = PixelColor.checked(*rgb)
            entries.append(PaletteEntry(name, color, srgb_to_lab(color), tuple(w.lower() for w in words)))
        return cls(tuple(entries), palette_id=palette_id)


def _parse_line(lineno: int, line: str) -> tuple[str, tuple[int, int, int], list[str]]:
    parts = [p.strip() for p in line.split(";")]
    if len(parts) != 3:
        raise PaletteParseError(lineno, f"expected 'name ; R,G,B ; words', got {len(parts)} field(s)")
    name, rgb_text, words_text = parts
    if not name:
        raise PaletteParseError(lineno, "empty color name")
    channels = [c.strip() for c in rgb_text.split(",")]
    if len(channels) != 3 or not all(c.isdigit() for c in channels):
        raise PaletteParseError(lineno, f"bad RGB triple {rgb_text!r}")
    rgb = tuple(int(c) for c in channels)
    if any(v > 255 for v in rgb):
        raise PaletteParseError(lineno, f"RGB channel out of range in {rgb_text!r}")
    words = [w.strip().lower() for w in words_text.split(",")]
    if any(not w for w in words) and words != [""]:
        raise PaletteParseError(lineno, "empty word in word list")
    return name, rgb, [w for w in words if w]


def load_palette(source: BinaryIO | bytes) -> Palette:
    """Parse and validate a palette file; ``palette_id`` is the SHA-256 of its bytes."""
    data = source if isinstance(source, bytes) else source.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise PaletteParseError(1, f"not UTF-8: {exc}") from None

    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        records.append(_parse_line(lineno, line))
    return Palette.from_records(records, palette_id=hashlib.sha256(data).hexdigest())


def load_palette_file(path: str | Path | None = None) -> Palette:
    """Load a palette from ``path``, or the bundled stand-in palette when ``path`` is None."""
    if path is None:
        data = resources.files("emopalette").joinpath("data").joinpath(STANDIN_PALETTE).read_bytes()
        return load_palette(data)
    with open(path, "rb") as fh:
        return load_palette(fh)


def nearest_entry(c: LabColor, p: Palette) -> int:
    """Index of the entry closest to ``c`` by CIE76; ties go to the lowest index."""
    best, best_d = 0, delta_e(c, p.entries[0].lab)
    for i in range(1, len(p.entries)):
        d = delta_e(c, p.entries[i].lab)
        if d < best_d:
            best, best_d = i, d
    return best


def nearest_entries(lab: np.ndarray, p: Palette) -> np.ndarray:
    """Vectorized ``nearest_entry`` over an ``(n, 3)`` Lab array."""
    lab = np.asarray(lab, dtype=np.float64).reshape(-1, 3)
    out = np.empty(len(lab), dtype=np.intp)
    ref = p.lab_array
    for start in range(0, len(lab), _MATCH_BLOCK):
        block = lab[start : start + _MATCH_BLOCK]
        d2 = (block[:, 0, None] - ref[:, 0]) ** 2
        d2 += (block[:, 1, None] - ref[:, 1]) ** 2
        d2 += (block[:, 2, None] - ref[:, 2]) ** 2
        out[start : start + len(block)] = np.argmin(d2, axis=1)  # first minimum wins
    return out


def match_pixels(rgb: np.ndarray, p: Palette) -> np.ndarray:
    """Nearest palette index for each row of an ``(n, 3)`` uint8 RGB array."""
    return nearest_entries(srgb_array_to_lab(rgb), p)


def words_for(p: Palette, index: int) -> list[str]:
    if not 0 <= index < len(p.entries):
        raise IndexError(f"palette index {index} out of range 0..{len(p.entries) - 1}")
    return list(p.entries[index].words)
