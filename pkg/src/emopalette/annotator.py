"""Sample pixels, match them to the palette, count emotion words, keep the top k."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .palette import Palette, match_pixels
from .sampler import (
    RNG_ALGORITHM,
    ImagePixels,
    Regime,
    SampleSpec,
    pack_rgb,
    sample_positions,
    unique_colors,
    unpack_rgb,
)

DEFAULT_TOP_K = 10


class AnnotationError(ValueError):
    pass


@dataclass(frozen=True)
class SampleMeta:
    N: int
    n: int
    regime: Regime
    seed: int
    k: int
    palette_id: str
    rng: str = RNG_ALGORITHM


@dataclass(frozen=True)
class AnnotationReport:
    word_counts: dict[str, int]
    top_words: list[tuple[str, int]]
    entry_counts: dict[int, int]
    sample_meta: SampleMeta
    # nearest-entry lookups performed; equals n for sampled regimes and N for a full scan
    match_count: int = 0
    timings: dict[str, float] = field(default_factory=dict, compare=False)

    def share(self, word: str) -> float:
        return self.word_counts.get(word, 0) / self.sample_meta.n

    def top_set(self) -> frozenset[str]:
        return frozenset(w for w, _ in self.top_words)


def rank_words(word_counts: dict[str, int]) -> list[tuple[str, int]]:
    """Order words by count descending, then alphabetically."""
    return sorted(word_counts.items(), key=lambda wc: (-wc[1], wc[0]))


def word_count_vector(entry_counts: np.ndarray, p: Palette) -> np.ndarray:
    """Per-word counts (columns of ``p.words``) from per-entry counts."""
    return np.asarray(entry_counts, dtype=np.int64) @ p.incidence


def counts_to_dicts(entry_counts: np.ndarray, p: Palette) -> tuple[dict[int, int], dict[str, int]]:
    words = word_count_vector(entry_counts, p)
    entries = {int(i): int(entry_counts[i]) for i in np.flatnonzero(entry_counts)}
    word_counts = {p.words[j]: int(words[j]) for j in np.flatnonzero(words)}
    return entries, word_counts


def top_k_set(entry_counts: np.ndarray, p: Palette, k: int) -> frozenset[str]:
    _, word_counts = counts_to_dicts(entry_counts, p)
    return frozenset(w for w, _ in rank_words(word_counts)[:k])


def reference_entry_counts(img: ImagePixels, p: Palette) -> np.ndarray:
    """Full-scan entry counts computed once per distinct color rather than per pixel.

    Gives exactly the ``entry_counts`` of a full-scan ``annotate`` (as a dense
    vector) at a cost proportional to the number of distinct colors.
    """
    colors, counts = unique_colors(img)
    return np.bincount(match_pixels(colors, p), weights=counts, minlength=len(p)).astype(np.int64)


def pixel_entries(img: ImagePixels, p: Palette) -> np.ndarray:
    """Matched palette index for every pixel position, via the distinct colors."""
    packed, inverse = np.unique(pack_rgb(img.pixels), return_inverse=True)
    return match_pixels(unpack_rgb(packed), p)[inverse.reshape(-1)]


def annotate(img: ImagePixels, p: Palette, spec: SampleSpec, k: int = DEFAULT_TOP_K) -> AnnotationReport:
    if k < 1:
        raise AnnotationError(f"top-k must be at least 1, got {k}")
    t0 = time.perf_counter()
    positions = sample_positions(img.n_pixels, spec)
    sampled = img.pixels[positions]
    t1 = time.perf_counter()
    matched = match_pixels(sampled, p)
    t2 = time.perf_counter()
    entry_vec = np.bincount(matched, minlength=len(p))
    entry_counts, word_counts = counts_to_dicts(entry_vec, p)
    top = rank_words(word_counts)[:k]
    t3 = time.perf_counter()

    meta = SampleMeta(
        N=img.n_pixels,
        n=len(positions),
        regime=spec.regime,
        seed=spec.seed,
        k=k,
        palette_id=p.palette_id,
    )
    return AnnotationReport(
        word_counts=word_counts,
        top_words=top,
        entry_counts=entry_counts,
        sample_meta=meta,
        match_count=len(matched),
        timings={"sample": t1 - t0, "match": t2 - t1, "count": t3 - t2},
    )


class InvariantViolation(AssertionError):
    pass


def check_report(report: AnnotationReport, p: Palette) -> None:
    """Raise ``InvariantViolation`` unless the report's counts are self-consistent."""
    n = report.sample_meta.n
    if sum(report.entry_counts.values()) != n:
        raise InvariantViolation(f"entry counts sum to {sum(report.entry_counts.values())}, not n = {n}")
    entry_vec = np.zeros(len(p), dtype=np.int64)
    for i, c in report.entry_counts.items():
        entry_vec[i] = c
    _, words = counts_to_dicts(entry_vec, p)
    if words != report.word_counts:
        raise InvariantViolation("word counts do not follow from entry counts")
    if report.top_words != rank_words(report.word_counts)[: report.sample_meta.k]:
        raise InvariantViolation("top words are not the head of the ranked word list")
