"""Emotion-word annotation of images from randomly sampled pixels."""

from .annotator import AnnotationReport, annotate, rank_words
from .color import LabColor, PixelColor, delta_e, srgb_to_lab
from .palette import Palette, PaletteEntry, load_palette, load_palette_file, nearest_entry, words_for
from .sampler import ImagePixels, Regime, SampleSpec, color_histogram, sample_pixels

__all__ = [
    "AnnotationReport",
    "ImagePixels",
    "LabColor",
    "Palette",
    "PaletteEntry",
    "PixelColor",
    "Regime",
    "SampleSpec",
    "annotate",
    "color_histogram",
    "delta_e",
    "load_palette",
    "load_palette_file",
    "nearest_entry",
    "rank_words",
    "sample_pixels",
    "srgb_to_lab",
    "words_for",
]
