"""Entropy, MAP error, Fano bound and the color-to-emotion coding model.

All logarithms are base 2. Zero-probability symbols contribute nothing to
any sum (``0 log 0 = 0``).

The coupling model weights each color ``x`` as ``k_x * p(x)**2`` and is
left unnormalized on purpose; ``model_equivocation`` returns its closed
form ``H(X) - sum_x p(x) log k_x`` rather than a normalized conditional
entropy. Use ``conditional_entropy`` on a proper joint when a true
``H(Y|X)`` is needed.
"""

from __future__ import annotations

import math
from collections.abc import Hashable, Mapping
from dataclasses import dataclass

import numpy as np

from .annotator import AnnotationReport, reference_entry_counts, top_k_set
from .palette import Palette
from .sampler import ImagePixels, Regime, unique_colors
from .sampstats import correction_factor

RGB_COLOR_SPACE = 256**3

_SUM_TOL = 1e-9


class InfoError(ValueError):
    pass


def _check_probs(values: np.ndarray, what: str) -> None:
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise InfoError(f"{what} has negative or non-finite probabilities")
    if abs(values.sum() - 1.0) > _SUM_TOL:
        raise InfoError(f"{what} sums to {values.sum()!r}, not 1")


@dataclass(frozen=True)
class Distribution:
    probs: Mapping[Hashable, float]

    def __post_init__(self) -> None:
        _check_probs(np.fromiter(self.probs.values(), dtype=np.float64, count=len(self.probs)), "distribution")

    @classmethod
    def from_counts(cls, counts: Mapping[Hashable, float]) -> Distribution:
        total = sum(counts.values())
        if total <= 0:
            raise InfoError("counts must have a positive total")
        return cls({x: c / total for x, c in counts.items()})

    @classmethod
    def uniform(cls, symbols) -> Distribution:
        symbols = list(symbols)
        return cls({x: 1.0 / len(symbols) for x in symbols})

    def support(self) -> list[Hashable]:
        return [x for x, v in self.probs.items() if v > 0]


@dataclass(frozen=True)
class JointDistribution:
    """``probs[(x, y)]`` is the joint probability of color ``x`` and label ``y``."""

    probs: Mapping[tuple[Hashable, Hashable], float]

    def __post_init__(self) -> None:
        _check_probs(np.fromiter(self.probs.values(), dtype=np.float64, count=len(self.probs)), "joint")

    @classmethod
    def from_matrix(cls, m) -> JointDistribution:
        """Rows index ``x``, columns index ``y``."""
        m = np.asarray(m, dtype=np.float64)
        return cls({(i, j): float(m[i, j]) for i in range(m.shape[0]) for j in range(m.shape[1])})

    def matrix(self) -> tuple[np.ndarray, list[Hashable], list[Hashable]]:
        xs = list(dict.fromkeys(x for x, _ in self.probs))
        ys = list(dict.fromkeys(y for _, y in self.probs))
        xi = {x: i for i, x in enumerate(xs)}
        yi = {y: j for j, y in enumerate(ys)}
        m = np.zeros((len(xs), len(ys)))
        for (x, y), v in self.probs.items():
            m[xi[x], yi[y]] += v
        return m, xs, ys


@dataclass(frozen=True)
class CouplingCoefficients:
    """Per-color fraction ``k_x`` in [0, 1] of emotional coding attached to color ``x``."""

    k: Mapping[Hashable, float]

    def __post_init__(self) -> None:
        for x, v in self.k.items():
            if not 0.0 <= v <= 1.0:
                raise InfoError(f"k[{x!r}] = {v} outside [0, 1]")


def _entropy_of(p: np.ndarray) -> float:
    p = p[p > 0]
    h = float(-(p * np.log2(p)).sum())
    return h if h > 0 else 0.0


def entropy(d: Distribution) -> float:
    return _entropy_of(np.fromiter(d.probs.values(), dtype=np.float64, count=len(d.probs)))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise InfoError(f"binary entropy argument {x} outside [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def fano_bound(eps: float, alphabet_size: int) -> float:
    """``eps * log2(|Y| - 1) + h(eps)``: the largest equivocation compatible with error ``eps``."""
    if alphabet_size < 2:
        raise InfoError(f"alphabet size must be at least 2, got {alphabet_size}")
    return eps * math.log2(alphabet_size - 1) + binary_entropy(eps)


def conditional_entropy(j: JointDistribution) -> float:
    """True ``H(Y|X)`` of a joint distribution."""
    m, _, _ = j.matrix()
    px = np.broadcast_to(m.sum(axis=1, keepdims=True), m.shape)
    nz = m > 0
    return float((m[nz] * np.log2(px[nz] / m[nz])).sum())


def map_error(j: JointDistribution) -> tuple[float, float]:
    """Minimum decision error and its marginal upper bound.

    ``eps`` is the error of the MAP rule, ``sum_x p(x) (1 - max_y p(y|x))``;
    ``upper`` is ``1 - max_y p(y)``, the error of always guessing the most
    common label. Colors with ``p(x) = 0`` contribute nothing.
    """
    m, _, _ = j.matrix()
    px = m.sum(axis=1)
    eps = 0.0
    for row, p in zip(m, px):
        if p > 0:
            eps += p * (1.0 - row.max() / p)
    upper = 1.0 - float(m.sum(axis=0).max())
    return float(eps), upper


def _coefficients_on_support(px: Distribution, k: CouplingCoefficients) -> list[tuple[float, float]]:
    out = []
    for x in px.support():
        if x not in k.k:
            raise InfoError(f"no coupling coefficient for symbol {x!r}")
        out.append((px.probs[x], k.k[x]))
    return out


def model_joint(px: Distribution, k: CouplingCoefficients) -> dict[Hashable, float]:
    """Unnormalized weights ``k_x * p(x)**2`` for each supported color."""
    return {x: kx * p * p for x, (p, kx) in zip(px.support(), _coefficients_on_support(px, k))}


def model_equivocation(px: Distribution, k: CouplingCoefficients) -> float:
    """``H(X) - sum_x p(x) log2 k_x``; any ``k_x = 0`` on the support is an error (no coding)."""
    pairs = _coefficients_on_support(px, k)
    if any(kx == 0.0 for _, kx in pairs):
        raise InfoError("a supported color has k_x = 0; equivocation is unbounded")
    return entropy(px) - sum(p * math.log2(kx) for p, kx in pairs)


def error_proxy(px: Distribution, k: CouplingCoefficients) -> float:
    """Growth proxy for the minimum error: ``H(X) - E[log2 k_x]``."""
    return model_equivocation(px, k)


def coding_overhead(vocabulary_size: int, color_space_size: int = RGB_COLOR_SPACE) -> tuple[float, float]:
    """Uniform coupling ``|Y| / |X|`` and the bits it adds, ``-log2`` of that ratio."""
    if vocabulary_size < 1 or color_space_size < 1:
        raise InfoError("vocabulary and color space sizes must be at least 1")
    k_uniform = vocabulary_size / color_space_size
    return k_uniform, math.log2(color_space_size) - math.log2(vocabulary_size)


@dataclass(frozen=True)
class InfoDiagnostics:
    H_X_bits: float
    entry_entropy_bits: float
    vocabulary_size: int
    k_uniform: float
    coding_overhead_bits: float
    disagreement_rate: float
    fano_bound_bits: float
    c: float


def image_diagnostics(img: ImagePixels, report: AnnotationReport, p: Palette) -> InfoDiagnostics:
    """Information measures for one annotated image.

    The disagreement rate is the fraction of the full-scan top-k words that
    the sampled top-k misses; it is 0 for a full scan.
    """
    _, color_counts = unique_colors(img)
    h_x = _entropy_of(color_counts / color_counts.sum())

    entry = np.array(list(report.entry_counts.values()), dtype=np.float64)
    h_entry = _entropy_of(entry / entry.sum())

    k_uniform, overhead = coding_overhead(len(p.vocabulary), RGB_COLOR_SPACE)

    meta = report.sample_meta
    reference = top_k_set(reference_entry_counts(img, p), p, meta.k)
    disagreement = 1.0 - len(reference & report.top_set()) / len(reference)
    # a one-word vocabulary cannot be mislabeled
    fano = fano_bound(disagreement, len(p.vocabulary)) if len(p.vocabulary) >= 2 else 0.0

    mode = "multinomial" if meta.regime is Regime.WITH_REPLACEMENT else "hypergeometric"
    return InfoDiagnostics(
        H_X_bits=h_x,
        entry_entropy_bits=h_entry,
        vocabulary_size=len(p.vocabulary),
        k_uniform=k_uniform,
        coding_overhead_bits=overhead,
        disagreement_rate=disagreement,
        fano_bound_bits=fano,
        c=correction_factor(meta.N, meta.n, mode),
    )
