"""Category-count statistics of pixel sampling with and without replacement.

Drawing ``n`` of ``N`` pixel positions without replacement gives
multivariate hypergeometric category counts; drawing with replacement gives
multinomial counts. Both have mean ``n m_i / N``; their second moments
differ only by the finite-population factor ``c = (N - n) / (N - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .annotator import pixel_entries, reference_entry_counts, top_k_set
from .palette import Palette
from .sampler import ImagePixels, Regime, SampleSpec, SamplingError, derive_seed, sample_positions

Mode = Literal["hypergeometric", "multinomial"]

DEFAULT_TRIALS = 1000

_REGIME_KEYS = {Regime.WITH_REPLACEMENT: 1, Regime.WITHOUT_REPLACEMENT: 2}


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class PopulationSpec:
    N: int
    m: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))
        if self.N < 1:
            raise StatsError(f"population size must be at least 1, got {self.N}")
        if any(v < 0 for v in self.m):
            raise StatsError("category counts must be nonnegative")
        if sum(self.m) != self.N:
            raise StatsError(f"category counts sum to {sum(self.m)}, not N = {self.N}")

    @classmethod
    def from_counts(cls, m) -> PopulationSpec:
        m = [int(v) for v in m]
        return cls(sum(m), tuple(m))

    @property
    def shares(self) -> np.ndarray:
        return np.array(self.m, dtype=np.float64) / self.N


@dataclass(frozen=True)
class MomentReport:
    mode: Mode
    n: int
    c: float
    expected: np.ndarray
    variance: np.ndarray
    # full matrix; the diagonal holds the variances
    covariance: np.ndarray


def _log_comb(a: int, b: int) -> float:
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def hypergeom_pmf(pop: PopulationSpec, k, n: int) -> float:
    """Probability of category counts ``k`` in ``n`` draws without replacement."""
    k = [int(v) for v in k]
    if len(k) != len(pop.m):
        raise StatsError(f"expected {len(pop.m)} category counts, got {len(k)}")
    if sum(k) != n:
        raise StatsError(f"category counts sum to {sum(k)}, not n = {n}")
    if n > pop.N:
        raise StatsError(f"n = {n} exceeds N = {pop.N}")
    for ki, mi in zip(k, pop.m):
        if ki < 0 or ki > mi:
            raise StatsError(f"count {ki} infeasible for a category of size {mi}")
    log_p = sum(_log_comb(mi, ki) for mi, ki in zip(pop.m, k)) - _log_comb(pop.N, n)
    return math.exp(log_p)


def expected_counts(pop: PopulationSpec, n: int) -> np.ndarray:
    """``n m_i / N``, shared by both sampling modes."""
    if n < 0:
        raise StatsError(f"n must be nonnegative, got {n}")
    return n * np.array(pop.m, dtype=np.float64) / pop.N


def correction_factor(N: int, n: int, mode: Mode) -> float:
    """``(N - n) / (N - 1)`` without replacement, 1 with replacement."""
    if mode == "multinomial":
        return 1.0
    if mode != "hypergeometric":
        raise StatsError(f"unknown mode {mode!r}")
    if n > N:
        raise StatsError(f"cannot draw {n} of {N} without replacement")
    if N == 1:
        return 1.0
    return (N - n) / (N - 1)


def count_moments(pop: PopulationSpec, n: int, mode: Mode) -> MomentReport:
    c = correction_factor(pop.N, n, mode)
    p = pop.shares
    variance = n * p * (1.0 - p) * c
    covariance = -n * np.outer(p, p) * c
    np.fill_diagonal(covariance, variance)
    return MomentReport(mode, n, c, expected_counts(pop, n), variance, covariance)


def mode_of(regime: Regime | str) -> Mode:
    regime = Regime.parse(regime)
    if regime is Regime.WITH_REPLACEMENT:
        return "multinomial"
    if regime is Regime.WITHOUT_REPLACEMENT:
        return "hypergeometric"
    raise StatsError("a full scan has no sampling distribution")


def simulate_counts(
    labels: np.ndarray, n_categories: int, n: int, regime: Regime, trials: int, seed: int
) -> np.ndarray:
    """``(trials, n_categories)`` category counts from repeated seeded samples of ``labels``.

    Trial ``t`` uses the seed derived from ``(seed, regime, t)``, so results do
    not depend on the order trials are run in.
    """
    labels = np.asarray(labels)
    key = _REGIME_KEYS[Regime.parse(regime)]
    out = np.empty((trials, n_categories), dtype=np.int64)
    for t in range(trials):
        spec = SampleSpec(n=n, regime=regime, seed=derive_seed(seed, key, t))
        out[t] = np.bincount(labels[sample_positions(len(labels), spec)], minlength=n_categories)
    return out


@dataclass(frozen=True)
class RegimeStats:
    regime: Regime
    agreement_rate: float
    empirical_mean: np.ndarray
    empirical_variance: np.ndarray
    closed_form: MomentReport


@dataclass(frozen=True)
class RegimeAgreement:
    n: int
    k: int
    trials: int
    seed: int
    # palette entry indices that occur in the image, in category order
    categories: tuple[int, ...]
    population: PopulationSpec
    reference_top: frozenset[str]
    regimes: dict[Regime, RegimeStats]

    @property
    def rate_gap(self) -> float:
        rates = [s.agreement_rate for s in self.regimes.values()]
        return max(rates) - min(rates)


def regime_agreement(
    img: ImagePixels,
    p: Palette,
    n: int,
    k: int,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    regimes: tuple[Regime, ...] = (Regime.WITH_REPLACEMENT, Regime.WITHOUT_REPLACEMENT),
) -> RegimeAgreement:
    """How often a size-``n`` sample reproduces the full-scan top-k word set, per regime.

    Agreement means the two top-k word *sets* are equal; order is ignored.
    Categories for the moment comparison are the palette entries present in
    the image.
    """
    if trials < 1:
        raise StatsError(f"trials must be at least 1, got {trials}")
    if Regime.WITHOUT_REPLACEMENT in regimes and n > img.n_pixels:
        raise SamplingError(f"cannot draw {n} distinct pixels from an image of {img.n_pixels}")

    full = reference_entry_counts(img, p)
    reference = top_k_set(full, p, k)
    present = np.flatnonzero(full)
    category_of_entry = np.full(len(p), -1, dtype=np.intp)
    category_of_entry[present] = np.arange(len(present))
    labels = category_of_entry[pixel_entries(img, p)]
    pop = PopulationSpec(img.n_pixels, tuple(full[present]))

    stats = {}
    for regime in regimes:
        counts = simulate_counts(labels, len(present), n, regime, trials, seed)
        hits = 0
        entry_counts = np.zeros(len(p), dtype=np.int64)
        for row in counts:
            entry_counts[present] = row
            hits += top_k_set(entry_counts, p, k) == reference
        stats[regime] = RegimeStats(
            regime=regime,
            agreement_rate=hits / trials,
            empirical_mean=counts.mean(axis=0),
            empirical_variance=counts.var(axis=0, ddof=1) if trials > 1 else np.zeros(len(present)),
            closed_form=count_moments(pop, n, mode_of(regime)),
        )
    return RegimeAgreement(
        n=n,
        k=k,
        trials=trials,
        seed=seed,
        categories=tuple(int(i) for i in present),
        population=pop,
        reference_top=reference,
        regimes=stats,
    )
