import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emopalette.annotator import (
    AnnotationError,
    InvariantViolation,
    annotate,
    check_report,
    pixel_entries,
    rank_words,
    reference_entry_counts,
)
from emopalette.palette import match_pixels
from emopalette.sampler import ImagePixels, SampleSpec

from .conftest import COOL, WARM, image_from_counts

TABLE1_ROW = ["earthy", "friendly", "robust", "strong", "tasty", "warm"]


@pytest.mark.parametrize(
    "counts, expected",
    [
        ({"b": 2, "a": 2, "c": 5}, [("c", 5), ("a", 2), ("b", 2)]),
        ({}, []),
        ({"w": 1}, [("w", 1)]),
    ],
)
def test_rank_words(counts, expected):
    assert rank_words(counts) == expected


@given(st.dictionaries(st.text(min_size=1, max_size=5), st.integers(0, 20)))
def test_rank_words_is_a_total_order(counts):
    ranked = rank_words(counts)
    assert sorted(ranked) == sorted(counts.items())
    keys = [(-c, w) for w, c in ranked]
    assert keys == sorted(keys)


def test_uniform_dark_brick_red_full_scan(table1):
    color = table1.entries[table1.index_of("Dark Brick Red")].color
    img = ImagePixels.uniform(color, 10, 10)
    r = annotate(img, table1, SampleSpec(regime="full"), k=3)
    assert r.word_counts == {w: 100 for w in TABLE1_ROW}
    assert r.top_words == [("earthy", 100), ("friendly", 100), ("robust", 100)]
    assert r.entry_counts == {0: 100}
    assert r.match_count == 100


def test_majority_color_wins_full_scan(warm_cool, benchmark_75_25):
    r = annotate(benchmark_75_25, warm_cool, SampleSpec(regime="full"), k=1)
    assert r.top_words == [("warm", 750)]
    assert r.word_counts == {"warm": 750, "cool": 250}


def test_majority_color_wins_with_replacement(warm_cool, benchmark_75_25):
    # P(Binomial(100, .25) >= 50) ~ 7e-8, so every seed should agree
    hits = sum(
        annotate(benchmark_75_25, warm_cool, SampleSpec(100, "with", seed), k=1).top_words[0][0] == "warm"
        for seed in range(1000)
    )
    assert hits >= 990


def test_k_must_be_positive(warm_cool, benchmark_75_25):
    with pytest.raises(AnnotationError):
        annotate(benchmark_75_25, warm_cool, SampleSpec(10), k=0)


def test_top_words_shorter_than_k_when_vocabulary_small(warm_cool, benchmark_75_25):
    r = annotate(benchmark_75_25, warm_cool, SampleSpec(regime="full"), k=10)
    assert r.top_words == [("warm", 750), ("cool", 250)]


def _random_image(standin, seed, n_colors=12, size=60 * 50):
    rng = np.random.default_rng(seed)
    colors = [tuple(int(v) for v in standin.entries[i].color) for i in rng.choice(len(standin), n_colors, replace=False)]
    counts = rng.multinomial(size, rng.dirichlet(np.ones(n_colors)))
    return image_from_counts(list(zip(colors, counts)), width=60, seed=seed)


@pytest.mark.parametrize("regime", ["with", "without", "full"])
def test_conservation(standin, regime):
    img = _random_image(standin, 1)
    r = annotate(img, standin, SampleSpec(200, regime, seed=5), k=10)
    n = r.sample_meta.n
    assert sum(r.entry_counts.values()) == n == r.match_count
    rebuilt = {}
    for i, c in r.entry_counts.items():
        for w in standin.entries[i].words:
            rebuilt[w] = rebuilt.get(w, 0) + c
    assert rebuilt == r.word_counts
    check_report(r, standin)


def test_check_report_detects_tampering(table1):
    img = ImagePixels.uniform((125, 45, 35), 4, 1)
    r = annotate(img, table1, SampleSpec(regime="full"), k=3)
    bad = type(r)({**r.word_counts, "warm": 3}, r.top_words, r.entry_counts, r.sample_meta, r.match_count)
    with pytest.raises(InvariantViolation):
        check_report(bad, table1)


def test_full_scan_independent_of_seed_and_matches_reference(standin):
    img = _random_image(standin, 2)
    a = annotate(img, standin, SampleSpec(1, "full", seed=1))
    b = annotate(img, standin, SampleSpec(999, "full", seed=77))
    assert (a.word_counts, a.top_words, a.entry_counts) == (b.word_counts, b.top_words, b.entry_counts)
    ref = reference_entry_counts(img, standin)
    assert {int(i): int(ref[i]) for i in np.flatnonzero(ref)} == a.entry_counts
    assert np.array_equal(pixel_entries(img, standin), match_pixels(img.pixels, standin))


def test_exhaustive_without_replacement_equals_full_scan(standin):
    img = _random_image(standin, 3)
    full = annotate(img, standin, SampleSpec(regime="full"))
    census = annotate(img, standin, SampleSpec(img.n_pixels, "without", seed=4))
    assert census.word_counts == full.word_counts
    assert census.top_words == full.top_words


def test_counts_approach_scaled_full_scan(standin):
    img = _random_image(standin, 4)
    full = annotate(img, standin, SampleSpec(regime="full"))
    N = img.n_pixels
    errs = []
    for n in (N // 10, N // 2, (9 * N) // 10):
        r = annotate(img, standin, SampleSpec(n, "without", seed=6))
        errs.append(max(abs(r.word_counts.get(w, 0) / n - c / N) for w, c in full.word_counts.items()))
    assert errs[-1] < errs[0]


def test_monochrome_dominance(standin):
    dominant = standin.entries[10]
    others = [standin.entries[i] for i in (40, 70, 90)]
    img = image_from_counts([(dominant.color, 520)] + [(e.color, 160) for e in others])
    r = annotate(img, standin, SampleSpec(regime="full"), k=len(dominant.words))
    assert {w for w, _ in r.top_words} == set(dominant.words)


def test_sample_meta(warm_cool, benchmark_75_25):
    r = annotate(benchmark_75_25, warm_cool, SampleSpec(100, "with", seed=3), k=2)
    m = r.sample_meta
    assert (m.N, m.n, m.seed, m.k, m.rng) == (1000, 100, 3, 2, "numpy.PCG64")
    assert abs(r.share("warm") - r.word_counts["warm"] / 100) < 1e-15
    assert set(r.timings) == {"sample", "match", "count"}
