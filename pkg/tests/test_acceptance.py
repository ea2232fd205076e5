"""Acceptance criteria, one test each, at the tolerances they state."""

import itertools
import json
import math
import time

import numpy as np
import pytest

from emopalette import cli
from emopalette.annotator import annotate, counts_to_dicts, rank_words, reference_entry_counts
from emopalette.infometrics import JointDistribution, coding_overhead, conditional_entropy, fano_bound, map_error
from emopalette.palette import Palette
from emopalette.sampler import ImagePixels, Regime, SampleSpec
from emopalette.sampstats import PopulationSpec, count_moments, hypergeom_pmf, regime_agreement, simulate_counts

from .conftest import COOL, WARM, image_from_counts
from .test_infometrics import brute_force_min_error, random_joint

criterion = pytest.mark.criterion


@criterion("AC1", "stats reports c = 0.999 (N=105600) and 0.996 (N=28147) at n=100")
def test_ac1_correction_factors(capsys):
    for N, published in ((105600, 0.999), (28147, 0.996)):
        assert cli.main(["stats", "--population", str(N), "--sample-size", "100"]) == 0
        c = json.loads(capsys.readouterr().out)["c"]["hypergeometric"]
        assert round(c, 3) == published
        assert c == pytest.approx((N - 100) / (N - 1), abs=1e-15)


@criterion("AC2", "coding overhead for 187 words over 256^3 colors is ~16.45 bits, k ~ 1.115e-5")
def test_ac2_coding_overhead(capsys, tmp_path):
    k, bits = coding_overhead(187, 256**3)
    assert abs(bits - 16) <= 0.5
    assert bits == pytest.approx(16.45, abs=5e-3)
    assert k == pytest.approx(1.115e-5, rel=1e-3)
    # surfaced in the report for the 187-word stand-in palette
    from PIL import Image

    path = tmp_path / "px.png"
    Image.fromarray(np.full((20, 20, 3), 100, dtype=np.uint8)).save(path)
    assert cli.main(["annotate", str(path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["vocabulary_size"] == 187
    assert report["k_uniform"] == pytest.approx(1.115e-5, rel=1e-3)
    assert report["coding_overhead_bits"] == pytest.approx(bits)


@criterion("AC3", "H(Y|X) <= Fano bound on 10^4 random joints, zero violations")
def test_ac3_fano_inequality():
    rng = np.random.default_rng(20181206)
    violations = 0
    t0 = time.perf_counter()
    for i in range(10_000):
        nx, ny = int(rng.integers(1, 9)), int(rng.integers(2, 9))
        m = random_joint(rng, nx, ny, sparsity=0.5 if i % 2 else 0.0)
        j = JointDistribution.from_matrix(m)
        eps, _ = map_error(j)
        # 1e-12 absorbs float rounding only; true violations would be O(1e-3) or larger
        violations += conditional_entropy(j) > fano_bound(eps, ny) + 1e-12
    assert violations == 0
    assert time.perf_counter() - t0 < 10


@criterion("AC4", "map_error equals brute-force minimum over all decision rules, |X||Y| <= 12, to 1e-12")
def test_ac4_map_error_oracle():
    rng = np.random.default_rng(4)
    shapes = [(nx, ny) for nx in range(1, 13) for ny in range(1, 13) if nx * ny <= 12]
    t0 = time.perf_counter()
    checked = 0
    for nx, ny in shapes:
        for i in range(60):
            m = random_joint(rng, nx, ny, sparsity=0.4 if i % 3 == 0 else 0.0)
            eps, upper = map_error(JointDistribution.from_matrix(m))
            assert abs(eps - brute_force_min_error(m)) <= 1e-12
            assert eps <= upper + 1e-12
            checked += 1
    assert checked == 60 * len(shapes)
    assert time.perf_counter() - t0 < 5


def _compositions(total, parts):
    """Positive integer vectors of length ``parts`` summing to ``total``."""
    for cuts in itertools.combinations(range(1, total), parts - 1):
        edges = (0, *cuts, total)
        yield tuple(b - a for a, b in zip(edges, edges[1:]))


def _feasible(m, n):
    if len(m) == 1:
        if n <= m[0]:
            yield (n,)
        return
    for k0 in range(min(m[0], n) + 1):
        for rest in _feasible(m[1:], n - k0):
            yield (k0, *rest)


def _moment_errors(counts, closed):
    """|empirical - closed form| in units of the empirical standard error, for means, variances, covariances."""
    T = len(counts)
    dev = counts - counts.mean(axis=0)
    out = []
    se_mean = counts.std(axis=0, ddof=1) / math.sqrt(T)
    out += list(np.abs(counts.mean(axis=0) - closed.expected) / se_mean)
    I = counts.shape[1]
    for a in range(I):
        for b in range(a, I):
            prod = dev[:, a] * dev[:, b]
            emp = prod.sum() / (T - 1)
            se = prod.std(ddof=1) / math.sqrt(T)
            out.append(abs(emp - closed.covariance[a, b]) / se)
    return np.array(out)


@criterion("AC5", "pmf sums to 1 for N <= 12; 10^4-trial moments within 5 standard errors for both regimes")
def test_ac5_sampling_moments():
    t0 = time.perf_counter()
    for N in range(1, 13):
        for parts in range(1, 5):
            for m in _compositions(N, parts):
                pop = PopulationSpec(N, m)
                for n in range(N + 1):
                    total = sum(hypergeom_pmf(pop, k, n) for k in _feasible(m, n))
                    assert abs(total - 1.0) <= 1e-9, (m, n, total)

    m = np.array([250, 150, 75, 25])
    labels = np.repeat(np.arange(4), m)
    pop = PopulationSpec.from_counts(m)
    n, T = 100, 10_000
    for regime, mode in ((Regime.WITH_REPLACEMENT, "multinomial"), (Regime.WITHOUT_REPLACEMENT, "hypergeometric")):
        counts = simulate_counts(labels, 4, n, regime, T, seed=55).astype(np.float64)
        z = _moment_errors(counts, count_moments(pop, n, mode))
        assert np.all(z <= 5), (regime, z.round(2))

    # the check has power: without-replacement variances are far from the c = 1 forms
    counts = simulate_counts(labels, 4, n, Regime.WITHOUT_REPLACEMENT, T, seed=55).astype(np.float64)
    z_wrong = _moment_errors(counts, count_moments(pop, n, "multinomial"))
    assert z_wrong.max() > 5
    assert time.perf_counter() - t0 < 30


@criterion("AC6", "75/25 image, n=100, k=1, 1000 trials: both regimes >= 0.99 agreement, gap <= 0.02")
def test_ac6_regime_equivalence():
    p = Palette.from_records([("A", WARM, ["warm"]), ("B", COOL, ["cool"])])
    img = image_from_counts([(WARM, 7500), (COOL, 2500)], width=100)
    t0 = time.perf_counter()
    ra = regime_agreement(img, p, n=100, k=1, trials=1000, seed=6)
    rates = {r: s.agreement_rate for r, s in ra.regimes.items()}
    assert rates[Regime.WITH_REPLACEMENT] >= 0.99
    assert rates[Regime.WITHOUT_REPLACEMENT] >= 0.99
    assert ra.rate_gap <= 0.02
    assert time.perf_counter() - t0 < 60


# entry names and area shares; each keeps one dominant color
FIDELITY_DESIGNS = [
    [("Vivid Chartreuse", 0.55), ("Medium Violet", 0.20), ("Dusty Rose", 0.15), ("Medium Rose", 0.10)],
    [("Deep Chartreuse", 0.60), ("Dark Chartreuse", 0.25), ("Dusty Green", 0.10), ("Pale Magenta", 0.05)],
    [("Muted Red", 0.50), ("Pale Violet", 0.22), ("Dark Red", 0.18), ("Vivid Blue", 0.10)],
]


def _design_image(p, design, width=240, height=160):
    N = width * height
    counts = [int(round(share * N)) for _, share in design]
    counts[-1] += N - sum(counts)
    return image_from_counts([(p.entries[p.index_of(name)].color, c) for (name, _), c in zip(design, counts)], width)


@criterion("AC7", "synthetic images with >= 20% rank-10/11 gap: 100-pixel top-3 matches full scan in >= 95% of 1000 seeds")
@pytest.mark.parametrize("design", range(len(FIDELITY_DESIGNS)), ids=["chartreuse", "deep-chartreuse", "muted-red"])
def test_ac7_annotation_fidelity(standin, design):
    img = _design_image(standin, FIDELITY_DESIGNS[design])
    _, words = counts_to_dicts(reference_entry_counts(img, standin), standin)
    ranked = rank_words(words)
    assert len(ranked) > 10
    assert (ranked[9][1] - ranked[10][1]) / ranked[9][1] >= 0.20

    t0 = time.perf_counter()
    ra = regime_agreement(img, standin, n=100, k=3, trials=1000, seed=7 + design)
    for regime, s in ra.regimes.items():
        assert s.agreement_rate >= 0.95, (regime, s.agreement_rate)
    assert time.perf_counter() - t0 < 60


@criterion("AC8", "stand-in palette: uniform Dark Brick Red image yields its six words, each at count n")
@pytest.mark.parametrize(
    "spec",
    [SampleSpec(regime="full"), SampleSpec(100, "with", 3), SampleSpec(100, "without", 3)],
    ids=["full", "with", "without"],
)
def test_ac8_table1_round_trip(standin, spec):
    entry = standin.entries[standin.index_of("Dark Brick Red")]
    img = ImagePixels.uniform(entry.color, 30, 20)
    r = annotate(img, standin, spec)
    n = r.sample_meta.n
    six = ["earthy", "friendly", "robust", "strong", "tasty", "warm"]
    assert r.word_counts == {w: n for w in six}
    assert r.top_words == [(w, n) for w in six]


@criterion("AC9", "10 repeated annotate runs give byte-identical reports")
def test_ac9_determinism(tmp_path):
    from PIL import Image

    rng = np.random.default_rng(9)
    Image.fromarray(rng.integers(0, 256, (64, 80, 3), dtype=np.uint8)).save(tmp_path / "noise.png")
    outputs = []
    for i in range(10):
        out, svg = tmp_path / f"r{i}.json", tmp_path / f"h{i}.svg"
        argv = ["annotate", str(tmp_path / "noise.png"), "--sample-size", "100", "--regime", "without",
                "--seed", "1234", "--out", str(out), "--histogram", str(svg)]
        assert cli.main(argv) == 0
        outputs.append((out.read_bytes(), svg.read_bytes()))
    assert all(o == outputs[0] for o in outputs)


@criterion("AC10", "annotation cost scales with n: n matches when sampling, >= 50x faster than full scan at 1 MP")
def test_ac10_performance(standin):
    rng = np.random.default_rng(10)
    side = 1024
    img = ImagePixels(side, side, rng.integers(0, 256, (side * side, 3), dtype=np.uint8))

    for regime in ("with", "without"):
        assert annotate(img, standin, SampleSpec(100, regime, 1)).match_count == 100

    t0 = time.perf_counter()
    full = annotate(img, standin, SampleSpec(regime="full"))
    t_full = time.perf_counter() - t0
    assert full.match_count == img.n_pixels

    timings = []
    for seed in range(5):
        t0 = time.perf_counter()
        annotate(img, standin, SampleSpec(100, "without", seed))
        timings.append(time.perf_counter() - t0)
    t_sample = float(np.median(timings))
    assert t_full / t_sample >= 50, (t_full, t_sample)
