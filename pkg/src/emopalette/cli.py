"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 input or decode error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .annotator import DEFAULT_TOP_K, AnnotationError, annotate, check_report
from .imageio import ImageInputError, ingest_image
from .index import IndexFileError, build_index, query_index
from .infometrics import RGB_COLOR_SPACE, InfoError, image_diagnostics
from .palette import PaletteError, load_palette_file
from .report import diagnostics_payload, dumps, format_text, histogram_svg, report_payload
from .sampler import Regime, SampleSpec, SamplingError
from .sampstats import DEFAULT_TRIALS, PopulationSpec, StatsError, correction_factor, count_moments, regime_agreement

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_sampling(p: argparse.ArgumentParser, default_regime: str = "without") -> None:
    p.add_argument("--palette", type=Path, help="palette file (default: bundled stand-in palette)")
    p.add_argument("--sample-size", type=int, default=100, metavar="N", help="pixels to sample (default 100)")
    p.add_argument(
        "--regime",
        choices=[r.value for r in Regime],
        default=default_regime,
        help=f"sampling with/without replacement, or a full scan (default {default_regime})",
    )
    p.add_argument("--seed", type=int, default=0, help="RNG seed, 0 <= seed < 2**64 (default 0)")
    p.add_argument("--top-k", type=int, default=DEFAULT_TOP_K, metavar="K", help="words to keep (default 10)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="emopalette",
        description="Annotate images with emotion words from randomly sampled pixels.",
        epilog="16-bit images are reduced to 8 bits per channel by keeping the high byte.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("annotate", help="annotate one image")
    p.add_argument("image", type=Path)
    _add_sampling(p)
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--histogram", type=Path, metavar="SVG", help="also write a top-k word histogram")
    p.add_argument("--timing", action="store_true", help="print per-phase timings to stderr")

    p = sub.add_parser("index", help="annotate every image in a directory into an index file")
    p.add_argument("directory", type=Path)
    _add_sampling(p)
    p.add_argument("--out", type=Path, required=True, help="index file to write")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("query", help="rank indexed images by an emotion word")
    p.add_argument("index_file", type=Path)
    p.add_argument("word")
    p.add_argument("--limit", type=int, default=10)

    p = sub.add_parser("stats", help="sampling moments and with/without replacement agreement")
    p.add_argument("image", type=Path, nargs="?", help="image for regime agreement (optional)")
    p.add_argument("--population", type=int, metavar="N", help="population size, when no image is given")
    p.add_argument("--counts", help="comma-separated category counts m_i (sum is N)")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    _add_sampling(p)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("diag", help="information diagnostics for one image")
    p.add_argument("image", type=Path)
    _add_sampling(p)
    p.add_argument("--out", type=Path)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _spec(args) -> SampleSpec:
    return SampleSpec(n=args.sample_size, regime=Regime(args.regime), seed=args.seed)


def cmd_annotate(args) -> int:
    t0 = time.perf_counter()
    palette = load_palette_file(args.palette)
    img = ingest_image(args.image)
    t1 = time.perf_counter()
    report = annotate(img, palette, _spec(args), args.top_k)
    check_report(report, palette)
    t2 = time.perf_counter()
    diag = image_diagnostics(img, report, palette)
    t3 = time.perf_counter()

    payload = report_payload(str(args.image), report, diag)
    _emit(dumps(payload) if args.format == "json" else format_text(payload), args.out)
    if args.histogram is not None:
        title = f"{args.image.name}: {report.sample_meta.n} pixels"
        args.histogram.write_text(histogram_svg(report.top_words, title), encoding="utf-8")
    if args.timing:
        phases = {"load": t1 - t0, **report.timings, "diagnostics": t3 - t2}
        for name, secs in phases.items():
            print(f"{name:>12}: {secs * 1e3:9.3f} ms", file=sys.stderr)
        print(f"{'matches':>12}: {report.match_count}", file=sys.stderr)
    return EXIT_OK


def cmd_index(args) -> int:
    palette = load_palette_file(args.palette)
    result = build_index(args.directory, palette, _spec(args), args.top_k, args.out, workers=args.workers)
    print(f"indexed {len(result.records)} image(s) into {args.out}", file=sys.stderr)
    for path, reason in result.skipped:
        print(f"skipped {path}: {reason}", file=sys.stderr)
    return EXIT_OK


def cmd_query(args) -> int:
    hits = query_index(args.index_file, args.word, args.limit)
    for h in hits:
        print(f"{h.share:.6f}\t{h.count}\t{h.image_path}")
    return EXIT_OK


def _moments_json(pop: PopulationSpec, n: int) -> dict:
    out = {}
    for mode in ("hypergeometric", "multinomial"):
        if mode == "hypergeometric" and n > pop.N:
            continue
        m = count_moments(pop, n, mode)
        out[mode] = {
            "c": m.c,
            "expected": m.expected.tolist(),
            "variance": m.variance.tolist(),
            "covariance": m.covariance.tolist(),
        }
    return out


def cmd_stats(args) -> int:
    n = args.sample_size
    if args.image is None:
        if args.counts:
            try:
                pop = PopulationSpec.from_counts(int(v) for v in args.counts.split(","))
            except ValueError as exc:
                raise UsageError(f"bad --counts: {exc}") from None
            if args.population is not None and args.population != pop.N:
                raise UsageError(f"--counts sum to {pop.N}, but --population is {args.population}")
        elif args.population is not None:
            pop = None
        else:
            raise UsageError("stats needs an image, --population or --counts")
        N = pop.N if pop is not None else args.population
        if N < 1:
            raise UsageError(f"population size must be at least 1, got {N}")
        payload = {
            "N": N,
            "n": n,
            "c": {
                "hypergeometric": correction_factor(N, n, "hypergeometric") if n <= N else None,
                "multinomial": correction_factor(N, n, "multinomial"),
            },
        }
        if pop is not None:
            payload["m"] = list(pop.m)
            payload["moments"] = _moments_json(pop, n)
        _emit(dumps(payload), args.out)
        return EXIT_OK

    palette = load_palette_file(args.palette)
    img = ingest_image(args.image)
    ra = regime_agreement(img, palette, n, args.top_k, args.trials, args.seed)
    payload = {
        "image": str(args.image),
        "palette_id": palette.palette_id,
        "N": img.n_pixels,
        "n": n,
        "k": args.top_k,
        "trials": args.trials,
        "seed": args.seed,
        "categories": [palette.entries[i].name for i in ra.categories],
        "m": list(ra.population.m),
        "reference_top": sorted(ra.reference_top),
        "regimes": {
            r.value: {
                "agreement_rate": s.agreement_rate,
                "c": s.closed_form.c,
                "empirical_mean": s.empirical_mean.tolist(),
                "expected": s.closed_form.expected.tolist(),
                "empirical_variance": s.empirical_variance.tolist(),
                "variance": s.closed_form.variance.tolist(),
            }
            for r, s in ra.regimes.items()
        },
        "agreement_gap": ra.rate_gap,
    }
    _emit(dumps(payload), args.out)
    return EXIT_OK


def cmd_diag(args) -> int:
    palette = load_palette_file(args.palette)
    img = ingest_image(args.image)
    report = annotate(img, palette, _spec(args), args.top_k)
    check_report(report, palette)
    diag = image_diagnostics(img, report, palette)
    meta = report.sample_meta
    payload = {
        "image": str(args.image),
        "palette_id": palette.palette_id,
        "N": meta.N,
        "n": meta.n,
        "regime": meta.regime.value,
        "seed": meta.seed,
        "k": meta.k,
        "color_space_size": RGB_COLOR_SPACE,
        **diagnostics_payload(diag),
    }
    _emit(dumps(payload), args.out)
    return EXIT_OK


COMMANDS = {
    "annotate": cmd_annotate,
    "index": cmd_index,
    "query": cmd_query,
    "stats": cmd_stats,
    "diag": cmd_diag,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SamplingError, AnnotationError, StatsError, InfoError) as exc:
        print(f"emopalette: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ImageInputError, PaletteError, IndexFileError, OSError) as exc:
        print(f"emopalette: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"emopalette: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
