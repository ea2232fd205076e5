"""Report payloads and SVG word-frequency histograms."""

from __future__ import annotations

import json
from dataclasses import asdict
from xml.sax.saxutils import escape, quoteattr

from .annotator import AnnotationReport
from .infometrics import InfoDiagnostics

REPORT_FIELDS = (
    "palette_id",
    "image",
    "N",
    "n",
    "regime",
    "seed",
    "k",
    "entry_counts",
    "word_counts",
    "top_words",
    "H_X_bits",
    "entry_entropy_bits",
    "coding_overhead_bits",
    "fano_bound_bits",
    "c",
)


def report_payload(image: str, report: AnnotationReport, diag: InfoDiagnostics) -> dict:
    """JSON-ready report; keys of ``REPORT_FIELDS`` first, then supplementary fields."""
    meta = report.sample_meta
    payload = {
        "palette_id": meta.palette_id,
        "image": image,
        "N": meta.N,
        "n": meta.n,
        "regime": meta.regime.value,
        "seed": meta.seed,
        "k": meta.k,
        "entry_counts": {str(i): c for i, c in sorted(report.entry_counts.items())},
        "word_counts": dict(sorted(report.word_counts.items())),
        "top_words": [[w, c] for w, c in report.top_words],
        "H_X_bits": diag.H_X_bits,
        "entry_entropy_bits": diag.entry_entropy_bits,
        "coding_overhead_bits": diag.coding_overhead_bits,
        "fano_bound_bits": diag.fano_bound_bits,
        "c": diag.c,
        "k_uniform": diag.k_uniform,
        "vocabulary_size": diag.vocabulary_size,
        "disagreement_rate": diag.disagreement_rate,
        "match_count": report.match_count,
        "rng": meta.rng,
    }
    return payload


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def diagnostics_payload(diag: InfoDiagnostics) -> dict:
    return asdict(diag)


def format_text(payload: dict) -> str:
    lines = [
        f"image: {payload['image']}",
        f"pixels: {payload['N']}  sampled: {payload['n']} ({payload['regime']}, seed {payload['seed']})",
        f"top {payload['k']} words:",
    ]
    width = max((len(w) for w, _ in payload["top_words"]), default=0)
    lines += [f"  {w:<{width}}  {c}" for w, c in payload["top_words"]]
    lines.append(
        f"H(X) = {payload['H_X_bits']:.4f} bits, entry entropy = {payload['entry_entropy_bits']:.4f} bits, "
        f"coding overhead = {payload['coding_overhead_bits']:.2f} bits, c = {payload['c']:.4f}"
    )
    return "\n".join(lines) + "\n"


def histogram_svg(top_words: list[tuple[str, int]], title: str = "") -> str:
    """Vertical bar chart of word counts, bars in the given order, labels under each bar."""
    bar_w, gap, plot_h = 36, 12, 240
    left, top, bottom = 56, 40 if title else 16, 120
    width = left + len(top_words) * (bar_w + gap) + gap
    height = top + plot_h + bottom
    peak = max((c for _, c in top_words), default=0) or 1
    axis_y = top + plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
    ]
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{axis_y}" stroke="#333"/>')
    out.append(f'<line x1="{left}" y1="{axis_y}" x2="{width}" y2="{axis_y}" stroke="#333"/>')
    for tick in (0, peak):
        y = axis_y - plot_h * tick / peak
        out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">{tick}</text>')
    for i, (word, count) in enumerate(top_words):
        x = left + gap + i * (bar_w + gap)
        h = plot_h * count / peak
        out.append(
            f'<rect class="bar" data-word={quoteattr(word)} data-count="{count}" '
            f'x="{x}" y="{axis_y - h:.2f}" width="{bar_w}" height="{h:.2f}" fill="#7d2d23"/>'
        )
        cx = x + bar_w / 2
        out.append(
            f'<text x="{cx:.1f}" y="{axis_y + 12}" text-anchor="end" '
            f'transform="rotate(-60 {cx:.1f} {axis_y + 12})">{escape(word)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
