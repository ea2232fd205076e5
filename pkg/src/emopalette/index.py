"""Batch annotation index stored as JSON Lines, and retrieval by emotion word.

The first line is a header (``format_version``, ``palette_id``, sampling
settings and the list of skipped files); every following line is one image
record. Records are written in path order, so rebuilding with the same
inputs and seed reproduces the file except for the ``created_at`` stamps.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

from .annotator import annotate
from .imageio import ImageInputError, ingest_image
from .infometrics import image_diagnostics
from .palette import Palette
from .report import report_payload
from .sampler import SampleSpec, SamplingError

FORMAT_VERSION = 1


class IndexFileError(Exception):
    pass


@dataclass(frozen=True)
class BuildResult:
    records: list[dict]
    skipped: list[tuple[str, str]]


@dataclass(frozen=True)
class QueryHit:
    image_path: str
    share: float
    count: int


def _record_for(path: Path, p: Palette, spec: SampleSpec, k: int) -> dict:
    data = path.read_bytes()
    img = ingest_image(path)
    report = annotate(img, p, spec, k)
    diag = image_diagnostics(img, report, p)
    return {
        "image_path": str(path),
        "image_hash": hashlib.sha256(data).hexdigest(),
        "N": img.n_pixels,
        "annotation": report_payload(str(path), report, diag),
        "diagnostics": asdict(diag),
        "palette_id": p.palette_id,
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _try_record(path: Path, p: Palette, spec: SampleSpec, k: int) -> dict | tuple[str, str]:
    try:
        return _record_for(path, p, spec, k)
    except (ImageInputError, SamplingError) as exc:
        return str(path), str(exc)


def build_index(
    directory: str | Path,
    p: Palette,
    spec: SampleSpec,
    k: int,
    index_path: str | Path,
    workers: int = 1,
) -> BuildResult:
    """Annotate every file directly under ``directory`` and write the index.

    Files that cannot be decoded (or are too small for a without-replacement
    sample) are listed in ``skipped`` instead of failing the build.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise IndexFileError(f"not a directory: {directory}")
    files = sorted(f for f in directory.iterdir() if f.is_file())
    if not files:
        raise IndexFileError(f"no files in {directory}")

    # annotation runs concurrently; the index is written by this thread alone
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        outcomes = list(pool.map(lambda f: _try_record(f, p, spec, k), files))
    records = [o for o in outcomes if isinstance(o, dict)]
    skipped = [o for o in outcomes if isinstance(o, tuple)]
    if not records:
        raise IndexFileError(f"no decodable images in {directory}")

    header = {
        "format_version": FORMAT_VERSION,
        "palette_id": p.palette_id,
        "n": spec.n,
        "regime": spec.regime.value,
        "seed": spec.seed,
        "k": k,
        "skipped": [{"path": path, "reason": reason} for path, reason in skipped],
    }
    lines = [json.dumps(header, ensure_ascii=False)]
    lines += [json.dumps(r, ensure_ascii=False) for r in records]
    try:
        Path(index_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IndexFileError(f"cannot write index {index_path}: {exc}") from None
    return BuildResult(records, skipped)


def load_index(index_path: str | Path) -> tuple[dict, list[dict]]:
    try:
        text = Path(index_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IndexFileError(f"cannot read index {index_path}: {exc}") from None
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise IndexFileError(f"empty index file {index_path}")
    try:
        header = json.loads(lines[0])
        records = [json.loads(ln) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise IndexFileError(f"corrupt index {index_path}: {exc}") from None
    if header.get("format_version") != FORMAT_VERSION:
        raise IndexFileError(f"unsupported index format_version {header.get('format_version')!r}")
    return header, records


def query_index(index_path: str | Path, word: str, limit: int = 10) -> list[QueryHit]:
    """Images annotated with ``word``, by the word's share of sampled pixels.

    Ties are ordered by path. An unknown word simply matches nothing.
    """
    word = word.strip().lower()
    if not word:
        raise ValueError("query word must be nonempty")
    _, records = load_index(index_path)
    hits = []
    for rec in records:
        ann = rec["annotation"]
        count = ann["word_counts"].get(word, 0)
        if count > 0:
            hits.append(QueryHit(rec["image_path"], count / ann["n"], count))
    hits.sort(key=lambda h: (-h.share, h.image_path))
    return hits[:limit]
