from __future__ import annotations

import numpy as np
import pytest

from emopalette.palette import Palette, load_palette, load_palette_file
from emopalette.sampler import ImagePixels

TABLE1_TEXT = """\
# the four example rows
Dark Brick Red ; 125, 45, 35 ; earthy, friendly, robust, strong, tasty, warm
Salmon Red ; 250, 128, 114 ; healthy, happy, tasty, friendly, cosmetic, warm
Deep Plum Red ; 110, 30, 70 ; elegant, majestic, spiritual, fruity, feminine
Medium Burgundy Purple ; 128, 40, 90 ; vibrant, spiritual, passionate, floral, fruity
"""

WARM = (200, 60, 40)
COOL = (40, 80, 200)


@pytest.fixture(scope="session")
def standin() -> Palette:
    return load_palette_file()


@pytest.fixture(scope="session")
def table1() -> Palette:
    return load_palette(TABLE1_TEXT.encode())


@pytest.fixture(scope="session")
def warm_cool() -> Palette:
    return Palette.from_records([("A", WARM, ["warm"]), ("B", COOL, ["cool"])])


def image_from_counts(colors_and_counts, width: int | None = None, seed: int = 0) -> ImagePixels:
    """Image holding each color the given number of times, positions shuffled."""
    px = np.concatenate([np.tile(np.array(c, dtype=np.uint8), (k, 1)) for c, k in colors_and_counts])
    np.random.default_rng(seed).shuffle(px, axis=0)
    width = width or len(px)
    return ImagePixels(width, len(px) // width, px)


@pytest.fixture(scope="session")
def benchmark_75_25() -> ImagePixels:
    return image_from_counts([(WARM, 750), (COOL, 250)], width=40)


_criteria: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        case = f" [{item.callspec.id}]" if hasattr(item, "callspec") else ""
        _criteria.append((marker.args[0], marker.args[1] + case, "PASS" if rep.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, status in sorted(_criteria, key=lambda c: int(c[0].lstrip("AC"))):
        terminalreporter.write_line(f"[{status}] {cid}: {title}")
