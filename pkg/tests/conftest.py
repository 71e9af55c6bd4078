import functools

import pytest

from tightframe.frame_builder import build_frame
from tightframe.presets import PRESETS, preset_spec

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def preset_frame(name, I_max=4096):
    return build_frame(preset_spec(name), I_max=I_max)


@pytest.fixture(scope="session")
def frames():
    return {n: preset_frame(n) for n in PRESETS}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
