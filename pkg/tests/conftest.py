import math
import random
from pathlib import Path as FsPath

import pytest

from pairpaths.circuit import (
    AnnihilationRule,
    BeamSplitter,
    PhaseSettings,
    Scheme,
    WingCircuit,
)
from pairpaths.state import Path

FIXTURES = FsPath(__file__).parent / "fixtures"
SCHEME_DIR = FsPath(__file__).parents[1] / "src" / "pairpaths" / "schemes"

STAGE1_COMBOS = [(Path.A, Path.A), (Path.A, Path.B), (Path.B, Path.A), (Path.B, Path.B)]


def random_wing(rng: random.Random) -> WingCircuit:
    return WingCircuit(
        BeamSplitter(rng.random()), BeamSplitter(rng.random()), BeamSplitter(rng.random()),
        PhaseSettings(rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)),
    )


def random_scheme(rng: random.Random, name: str = "rnd") -> Scheme:
    combos = [c for c in STAGE1_COMBOS if rng.random() < 0.5]
    rules = tuple(AnnihilationRule(m, p, f"g{k}") for k, (m, p) in enumerate(combos))
    return Scheme(name, random_wing(rng), random_wing(rng), rules)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    lines = test_acceptance.report_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
