"""Shared fixtures: paths, backends, and the synthetic training generator."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from prove.backends import BaselineBackend
from prove.verification import FEATURE_COUNT, FeatureVector

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    outcomes: dict[str, str] = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if getattr(report, "when", "call") != "call" and status == "passed":
                continue
            name = nodeid.split("::")[-1]
            outcomes[name] = "PASS" if status == "passed" else "FAIL"
    if outcomes:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name in sorted(outcomes):
            terminalreporter.write_line(f"{name}: {outcomes[name]}")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def baseline() -> BaselineBackend:
    return BaselineBackend()


def synthetic_label(values: tuple[float, ...]) -> str:
    """The generator's ground-truth rule over the 25 features.

    SUPP when the top slot leans supportive, REF when it leans refutative,
    NEI otherwise; samples are generated away from the 0.6 boundaries.
    """
    if values[1] >= 0.6:
        return "SUPP"
    if values[2] >= 0.6:
        return "REF"
    return "NEI"


def make_synthetic_dataset(n: int, seed: int) -> list[tuple[FeatureVector, str]]:
    """Separable samples whose labels follow ``synthetic_label`` exactly."""
    rng = random.Random(seed)
    dataset = []
    for i in range(n):
        kind = i % 3
        rho0 = rng.uniform(0.2, 1.0)
        if kind == 0:  # SUPP-dominant top slot
            supp = rng.uniform(0.7, 0.95)
            ref = rng.uniform(0.0, (1.0 - supp) / 2)
        elif kind == 1:  # REF-dominant top slot
            ref = rng.uniform(0.7, 0.95)
            supp = rng.uniform(0.0, (1.0 - ref) / 2)
        else:  # neither crosses the threshold
            supp = rng.uniform(0.0, 0.45)
            ref = rng.uniform(0.0, min(0.45, 1.0 - supp))
        nei = 1.0 - supp - ref
        length = rng.uniform(0.02, 1.0)
        values = [rho0, supp, ref, nei, length]
        # Remaining slots: weaker evidence with mild noise, descending rho.
        rho = rho0
        for _ in range(4):
            if rng.random() < 0.4:
                values.extend([0.0, 0.0, 0.0, 0.0, 0.0])
                continue
            rho = rng.uniform(-1.0, rho)
            a, b, c = rng.random(), rng.random(), rng.random()
            total = a + b + c
            values.extend([rho, a / total, b / total, c / total, rng.uniform(0.02, 1.0)])
        assert len(values) == FEATURE_COUNT
        fv = FeatureVector(values=tuple(values))
        dataset.append((fv, synthetic_label(fv.values)))
    return dataset
