import numpy as np
import pytest

from twostage_kmeans import engine


@pytest.fixture
def small_chunks(monkeypatch):
    """Force many chunks so multi-worker code paths run on small inputs."""
    monkeypatch.setattr(engine, "CHUNK_SIZE", 7)


def random_instance(rng, n_max=50, d_max=3, k_max=4):
    n = int(rng.integers(4, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    k = int(rng.integers(1, min(k_max, n) + 1))
    return rng.normal(size=(n, d)) * 3, k


# one (number, passed, detail) entry per acceptance criterion that ran
CRITERIA = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(CRITERIA):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
