import time
from pathlib import Path

import pytest

from evosym.catalog import data_dir, load, verify_all

FIXTURES = Path(__file__).parent / "fixtures"


class Timed:
    def __init__(self, summary, seconds):
        self.summary, self.seconds = summary, seconds


def _timed_run(entries, parallelism):
    start = time.perf_counter()
    summary = verify_all(entries, seed=7, parallelism=parallelism)
    return Timed(summary, time.perf_counter() - start)


@pytest.fixture(scope="session")
def catalog():
    return load([data_dir()])


@pytest.fixture(scope="session")
def seed7_serial(catalog):
    return _timed_run(catalog, 1)


@pytest.fixture(scope="session")
def seed7_parallel(catalog):
    return _timed_run(catalog, 8)


@pytest.fixture
def report(capsys):
    """Print one criterion line straight to the terminal."""

    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return emit
