import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
VECTORS_PATH = REPO_ROOT / "src" / "semdiff" / "data" / "provider_vectors.txt"

RUNNER_CMD = [sys.executable, "-m", "subject_runner"]


@pytest.fixture(scope="session")
def vectors_path():
    if VECTORS_PATH.exists():
        return VECTORS_PATH
    import importlib.resources as resources

    return resources.files("semdiff") / "data" / "provider_vectors.txt"


@pytest.fixture
def runner_cmd():
    return list(RUNNER_CMD)


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {name}: {status}", flush=True)
