"""Shared fixtures plus the acceptance-report collector.

Acceptance tests (test_acceptance.py) call ``record_acceptance`` with one
line per criterion; at session end the block is printed and also written
to acceptance_report.txt at the repo root so a CI log and a local run
leave the same artifact.
"""

from pathlib import Path

import pytest

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_sessionfinish(session, exitstatus):
    if not ACCEPTANCE_LINES:
        return
    lines = sorted(ACCEPTANCE_LINES)
    block = "\n".join(["", "=" * 72, "ACCEPTANCE REPORT", "=" * 72, *lines, "=" * 72])
    print(block)
    try:
        root = Path(str(session.config.rootpath))
        (root / "acceptance_report.txt").write_text("\n".join(lines) + "\n")
    except OSError:
        pass  # report still went to stdout


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return Path(__file__).parent / "golden"
