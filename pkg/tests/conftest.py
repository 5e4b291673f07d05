import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # oracles / netgen helpers

from riskmc import parse_project, validate

REPO = Path(__file__).resolve().parents[1]
FIGURE3 = REPO / "projects" / "figure3.project"


@pytest.fixture(scope="session")
def figure3_path():
    return FIGURE3


@pytest.fixture(scope="session")
def figure3_spec():
    return parse_project(FIGURE3)


@pytest.fixture(scope="session")
def figure3_network(figure3_spec):
    return validate(figure3_spec)
