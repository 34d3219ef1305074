import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polcheck.cli import fixture_path  # noqa: E402
from polcheck.model import load_model  # noqa: E402


@pytest.fixture(scope="session")
def traffic():
    return load_model(fixture_path("traffic.json"))


@pytest.fixture(scope="session")
def message():
    return load_model(fixture_path("message.json"))


@pytest.fixture(scope="session")
def drone():
    return load_model(fixture_path("drone.json"))
