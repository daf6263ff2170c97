import pathlib

import pytest

from gammacop.cli import parse_model

ROOT = pathlib.Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"


@pytest.fixture(scope="session")
def bb10_model():
    return parse_model(str(MODELS / "bb10.json"))


@pytest.fixture(scope="session")
def trivariate_model():
    return parse_model(str(MODELS / "trivariate.json"))


@pytest.fixture(scope="session")
def independence_model():
    return parse_model(str(MODELS / "independence2.json"))


@pytest.fixture(scope="session")
def nondivisible_model():
    return parse_model(str(MODELS / "nondivisible.json"))


@pytest.fixture
def announce(capsys):
    """Print a line straight to the terminal, bypassing capture."""

    def _announce(text):
        with capsys.disabled():
            print(text, flush=True)

    return _announce
