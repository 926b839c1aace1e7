import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def trade_csv():
    return FIXTURES / "trade.csv"


@pytest.fixture(scope="session")
def gdp_csv():
    return FIXTURES / "gdp.csv"


@pytest.fixture(scope="session")
def recessions_csv():
    return FIXTURES / "recessions.csv"
