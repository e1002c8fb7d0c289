from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture
def spectrum_csv():
    return DATA / "spectrum_L6.csv"


@pytest.fixture
def scaling_csv():
    return DATA / "scaling_sweep.csv"


@pytest.fixture
def correlations_csv():
    return DATA / "correlations_L6.csv"
