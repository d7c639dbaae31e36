from pathlib import Path

import pytest

from src.config import Budgets
from src.monotiling import box_tiling, heisenberg_tiling
from src.subshift import load_shift_spec

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def budgets():
    return Budgets()


@pytest.fixture
def z_tiling():
    return box_tiling(1)


@pytest.fixture
def z2_tiling():
    return box_tiling(2)


@pytest.fixture
def h3_tiling():
    return heisenberg_tiling()


@pytest.fixture
def full_shift():
    return load_shift_spec(DATA / "specs" / "full_shift.json")


@pytest.fixture
def golden_mean():
    return load_shift_spec(DATA / "specs" / "golden_mean.json")


@pytest.fixture
def hard_squares():
    return load_shift_spec(DATA / "specs" / "hard_squares.json")


@pytest.fixture
def data_dir():
    return DATA
