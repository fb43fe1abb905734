import json
from pathlib import Path

import pytest
from hypothesis import settings

from knightmove.grading import DimTable
from knightmove.knotio import catalog_get, catalog_names

DATA = Path(__file__).parent / "data"

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

ALTERNATING = ["trefoil_r", "trefoil_l", "figure8", "5_1", "5_2", "6_1", "6_2", "6_3",
               "7_1", "7_2", "7_3", "7_4", "7_5", "7_6", "7_7"]
NON_ALTERNATING = ["8_19", "8_20", "9_42", "10_124", "10_132"]


def small_catalog(max_crossings=10):
    return [n for n in catalog_names() if catalog_get(n).n <= max_crossings]


@pytest.fixture(scope="session")
def table1() -> DimTable:
    """Khovanov homology of K, transcribed cell by cell from the published table."""
    return DimTable.from_json((DATA / "table1.json").read_text())


@pytest.fixture(scope="session")
def table1_path() -> Path:
    return DATA / "table1.json"


@pytest.fixture(scope="session")
def scan_checkpoints(tmp_path_factory) -> Path:
    """Directory shared by the tests that scan the 38-crossing knot, so it is scanned once."""
    return tmp_path_factory.mktemp("scan_checkpoints")
