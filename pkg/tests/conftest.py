import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from smtcore.cnf import cnf_convert
from smtcore.parser import parse_file

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def nine_clauses():
    return cnf_convert(parse_file(str(DATA / "nine_clauses.smt2")))


@pytest.fixture(scope="session")
def abstraction_gap():
    return cnf_convert(parse_file(str(DATA / "abstraction_gap.smt2")))


@pytest.fixture()
def data_dir():
    return DATA
