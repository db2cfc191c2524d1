import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from manakit.extremal import norrell_density, strange_density
from manakit.monotones import rel_ent_magic
from manakit.stabilizer import enumerate_vertices
from manakit.system import QuditSystem


@pytest.fixture(scope="session")
def poly3():
    return enumerate_vertices(QuditSystem(3, 1))


@pytest.fixture(scope="session")
def poly5():
    return enumerate_vertices(QuditSystem(5, 1))


@pytest.fixture(scope="session")
def poly9():
    return enumerate_vertices(QuditSystem(3, 2))


@pytest.fixture(scope="session")
def r_strange(poly3):
    return rel_ent_magic(strange_density(), poly3, gap_tol=1e-8)


@pytest.fixture(scope="session")
def r_norrell(poly3):
    return rel_ent_magic(norrell_density(), poly3, gap_tol=1e-8)
