import json
from pathlib import Path

import pytest

from tubenull.certify import delta_star, direction_search
from tubenull.digits import carpet, menger_sponge
from tubenull.projection import Direction

DATA = Path(__file__).parent / "data"

V4_VECTORS = [(1, 0), (0, 1), (1, 1), (1, -1)]


@pytest.fixture(scope="session")
def carpet_system():
    return carpet()


@pytest.fixture(scope="session")
def V4():
    return [Direction(v) for v in V4_VECTORS]


@pytest.fixture(scope="session")
def carpet_cert(carpet_system, V4):
    return delta_star(carpet_system, V4)


@pytest.fixture(scope="session")
def sponge_cert():
    return direction_search(menger_sponge(), 1)


@pytest.fixture(scope="session")
def two_vertex_gds():
    return json.loads((DATA / "two_vertex_reflection.json").read_text())
