import json

import pytest

from src.algebra.gf import PrimeField
from src.determinantal.detsys import generate_generic_system, instance_record


@pytest.fixture
def field():
    return PrimeField(65521)


@pytest.fixture
def small_field():
    return PrimeField(101)


@pytest.fixture(scope="session")
def corank_one_n3():
    return generate_generic_system(3, 4, 1, PrimeField(65521), seed=3)


@pytest.fixture(scope="session")
def corank_one_n4():
    return generate_generic_system(4, 4, 2, PrimeField(65521), seed=4)


@pytest.fixture
def instance_file(tmp_path, corank_one_n3):
    path = tmp_path / "instance.json"
    path.write_text(json.dumps(instance_record(corank_one_n3)))
    return str(path)

