import json
from itertools import product
from unittest.mock import patch

import numpy as np
import pytest
import sympy

from src.determinantal.detsys import (MinorIndex, bareiss_determinant, cofactor_matrix, generate_generic_system,
                                      instance_record, load_instance, minor_index_map, minor_indices, minors,
                                      random_linear_matrix, save_instance, submatrices)
from src.models.schema import InstanceSchema
from src.utils.errors import InstanceFormatError, NonGenericInstanceError


def test_random_matrix_is_seeded(field):
    a = random_linear_matrix(4, 4, field, 1)
    b = random_linear_matrix(4, 4, field, 1)
    assert a.coeffs.shape == (4, 4, 4)
    assert np.array_equal(a.coeffs, b.coeffs)
    assert not np.array_equal(a.coeffs, random_linear_matrix(4, 4, field, 2).coeffs)


def test_minor_order():
    index = minor_indices(3, 2)
    assert len(index) == 9
    assert index[0] == MinorIndex((0, 1), (0, 1), 0)
    assert index[1] == MinorIndex((0, 1), (0, 2), 1)
    assert index[-1] == MinorIndex((1, 2), (1, 2), 8)


def test_minors_have_expected_shape(corank_one_n4):
    assert len(corank_one_n4.gens) == 16
    assert all(g.degree == 3 for g in corank_one_n4.gens)
    assert corank_one_n4.deleted_flat(0, 0) == 15


def test_laplace_matches_bareiss(small_field):
    M = random_linear_matrix(3, 3, small_field, 11)
    for size in (2, 3):
        assert minors(M, size, method="laplace").gens == minors(M, size, method="bareiss").gens


def test_large_minors_use_fraction_free_elimination(small_field):
    M = random_linear_matrix(5, 4, small_field, 13)
    laplace = minors(M, 5, method="laplace")
    assert minors(M, 5).gens == laplace.gens
    assert minors(M, 4).gens == minors(M, 4, method="laplace").gens
    assert laplace.gens[0].degree == 5


def test_bareiss_matches_numeric_determinant(field):
    M = random_linear_matrix(6, 4, field, 21)
    point = [2, 7, 1, 8]
    values = M.evaluate(point)
    det = bareiss_determinant(M.entries)
    assert det.evaluate(point) == sympy.Matrix([[int(v) for v in row] for row in values]).det() % field.p


def test_minors_match_numeric_determinants(field):
    M = random_linear_matrix(3, 4, field, 5)
    system = minors(M, 2)
    point = [3, 1, 4, 1]
    values = M.evaluate(point)
    for mi, g in zip(system.index, system.gens):
        sub = sympy.Matrix([[int(values[i, j]) for j in mi.cols] for i in mi.rows])
        assert g.evaluate(point) == sub.det() % field.p


def test_bareiss_of_singular_matrix(field):
    M = random_linear_matrix(2, 3, field, 2)
    row = M.entries[0]
    assert bareiss_determinant([row, row]).is_zero()


def test_cofactor_expansion(corank_one_n3):
    M = corank_one_n3.M
    det = minors(M, 3).gens[0]
    C = cofactor_matrix(M, corank_one_n3)
    for i, l in product(range(3), repeat=2):
        total = sum((M.entry(i, j) * C[l][j] for j in range(1, 3)), M.entry(i, 0) * C[l][0])
        if i == l:
            assert total == det
        else:
            assert total.is_zero()


def test_submatrices_and_index_map(corank_one_n4):
    subs = submatrices(corank_one_n4.M, 3)
    assert len(subs) == 16
    rows, cols, sub = subs[5]
    assert sub.entry(0, 0) is corank_one_n4.M.entry(rows[0], cols[0])
    local = MinorIndex((0, 1), (0, 1), 0)
    flat = minor_index_map((0, 2, 3), (1, 2, 3), local, minors(corank_one_n4.M, 2))
    assert minors(corank_one_n4.M, 2).index[flat] == MinorIndex((0, 2), (1, 2), flat)


def test_generic_system_retries_on_degenerate_seed(field):
    with patch("src.determinantal.detsys.degeneracy_check", side_effect=["degree 2 rank 8, expected 9", None]):
        system = generate_generic_system(3, 4, 1, field, seed=20)
    assert system.retries == 1
    assert system.M.seed == 21


def test_generic_system_gives_up(field):
    with patch("src.determinantal.detsys.degeneracy_check", return_value="degree 2 rank 0, expected 9"):
        with pytest.raises(NonGenericInstanceError) as exc:
            generate_generic_system(3, 4, 1, field, seed=20, max_retries=2)
    assert exc.value.seed == 20


def test_instance_round_trip(tmp_path, corank_one_n3):
    path = tmp_path / "inst.json"
    save_instance(corank_one_n3, str(path))
    loaded = load_instance(str(path))
    assert np.array_equal(loaded.M.coeffs, corank_one_n3.M.coeffs)
    assert loaded.gens == corank_one_n3.gens
    assert json.loads(path.read_text())["n"] == 3


def test_instance_without_coeffs_regenerates_from_seed(tmp_path, field):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"n": 3, "k": 4, "seed": 9}))
    loaded = load_instance(str(path))
    assert loaded.r == 1
    assert np.array_equal(loaded.M.coeffs, random_linear_matrix(3, 4, field, 9).coeffs)


def test_bad_instance_is_rejected(tmp_path, corank_one_n3):
    record = instance_record(corank_one_n3)
    record["coeffs"] = record["coeffs"][:2]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(record))
    with pytest.raises(InstanceFormatError):
        load_instance(str(path))
    with pytest.raises(InstanceFormatError):
        load_instance(str(tmp_path / "missing.json"))


def test_instance_schema_fills_defaults():
    schema = InstanceSchema()
    record = schema.apply({"n": "4", "k": 4})
    assert record["r"] == 2
    assert record["p"] == 65521
    assert schema.validate(record)
    assert not schema.validate(schema.apply({"n": 1, "k": 4}))
