import numpy as np
import pytest

from src.algebra.linalg import (EchelonBasis, eliminate_block, inner_chunk, matmul_mod, nullspace_mod, rank_mod,
                                rref_mod, work_dtype)

BIG_PRIME = 2147483647


def reference_product(a, b, p):
    return (a.astype(object) @ b.astype(object)) % p


def test_work_dtype_depends_on_prime():
    assert work_dtype(65521) == np.float64
    assert work_dtype(BIG_PRIME) == np.int64
    assert inner_chunk(BIG_PRIME, np.dtype(np.int64)) >= 1


@pytest.mark.parametrize("p", [101, 65521, BIG_PRIME])
def test_matmul_mod_matches_exact_product(p):
    rng = np.random.default_rng(0)
    a = rng.integers(0, p, size=(7, 40), dtype=np.int64)
    b = rng.integers(0, p, size=(40, 5), dtype=np.int64)
    result = matmul_mod(a, b, p)
    assert np.array_equal(result.astype(np.int64).astype(object), reference_product(a, b, p))


def test_rank_and_rref():
    p = 101
    a = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert rank_mod(a, p) == 2
    rows, pivots = rref_mod(a, p)
    assert pivots == [0, 1]
    assert np.array_equal(rows.astype(np.int64), [[1, 0, 1], [0, 1, 1]])


def test_nullspace():
    p = 65521
    rng = np.random.default_rng(3)
    a = rng.integers(0, p, size=(3, 6), dtype=np.int64)
    kernel = nullspace_mod(a, p).astype(np.int64)
    assert kernel.shape == (3, 6)
    assert not np.any(reference_product(a, kernel.T, p))


def test_eliminate_block_reports_dependent_rows():
    p = 101
    block = np.array([[1, 1, 0], [2, 2, 0], [0, 3, 1]], dtype=np.float64)
    result = eliminate_block(block, p)
    assert result.forms[1] is None
    assert result.new_pivots == [0, 1]
    assert np.array_equal(result.new_rows[:, result.new_pivots], np.eye(2))


def test_eliminate_block_skips_non_insertable_rows():
    p = 101
    block = np.array([[1, 1, 0], [0, 1, 0], [1, 0, 0]], dtype=np.float64)
    result = eliminate_block(block, p, insertable=[True, False, True])
    assert result.forms[1] is not None
    assert result.new_pivots == [0, 1]
    assert len(result.new_rows) == 2


def test_echelon_basis_membership():
    p = 65521
    basis = EchelonBasis(4, p)
    forms = basis.insert(np.array([[1, 2, 0, 0], [0, 0, 1, 1], [1, 2, 1, 1]]))
    assert forms[2] is None
    assert basis.rank == 2
    assert basis.contains(np.array([3, 6, 5, 5]))
    assert not basis.contains(np.array([0, 1, 0, 0]))


def test_eliminate_block_reports_reducing_rows():
    p = 101
    block = np.array([[1, 1, 0], [0, 1, 1], [1, 2, 1]], dtype=np.float64)
    result = eliminate_block(block, p)
    assert result.sources[0] == []
    assert result.sources[1] == []
    assert result.sources[2] == [1]
    assert result.forms[2] is None
