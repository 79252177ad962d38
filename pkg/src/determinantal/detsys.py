"""
Generic determinantal instances: random n x n matrices of linear forms, their
minors in a canonical order, cofactors and submatrices.

All row, column and generator indices are 0-based. Generator ``flat`` indices
enumerate (row-subset, col-subset) pairs lexicographically.
"""
import json
import os
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .hilbert import hilbert_coeff, rank_oracle
from ..algebra.gf import PrimeField, make_rng, rand_array
from ..algebra.linalg import FLOAT_EXACT
from ..algebra.mono_poly import Polynomial, count_monomials, monomial_positions, monomials_of_degree, shift_map
from ..models.schema import InstanceSchema
from ..utils.config import get_settings
from ..utils.errors import InstanceFormatError, NonGenericInstanceError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

Subset = Tuple[int, ...]


@dataclass
class LinearMatrix:
    """
    An n x n matrix whose (i, j) entry is sum_t coeffs[t, i, j] * x_t.

    ``affine`` marks instances whose last variable is a homogenizing variable.
    """

    n: int
    k: int
    field: PrimeField
    coeffs: np.ndarray
    seed: Optional[int] = None
    affine: bool = False
    _entries: Optional[List[List[Polynomial]]] = dc_field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.int64) % self.field.p
        if self.coeffs.shape != (self.k, self.n, self.n):
            raise InstanceFormatError(f"Coefficient tensor has shape {self.coeffs.shape}, "
                                      f"expected {(self.k, self.n, self.n)}")

    @property
    def entries(self) -> List[List[Polynomial]]:
        if self._entries is None:
            self._entries = [
                [Polynomial.linear_form(self.field, self.coeffs[:, i, j]) for j in range(self.n)]
                for i in range(self.n)
            ]
        return self._entries

    def entry(self, i: int, j: int) -> Polynomial:
        return self.entries[i][j]

    def evaluate(self, point: Sequence[int]) -> np.ndarray:
        """The scalar matrix obtained by substituting ``point`` for the variables."""
        vec = np.asarray(point, dtype=np.int64) % self.field.p
        return np.tensordot(vec, self.coeffs, axes=(0, 0)) % self.field.p


@dataclass(frozen=True)
class MinorIndex:
    rows: Subset
    cols: Subset
    flat: int


@dataclass
class DetSystem:
    M: LinearMatrix
    r: int
    gens: List[Polynomial]
    index: List[MinorIndex]
    seed: Optional[int] = None
    retries: int = 0

    def __post_init__(self):
        self._flat = {(mi.rows, mi.cols): mi.flat for mi in self.index}

    @property
    def n(self) -> int:
        return self.M.n

    @property
    def k(self) -> int:
        return self.M.k

    @property
    def field(self) -> PrimeField:
        return self.M.field

    @property
    def size(self) -> int:
        return self.r + 1

    def flat_of(self, rows: Subset, cols: Subset) -> int:
        try:
            return self._flat[(tuple(rows), tuple(cols))]
        except KeyError:
            raise ValueError(f"No minor with rows {rows} and cols {cols} in this system")

    def deleted_flat(self, row: int, col: int) -> int:
        """Corank one: flat index of the minor deleting ``row`` and ``col``."""
        everything = range(self.n)
        return self.flat_of(tuple(a for a in everything if a != row), tuple(b for b in everything if b != col))


def random_linear_matrix(n: int, k: int, field: PrimeField, seed: int) -> LinearMatrix:
    """All k * n^2 coefficients drawn uniformly from one seeded stream."""
    if n < 2:
        raise ValueError(f"Matrix size must be at least 2, got {n}")
    if k < 1:
        raise ValueError(f"Need at least one variable, got {k}")
    rng = make_rng(seed)
    return LinearMatrix(n, k, field, rand_array(field, rng, (k, n, n)), seed=seed)


def minor_indices(n: int, size: int) -> List[MinorIndex]:
    subsets = list(combinations(range(n), size))
    return [
        MinorIndex(rows, cols, flat)
        for flat, (rows, cols) in enumerate((rows, cols) for rows in subsets for cols in subsets)
    ]


class _LaplaceExpander:
    """Memoized first-row Laplace expansion on dense coefficient vectors."""

    def __init__(self, M: LinearMatrix):
        self.M = M
        self.p = M.field.p
        self.memo: Dict[Tuple[Subset, Subset], np.ndarray] = {}

    def linear_times(self, i: int, j: int, vec: np.ndarray, d: int) -> np.ndarray:
        k = self.M.k
        out = np.zeros(count_monomials(k, d), dtype=np.int64)
        lin = self.M.coeffs[:, i, j]
        for t in np.flatnonzero(lin):
            out[shift_map(k, d, int(t))] += int(lin[t]) * vec
        self.M.field.charge(2 * k * vec.size)
        return out % self.p

    def det(self, rows: Subset, cols: Subset) -> np.ndarray:
        key = (rows, cols)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        s = len(rows)
        if s == 1:
            value = self.M.coeffs[:, rows[0], cols[0]].copy()
        else:
            value = np.zeros(count_monomials(self.M.k, s), dtype=np.int64)
            for pos, c in enumerate(cols):
                sub = self.det(rows[1:], cols[:pos] + cols[pos + 1:])
                if not sub.any():
                    continue
                term = self.linear_times(rows[0], c, sub, s)
                value = value - term if pos % 2 else value + term
            value %= self.p
        self.memo[key] = value
        return value


@lru_cache(maxsize=None)
def product_index(k: int, a: int, b: int) -> np.ndarray:
    """Index in degree a + b of ``m * m'`` for degree-a m (rows) and degree-b m' (columns)."""
    positions = monomial_positions(k, a + b)
    right = monomials_of_degree(k, b)
    return np.array([[positions[ma * mb] for mb in right] for ma in monomials_of_degree(k, a)], dtype=np.int64)


class _DenseBareiss:
    """Fraction-free elimination on dense coefficient vectors of homogeneous forms."""

    def __init__(self, field: PrimeField, k: int):
        self.field = field
        self.k = k
        self.p = field.p

    def mul(self, u: np.ndarray, a: int, v: np.ndarray, b: int) -> np.ndarray:
        p = self.p
        idx = product_index(self.k, a, b)
        size = count_monomials(self.k, a + b)
        self.field.charge(2 * int(np.count_nonzero(u)) * v.size)
        if (p - 1) ** 2 * u.size < FLOAT_EXACT:
            weights = np.outer(u.astype(np.float64), v.astype(np.float64)).ravel()
            return np.bincount(idx.ravel(), weights=weights, minlength=size).astype(np.int64) % p
        out = np.zeros(size, dtype=np.int64)
        for r in np.flatnonzero(u):
            out[idx[r]] = (out[idx[r]] + int(u[r]) * v % p) % p
        return out

    def divide(self, num: np.ndarray, a: int, den: np.ndarray, b: int) -> np.ndarray:
        """Exact quotient; quotient terms are fixed from the grevlex-largest down."""
        p = self.p
        lead = int(np.flatnonzero(den)[0])
        inv = pow(int(den[lead]), -1, p)
        idx = product_index(self.k, a - b, b)
        rest = num % p
        quotient = np.zeros(idx.shape[0], dtype=np.int64)
        for q in range(idx.shape[0]):
            c = int(rest[idx[q, lead]]) * inv % p
            if c:
                quotient[q] = c
                rest[idx[q]] = (rest[idx[q]] - c * den) % p
        self.field.charge(2 * int(np.count_nonzero(quotient)) * den.size)
        if rest.any():
            raise ArithmeticError("Division leaves a remainder")
        return quotient

    def det(self, a: List[List[np.ndarray]], degree: int) -> Tuple[np.ndarray, int]:
        """Determinant of a square array of degree-``degree`` forms and its degree."""
        s = len(a)
        a = [list(row) for row in a]
        sign = 1
        prev, prev_deg = np.ones(1, dtype=np.int64), 0
        cur = degree
        for c in range(s - 1):
            if not a[c][c].any():
                swap = next((q for q in range(c + 1, s) if a[q][c].any()), None)
                if swap is None:
                    return np.zeros(count_monomials(self.k, s * degree), dtype=np.int64), s * degree
                a[c], a[swap] = a[swap], a[c]
                sign = -sign
            nxt = 2 * cur - prev_deg
            for i in range(c + 1, s):
                for j in range(c + 1, s):
                    num = (self.mul(a[i][j], cur, a[c][c], cur) - self.mul(a[i][c], cur, a[c][j], cur)) % self.p
                    a[i][j] = self.divide(num, 2 * cur, prev, prev_deg) if num.any() else \
                        np.zeros(count_monomials(self.k, nxt), dtype=np.int64)
            prev, prev_deg = a[c][c], cur
            cur = nxt
        det = a[s - 1][s - 1]
        return (det if sign > 0 else (-det) % self.p), cur


def bareiss_determinant(entries: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Fraction-free elimination over the polynomial ring with exact division."""
    first = entries[0][0]
    field, k = first.field, first.k
    degree = max(f.degree for row in entries for f in row)
    if degree < 0:
        return Polynomial.zero(field, k)
    dense = [[f.to_dense(degree) if f else np.zeros(count_monomials(k, degree), dtype=np.int64) for f in row]
             for row in entries]
    vec, d = _DenseBareiss(field, k).det(dense, degree)
    return Polynomial.from_dense(vec, field, k, d)


LAPLACE_MAX_SIZE = 4


def minors(M: LinearMatrix, size: int, method: str = "auto") -> DetSystem:
    """
    All size x size minors of M, ordered by ``MinorIndex.flat``.

    Args:
        M: the matrix of linear forms
        size: minor size r + 1
        method: ``laplace`` (memoized expansion), ``bareiss`` (fraction-free elimination) or
            ``auto`` (Laplace up to size 4, Bareiss above)

    Returns:
        DetSystem: generators of degree ``size`` with r = size - 1
    """
    if not 1 <= size <= M.n:
        raise ValueError(f"Minor size must be in [1, {M.n}], got {size}")
    index = minor_indices(M.n, size)
    if method == "auto":
        method = "laplace" if size <= LAPLACE_MAX_SIZE else "bareiss"
    if method == "laplace":
        expander = _LaplaceExpander(M)
        gens = [Polynomial.from_dense(expander.det(mi.rows, mi.cols), M.field, M.k, size) for mi in index]
    elif method == "bareiss":
        gens = [
            bareiss_determinant([[M.entries[i][j] for j in mi.cols] for i in mi.rows])
            for mi in index
        ]
    else:
        raise ValueError(f"Unknown minor method {method!r}")
    return DetSystem(M, size - 1, gens, index, seed=M.seed)


def cofactor_matrix(M: LinearMatrix, system: Optional[DetSystem] = None) -> List[List[Polynomial]]:
    """Entry (i, j) is (-1)^(i+j) times the minor deleting row i and column j."""
    if M.n < 2:
        raise ValueError("Cofactors need n >= 2")
    system = system or minors(M, M.n - 1)
    return [
        [
            system.gens[system.deleted_flat(i, j)].scale(-1 if (i + j) % 2 else 1)
            for j in range(M.n)
        ]
        for i in range(M.n)
    ]


def submatrices(M: LinearMatrix, size: int) -> List[Tuple[Subset, Subset, LinearMatrix]]:
    """All size x size submatrices with their global row and column sets, lexicographically."""
    if not 1 <= size <= M.n:
        raise ValueError(f"Submatrix size must be in [1, {M.n}], got {size}")
    entries = M.entries
    out = []
    for rows in combinations(range(M.n), size):
        for cols in combinations(range(M.n), size):
            sub = LinearMatrix(
                size, M.k, M.field, M.coeffs[:, list(rows)][:, :, list(cols)], seed=M.seed, affine=M.affine,
                _entries=[[entries[i][j] for j in cols] for i in rows],
            )
            out.append((rows, cols, sub))
    return out


def minor_index_map(sub_rows: Subset, sub_cols: Subset, local: MinorIndex, ambient: DetSystem) -> int:
    """Global flat index of a minor given by local indices inside a submatrix."""
    if len(local.rows) != ambient.size or len(local.cols) != ambient.size:
        raise ValueError(f"Local minor of size {len(local.rows)} in a system of size {ambient.size}")
    try:
        rows = tuple(sub_rows[a] for a in local.rows)
        cols = tuple(sub_cols[b] for b in local.cols)
    except IndexError:
        raise ValueError(f"Local minor {local} out of range for submatrix {sub_rows} x {sub_cols}")
    return ambient.flat_of(rows, cols)


def degeneracy_check(system: DetSystem) -> Optional[str]:
    """
    Rank tests that a generic instance passes.

    Returns:
        Optional[str]: None when the instance looks generic, otherwise a reason
    """
    d = system.r + 1
    expected = min(len(system.gens), count_monomials(system.k, d))
    measured = rank_oracle(system.gens, d)
    if measured != expected:
        return f"degree {d} rank {measured}, expected {expected}"
    if system.r == system.n - 2 and system.k == 4 and system.n >= 3:
        d = system.r + 2
        expected = hilbert_coeff(system.n, d)
        measured = rank_oracle(system.gens, d)
        if measured != expected:
            return f"degree {d} rank {measured}, expected {expected}"
    return None


def generate_generic_system(n: int, k: int, r: int, field: PrimeField, seed: int,
                            max_retries: Optional[int] = None, affine: bool = False) -> DetSystem:
    """
    Draw a matrix, take its (r+1)-minors and re-draw with seed + 1 while the
    degeneracy check fails.

    Raises:
        NonGenericInstanceError: when every attempt is degenerate
    """
    if not 1 <= r <= n - 1:
        raise ValueError(f"Need 1 <= r <= n - 1, got n={n}, r={r}")
    max_retries = get_settings().max_retries if max_retries is None else max_retries
    for attempt in range(max_retries + 1):
        current = seed + attempt
        M = random_linear_matrix(n, k, field, current)
        M.affine = affine
        system = minors(M, r + 1)
        system.retries = attempt
        reason = degeneracy_check(system)
        if reason is None:
            if attempt:
                logger.info(f"Generic instance found with seed {current} after {attempt} retries")
            return system
        logger.warning(f"Seed {current} gave a degenerate instance ({reason}), retrying with seed {current + 1}")
    raise NonGenericInstanceError(
        f"No generic instance for n={n}, k={k}, r={r} in {max_retries + 1} attempts from seed {seed}",
        seed=seed,
    )


def instance_record(system: DetSystem) -> dict:
    M = system.M
    return {
        "p": M.field.p,
        "n": M.n,
        "k": M.k,
        "r": system.r,
        "seed": M.seed,
        "affine": M.affine,
        "retries": system.retries,
        "coeffs": M.coeffs.tolist(),
    }


def save_instance(system: DetSystem, output_path: str) -> None:
    try:
        directory = os.path.dirname(output_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(output_path, "w") as f:
            json.dump(instance_record(system), f)
        logger.info(f"Saved instance n={system.n}, k={system.k}, r={system.r} to {output_path}")
    except OSError as e:
        logger.error(f"Error saving instance to {output_path}: {str(e)}")
        raise


def system_from_record(record: dict) -> DetSystem:
    """Rebuild a DetSystem from a cleaned instance record; coefficients regenerate from the seed when absent."""
    schema = InstanceSchema()
    record = schema.apply(record)
    if not schema.validate(record):
        raise InstanceFormatError("; ".join(schema.problems(record)))
    field_ = PrimeField(record["p"])
    if record["coeffs"] is None:
        M = random_linear_matrix(record["n"], record["k"], field_, record["seed"])
    else:
        M = LinearMatrix(record["n"], record["k"], field_, np.array(record["coeffs"], dtype=np.int64),
                         seed=record["seed"])
    M.affine = record["affine"]
    system = minors(M, record["r"] + 1)
    system.retries = record["retries"]
    return system


def load_instance(path: str) -> DetSystem:
    try:
        with open(path) as f:
            record = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Error reading instance {path}: {str(e)}")
        raise InstanceFormatError(f"Cannot read instance {path}: {e}")
    return system_from_record(record)
