"""
Dense linear algebra over GF(p) on numpy arrays.

Entries are exact integers in [0, p). For small primes they are held in
float64 so products go through BLAS; partial sums are reduced mod p before
they can exceed 2^53. Larger primes fall back to int64 with the inner
dimension chunked so every partial sum stays below 2^63.
"""
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

import numpy as np

FLOAT_EXACT = 2 ** 53
INT_EXACT = 2 ** 63 - 1


def work_dtype(p: int) -> np.dtype:
    """float64 when a single product plus a residue is exact in a double."""
    if (p - 1) ** 2 + p < FLOAT_EXACT:
        return np.dtype(np.float64)
    return np.dtype(np.int64)


def inner_chunk(p: int, dtype: np.dtype) -> int:
    """How many products may be summed before a reduction is required."""
    bound = max((p - 1) ** 2, 1)
    limit = FLOAT_EXACT if dtype == np.float64 else INT_EXACT
    return max(1, (limit - p) // bound)


def as_work(a: np.ndarray, p: int) -> np.ndarray:
    return np.asarray(a).astype(work_dtype(p), copy=False)


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """
    Product ``a @ b`` mod p with delayed reduction.

    Args:
        a: (m, K) array with entries in [0, p)
        b: (K, n) array with entries in [0, p)
        p: the modulus

    Returns:
        np.ndarray: (m, n) array in [0, p), dtype of the working precision
    """
    dtype = work_dtype(p)
    a = np.asarray(a, dtype=dtype)
    b = np.asarray(b, dtype=dtype)
    m, inner = a.shape
    out = np.zeros((m, b.shape[1]), dtype=dtype)
    if inner == 0 or m == 0 or b.shape[1] == 0:
        return out
    step = inner_chunk(p, dtype)
    for start in range(0, inner, step):
        stop = min(inner, start + step)
        out += a[:, start:stop] @ b[start:stop]
        np.mod(out, p, out=out)
    return out


@dataclass
class BlockElimination:
    """Result of eliminating a block row by row against its own earlier rows."""

    new_rows: np.ndarray
    new_pivots: List[int]
    forms: List[Optional[np.ndarray]]
    ops: int = 0
    # block positions of the earlier rows each row was reduced with
    sources: List[List[int]] = dc_field(default_factory=list)
    # for each new pivot, the largest block position mixed into its row
    reaches: List[int] = dc_field(default_factory=list)


def eliminate_block(block: np.ndarray, p: int, insertable: Optional[Sequence[bool]] = None) -> BlockElimination:
    """
    Process the rows of ``block`` in order.

    Each row is reduced against the pivots produced by earlier insertable rows
    of the block. A nonzero result is normalized to a leading 1 and recorded
    in ``forms``; a vanishing row records None. Insertable nonzero rows become
    new pivots, kept mutually interreduced in ``new_rows``.
    """
    dtype = block.dtype
    width = block.shape[1]
    pivots: List[int] = []
    forms: List[Optional[np.ndarray]] = []
    sources: List[List[int]] = []
    reaches: List[int] = []
    ops = 0
    basis = np.zeros((block.shape[0], width), dtype=dtype)
    for j in range(block.shape[0]):
        row = block[j].copy()
        used: List[int] = []
        if pivots:
            coeffs = row[pivots]
            hit = np.flatnonzero(coeffs)
            if hit.size:
                row = np.mod(row - matmul_mod(coeffs[None, hit], basis[hit], p)[0], p)
                ops += int(hit.size) * width
                used = sorted({reaches[q] for q in hit})
        sources.append(used)
        nonzero = np.flatnonzero(row)
        if nonzero.size == 0:
            forms.append(None)
            continue
        pc = int(nonzero[0])
        lead = int(row[pc])
        if lead != 1:
            row = np.mod(row * pow(lead, -1, p), p)
            ops += width
        forms.append(row)
        if insertable is not None and not insertable[j]:
            continue
        if pivots:
            column = basis[:len(pivots), pc]
            hit = np.flatnonzero(column)
            if hit.size:
                basis[hit] = np.mod(basis[hit] - np.outer(column[hit], row), p)
                ops += int(hit.size) * width
                for q in hit:
                    reaches[q] = j
        basis[len(pivots)] = row
        pivots.append(pc)
        reaches.append(j)
    return BlockElimination(basis[:len(pivots)], pivots, forms, ops, sources, reaches)


@dataclass
class EchelonBasis:
    """
    A fully interreduced row basis over GF(p).

    ``rows[q]`` has a 1 at column ``pivots[q]`` and zeros at every other pivot
    column, so the normal form of a vector modulo the span is obtained with a
    single product.
    """

    width: int
    p: int
    rows: np.ndarray = None
    pivots: List[int] = dc_field(default_factory=list)
    ops: int = 0

    def __post_init__(self):
        if self.rows is None:
            self.rows = np.zeros((0, self.width), dtype=work_dtype(self.p))

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, block: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Normal forms of the rows of ``block`` and the coefficient matrix used."""
        block = as_work(block, self.p)
        if not self.pivots or block.shape[0] == 0:
            return block.copy(), np.zeros((block.shape[0], 0), dtype=block.dtype)
        coeffs = block[:, self.pivots]
        nnz = int(np.count_nonzero(coeffs))
        if nnz == 0:
            return block.copy(), coeffs
        self.ops += nnz * self.width
        # only basis rows with a nonzero coefficient take part in the product
        used = np.flatnonzero(coeffs.any(axis=0))
        return np.mod(block - matmul_mod(coeffs[:, used], self.rows[used], self.p), self.p), coeffs

    def absorb(self, new_rows: np.ndarray, new_pivots: Sequence[int]) -> List[int]:
        """
        Append rows that vanish on the existing pivots, restoring interreduction.

        Returns:
            List[int]: indices of the existing rows that were modified
        """
        if len(new_pivots) == 0:
            return []
        new_rows = as_work(new_rows, self.p)
        touched: List[int] = []
        if self.pivots:
            coeffs = self.rows[:, list(new_pivots)]
            hit = np.flatnonzero(coeffs.any(axis=1))
            if hit.size:
                self.rows[hit] = np.mod(self.rows[hit] - matmul_mod(coeffs[hit], new_rows, self.p), self.p)
                self.ops += int(np.count_nonzero(coeffs[hit])) * self.width
                touched = [int(q) for q in hit]
        self.rows = np.vstack([self.rows, new_rows])
        self.pivots.extend(int(c) for c in new_pivots)
        return touched

    def insert(self, block: np.ndarray) -> List[Optional[np.ndarray]]:
        """Plain (unsigned) insertion; returns the per-row normal forms."""
        reduced, _ = self.reduce(block)
        result = eliminate_block(reduced, self.p)
        self.ops += result.ops
        self.absorb(result.new_rows, result.new_pivots)
        return result.forms

    def contains(self, vec: np.ndarray) -> bool:
        reduced, _ = self.reduce(np.asarray(vec)[None, :])
        return not np.any(reduced)

    def reducers(self, coeffs: np.ndarray) -> List[List[int]]:
        """Per row of a ``reduce`` coefficient matrix, the basis rows it used."""
        if coeffs.shape[1] == 0:
            return [[] for _ in range(coeffs.shape[0])]
        return [[int(q) for q in np.flatnonzero(line)] for line in coeffs]

    def sorted_rows(self) -> Tuple[np.ndarray, List[int]]:
        order = np.argsort(self.pivots, kind="stable")
        return self.rows[order], [self.pivots[q] for q in order]


def _chunks(a: np.ndarray, size: int):
    for start in range(0, a.shape[0], size):
        yield a[start:start + size]


def rref_mod(a: np.ndarray, p: int, chunk: int = 256) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form over GF(p).

    Returns:
        Tuple: (rows sorted by pivot column, pivot columns)
    """
    a = as_work(np.asarray(a), p)
    basis = EchelonBasis(a.shape[1], p)
    for part in _chunks(a, chunk):
        if basis.rank == basis.width:
            break
        live = part[np.any(part, axis=1)]
        if live.shape[0]:
            basis.insert(live)
    return basis.sorted_rows()


def rank_mod(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref_mod(a, p)[1])


def nullspace_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of the right kernel {x : a @ x = 0} over GF(p)."""
    a = np.asarray(a)
    n = a.shape[1]
    rows, pivots = rref_mod(a, p)
    free = [c for c in range(n) if c not in set(pivots)]
    dtype = work_dtype(p)
    kernel = np.zeros((len(free), n), dtype=dtype)
    for q, c in enumerate(free):
        kernel[q, c] = 1
        for row, pc in zip(rows, pivots):
            kernel[q, pc] = (-row[c]) % p
    return kernel
