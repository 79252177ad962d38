"""
Explicit syzygies of determinantal systems read off the Gulliksen-Negård
complex.

Syzygies are built symbolically: every coordinate is an integer combination of
matrix entries ``m[row][col]``. Generation therefore performs no field
arithmetic; the polynomial module element is materialized on first access.

Sign conventions (0-based indices, coordinate (a, b) multiplies the minor
deleting row a and column b):

    d1(X, Y) = M X - Y M
    minor coordinates of a matrix N: (-1)^(a+b) N[a][b]
    d2(E_ij) = (E_ij M, M E_ij)
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .detsys import DetSystem, LinearMatrix, MinorIndex, minor_index_map, submatrices
from ..algebra.linalg import nullspace_mod, rank_mod
from ..algebra.mono_poly import ModuleElement, Polynomial, count_monomials, shift_map
from ..utils.errors import WrongCorankError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

# (integer coefficient, row, col): coefficient * m[row][col]
Term = Tuple[int, int, int]
Coord = Tuple[Term, ...]

FAMILIES = ("i", "ii", "iii", "iv")


@dataclass(frozen=True)
class SyzygyTag:
    """Provenance: complex level, family, family parameters and source submatrix."""

    kind: str
    family: str
    params: Tuple[int, ...]
    submatrix: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None

    def __str__(self) -> str:
        text = f"{self.kind}-{self.family}{self.params}"
        if self.submatrix is not None:
            text += f"@{self.submatrix[0]}x{self.submatrix[1]}"
        return text


def _combine(terms: Iterable[Term]) -> Coord:
    acc: Dict[Tuple[int, int], int] = {}
    for c, row, col in terms:
        acc[(row, col)] = acc.get((row, col), 0) + c
    return tuple(sorted((c, row, col) for (row, col), c in acc.items() if c))


@dataclass(frozen=True)
class Syzygy:
    """
    A degree-1 syzygy over ``ambient_rank`` generators.

    ``coords`` maps a coordinate position to its symbolic linear form.
    """

    coords: Tuple[Tuple[int, Coord], ...]
    ambient_rank: int
    matrix: LinearMatrix = field(repr=False, compare=False)
    tag: Optional[SyzygyTag] = field(default=None, compare=False)
    degree: int = 1

    @classmethod
    def build(cls, entries: Dict[int, List[Term]], ambient_rank: int, matrix: LinearMatrix,
              tag: Optional[SyzygyTag] = None) -> "Syzygy":
        coords = []
        for pos in sorted(entries):
            combined = _combine(entries[pos])
            if combined:
                coords.append((pos, combined))
        return cls(tuple(coords), ambient_rank, matrix, tag)

    @property
    def support(self) -> List[int]:
        return [pos for pos, _ in self.coords]

    def key(self) -> Tuple:
        return self.coords

    def negated_key(self) -> Tuple:
        return tuple((pos, tuple(sorted((-c, row, col) for c, row, col in coord))) for pos, coord in self.coords)

    def linear_form(self, coord: Coord) -> np.ndarray:
        """Coefficient vector over x_1..x_k of a symbolic coordinate."""
        M = self.matrix
        vec = np.zeros(M.k, dtype=np.int64)
        for c, row, col in coord:
            vec = (vec + c * M.coeffs[:, row, col]) % M.field.p
        M.field.charge(2 * M.k * len(coord))
        return vec

    def dense_coords(self) -> Dict[int, np.ndarray]:
        return {pos: self.linear_form(coord) for pos, coord in self.coords}

    @cached_property
    def elem(self) -> ModuleElement:
        M = self.matrix
        entries = {pos: Polynomial.linear_form(M.field, vec) for pos, vec in self.dense_coords().items()}
        return ModuleElement.from_terms(self.ambient_rank, entries, M.field, M.k)

    def to_dict(self) -> dict:
        return {
            "tag": str(self.tag) if self.tag else None,
            "coords": {str(pos): [int(c) for c in vec] for pos, vec in self.dense_coords().items()},
        }


@dataclass
class SyzygyBasis:
    syzygies: List[Syzygy]
    ambient_rank: int
    over: Union[DetSystem, "SyzygyBasis"] = field(repr=False)

    def __len__(self) -> int:
        return len(self.syzygies)

    def __iter__(self) -> Iterator[Syzygy]:
        return iter(self.syzygies)

    def __getitem__(self, idx: int) -> Syzygy:
        return self.syzygies[idx]

    @property
    def matrix(self) -> LinearMatrix:
        return self.over.M if isinstance(self.over, DetSystem) else self.over.matrix

    def elements(self) -> List[ModuleElement]:
        return [s.elem for s in self.syzygies]

    def coefficient_matrix(self) -> np.ndarray:
        """Degree-1 coefficients: column ``pos * k + t`` holds the x_t coefficient at ``pos``."""
        if not self.syzygies:
            return np.zeros((0, 0), dtype=np.int64)
        k = self.syzygies[0].matrix.k
        mat = np.zeros((len(self.syzygies), self.ambient_rank * k), dtype=np.int64)
        for q, syz in enumerate(self.syzygies):
            for pos, vec in syz.dense_coords().items():
                mat[q, pos * k:(pos + 1) * k] = vec
        return mat


def _require_corank_one(system: DetSystem) -> None:
    if system.r != system.n - 2:
        raise WrongCorankError(f"Corank-one syzygies need r = n - 2, got n={system.n}, r={system.r}")


def first_syzygy_positions(n: int) -> Dict[Tuple[str, int, int], int]:
    """Position of each corank-one first syzygy in emission order."""
    positions = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                positions[("i", i, j)] = len(positions)
    for i in range(n):
        for j in range(n):
            if i != j:
                positions[("ii", i, j)] = len(positions)
    for i in range(n - 1):
        positions[("iii", i, i)] = len(positions)
    for j in range(1, n):
        positions[("iv", j, j)] = len(positions)
    return positions


def _sign(a: int, b: int) -> int:
    return -1 if (a + b) % 2 else 1


def _corank_one_terms(n: int) -> Iterator[Tuple[str, Tuple[int, ...], Dict[Tuple[int, int], List[Term]]]]:
    """
    Families of the first syzygies, keyed by the (row, col) deleted by each minor.

    (i)   sum_k (-1)^(k+j) m[k][i] at (k, j), i != j
    (ii)  sum_k (-1)^(i+k) m[j][k] at (i, k), i != j
    (iii) column i expansion minus row 0 expansion, i < n - 1
    (iv)  row j expansion minus row 0 expansion, j >= 1
    """
    def add(entries, at, term):
        entries.setdefault(at, []).append(term)

    for i in range(n):
        for j in range(n):
            if i != j:
                entries: Dict[Tuple[int, int], List[Term]] = {}
                for k in range(n):
                    add(entries, (k, j), (_sign(k, j), k, i))
                yield "i", (i, j), entries
    for i in range(n):
        for j in range(n):
            if i != j:
                entries = {}
                for k in range(n):
                    add(entries, (i, k), (_sign(i, k), j, k))
                yield "ii", (i, j), entries
    for i in range(n - 1):
        entries = {}
        for k in range(n):
            add(entries, (k, i), (_sign(k, i), k, i))
            add(entries, (0, k), (-_sign(0, k), 0, k))
        yield "iii", (i,), entries
    for j in range(1, n):
        entries = {}
        for k in range(n):
            add(entries, (j, k), (_sign(j, k), j, k))
            add(entries, (0, k), (-_sign(0, k), 0, k))
        yield "iv", (j,), entries


def syz_corank_one(system: DetSystem) -> SyzygyBasis:
    """
    The 2n^2 - 2 minimal first syzygies of the (n-1)-minors.

    Raises:
        WrongCorankError: if r != n - 2
    """
    _require_corank_one(system)
    n = system.n
    ell = len(system.gens)
    syzygies = []
    for family, params, entries in _corank_one_terms(n):
        by_flat = {system.deleted_flat(a, b): terms for (a, b), terms in entries.items()}
        syzygies.append(Syzygy.build(by_flat, ell, system.M, SyzygyTag("syz1", family, params)))
    logger.debug(f"Built {len(syzygies)} first syzygies for n={n}")
    return SyzygyBasis(syzygies, ell, system)


def syz_gen(system: DetSystem, r: Optional[int] = None) -> SyzygyBasis:
    """
    First syzygies of the (r+1)-minors: corank-one syzygies of every
    (r+2) x (r+2) submatrix lifted to the ambient generators, with exact
    duplicates up to sign removed.
    """
    r = system.r if r is None else r
    n = system.n
    if not 1 <= r <= n - 2:
        raise ValueError(f"Need 1 <= r <= n - 2, got n={n}, r={r}")
    if r != system.r:
        raise ValueError(f"System holds {system.r + 1}-minors, not {r + 1}-minors")
    ell = len(system.gens)
    size = r + 2
    local_index = {(mi.rows, mi.cols): mi for mi in _local_minor_index(size)}
    seen = set()
    raw = 0
    syzygies = []
    for sub_rows, sub_cols, _ in submatrices(system.M, size):
        for family, params, entries in _corank_one_terms(size):
            raw += 1
            by_flat: Dict[int, List[Term]] = {}
            for (a, b), terms in entries.items():
                local = local_index[(_without(size, a), _without(size, b))]
                flat = minor_index_map(sub_rows, sub_cols, local, system)
                by_flat[flat] = [(c, sub_rows[row], sub_cols[col]) for c, row, col in terms]
            tag = SyzygyTag("syz1", family, params, (sub_rows, sub_cols))
            syz = Syzygy.build(by_flat, ell, system.M, tag)
            if syz.key() in seen or syz.negated_key() in seen:
                continue
            seen.add(syz.key())
            syzygies.append(syz)
    logger.info(f"syz_gen n={n}, r={r}: {raw} lifted syzygies, {len(syzygies)} after removing duplicates")
    return SyzygyBasis(syzygies, ell, system)


def _without(size: int, a: int) -> Tuple[int, ...]:
    return tuple(x for x in range(size) if x != a)


def _local_minor_index(size: int) -> List[MinorIndex]:
    subsets = list(combinations(range(size), size - 1))
    return [MinorIndex(rows, cols, q) for q, (rows, cols) in enumerate((a, b) for a in subsets for b in subsets)]


def syz2_corank_one(system: DetSystem) -> SyzygyBasis:
    """
    The n^2 second syzygies d2(E_ij) as coordinates over ``syz_corank_one``.

    The class of (X, Y) = (E_ij M, M E_ij) is written in the basis
    (E_ab, 0), -(0, E_ab), (E_aa, E_00), -(0, E_bb - E_00): off-diagonal
    entries of X and Y give families (i) and (ii); the diagonal parts x, y give
    x_a - x_{n-1} on (iii) and x_{n-1} - y_b on (iv).
    """
    _require_corank_one(system)
    n = system.n
    last = n - 1
    positions = first_syzygy_positions(n)
    ambient = len(positions)

    def element(i: int, j: int) -> Dict[int, List[Term]]:
        entries: Dict[int, List[Term]] = {}
        for c in range(n):
            if c != i:
                entries.setdefault(positions[("i", i, c)], []).append((1, j, c))
            if c != j:
                entries.setdefault(positions[("ii", c, j)], []).append((-1, c, i))
        for a in range(n - 1):
            terms = []
            if a == i:
                terms.append((1, j, i))
            if i == last:
                terms.append((-1, j, i))
            if terms:
                entries.setdefault(positions[("iii", a, a)], []).extend(terms)
        for b in range(1, n):
            terms = []
            if i == last:
                terms.append((1, j, i))
            if b == j:
                terms.append((-1, j, i))
            if terms:
                entries.setdefault(positions[("iv", b, b)], []).extend(terms)
        return entries

    groups = {
        "i": [(i, j) for i in range(n - 1) for j in range(1, n)],
        "ii": [(last, j) for j in range(1, n)],
        "iii": [(i, 0) for i in range(n - 1)],
        "iv": [(last, 0)],
    }
    syzygies = [
        Syzygy.build(element(i, j), ambient, system.M, SyzygyTag("syz2", family, (i, j)))
        for family in FAMILIES
        for i, j in groups[family]
    ]
    first = syz_corank_one(system)
    return SyzygyBasis(syzygies, ambient, first)


def koszul_syzygies(gens: Sequence[Polynomial]) -> List[ModuleElement]:
    """The trivial syzygies f_i e_j - f_j e_i for i < j."""
    ell = len(gens)
    field_, k = gens[0].field, gens[0].k
    out = []
    for i in range(ell):
        for j in range(i + 1, ell):
            out.append(ModuleElement.from_terms(ell, {i: -gens[j], j: gens[i]}, field_, k))
    return out


def conjectured_syz_count(n: int, r: int) -> int:
    """
    C(n, r+2)^2 * (2(r+2)(r+1)/(n-r-1) + 2r + 2), evaluated exactly.

    A non-integral value is logged as a warning and rounded down.
    """
    if not 1 <= r <= n - 2:
        raise ValueError(f"Need 1 <= r <= n - 2, got n={n}, r={r}")
    value = comb(n, r + 2) ** 2 * (Fraction(2 * (r + 2) * (r + 1), n - r - 1) + 2 * r + 2)
    if value.denominator != 1:
        logger.warning(f"Conjectured syzygy count for n={n}, r={r} is not an integer: {value}")
    return value.numerator // value.denominator


def annihilates(syz: Syzygy, gens: Sequence[Union[Polynomial, ModuleElement]]) -> bool:
    """Check sum_j coords[j] * gens[j] = 0 by polynomial expansion."""
    elem = syz.elem
    if gens and isinstance(gens[0], ModuleElement):
        return elem.combine(list(gens)).is_zero()
    return elem.dot(list(gens)).is_zero()


def degree_one_kernel(system: DetSystem) -> np.ndarray:
    """
    All degree-1 syzygies of the minors by plain linear algebra.

    Returns:
        np.ndarray: kernel basis as rows, in the ``coefficient_matrix`` column layout
    """
    gens, k, p = system.gens, system.k, system.field.p
    d = gens[0].degree + 1
    products = np.zeros((len(gens) * k, count_monomials(k, d)), dtype=np.int64)
    for pos, g in enumerate(gens):
        dense = g.to_dense(d - 1)
        for t in range(k):
            products[pos * k + t, shift_map(k, d, t)] = dense
    return nullspace_mod(products.T, p)


def kernel_ranks(basis: SyzygyBasis, system: DetSystem) -> Tuple[int, int, int]:
    """(rank of ``basis``, dimension of the degree-1 kernel, rank of both together)."""
    p = system.field.p
    coeffs = basis.coefficient_matrix()
    kernel = degree_one_kernel(system)
    joint = np.vstack([coeffs % p, kernel.astype(np.int64)]) if coeffs.size else kernel
    return rank_mod(coeffs, p), kernel.shape[0], rank_mod(joint, p)
