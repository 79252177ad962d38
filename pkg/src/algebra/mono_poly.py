"""
Monomials under grevlex, sparse polynomials over GF(p) and elements of free
modules R^t ordered position-over-term.

Conventions:
    - variables x1 > x2 > ... > xk; exponent vectors are 0-based tuples
    - module positions are 0-based and a larger position is POT-greater, so the
      leading term of a module element sits at its largest occupied position
"""
import itertools
from functools import lru_cache, total_ordering
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .gf import FieldElement, PrimeField
from ..utils.errors import DimensionError, EmptySupportError, HomogeneityError

LESS, EQUAL, GREATER = -1, 0, 1


@total_ordering
class Monomial:
    """An exponent vector; comparison operators follow grevlex."""

    __slots__ = ("exponents", "degree", "key", "_hash")

    def __init__(self, exponents: Iterable[int]):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"Negative exponent in {exps}")
        self.exponents = exps
        self.degree = sum(exps)
        # larger key means grevlex-larger
        self.key = (self.degree, tuple(-e for e in reversed(exps)))
        self._hash = hash(exps)

    @classmethod
    def one(cls, k: int) -> "Monomial":
        return cls((0,) * k)

    @classmethod
    def variable(cls, k: int, j: int) -> "Monomial":
        exps = [0] * k
        exps[j] = 1
        return cls(exps)

    @property
    def k(self) -> int:
        return len(self.exponents)

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.exponents == other.exponents

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Monomial") -> bool:
        _check_k(self, other)
        return self.key < other.key

    def __mul__(self, other: "Monomial") -> "Monomial":
        _check_k(self, other)
        return Monomial(a + b for a, b in zip(self.exponents, other.exponents))

    def divides(self, other: "Monomial") -> bool:
        return all(a <= b for a, b in zip(self.exponents, other.exponents))

    def __truediv__(self, other: "Monomial") -> "Monomial":
        if not other.divides(self):
            raise ArithmeticError(f"{other} does not divide {self}")
        return Monomial(a - b for a, b in zip(self.exponents, other.exponents))

    def lcm(self, other: "Monomial") -> "Monomial":
        _check_k(self, other)
        return Monomial(max(a, b) for a, b in zip(self.exponents, other.exponents))

    def max_variable(self) -> int:
        """Index of the smallest variable dividing the monomial, 0 for the constant."""
        for j in range(len(self.exponents) - 1, -1, -1):
            if self.exponents[j]:
                return j
        return 0

    def times_variable(self, j: int) -> "Monomial":
        exps = list(self.exponents)
        exps[j] += 1
        return Monomial(exps)

    def evaluate(self, point: Sequence[int], p: int) -> int:
        value = 1
        for x, e in zip(point, self.exponents):
            if e:
                value = value * pow(int(x), e, p) % p
        return value

    def __str__(self) -> str:
        parts = []
        for j, e in enumerate(self.exponents):
            if e == 1:
                parts.append(f"x{j + 1}")
            elif e > 1:
                parts.append(f"x{j + 1}^{e}")
        return "*".join(parts) if parts else "1"

    def __repr__(self) -> str:
        return f"Monomial({self})"


def _check_k(a: Monomial, b: Monomial) -> None:
    if len(a.exponents) != len(b.exponents):
        raise DimensionError(f"Monomials in {len(a.exponents)} and {len(b.exponents)} variables")


def grevlex_cmp(a: Monomial, b: Monomial) -> int:
    """Return -1, 0 or 1 as ``a`` is grevlex-less, equal or greater than ``b``."""
    _check_k(a, b)
    if a.key == b.key:
        return EQUAL
    return GREATER if a.key > b.key else LESS


@total_ordering
class ModuleMonomial:
    """The basis term ``mono * e_position`` of R^t."""

    __slots__ = ("position", "mono")

    def __init__(self, position: int, mono: Monomial):
        self.position = int(position)
        self.mono = mono

    @property
    def key(self):
        return (self.position, self.mono.key)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModuleMonomial) and self.position == other.position and self.mono == other.mono

    def __hash__(self) -> int:
        return hash((self.position, self.mono))

    def __lt__(self, other: "ModuleMonomial") -> bool:
        return pot_cmp(self, other) == LESS

    def divides(self, other: "ModuleMonomial") -> bool:
        return self.position == other.position and self.mono.divides(other.mono)

    def __str__(self) -> str:
        return f"{self.mono}*e{self.position}"

    def __repr__(self) -> str:
        return f"ModuleMonomial({self})"


def pot_cmp(a: ModuleMonomial, b: ModuleMonomial) -> int:
    """Position first (larger position is greater), then grevlex."""
    _check_k(a.mono, b.mono)
    if a.position != b.position:
        return GREATER if a.position > b.position else LESS
    return grevlex_cmp(a.mono, b.mono)


@lru_cache(maxsize=None)
def monomials_of_degree(k: int, d: int) -> Tuple[Monomial, ...]:
    """All degree-d monomials in k variables, strictly decreasing in grevlex."""
    if k < 1 or d < 0:
        raise ValueError(f"Need k >= 1 and d >= 0, got k={k}, d={d}")
    monos = []
    for combo in itertools.combinations_with_replacement(range(k), d):
        exps = [0] * k
        for j in combo:
            exps[j] += 1
        monos.append(Monomial(exps))
    monos.sort(key=lambda m: m.key, reverse=True)
    return tuple(monos)


@lru_cache(maxsize=None)
def monomial_positions(k: int, d: int) -> Dict[Monomial, int]:
    return {m: idx for idx, m in enumerate(monomials_of_degree(k, d))}


@lru_cache(maxsize=None)
def shift_map(k: int, d: int, j: int) -> np.ndarray:
    """Index in degree d of ``x_j * m`` for each degree-(d-1) monomial m."""
    positions = monomial_positions(k, d)
    return np.array([positions[m.times_variable(j)] for m in monomials_of_degree(k, d - 1)], dtype=np.int64)


def count_monomials(k: int, d: int) -> int:
    return comb(d + k - 1, k - 1) if d >= 0 else 0


Scalar = Union[int, FieldElement]


class Polynomial:
    """
    Sparse polynomial over GF(p): a map from Monomial to a nonzero int in [0, p).

    With ``homogeneous=True`` (the default) every term must share one degree and
    additions of different degrees raise HomogeneityError.
    """

    __slots__ = ("terms", "field", "k", "homogeneous")

    def __init__(self, terms: Mapping[Monomial, Scalar], field: PrimeField, k: int, homogeneous: bool = True):
        p = field.p
        clean = {}
        for mono, coeff in terms.items():
            if mono.k != k:
                raise DimensionError(f"Monomial {mono} is not in {k} variables")
            c = int(coeff) % p
            if c:
                clean[mono] = c
        if homogeneous and len({m.degree for m in clean}) > 1:
            raise HomogeneityError("Terms of different degrees in a homogeneous polynomial")
        self.terms = clean
        self.field = field
        self.k = k
        self.homogeneous = homogeneous

    @classmethod
    def zero(cls, field: PrimeField, k: int, homogeneous: bool = True) -> "Polynomial":
        return cls({}, field, k, homogeneous)

    @classmethod
    def variable(cls, field: PrimeField, k: int, j: int) -> "Polynomial":
        return cls({Monomial.variable(k, j): 1}, field, k)

    @classmethod
    def constant(cls, field: PrimeField, k: int, value: Scalar) -> "Polynomial":
        return cls({Monomial.one(k): value}, field, k)

    @classmethod
    def linear_form(cls, field: PrimeField, coeffs: Sequence[int]) -> "Polynomial":
        k = len(coeffs)
        return cls({Monomial.variable(k, j): c for j, c in enumerate(coeffs)}, field, k)

    @classmethod
    def from_dense(cls, vec: np.ndarray, field: PrimeField, k: int, d: int) -> "Polynomial":
        """Inverse of ``to_dense``: coefficients over ``monomials_of_degree(k, d)``."""
        monos = monomials_of_degree(k, d)
        return cls({monos[idx]: int(vec[idx]) for idx in np.flatnonzero(vec)}, field, k)

    def to_dense(self, d: Optional[int] = None) -> np.ndarray:
        d = self.degree if d is None else d
        positions = monomial_positions(self.k, d)
        vec = np.zeros(len(positions), dtype=np.int64)
        for mono, c in self.terms.items():
            if mono.degree != d:
                raise HomogeneityError(f"Term {mono} does not have degree {d}")
            vec[positions[mono]] = c
        return vec

    def _check(self, other: "Polynomial") -> None:
        if other.k != self.k or other.field.p != self.field.p:
            raise DimensionError("Polynomials over different rings")

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(m.degree for m in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.field.p == other.field.p and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def add(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        homogeneous = self.homogeneous and other.homogeneous
        if homogeneous and self.terms and other.terms and self.degree != other.degree:
            raise HomogeneityError(f"Adding degree {self.degree} and degree {other.degree}")
        p = self.field.p
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = (out.get(mono, 0) + c) % p
        self.field.charge(len(other.terms))
        return Polynomial(out, self.field, self.k, homogeneous)

    def scale(self, c: Scalar) -> "Polynomial":
        p = self.field.p
        c = int(c) % p
        self.field.charge(len(self.terms))
        return Polynomial({m: v * c % p for m, v in self.terms.items()}, self.field, self.k, self.homogeneous)

    def mono_mul(self, mono: Monomial) -> "Polynomial":
        return Polynomial({m * mono: v for m, v in self.terms.items()}, self.field, self.k, self.homogeneous)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return self.add(other)

    def __neg__(self) -> "Polynomial":
        return self.scale(-1)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self.add(-other)

    def __mul__(self, other: Union["Polynomial", Monomial, Scalar]) -> "Polynomial":
        if isinstance(other, Monomial):
            return self.mono_mul(other)
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        p = self.field.p
        out: Dict[Monomial, int] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = ma * mb
                out[m] = (out.get(m, 0) + ca * cb) % p
        self.field.charge(2 * len(self.terms) * len(other.terms))
        return Polynomial(out, self.field, self.k, self.homogeneous and other.homogeneous)

    __rmul__ = __mul__

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise EmptySupportError("Zero polynomial has no leading monomial")
        return max(self.terms, key=lambda m: m.key)

    def leading_coefficient(self) -> int:
        return self.terms[self.leading_monomial()]

    def monic(self) -> "Polynomial":
        return self.scale(self.field.inv(self.leading_coefficient()))

    def sorted_terms(self) -> List[Tuple[Monomial, int]]:
        return sorted(self.terms.items(), key=lambda item: item[0].key, reverse=True)

    def evaluate(self, point: Sequence[int]) -> int:
        p = self.field.p
        return sum(c * m.evaluate(point, p) for m, c in self.terms.items()) % p

    def exact_divide(self, divisor: "Polynomial") -> "Polynomial":
        """Quotient of an exact division; raises ArithmeticError on a remainder."""
        self._check(divisor)
        lm = divisor.leading_monomial()
        inv_lc = self.field.inv(divisor.leading_coefficient())
        quotient: Dict[Monomial, int] = {}
        rest = Polynomial(self.terms, self.field, self.k, homogeneous=False)
        loose = Polynomial(divisor.terms, self.field, self.k, homogeneous=False)
        while rest:
            mono = rest.leading_monomial()
            if not lm.divides(mono):
                raise ArithmeticError("Division leaves a remainder")
            q_mono = mono / lm
            q_coeff = rest.terms[mono] * inv_lc % self.field.p
            quotient[q_mono] = q_coeff
            rest = rest - loose.mono_mul(q_mono).scale(q_coeff)
        return Polynomial(quotient, self.field, self.k, self.homogeneous)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            if mono.degree == 0:
                parts.append(str(c))
            elif c == 1:
                parts.append(str(mono))
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def poly_ops(a: Polynomial, b: Union[Polynomial, Monomial, Scalar], op: str) -> Polynomial:
    """Dispatch for ``add``, ``scale`` and ``mono_mul``."""
    if op == "add":
        return a.add(b)
    if op == "scale":
        return a.scale(b)
    if op == "mono_mul":
        return a.mono_mul(b)
    raise ValueError(f"Unknown polynomial operation {op!r}")


class ModuleElement:
    """A homogeneous element of R^t: t coordinate polynomials of one common degree."""

    __slots__ = ("coords", "field", "k")

    def __init__(self, coords: Sequence[Polynomial], field: Optional[PrimeField] = None, k: Optional[int] = None):
        coords = list(coords)
        if not coords:
            raise DimensionError("A module element needs at least one coordinate")
        self.field = field or coords[0].field
        self.k = k if k is not None else coords[0].k
        for c in coords:
            if c.k != self.k or c.field.p != self.field.p:
                raise DimensionError("Coordinates over different rings")
        degrees = {c.degree for c in coords if c}
        if len(degrees) > 1:
            raise HomogeneityError(f"Coordinates of degrees {sorted(degrees)} in one module element")
        self.coords = coords

    @classmethod
    def from_polynomial(cls, f: Polynomial) -> "ModuleElement":
        return cls([f])

    @classmethod
    def from_terms(cls, t: int, entries: Mapping[int, Polynomial], field: PrimeField, k: int) -> "ModuleElement":
        coords = [entries.get(pos, Polynomial.zero(field, k)) for pos in range(t)]
        return cls(coords, field, k)

    @property
    def t(self) -> int:
        return len(self.coords)

    @property
    def degree(self) -> int:
        return max((c.degree for c in self.coords), default=-1)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModuleElement) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(tuple(self.coords))

    def add(self, other: "ModuleElement") -> "ModuleElement":
        if other.t != self.t:
            raise DimensionError(f"Ranks {self.t} and {other.t} differ")
        return ModuleElement([a + b for a, b in zip(self.coords, other.coords)], self.field, self.k)

    def scale(self, c: Scalar) -> "ModuleElement":
        return ModuleElement([x.scale(c) for x in self.coords], self.field, self.k)

    def mono_mul(self, mono: Monomial) -> "ModuleElement":
        return ModuleElement([x.mono_mul(mono) for x in self.coords], self.field, self.k)

    def mul(self, f: Polynomial) -> "ModuleElement":
        return ModuleElement([x * f for x in self.coords], self.field, self.k)

    def dot(self, gens: Sequence[Polynomial]) -> Polynomial:
        """The combination sum_j coords[j] * gens[j]."""
        if len(gens) != self.t:
            raise DimensionError(f"{len(gens)} generators for a rank-{self.t} element")
        total: Optional[Polynomial] = None
        for coord, g in zip(self.coords, gens):
            if coord:
                term = coord * g
                total = term if total is None else total + term
        return total if total is not None else Polynomial.zero(self.field, self.k)

    def combine(self, vectors: Sequence["ModuleElement"]) -> "ModuleElement":
        """The combination sum_j coords[j] * vectors[j] in the rank of ``vectors``."""
        if len(vectors) != self.t:
            raise DimensionError(f"{len(vectors)} vectors for a rank-{self.t} element")
        out: Optional[ModuleElement] = None
        for coord, vec in zip(self.coords, vectors):
            if coord:
                term = vec.mul(coord)
                out = term if out is None else out.add(term)
        if out is None:
            return ModuleElement([Polynomial.zero(self.field, self.k)] * vectors[0].t, self.field, self.k)
        return out

    def to_dense(self, d: int) -> np.ndarray:
        """Column layout of Macaulay matrices: position blocks from t-1 down to 0."""
        positions = monomial_positions(self.k, d)
        width = len(positions)
        vec = np.zeros(self.t * width, dtype=np.int64)
        for pos, coord in enumerate(self.coords):
            offset = (self.t - 1 - pos) * width
            for mono, c in coord.terms.items():
                vec[offset + positions[mono]] = c
        return vec

    @classmethod
    def from_dense(cls, vec: np.ndarray, t: int, field: PrimeField, k: int, d: int) -> "ModuleElement":
        width = count_monomials(k, d)
        blocks = np.asarray(vec).reshape(t, width)
        return cls([Polynomial.from_dense(blocks[t - 1 - pos], field, k, d) for pos in range(t)], field, k)

    def leading_term_pot(self) -> Tuple[ModuleMonomial, FieldElement]:
        return leading_term_pot(self)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"

    def __repr__(self) -> str:
        return f"ModuleElement{self}"


def leading_term_pot(f: ModuleElement) -> Tuple[ModuleMonomial, FieldElement]:
    """POT-greatest term: largest occupied position, grevlex leader there."""
    for pos in range(f.t - 1, -1, -1):
        coord = f.coords[pos]
        if coord:
            mono = coord.leading_monomial()
            return ModuleMonomial(pos, mono), FieldElement(coord.terms[mono], f.field)
    raise EmptySupportError("Zero module element has no leading term")


def homogenize(f: Polynomial) -> Polynomial:
    """Append a grevlex-smallest variable h and homogenize to the top degree."""
    d = f.degree
    k = f.k + 1
    return Polynomial({Monomial(m.exponents + (d - m.degree,)): c for m, c in f.terms.items()}, f.field, k)


def dehomogenize(f: Polynomial) -> Polynomial:
    """Specialize the last variable to 1."""
    k = f.k - 1
    p = f.field.p
    out: Dict[Monomial, int] = {}
    for m, c in f.terms.items():
        mono = Monomial(m.exponents[:k])
        out[mono] = (out.get(mono, 0) + c) % p
    return Polynomial(out, f.field, k, homogeneous=False)
