"""
Arithmetic in the prime field GF(p) and seeded sampling of field elements.

Polynomials and Macaulay rows store plain integers in [0, p); ``FieldElement``
is the value type exposed at the API boundary.
"""
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from sympy import isprime

from ..utils.config import DEFAULT_PRIME
from ..utils.errors import DimensionError, DivisionByZeroError

MAX_PRIME = 2 ** 31

FIELD_OPS = ("add", "sub", "mul", "inv", "neg")


class PrimeField:
    """
    The field GF(p) for a prime p < 2^31.

    ``ops`` counts field operations charged by polynomial arithmetic and by the
    elimination kernels; callers read differences of it around a computation.
    """

    def __init__(self, p: int = DEFAULT_PRIME):
        p = int(p)
        if p >= MAX_PRIME:
            raise ValueError(f"Modulus must be below 2^31, got {p}")
        if not isprime(p):
            raise ValueError(f"Modulus must be prime, got {p}")
        self.p = p
        self.ops = 0

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.p, self)

    def charge(self, count: int) -> None:
        self.ops += int(count)

    def inv(self, value: int) -> int:
        value %= self.p
        if value == 0:
            raise DivisionByZeroError(f"0 has no inverse in GF({self.p})")
        self.ops += 1
        return pow(value, -1, self.p)

    def normalize(self, value: int) -> int:
        return int(value) % self.p

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.p:
            raise ValueError(f"{self.value} is not a canonical representative mod {self.field.p}")

    def _coerce(self, other: Union["FieldElement", int]) -> int:
        if isinstance(other, FieldElement):
            if other.field.p != self.field.p:
                raise DimensionError(f"Mixing GF({self.field.p}) and GF({other.field.p})")
            return other.value
        return int(other) % self.field.p

    def __add__(self, other):
        return field_arith(self, other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        return field_arith(self, other, "sub")

    def __rsub__(self, other):
        return field_arith(self.field(self._coerce(other)), self, "sub")

    def __mul__(self, other):
        return field_arith(self, other, "mul")

    __rmul__ = __mul__

    def __neg__(self):
        return field_arith(self, None, "neg")

    def __truediv__(self, other):
        return self * field_arith(self.field(self._coerce(other)), None, "inv")

    def inverse(self) -> "FieldElement":
        return field_arith(self, None, "inv")

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"


def field_arith(a: FieldElement, b, op: str) -> FieldElement:
    """
    Apply one field operation and return the canonical representative.

    Args:
        a: left operand
        b: right operand (FieldElement or int); ignored for ``inv`` and ``neg``
        op: one of add, sub, mul, inv, neg

    Returns:
        FieldElement: the result in [0, p)
    """
    field = a.field
    p = field.p
    if op == "add":
        result = a.value + a._coerce(b)
    elif op == "sub":
        result = a.value - a._coerce(b)
    elif op == "mul":
        result = a.value * a._coerce(b)
    elif op == "neg":
        result = -a.value
    elif op == "inv":
        return FieldElement(field.inv(a.value), field)
    else:
        raise ValueError(f"Unknown field operation {op!r}, expected one of {FIELD_OPS}")
    field.ops += 1
    return FieldElement(result % p, field)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) % 2 ** 64))


def rand_elem(field: PrimeField, rng: np.random.Generator) -> FieldElement:
    """Uniform element of GF(p); advances ``rng``."""
    return FieldElement(int(rng.integers(0, field.p)), field)


def rand_array(field: PrimeField, rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    """Uniform int64 array over [0, p) drawn from ``rng``."""
    return rng.integers(0, field.p, size=shape, dtype=np.int64)
