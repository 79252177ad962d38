"""
Hilbert function of the generic corank-one determinantal ideal in four
variables, predicted Macaulay ranks and generic Gröbner degree bounds.

The ideal of (n-1)-minors of a generic n x n matrix of linear forms is resolved
by a length-3 complex with ranks 1, n^2, 2n^2 - 2, n^2, 1 and all maps linear
except the first and last. Two closed forms are carried:

    three_term: n^2 C(d-r+2,3) - (2n^2-2) C(d-r+1,3) + n^2 C(d-r,3)
    four_term:  the same minus C(d-r-1,3)

Only the first agrees with measured ranks once d - r - 1 >= 3;
``certify_variant`` decides by measurement.
"""
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..algebra.linalg import rank_mod
from ..algebra.mono_poly import Polynomial, count_monomials, monomials_of_degree
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

THREE_TERM = "three_term"
FOUR_TERM = "four_term"
VARIANTS = (THREE_TERM, FOUR_TERM)


def binom3(a: int) -> int:
    """C(a, 3) with C(a, 3) = 0 for a < 3."""
    return comb(a, 3) if a >= 3 else 0


@dataclass
class HilbertData:
    n: int
    r: int
    coefficients: Dict[int, int] = field(default_factory=dict)


@dataclass
class RankPrediction:
    degree: int
    predicted_rank: int
    column_count: int

    def __post_init__(self):
        if self.predicted_rank > self.column_count:
            raise ValueError(f"Predicted rank {self.predicted_rank} exceeds {self.column_count} columns")


def _formula(n: int, d: int, variant: str) -> int:
    r = n - 2
    value = n * n * binom3(d - r + 2) - (2 * n * n - 2) * binom3(d - r + 1) + n * n * binom3(d - r)
    if variant == FOUR_TERM:
        value -= binom3(d - r - 1)
    elif variant != THREE_TERM:
        raise ValueError(f"Unknown Hilbert variant {variant!r}, expected one of {VARIANTS}")
    return value


def hilbert_coeff(n: int, d: int, variant: str = THREE_TERM) -> int:
    """
    Dimension of the degree-d piece of the corank-one ideal (k = 4).

    Args:
        n: matrix size, at least 3
        d: degree
        variant: which closed form to evaluate

    Returns:
        int: 0 below the generator degree n - 1; beyond 2r + 1 the value is
        capped by the number of degree-d monomials
    """
    if n < 3:
        raise ValueError(f"Corank-one Hilbert data needs n >= 3, got {n}")
    r = n - 2
    if d < r + 1:
        return 0
    value = _formula(n, d, variant)
    if d > 2 * r + 1:
        value = min(value, count_monomials(4, d))
    return value


def hilbert_data(n: int, variant: str = THREE_TERM) -> HilbertData:
    r = n - 2
    return HilbertData(n, r, {d: hilbert_coeff(n, d, variant) for d in range(r + 1, 2 * r + 2)})


def predicted_ranks(n: int, variant: str = THREE_TERM) -> List[RankPrediction]:
    """Predicted Macaulay ranks for n - 1 <= d <= 2n - 3."""
    return [
        RankPrediction(d, hilbert_coeff(n, d, variant), count_monomials(4, d))
        for d in range(n - 1, 2 * n - 2)
    ]


def expected_gb_maxdeg(n: int, r: int) -> int:
    """Generic maximal Gröbner basis degree r(n - r) + 1 (2n - 3 in corank one)."""
    if not 1 <= r <= n - 2:
        raise ValueError(f"Need 1 <= r <= n - 2, got n={n}, r={r}")
    return r * (n - r) + 1


def macaulay_rows(polys: Sequence[Polynomial], d: int) -> np.ndarray:
    """All degree-d monomial multiples of ``polys`` as dense rows (no signatures, no criteria)."""
    if not polys:
        return np.zeros((0, 0), dtype=np.int64)
    k = polys[0].k
    rows = []
    for f in polys:
        if not f or f.degree > d:
            continue
        for u in monomials_of_degree(k, d - f.degree):
            rows.append(f.mono_mul(u).to_dense(d))
    if not rows:
        return np.zeros((0, count_monomials(k, d)), dtype=np.int64)
    return np.vstack(rows)


def rank_oracle(F: Sequence[Polynomial], d: int) -> int:
    """Rank of the plain degree-d Macaulay matrix of F by unconstrained elimination."""
    if not F:
        return 0
    rows = macaulay_rows(F, d)
    if rows.shape[0] == 0:
        return 0
    return rank_mod(rows, F[0].field.p)


def certify_variant(F: Sequence[Polynomial], n: int) -> Optional[str]:
    """
    Compare both closed forms against measured ranks for n - 1 <= d <= 2n - 3.

    Returns:
        Optional[str]: the first variant matching every degree, or None
    """
    measured = {d: rank_oracle(F, d) for d in range(n - 1, 2 * n - 2)}
    for variant in VARIANTS:
        mismatches = {d: (hilbert_coeff(n, d, variant), m) for d, m in measured.items()
                      if hilbert_coeff(n, d, variant) != m}
        if not mismatches:
            logger.info(f"Hilbert variant {variant} certified for n={n}")
            return variant
        logger.info(f"Hilbert variant {variant} rejected for n={n}: (predicted, measured) {mismatches}")
    return None
