"""
Brute-force reference implementations used to check the signature code:
criteria-free Buchberger on sparse polynomials, and module membership by a
degree-bounded rank test. Nothing here touches the Macaulay machinery.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .f5core import GroebnerBasis
from ..algebra.linalg import EchelonBasis
from ..algebra.mono_poly import ModuleElement, Monomial, Polynomial, monomials_of_degree
from ..utils.config import get_settings
from ..utils.errors import DegreeCapError, OracleTooLargeError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass
class OraclePair:
    f: Polynomial
    g: Polynomial

    @property
    def spoly(self) -> Polynomial:
        return s_polynomial(self.f, self.g)


def _loose(f: Polynomial) -> Polynomial:
    return Polynomial(f.terms, f.field, f.k, homogeneous=False)


def s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    lf, lg = f.leading_monomial(), g.leading_monomial()
    lcm = lf.lcm(lg)
    a = _loose(f).mono_mul(lcm / lf).scale(f.field.inv(f.leading_coefficient()))
    b = _loose(g).mono_mul(lcm / lg).scale(g.field.inv(g.leading_coefficient()))
    return a - b


def normal_form(f: Polynomial, basis: Sequence[Polynomial]) -> Polynomial:
    """Full reduction of f by ``basis`` (every term, not only the leader)."""
    p = f.field.p
    rest = _loose(f)
    remainder = {}
    leaders = [(g.leading_monomial(), g.field.inv(g.leading_coefficient()), _loose(g)) for g in basis]
    while rest:
        mono = rest.leading_monomial()
        coeff = rest.terms[mono]
        for lm, inv_lc, g in leaders:
            if lm.divides(mono):
                rest = rest - g.mono_mul(mono / lm).scale(coeff * inv_lc % p)
                break
        else:
            remainder[mono] = coeff
            del rest.terms[mono]
    return Polynomial(remainder, f.field, f.k, homogeneous=False)


def _reduce_basis(G: List[Polynomial]) -> List[Polynomial]:
    minimal = []
    for idx, g in enumerate(G):
        lm = g.leading_monomial()
        dominated = False
        for jdx, h in enumerate(G):
            if jdx == idx:
                continue
            lh = h.leading_monomial()
            if lh.divides(lm) and (lh != lm or jdx < idx):
                dominated = True
                break
        if not dominated:
            minimal.append(g)
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        reduced.append(normal_form(g, others).monic())
    reduced.sort(key=lambda h: h.leading_monomial().key)
    return [Polynomial(h.terms, h.field, h.k, homogeneous=all(m.degree == h.degree for m in h.terms))
            for h in reduced]


def buchberger(F: Sequence[Polynomial], max_basis: Optional[int] = None,
               max_pairs: Optional[int] = None) -> GroebnerBasis:
    """
    Reduced grevlex Gröbner basis by plain pair processing, no criteria.

    Raises:
        OracleTooLargeError: when the basis or the number of processed pairs exceeds its cap
    """
    settings = get_settings()
    max_basis = settings.oracle_max_basis if max_basis is None else max_basis
    max_pairs = settings.oracle_max_pairs if max_pairs is None else max_pairs
    G = [_loose(f).monic() for f in F if f]
    pairs = [(i, j) for j in range(len(G)) for i in range(j)]
    processed = 0
    while pairs:
        i, j = pairs.pop()
        processed += 1
        if processed > max_pairs:
            logger.error(f"Buchberger oracle exceeded {max_pairs} pairs")
            raise OracleTooLargeError(f"More than {max_pairs} pairs processed")
        h = normal_form(OraclePair(G[i], G[j]).spoly, G)
        if h:
            G.append(h.monic())
            if len(G) > max_basis:
                logger.error(f"Buchberger oracle exceeded {max_basis} basis elements")
                raise OracleTooLargeError(f"More than {max_basis} basis elements")
            pairs.extend((q, len(G) - 1) for q in range(len(G) - 1))
    reduced = _reduce_basis(G)
    logger.info(f"Buchberger oracle: {processed} pairs, {len(reduced)} reduced basis elements")
    degree = max((g.degree for g in reduced), default=0)
    return GroebnerBasis([ModuleElement.from_polynomial(g) for g in reduced], degree, 1, reduced=True)


def _multiples_dense(gens: Sequence[ModuleElement], degree: int) -> np.ndarray:
    k = gens[0].k
    rows = []
    for g in gens:
        if g.is_zero() or g.degree > degree:
            continue
        for u in monomials_of_degree(k, degree - g.degree):
            rows.append(g.mono_mul(u).to_dense(degree))
    return np.vstack(rows) if rows else np.zeros((0, 0), dtype=np.int64)


def module_membership(s: ModuleElement, gens: Sequence[ModuleElement], max_degree: Optional[int] = None) -> bool:
    """
    Decide whether ``s`` lies in the module generated by ``gens`` by testing
    whether it is in the span of the degree-deg(s) multiples of the generators.

    Raises:
        DegreeCapError: if deg(s) exceeds ``max_degree``
    """
    if s.is_zero():
        return True
    max_degree = get_settings().membership_max_degree if max_degree is None else max_degree
    degree = s.degree
    if degree > max_degree:
        raise DegreeCapError(f"Membership test in degree {degree} exceeds the cap {max_degree}")
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return False
    multiples = _multiples_dense(gens, degree)
    if multiples.shape[0] == 0:
        return False
    span = EchelonBasis(multiples.shape[1], s.field.p)
    span.insert(multiples)
    return span.contains(s.to_dense(degree))


def leading_monomials(G: GroebnerBasis) -> List[Monomial]:
    return sorted((g.leading_monomial() for g in G.polynomials()), key=lambda m: m.key)
