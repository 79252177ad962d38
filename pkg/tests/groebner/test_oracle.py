import pytest
import sympy

from src.algebra.mono_poly import ModuleElement, Monomial, Polynomial
from src.determinantal.syzgen import koszul_syzygies, syz_corank_one
from src.groebner.f5core import det_f5_corank_one, interreduce
from src.groebner.oracle import buchberger, leading_monomials, module_membership, normal_form, s_polynomial
from src.utils.errors import DegreeCapError, OracleTooLargeError

X = sympy.symbols("x1 x2 x3")


def from_sympy(expr, field):
    poly = sympy.Poly(expr, *X, modulus=field.p)
    return Polynomial({Monomial(m): int(c) % field.p for m, c in poly.terms()}, field, 3, homogeneous=False)


def test_matches_sympy_groebner(small_field):
    x1, x2, x3 = X
    exprs = [x1 ** 2 + 3 * x2 * x3 - 1, x1 * x2 - x3 ** 2 + 2, x2 ** 2 + x1 * x3]
    ours = buchberger([from_sympy(e, small_field) for e in exprs])
    theirs = sympy.groebner(exprs, *X, modulus=small_field.p, order="grevlex")
    assert set(ours.polynomials()) == {from_sympy(g, small_field) for g in theirs.exprs}
    assert ours.reduced


def test_s_polynomial_cancels_leaders(small_field):
    x1, x2, _ = X
    f, g = from_sympy(x1 ** 2 + x2, small_field), from_sympy(x1 * x2 + 1, small_field)
    s = s_polynomial(f, g)
    assert Monomial((2, 1, 0)) not in s.terms


def test_normal_form_of_ideal_member_is_zero(corank_one_n3):
    G = buchberger(corank_one_n3.gens)
    member = corank_one_n3.gens[0] * Polynomial.variable(corank_one_n3.field, 4, 2)
    assert normal_form(member, G.polynomials()).is_zero()


def test_oracle_agrees_with_determinantal_run(corank_one_n3):
    oracle = buchberger(corank_one_n3.gens)
    G, _ = det_f5_corank_one(corank_one_n3.M, system=corank_one_n3)
    assert set(interreduce(G).polynomials()) == set(oracle.polynomials())
    assert oracle.max_degree == 3
    assert leading_monomials(oracle) == sorted(leading_monomials(oracle), key=lambda m: m.key)


@pytest.mark.slow
def test_oracle_agrees_with_determinantal_run_n4(corank_one_n4):
    oracle = buchberger(corank_one_n4.gens)
    G, _ = det_f5_corank_one(corank_one_n4.M, system=corank_one_n4)
    assert set(interreduce(G).polynomials()) == set(oracle.polynomials())


def test_oracle_caps(corank_one_n3):
    with pytest.raises(OracleTooLargeError):
        buchberger(corank_one_n3.gens, max_pairs=1)
    with pytest.raises(OracleTooLargeError):
        buchberger(corank_one_n3.gens, max_basis=9)


def test_koszul_syzygies_lie_in_corank_one_module(corank_one_n3):
    first = syz_corank_one(corank_one_n3).elements()
    koszul = koszul_syzygies(corank_one_n3.gens[:2])[0]
    lifted = ModuleElement.from_terms(9, {0: koszul.coords[0], 1: koszul.coords[1]}, corank_one_n3.field, 4)
    assert module_membership(lifted, first)


def test_non_syzygy_is_not_a_member(corank_one_n3):
    first = syz_corank_one(corank_one_n3).elements()
    stray = ModuleElement.from_terms(9, {0: Polynomial.variable(corank_one_n3.field, 4, 0)}, corank_one_n3.field, 4)
    assert not module_membership(stray, first)
    assert module_membership(stray.scale(0), first)


def test_membership_degree_cap(corank_one_n3):
    first = syz_corank_one(corank_one_n3).elements()
    with pytest.raises(DegreeCapError):
        module_membership(first[0].mono_mul(Monomial((1, 0, 0, 0))), first, max_degree=1)
