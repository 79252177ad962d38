import numpy as np
import pytest

from src.algebra.linalg import EchelonBasis
from src.algebra.mono_poly import ModuleMonomial, Monomial, Polynomial, monomials_of_degree
from src.groebner.macaulay import (BlockRecord, CriteriaSet, MacaulayMatrix, RunStats, Signature, SignatureEchelon,
                                   SignedRow, column_layout, extend_rows, pivot_leading_terms, signature_echelon)
from src.utils.errors import ContractViolationError

ONE = Monomial.one(2)


def row(field, index, mono, poly):
    return SignedRow(Signature(index, mono), poly.to_dense(poly.degree))


@pytest.fixture
def linear_forms(field):
    x1, x2 = (Polynomial.variable(field, 2, j) for j in range(2))
    return x1 + x2, (x1 + x2).scale(2), x1 - x2


def test_signature_order():
    assert Signature(0, Monomial((1, 0))) < Signature(1, ONE)
    assert Signature(1, Monomial((0, 1))) < Signature(1, Monomial((1, 0)))
    assert Signature(0, ONE).times_variable(1) == Signature(0, Monomial((0, 1)))


def test_column_layout():
    layout = column_layout(2, 1, 2)
    assert layout.width == 4
    assert layout.module_monomial(0) == ModuleMonomial(1, Monomial((1, 0)))
    assert layout.module_monomial(3) == ModuleMonomial(0, Monomial((0, 1)))


def test_layout_lift_multiplies_by_variable(field, linear_forms):
    f = linear_forms[2]
    lifted = column_layout(2, 2, 1).lift(f.to_dense(1), 0)
    assert np.array_equal(lifted, f.mono_mul(Monomial((1, 0))).to_dense(2))


def test_matrix_rows_must_ascend(field, linear_forms):
    mat = MacaulayMatrix(1, 1, 1, 2)
    mat.add_row(row(field, 1, ONE, linear_forms[0]))
    with pytest.raises(ContractViolationError):
        mat.add_row(row(field, 0, ONE, linear_forms[1]))


def test_dependent_row_reduces_to_zero(field, linear_forms):
    mat = MacaulayMatrix(1, 2, 1, 2, [row(field, i, ONE, f) for i, f in enumerate(linear_forms)])
    trace = []
    reduced, zero = signature_echelon(mat, field, trace=trace)
    assert zero == [Signature(1, ONE)]
    assert len(reduced) == 2
    assert all(r.coeffs[r.leading_column()] == 1 for r in reduced.rows)
    assert dict(trace)[Signature(1, ONE)] == (Signature(0, ONE),)
    assert all(source < target for target, sources in trace for source in sources)
    assert pivot_leading_terms(reduced) == {ModuleMonomial(0, Monomial((1, 0))), ModuleMonomial(0, Monomial((0, 1)))}



def span_of(rows, p):
    basis = EchelonBasis(len(rows[0].coeffs), p)
    basis.insert(np.vstack([r.coeffs for r in rows]))
    return basis


def test_kept_rows_are_new_in_their_signature(corank_one_n3):
    field, gens = corank_one_n3.field, corank_one_n3.gens
    original = sorted((SignedRow(Signature(i, m), g.mono_mul(m).to_dense(3))
                       for i, g in enumerate(gens) for m in monomials_of_degree(4, 1)), key=lambda r: r.sig.key)
    reduced, zero = signature_echelon(MacaulayMatrix(3, len(gens) - 1, 1, 4, original), field)
    assert len(reduced) + len(zero) == len(original) == 36
    for kept in reduced.rows:
        up_to = [r for r in original if not kept.sig < r.sig]
        below = [r for r in up_to if r.sig < kept.sig]
        assert span_of(up_to, field.p).contains(kept.coeffs)
        assert below == [] or not span_of(below, field.p).contains(kept.coeffs)


def test_echelon_rejects_smaller_signatures(field, linear_forms):
    echelon = SignatureEchelon(column_layout(2, 1, 1), field)
    echelon.insert([row(field, 1, ONE, linear_forms[0])])
    with pytest.raises(ContractViolationError):
        echelon.insert([row(field, 0, ONE, linear_forms[2])])


def test_forced_rows_never_enter_the_basis(field, linear_forms):
    echelon = SignatureEchelon(column_layout(2, 1, 1), field)
    outcome = echelon.insert([row(field, 0, ONE, linear_forms[0])],
                             forced=[row(field, 1, ONE, linear_forms[1]), row(field, 2, ONE, linear_forms[2])])
    assert outcome.blocked_survivors == [Signature(2, ONE)]
    assert echelon.rank == 1


def test_echelon_charges_field_ops(field, linear_forms):
    echelon = SignatureEchelon(column_layout(2, 1, 1), field)
    before = field.ops
    echelon.insert([row(field, i, ONE, f) for i, f in enumerate(linear_forms)])
    assert field.ops > before
    assert echelon.leading_monomials_below(1) == [Monomial((1, 0))]


def test_extend_rows_respects_criteria(field, linear_forms):
    prev = MacaulayMatrix(1, 0, 1, 2, [row(field, 0, ONE, linear_forms[2])])
    children, blocked = extend_rows(prev, CriteriaSet(), 2)
    assert [c.sig.mono for c in children] == [Monomial((0, 1)), Monomial((1, 0))]
    forced = []
    children, blocked = extend_rows(prev, CriteriaSet([Signature(0, Monomial((1, 0)))]), 2, collect_blocked=forced)
    assert blocked == 1
    assert [c.sig for c in children] == [Signature(0, Monomial((0, 1)))]
    assert [p.sig for p in forced] == [Signature(0, Monomial((1, 0)))]


def test_run_stats_summaries():
    stats = RunStats(label="x")
    stats.records = [BlockRecord(2, 0, 3, 0, 0, 3), BlockRecord(2, 1, 4, 1, 2, 6), BlockRecord(3, 1, 5, 2, 0, 9)]
    assert stats.reductions_to_zero == 3
    assert stats.zero_by_degree() == {2: 1, 3: 2}
    assert stats.rank_at(2) == 6
    assert stats.rows_at(2) == 7
    assert list(stats.to_frame().columns)[:4] == ["degree", "index", "rows_built", "zero_reductions"]
    assert stats.to_dict()["reductions_to_zero"] == 3
