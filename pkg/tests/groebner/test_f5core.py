import pytest

from src.algebra.gf import PrimeField, make_rng, rand_array
from src.algebra.linalg import rank_mod
from src.algebra.mono_poly import Polynomial, monomials_of_degree
from src.determinantal.detsys import generate_generic_system, minors, random_linear_matrix
from src.determinantal.hilbert import hilbert_coeff
from src.determinantal.syzgen import koszul_syzygies, syz_gen
from src.groebner.f5core import (F5Config, dehomogenize_basis, det_f5, det_f5_corank_one, interreduce, matrix_f5,
                                 standard_f5, syzygy_bases_corank_one)
from src.utils.errors import ContractViolationError, NonGenericInstanceError


def random_forms(field, k, degree, count, seed):
    monos = monomials_of_degree(k, degree)
    coeffs = rand_array(field, make_rng(seed), (count, len(monos)))
    return [Polynomial(dict(zip(monos, row)), field, k) for row in coeffs]


@pytest.fixture(scope="module")
def corank_one_runs():
    system = generate_generic_system(4, 4, 2, PrimeField(65521), seed=4)
    std = standard_f5(system.gens, 5)
    det = det_f5_corank_one(system.M, system=system)
    return system, std, det


def test_regular_sequence_with_koszul_syzygies(field):
    quadrics = random_forms(field, 4, 2, 3, seed=8)
    G, stats = matrix_f5(quadrics, 6, koszul_syzygies(quadrics))
    assert stats.reductions_to_zero == 0
    assert G.max_degree <= 6


def test_f5_criterion_alone_handles_regular_sequences(field):
    quadrics = random_forms(field, 4, 2, 3, seed=9)
    _, stats = standard_f5(quadrics, 6)
    assert stats.reductions_to_zero == 0


def test_without_criteria_koszul_pairs_reduce_to_zero(field):
    quadrics = random_forms(field, 4, 2, 2, seed=10)
    _, stats = matrix_f5(quadrics, 4, None, F5Config(use_f5_criterion=False))
    # f0 * f1 = f1 * f0 is the only relation up to degree 4
    assert stats.reductions_to_zero == 1
    assert stats.zero_by_degree()[4] == 1


def test_generators_must_be_sorted(field):
    forms = random_forms(field, 3, 2, 1, seed=1) + random_forms(field, 3, 1, 1, seed=2)
    with pytest.raises(ContractViolationError):
        standard_f5(forms, 3)


def test_degree_bound_required(field):
    with pytest.raises(ValueError):
        matrix_f5(random_forms(field, 3, 1, 2, seed=1))


def test_standard_count_n4(corank_one_runs):
    _, (_, std_stats), _ = corank_one_runs
    assert std_stats.reductions_to_zero == 56


def test_det_corank_one_has_no_reductions_n4(corank_one_runs):
    system, _, (G, stats) = corank_one_runs
    assert stats.reductions_to_zero == 0
    assert G.max_degree == 5
    assert set(stats.stages) == {"syz1", "syz2"}
    for d in range(3, 6):
        assert stats.rank_at(d) == hilbert_coeff(4, d)


def test_det_and_standard_agree(corank_one_runs):
    _, (G_std, std_stats), (G_det, det_stats) = corank_one_runs
    assert interreduce(G_std).polynomials() == interreduce(G_det).polynomials()
    assert det_stats.field_ops <= std_stats.field_ops
    assert det_stats.rows_built < std_stats.rows_built


def test_total_field_ops_include_the_syzygy_stages(corank_one_runs):
    _, _, (_, stats) = corank_one_runs
    assert all(stage.field_ops > 0 for stage in stats.stages.values())
    assert stats.total_field_ops() == stats.field_ops + stats.stages["syz1"].field_ops + stats.stages["syz2"].field_ops
    assert stats.to_dict()["total_field_ops"] == stats.total_field_ops()


def test_every_field_operation_is_charged_to_a_stage():
    system = generate_generic_system(4, 4, 2, PrimeField(65521), seed=6)
    before = system.M.field.ops
    _, stats = det_f5_corank_one(system.M, system=system)
    assert system.M.field.ops - before == stats.total_field_ops()


def test_strict_flag_leaves_caller_config_alone(corank_one_n3):
    cfg = F5Config(label="shared")
    det_f5_corank_one(corank_one_n3.M, cfg=cfg, system=corank_one_n3, strict=True)
    assert cfg.fail_on_zero_reduction is False


def test_duplicate_generator_reduces_to_zero_once(field):
    x1 = Polynomial.variable(field, 2, 0)
    G, stats = matrix_f5([x1, x1], 2)
    assert stats.reductions_to_zero == 1
    assert stats.zero_by_degree() == {1: 1, 2: 0}
    assert G.to_lines() == ["x1"]


def test_det_corank_one_n3(corank_one_n3):
    G, stats = det_f5_corank_one(corank_one_n3.M, system=corank_one_n3)
    assert stats.reductions_to_zero == 0
    assert G.max_degree == 3
    assert stats.rank_at(2) == 9
    assert stats.rank_at(3) == 20


def test_syzygy_bases_are_full(corank_one_n4):
    first, second, first_stats, second_stats = syzygy_bases_corank_one(corank_one_n4, 5)
    assert first_stats.reductions_to_zero == 0
    assert second_stats.reductions_to_zero == 0
    assert first.t == 16
    assert min(g.degree for g in first) == 1


def test_blocked_rows_reduce_to_zero(corank_one_n4):
    cfg = F5Config(force_build_blocked=True, label="forced")
    _, stats = det_f5_corank_one(corank_one_n4.M, cfg=cfg, system=corank_one_n4)
    assert stats.criterion_failures == 0
    assert sum(rec.blocked for rec in stats.records) > 0
    _, std_stats = standard_f5(corank_one_n4.gens, 5, F5Config(force_build_blocked=True))
    assert std_stats.criterion_failures == 0


def test_strict_run_raises_on_first_zero(corank_one_n4):
    cfg = F5Config(fail_on_zero_reduction=True, seed=4)
    with pytest.raises(NonGenericInstanceError) as exc:
        standard_f5(corank_one_n4.gens, 5, cfg)
    assert exc.value.signature is not None
    assert exc.value.seed == 4


def test_every_reducer_precedes_its_target(corank_one_n3):
    cfg = F5Config(trace=True, label="traced")
    _, stats = det_f5_corank_one(corank_one_n3.M, cfg=cfg, system=corank_one_n3)
    assert stats.trace
    assert all(source < target for target, sources in stats.trace for source in sources)


def test_trace_of_standard_run_covers_every_built_row(corank_one_n3):
    _, stats = standard_f5(corank_one_n3.gens, 3, F5Config(trace=True))
    assert len(stats.trace) == stats.rows_built
    assert all(source < target for target, sources in stats.trace for source in sources)


def covered_by_syzygy_leads(std_stats, first_basis):
    leads = first_basis.leading_terms()
    return all(any(lead.divides(sig.as_module_monomial()) for lead in leads)
               for sig in std_stats.zero_signatures)


def test_syzygy_leading_terms_cover_every_zero_signature_n3(corank_one_n3):
    _, std_stats = standard_f5(corank_one_n3.gens, 3)
    first, _, _, _ = syzygy_bases_corank_one(corank_one_n3, 3)
    assert std_stats.reductions_to_zero > 0
    assert covered_by_syzygy_leads(std_stats, first)


def test_syzygy_leading_terms_cover_every_zero_signature_n4(corank_one_runs):
    system, (_, std_stats), _ = corank_one_runs
    first, _, _, _ = syzygy_bases_corank_one(system, 5)
    assert len(std_stats.zero_signatures) == 56
    assert covered_by_syzygy_leads(std_stats, first)


def test_degree_one_syzygy_basis_size_is_the_rank(field):
    syzygies = syz_gen(minors(random_linear_matrix(4, 9, field, 41), 2))
    basis, stats = matrix_f5(syzygies.elements(), 1, None, F5Config(use_f5_criterion=False))
    assert len(basis) == rank_mod(syzygies.coefficient_matrix(), field.p) == 160
    assert stats.reductions_to_zero == 0


def test_degree_bound_below_generators_gives_empty_basis(corank_one_n4):
    G, stats = det_f5_corank_one(corank_one_n4.M, 2, system=corank_one_n4)
    assert len(G) == 0
    assert stats.reductions_to_zero == 0


def test_truncated_basis(corank_one_n4):
    G, stats = det_f5_corank_one(corank_one_n4.M, 4, system=corank_one_n4)
    assert G.degree_bound == 4
    assert G.max_degree == 4
    assert stats.reductions_to_zero == 0


def test_higher_corank_counts(field):
    system = generate_generic_system(4, 9, 1, field, seed=91)
    _, std_stats = standard_f5(system.gens, 3)
    _, det_stats = det_f5(system.M, 1, 3, system=system)
    assert std_stats.zero_by_degree().get(3, 0) == 160
    assert det_stats.reductions_to_zero == 0
    assert det_stats.stages["syz1"].reductions_to_zero == 0


def test_affine_instance_dehomogenizes(field):
    system = generate_generic_system(3, 3, 1, field, seed=12, affine=True)
    G, _ = det_f5_corank_one(system.M, system=system, strict=False)
    affine = dehomogenize_basis(interreduce(G))
    assert affine
    assert all(f.k == 2 for f in affine)
    assert all(f.leading_coefficient() == 1 for f in affine)


@pytest.mark.slow
@pytest.mark.parametrize("n, expected", [(5, 129), (6, 239), (7, 414), (8, 663)])
def test_corank_one_table(field, n, expected):
    system = generate_generic_system(n, 4, n - 2, field, seed=100 + n)
    _, std_stats = standard_f5(system.gens, 2 * n - 3)
    G, det_stats = det_f5_corank_one(system.M, system=system)
    assert std_stats.reductions_to_zero == expected
    assert det_stats.reductions_to_zero == 0
    assert G.max_degree == 2 * n - 3
    assert det_stats.field_ops < std_stats.field_ops
    assert det_stats.total_field_ops() == det_stats.field_ops + sum(stage.field_ops for stage in det_stats.stages.values())


@pytest.mark.slow
@pytest.mark.parametrize("n, r, k, expected", [(5, 2, 9, 450), (5, 1, 16, 800), (6, 1, 25, 2800)])
def test_higher_corank_table(field, n, r, k, expected):
    system = generate_generic_system(n, k, r, field, seed=200 + n)
    _, std_stats = standard_f5(system.gens, r + 2)
    _, det_stats = det_f5(system.M, r, r + 2, system=system)
    assert std_stats.zero_by_degree().get(r + 2, 0) == expected
    assert det_stats.reductions_to_zero == 0
