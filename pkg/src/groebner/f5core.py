"""
Matrix-F5 drivers: the generic signature algorithm with syzygy input, the
standard baseline, the determinantal variant fed by submatrix syzygies and
the corank-one variant fed by the Gulliksen-Negård first and second syzygies.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .macaulay import (CriteriaSet, MacaulayMatrix, RunStats, BlockRecord, Signature, SignatureEchelon,
                       SignedRow, column_layout, extend_rows)
from ..algebra.gf import PrimeField
from ..algebra.linalg import rref_mod
from ..algebra.mono_poly import (ModuleElement, ModuleMonomial, Monomial, Polynomial, dehomogenize,
                                 leading_term_pot, monomials_of_degree)
from ..determinantal.detsys import DetSystem, LinearMatrix, minors
from ..determinantal.hilbert import expected_gb_maxdeg
from ..determinantal.syzgen import SyzygyBasis, syz2_corank_one, syz_corank_one, syz_gen
from ..utils.errors import ContractViolationError, DimensionError, EmptySupportError, NonGenericInstanceError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass
class GroebnerBasis:
    """A (D-truncated) Gröbner basis under grevlex / POT."""

    elements: List[ModuleElement]
    degree_bound: int
    t: int = 1
    reduced: bool = False
    order: str = "grevlex-pot"

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def leading_terms(self) -> List[ModuleMonomial]:
        return [leading_term_pot(g)[0] for g in self.elements]

    def polynomials(self) -> List[Polynomial]:
        if self.t != 1:
            raise DimensionError(f"Rank-{self.t} basis has no polynomial view")
        return [g.coords[0] for g in self.elements]

    @property
    def max_degree(self) -> int:
        return max((g.degree for g in self.elements), default=-1)

    def to_lines(self) -> List[str]:
        if self.t == 1:
            return [str(g.coords[0]) for g in self.elements]
        return [str(g) for g in self.elements]

    def to_dict(self) -> dict:
        return {
            "degree_bound": self.degree_bound,
            "rank": self.t,
            "reduced": self.reduced,
            "order": self.order,
            "elements": self.to_lines(),
        }


@dataclass
class F5Config:
    use_f5_criterion: bool = True
    input_syzygies: Optional[object] = None
    degree_bound: Optional[int] = None
    collect_stats: bool = True
    trace: bool = False
    # build the rows the criteria skip and check that they reduce to zero
    force_build_blocked: bool = False
    fail_on_zero_reduction: bool = False
    seed: Optional[int] = None
    label: str = "f5"


@dataclass
class _DegreeState:
    echelon: SignatureEchelon
    matrix: MacaulayMatrix
    zeros: Dict[int, List[Signature]] = field(default_factory=dict)


SyzygyInput = Union[None, SyzygyBasis, GroebnerBasis, Sequence[ModuleElement]]


def _as_module_elements(F: Sequence[Union[Polynomial, ModuleElement]]) -> List[ModuleElement]:
    return [f if isinstance(f, ModuleElement) else ModuleElement.from_polynomial(f) for f in F]


def _syzygy_elements(S: SyzygyInput) -> List[ModuleElement]:
    if S is None:
        return []
    if isinstance(S, SyzygyBasis):
        return S.elements()
    if isinstance(S, GroebnerBasis):
        return list(S.elements)
    return list(S)


def _divisible(leads: Dict[int, List[Monomial]], term: ModuleMonomial) -> bool:
    return any(m.divides(term.mono) for m in leads.get(term.position, ()))


def matrix_f5(F: Sequence[Union[Polynomial, ModuleElement]], D: Optional[int] = None,
              S: SyzygyInput = None, cfg: Optional[F5Config] = None) -> Tuple[GroebnerBasis, RunStats]:
    """
    Matrix-F5 with known syzygies.

    Degree by degree and generator by generator, the rows tau * f_i are built
    from the surviving rows of the previous degree, skipping signatures that
    are leading terms of ``S``, (rank 1 only) leading terms of the previous
    generators' matrix, or multiples of rows that reduced to zero.

    Args:
        F: homogeneous generators sorted by non-decreasing degree
        D: degree bound
        S: syzygies of F (any iterable of rank-len(F) module elements)
        cfg: run options

    Returns:
        Tuple: (D-Gröbner basis, run statistics)
    """
    cfg = cfg or F5Config()
    D = cfg.degree_bound if D is None else D
    if D is None:
        raise ValueError("A degree bound is required")
    S = cfg.input_syzygies if S is None else S
    gens = _as_module_elements(F)
    stats = RunStats(label=cfg.label)
    stats.start()
    if not gens:
        stats.stop()
        return GroebnerBasis([], D), stats

    field_: PrimeField = gens[0].field
    k, t = gens[0].k, gens[0].t
    for g in gens:
        if g.t != t or g.k != k or g.field.p != field_.p:
            raise DimensionError("Generators live in different modules")
        if g.is_zero():
            raise EmptySupportError("Zero generator")
    degrees = [g.degree for g in gens]
    if any(a > b for a, b in zip(degrees, degrees[1:])):
        raise ContractViolationError(f"Generators not sorted by degree: {degrees}")

    syzygies = _syzygy_elements(S)
    base_blocked = []
    for s in syzygies:
        if s.t != len(gens):
            raise DimensionError(f"Syzygy of rank {s.t} for {len(gens)} generators")
        lead, _ = leading_term_pot(s)
        base_blocked.append(Signature(lead.position, lead.mono))
    use_f5 = cfg.use_f5_criterion and t == 1
    if cfg.trace:
        stats.trace = []

    logger.info(f"{cfg.label}: {len(gens)} generators of rank {t} in {k} variables, "
                f"degrees {degrees[0]}..{degrees[-1]}, D={D}, {len(syzygies)} input syzygies")
    ops_start = field_.ops
    one = Monomial.one(k)
    states: Dict[int, _DegreeState] = {}
    elements: List[ModuleElement] = []
    leads: Dict[int, List[Monomial]] = {}

    for d in range(degrees[0], D + 1):
        layout = column_layout(k, d, t)
        state = _DegreeState(SignatureEchelon(layout, field_, trace=cfg.trace),
                             MacaulayMatrix(d, len(gens) - 1, t, k))
        prev = states.get(d - 1)
        crit = CriteriaSet(base_blocked)
        for i, g in enumerate(gens):
            if d < degrees[i]:
                continue
            forced: Optional[List[SignedRow]] = [] if cfg.force_build_blocked else None
            blocked = 0
            if d == degrees[i]:
                rows = [SignedRow(Signature(i, one), g.to_dense(d))]
            else:
                if use_f5:
                    lower = states.get(d - degrees[i])
                    if lower is not None:
                        crit.update(Signature(i, m) for m in lower.echelon.leading_monomials_below(i))
                rows = []
                if prev is not None:
                    for z in prev.zeros.get(i, ()):
                        crit.update(z.times_variable(j) for j in range(k))
                    rows, blocked = extend_rows(prev.matrix, crit, k, index=i, collect_blocked=forced)
            outcome = state.echelon.insert(rows, forced or ())
            for row in outcome.kept:
                state.matrix.add_row(row)
            state.zeros[i] = outcome.zero
            stats.zero_signatures.extend(outcome.zero)
            stats.records.append(BlockRecord(d, i, len(rows), len(outcome.zero), blocked, state.echelon.rank,
                                             len(outcome.blocked_survivors)))
            if outcome.blocked_survivors:
                logger.warning(f"{cfg.label}: blocked signatures {outcome.blocked_survivors} did not reduce to zero")
            if outcome.zero:
                logger.debug(f"{cfg.label}: degree {d}, index {i}: zero reductions at {outcome.zero}")
                if cfg.fail_on_zero_reduction:
                    sig = outcome.zero[0]
                    message = (f"{cfg.label}: unexpected reduction to zero at signature {sig} in degree {d}"
                               f" (seed {cfg.seed})")
                    logger.error(message)
                    raise NonGenericInstanceError(message, signature=sig, seed=cfg.seed)

        for term, row in sorted(state.echelon.basis_elements(), key=lambda item: item[0].key):
            if _divisible(leads, term):
                continue
            elements.append(layout.element(row, field_))
            leads.setdefault(term.position, []).append(term.mono)
        if state.echelon.trace is not None:
            stats.trace.extend(state.echelon.trace)
        logger.info(f"{cfg.label}: degree {d}: {stats.rows_at(d)} rows, rank {state.echelon.rank}, "
                    f"{sum(len(z) for z in state.zeros.values())} reductions to zero")

        if prev is not None:
            prev.matrix.rows = []
            prev.zeros = {}
            prev.echelon.release()
        states[d] = state

    stats.field_ops = field_.ops - ops_start
    stats.stop()
    logger.info(f"{cfg.label}: done, {len(elements)} basis elements, {stats.reductions_to_zero} reductions to zero, "
                f"{stats.field_ops} field operations, {stats.wall_time:.2f}s")
    return GroebnerBasis(elements, D, t), stats


def standard_f5(F: Sequence[Polynomial], D: int, cfg: Optional[F5Config] = None) -> Tuple[GroebnerBasis, RunStats]:
    """Matrix-F5 with no input syzygies: F5 criterion and zero-row propagation only."""
    cfg = cfg or F5Config(label="std")
    return matrix_f5(F, D, None, cfg)


def _materialize(S: SyzygyBasis, label: str) -> Tuple[List[ModuleElement], RunStats]:
    """Expand a syzygy list into module elements, charging the work to a stage."""
    field_ = S.matrix.field
    stats = RunStats(label=f"{label}-build")
    stats.start()
    ops_start = field_.ops
    elements = S.elements()
    stats.field_ops = field_.ops - ops_start
    stats.stop()
    return elements, stats


def _stage(elements: List[ModuleElement], build: RunStats, D: int, S: SyzygyInput,
           label: str) -> Tuple[GroebnerBasis, RunStats]:
    basis, stats = matrix_f5(elements, D, S, F5Config(use_f5_criterion=False, label=label))
    stats.field_ops += build.field_ops
    stats.wall_time += build.wall_time
    return basis, stats


def det_f5(M: LinearMatrix, r: int, D: Optional[int] = None, cfg: Optional[F5Config] = None,
           system: Optional[DetSystem] = None) -> Tuple[GroebnerBasis, RunStats]:
    """
    Determinantal matrix-F5: the syzygies of every (r+2)-submatrix, reduced to
    a degree-1 basis of the syzygy module, feed the run on the (r+1)-minors.
    """
    if not 1 <= r <= M.n - 2:
        raise ValueError(f"Need 1 <= r <= n - 2, got n={M.n}, r={r}")
    D = expected_gb_maxdeg(M.n, r) if D is None else D
    system = system or minors(M, r + 1)
    cfg = cfg or F5Config(label="det", seed=M.seed)
    syzygies = syz_gen(system, r)
    elements, build = _materialize(syzygies, f"{cfg.label}-syz1")
    syz_basis, syz_stats = _stage(elements, build, 1, None, f"{cfg.label}-syz1")
    logger.info(f"{cfg.label}: {len(syzygies)} submatrix syzygies, {len(syz_basis)} in the degree-1 basis")
    G, stats = matrix_f5(system.gens, D, syz_basis, cfg)
    stats.stages["syz1"] = syz_stats
    return G, stats


def syzygy_bases_corank_one(system: DetSystem, D: int) -> Tuple[GroebnerBasis, GroebnerBasis, RunStats, RunStats]:
    """
    Truncated POT bases of the first syzygy module (to D - n + 1) computed with
    the second syzygies (to D - n) as known syzygies.

    The field operations spent expanding each syzygy list are charged to the
    stage that consumes it.

    Returns:
        Tuple: (first-syzygy basis, second-syzygy basis, their run stats)
    """
    n = system.n
    second_elements, second_build = _materialize(syz2_corank_one(system), "syz2")
    second_basis, second_stats = _stage(second_elements, second_build, D - n, None, "syz2")
    first_elements, first_build = _materialize(syz_corank_one(system), "syz1")
    first_basis, first_stats = _stage(first_elements, first_build, D - n + 1, second_basis, "syz1")
    return first_basis, second_basis, first_stats, second_stats


def det_f5_corank_one(M: LinearMatrix, D: Optional[int] = None, cfg: Optional[F5Config] = None,
                      system: Optional[DetSystem] = None, strict: bool = True) -> Tuple[GroebnerBasis, RunStats]:
    """
    Corank-one determinantal matrix-F5.

    Args:
        M: n x n matrix of linear forms, n >= 3
        D: degree bound, default 2n - 3
        cfg: options of the run on the minors
        system: precomputed (n-1)-minors of M
        strict: raise NonGenericInstanceError on the first reduction to zero

    Returns:
        Tuple: (D-Gröbner basis, stats with the syzygy runs under ``stages``)
    """
    n = M.n
    if n < 3:
        raise ValueError(f"Corank one needs n >= 3, got {n}")
    D = 2 * n - 3 if D is None else D
    if D < n - 1:
        logger.warning(f"Degree bound {D} is below the generator degree {n - 1}: empty basis")
        return GroebnerBasis([], D), RunStats(label=cfg.label if cfg else "det-corank1")
    if M.k != 4:
        logger.warning(f"k={M.k}: rank predictions are only certified for k = 4")
    system = system or minors(M, n - 1)
    cfg = cfg or F5Config(label="det-corank1", seed=M.seed)
    cfg = replace(cfg, fail_on_zero_reduction=strict)
    first_basis, _, first_stats, second_stats = syzygy_bases_corank_one(system, D)
    G, stats = matrix_f5(system.gens, D, first_basis, cfg)
    stats.stages["syz2"] = second_stats
    stats.stages["syz1"] = first_stats
    return G, stats


def interreduce(G: GroebnerBasis) -> GroebnerBasis:
    """
    The reduced basis: for each degree, the row echelon form of all multiples
    of G, keeping rows whose pivot is not a multiple of a smaller kept leader.
    """
    if not G.elements:
        return GroebnerBasis([], G.degree_bound, G.t, reduced=True)
    field_ = G.elements[0].field
    k, t = G.elements[0].k, G.elements[0].t
    degrees = sorted({g.degree for g in G.elements})
    kept: List[ModuleElement] = []
    leads: Dict[int, List[Monomial]] = {}
    for d in range(degrees[0], degrees[-1] + 1):
        layout = column_layout(k, d, t)
        rows = [g.mono_mul(u).to_dense(d) for g in G.elements if g.degree <= d
                for u in monomials_of_degree(k, d - g.degree)]
        if not rows:
            continue
        echelon, pivots = rref_mod(np.vstack(rows), field_.p)
        fresh = []
        for row, col in zip(echelon, pivots):
            term = layout.module_monomial(col)
            if not _divisible(leads, term):
                fresh.append((term, layout.element(row, field_)))
        for term, elem in sorted(fresh, key=lambda item: item[0].key):
            kept.append(elem)
            leads.setdefault(term.position, []).append(term.mono)
    return GroebnerBasis(kept, G.degree_bound, t, reduced=True)


def dehomogenize_basis(G: GroebnerBasis) -> List[Polynomial]:
    """Specialize the homogenizing (last) variable to 1 in every element."""
    out = []
    for f in G.polynomials():
        g = dehomogenize(f)
        if g and g not in out:
            out.append(g.monic())
    return out
