"""
Signature-tagged Macaulay matrices over GF(p).

Columns of a degree-d matrix for module rank t are laid out position-major
from position t-1 down to 0, each block listing the degree-d monomials in
decreasing grevlex order; the first nonzero entry of a row is therefore its
POT leading term.

Echelonization follows the valid-row-operation contract: a row is only ever
reduced by rows of strictly smaller signature. Internally the span of the
rows processed so far is kept as a fully interreduced basis; normal forms do
not depend on the chosen basis of a span, and every row in it has a smaller
signature than the rows being inserted.
"""
import time
from dataclasses import dataclass, field
from functools import lru_cache, total_ordering
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from ..algebra.gf import PrimeField
from ..algebra.linalg import EchelonBasis, as_work, eliminate_block
from ..algebra.mono_poly import (ModuleElement, ModuleMonomial, Monomial, count_monomials,
                                 monomials_of_degree, shift_map)
from ..utils.errors import ContractViolationError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


@total_ordering
class Signature:
    """The label (index, tau) of a row representing tau * f_index."""

    __slots__ = ("index", "mono")

    def __init__(self, index: int, mono: Monomial):
        self.index = int(index)
        self.mono = mono

    @property
    def key(self):
        return (self.index, self.mono.key)

    @property
    def degree(self) -> int:
        return self.mono.degree

    def __eq__(self, other) -> bool:
        return isinstance(other, Signature) and self.index == other.index and self.mono == other.mono

    def __hash__(self) -> int:
        return hash((self.index, self.mono))

    def __lt__(self, other: "Signature") -> bool:
        return self.key < other.key

    def times_variable(self, j: int) -> "Signature":
        return Signature(self.index, self.mono.times_variable(j))

    def as_module_monomial(self) -> ModuleMonomial:
        return ModuleMonomial(self.index, self.mono)

    def __repr__(self) -> str:
        return f"({self.index}, {self.mono})"


@dataclass
class SignedRow:
    sig: Signature
    coeffs: np.ndarray
    origin: Optional[Signature] = None

    def leading_column(self) -> int:
        nonzero = np.flatnonzero(self.coeffs)
        return int(nonzero[0]) if nonzero.size else -1


@dataclass(frozen=True)
class ColumnLayout:
    k: int
    d: int
    t: int

    @property
    def block(self) -> int:
        return count_monomials(self.k, self.d)

    @property
    def width(self) -> int:
        return self.t * self.block

    @property
    def monomials(self) -> Tuple[Monomial, ...]:
        return monomials_of_degree(self.k, self.d)

    def module_monomial(self, col: int) -> ModuleMonomial:
        block = self.block
        return ModuleMonomial(self.t - 1 - col // block, self.monomials[col % block])

    def columns(self) -> List[ModuleMonomial]:
        return [self.module_monomial(c) for c in range(self.width)]

    def lift(self, coeffs: np.ndarray, j: int) -> np.ndarray:
        """Row of ``x_j * f`` at degree d from the row of f at degree d - 1."""
        parent = coeffs.reshape(self.t, count_monomials(self.k, self.d - 1))
        child = np.zeros((self.t, self.block), dtype=coeffs.dtype)
        child[:, shift_map(self.k, self.d, j)] = parent
        return child.reshape(-1)

    def element(self, coeffs: np.ndarray, field_: PrimeField) -> ModuleElement:
        return ModuleElement.from_dense(np.asarray(coeffs, dtype=np.int64), self.t, field_, self.k, self.d)


@lru_cache(maxsize=None)
def column_layout(k: int, d: int, t: int) -> ColumnLayout:
    return ColumnLayout(k, d, t)


@dataclass
class MacaulayMatrix:
    """Degree-d rows of generators 0..i, ascending by signature."""

    d: int
    i: int
    t: int
    k: int
    rows: List[SignedRow] = field(default_factory=list)

    @property
    def layout(self) -> ColumnLayout:
        return column_layout(self.k, self.d, self.t)

    @property
    def columns(self) -> List[ModuleMonomial]:
        return self.layout.columns()

    def add_row(self, row: SignedRow) -> None:
        if self.rows and not self.rows[-1].sig < row.sig:
            raise ContractViolationError(f"Row {row.sig} added after {self.rows[-1].sig}")
        self.rows.append(row)

    def rows_of(self, index: int) -> List[SignedRow]:
        return [row for row in self.rows if row.sig.index == index]

    def __len__(self) -> int:
        return len(self.rows)


class CriteriaSet:
    """Signatures that must not be built; membership is exact equality."""

    def __init__(self, blocked: Iterable[Signature] = ()):
        self.blocked: Set[Signature] = set(blocked)

    def __contains__(self, sig: Signature) -> bool:
        return sig in self.blocked

    def add(self, sig: Signature) -> None:
        self.blocked.add(sig)

    def update(self, sigs: Iterable[Signature]) -> None:
        self.blocked.update(sigs)

    def __len__(self) -> int:
        return len(self.blocked)


@dataclass
class BlockRecord:
    degree: int
    index: int
    rows_built: int
    zero_reductions: int
    blocked: int
    rank: int
    blocked_survivors: int = 0


@dataclass
class RunStats:
    """Counters of one matrix-F5 run; ``stages`` holds auxiliary runs."""

    label: str = ""
    records: List[BlockRecord] = field(default_factory=list)
    zero_signatures: List[Signature] = field(default_factory=list)
    trace: Optional[List[Tuple[Signature, Tuple[Signature, ...]]]] = None
    field_ops: int = 0
    wall_time: float = 0.0
    stages: Dict[str, "RunStats"] = field(default_factory=dict)
    _started: float = field(default=0.0, repr=False)

    def start(self) -> None:
        self._started = time.perf_counter()

    def stop(self) -> None:
        self.wall_time = time.perf_counter() - self._started

    @property
    def reductions_to_zero(self) -> int:
        return sum(rec.zero_reductions for rec in self.records)

    @property
    def rows_built(self) -> int:
        return sum(rec.rows_built for rec in self.records)

    @property
    def criterion_failures(self) -> int:
        return sum(rec.blocked_survivors for rec in self.records)

    def zero_by_degree(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for rec in self.records:
            out[rec.degree] = out.get(rec.degree, 0) + rec.zero_reductions
        return out

    def rank_at(self, degree: int) -> int:
        ranks = [rec.rank for rec in self.records if rec.degree == degree]
        return ranks[-1] if ranks else 0

    def rows_at(self, degree: int) -> int:
        return sum(rec.rows_built for rec in self.records if rec.degree == degree)

    def total_field_ops(self) -> int:
        """Field operations of this run and every auxiliary stage."""
        return self.field_ops + sum(stage.total_field_ops() for stage in self.stages.values())

    def total_wall_time(self) -> float:
        return self.wall_time + sum(stage.total_wall_time() for stage in self.stages.values())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([rec.__dict__ for rec in self.records],
                            columns=["degree", "index", "rows_built", "zero_reductions", "blocked", "rank",
                                     "blocked_survivors"])

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "reductions_to_zero": self.reductions_to_zero,
            "zero_by_degree": self.zero_by_degree(),
            "rows_built": self.rows_built,
            "field_ops": self.field_ops,
            "total_field_ops": self.total_field_ops(),
            "wall_time": self.wall_time,
            "criterion_failures": self.criterion_failures,
            "stages": {name: stage.to_dict() for name, stage in self.stages.items()},
        }


def extend_rows(prev: MacaulayMatrix, crit: CriteriaSet, k: int, index: Optional[int] = None,
                collect_blocked: Optional[List[SignedRow]] = None) -> Tuple[List[SignedRow], int]:
    """
    Children ``x_j * f`` of the degree-(d-1) rows, for j from the last variable
    dividing tau (0 when tau = 1) up to k - 1, skipping signatures in ``crit``.

    Args:
        prev: echelonized matrix of degree d - 1
        crit: blocked signatures
        k: number of variables
        index: restrict to parents of this generator index
        collect_blocked: when given, blocked children are built and appended here

    Returns:
        Tuple: (children ascending by signature, number of blocked children)
    """
    layout = column_layout(k, prev.d + 1, prev.t)
    parents = prev.rows if index is None else prev.rows_of(index)
    children: List[SignedRow] = []
    blocked = 0
    for parent in parents:
        for j in range(parent.sig.mono.max_variable(), k):
            sig = parent.sig.times_variable(j)
            if sig in crit:
                blocked += 1
                if collect_blocked is not None:
                    collect_blocked.append(SignedRow(sig, layout.lift(parent.coeffs, j), parent.sig))
                continue
            children.append(SignedRow(sig, layout.lift(parent.coeffs, j), parent.sig))
    children.sort(key=lambda row: row.sig.key)
    if collect_blocked is not None:
        collect_blocked.sort(key=lambda row: row.sig.key)
    return children, blocked


@dataclass
class EchelonOutcome:
    kept: List[SignedRow]
    zero: List[Signature]
    blocked_survivors: List[Signature]


class SignatureEchelon:
    """
    Running signature echelon form of one degree.

    Rows are inserted in increasing signature order, in batches; every row is
    reduced to its normal form modulo the span of all rows inserted before it
    and stored normalized to a leading 1.
    """

    def __init__(self, layout: ColumnLayout, field_: PrimeField, trace: bool = False):
        self.layout = layout
        self.field = field_
        self.basis = EchelonBasis(layout.width, field_.p)
        self.owners: List[int] = []
        # largest signature mixed into each basis row
        self.reach: List[Signature] = []
        self.last: Optional[Signature] = None
        self.trace: Optional[List[Tuple[Signature, Tuple[Signature, ...]]]] = [] if trace else None

    @property
    def rank(self) -> int:
        return self.basis.rank

    def insert(self, rows: Sequence[SignedRow], forced: Sequence[SignedRow] = ()) -> EchelonOutcome:
        """
        Echelonize ``rows`` against everything inserted so far.

        ``forced`` rows are reduced in signature order alongside ``rows`` but
        never enter the basis; the ones that do not vanish are reported.
        """
        items = [(row, False) for row in rows] + [(row, True) for row in forced]
        items.sort(key=lambda item: item[0].sig.key)
        for (a, _), (b, _) in zip(items, items[1:]):
            if not a.sig < b.sig:
                raise ContractViolationError(f"Signatures not strictly increasing: {a.sig} then {b.sig}")
        if items and self.last is not None and not self.last < items[0][0].sig:
            raise ContractViolationError(f"Row {items[0][0].sig} does not exceed inserted signature {self.last}")
        if not items:
            return EchelonOutcome([], [], [])

        p = self.field.p
        block = np.vstack([as_work(row.coeffs, p) for row, _ in items])
        ops_before = self.basis.ops
        reduced, coeffs = self.basis.reduce(block)
        result = eliminate_block(reduced, p, insertable=[not skip for _, skip in items])

        if self.trace is not None:
            for j, ((row, _), used) in enumerate(zip(items, self.basis.reducers(coeffs))):
                sources = {self.reach[q] for q in used} | {items[b][0].sig for b in result.sources[j]}
                self.trace.append((row.sig, tuple(sorted(sources))))

        kept, zero, survivors = [], [], []
        for (row, skip), form in zip(items, result.forms):
            if skip:
                if form is not None:
                    survivors.append(row.sig)
                continue
            if form is None:
                zero.append(row.sig)
            else:
                kept.append(SignedRow(row.sig, form, row.origin))
        touched = self.basis.absorb(result.new_rows, result.new_pivots)
        if result.new_pivots:
            newest = items[max(result.reaches)][0].sig
            for q in touched:
                self.reach[q] = max(self.reach[q], newest)
            self.reach.extend(items[b][0].sig for b in result.reaches)
        self.owners.extend(row.sig.index for (row, skip), form in zip(items, result.forms)
                           if not skip and form is not None)
        self.basis.ops += result.ops
        self.field.charge(self.basis.ops - ops_before)
        self.last = items[-1][0].sig
        return EchelonOutcome(kept, zero, survivors)

    def leading_monomials_below(self, index: int) -> List[Monomial]:
        """Pivot monomials contributed by generators with index < ``index`` (rank-1 layouts)."""
        return [self.layout.module_monomial(c).mono for c, owner in zip(self.basis.pivots, self.owners)
                if owner < index]

    def pivot_terms(self) -> List[ModuleMonomial]:
        return [self.layout.module_monomial(c) for c in self.basis.pivots]

    def basis_elements(self) -> List[Tuple[ModuleMonomial, np.ndarray]]:
        return [(self.layout.module_monomial(c), self.basis.rows[q]) for q, c in enumerate(self.basis.pivots)]

    def release(self) -> None:
        """Drop the dense basis, keeping pivots and owners."""
        self.basis.rows = np.zeros((0, self.layout.width), dtype=self.basis.rows.dtype)


def signature_echelon(mat: MacaulayMatrix, field_: PrimeField,
                      trace: Optional[List[Tuple[Signature, Tuple[Signature, ...]]]] = None) -> Tuple[MacaulayMatrix, List[Signature]]:
    """
    Echelonize one Macaulay matrix under valid row operations.

    Args:
        mat: rows sorted strictly ascending by signature
        field_: the coefficient field
        trace: when given, receives (target, signatures of the rows it was reduced with)

    Returns:
        Tuple: (matrix of surviving normalized rows, signatures of rows reduced to zero)
    """
    for a, b in zip(mat.rows, mat.rows[1:]):
        if not a.sig < b.sig:
            raise ContractViolationError(f"Rows not sorted by signature: {a.sig} then {b.sig}")
    echelon = SignatureEchelon(mat.layout, field_, trace=trace is not None)
    outcome = echelon.insert(mat.rows)
    if trace is not None:
        trace.extend(echelon.trace)
    out = MacaulayMatrix(mat.d, mat.i, mat.t, mat.k, outcome.kept)
    return out, outcome.zero


def pivot_leading_terms(mat: MacaulayMatrix) -> Set[ModuleMonomial]:
    """Leading module monomials of the rows of an echelonized matrix."""
    layout = mat.layout
    return {layout.module_monomial(row.leading_column()) for row in mat.rows if row.leading_column() >= 0}
