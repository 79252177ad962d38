import os
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from ..algebra.gf import PrimeField
from ..determinantal.detsys import DetSystem, generate_generic_system
from ..determinantal.hilbert import expected_gb_maxdeg, hilbert_coeff
from ..groebner.f5core import F5Config, det_f5, det_f5_corank_one, standard_f5
from ..models.schema import BenchRow, BenchSchema
from ..utils.config import get_settings
from ..utils.errors import DeterminantalF5Error
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class TableEntry:
    n: int
    r: int
    k: int
    D: int
    red_std: int


# Reductions to zero of standard F5 over GF(65521); determinantal F5 has none.
CORANK_ONE_TABLE = [
    TableEntry(n, n - 2, 4, 2 * n - 3, red)
    for n, red in [(4, 56), (5, 129), (6, 239), (7, 414), (8, 663), (9, 959), (10, 1387), (11, 1871),
                   (12, 2525), (13, 3181), (14, 4032), (15, 4977), (16, 6213), (17, 7515), (18, 8845),
                   (19, 10544), (20, 12969)]
]

HIGHER_CORANK_TABLE = [
    TableEntry(n, r, k, r + 2, red)
    for n, r, k, red in [(4, 1, 9, 160), (5, 2, 9, 450), (6, 3, 9, 1008), (7, 4, 9, 1960), (8, 5, 9, 3456),
                         (9, 6, 9, 5670), (5, 1, 16, 800), (6, 2, 16, 3150), (7, 3, 16, 9408),
                         (6, 1, 25, 2800), (7, 2, 25, 14700), (7, 1, 36, 7840)]
]

TABLE = CORANK_ONE_TABLE + HIGHER_CORANK_TABLE


def default_degree(n: int, r: int) -> int:
    """2n - 3 in corank one, r + 2 (first-syzygy degree) otherwise."""
    return expected_gb_maxdeg(n, r) if r == n - 2 else r + 2


def expected_reductions(n: int, r: int, k: int) -> Optional[int]:
    for entry in TABLE:
        if (entry.n, entry.r, entry.k) == (n, r, k):
            return entry.red_std
    return None


class BenchRunner:
    """
    Runs standard and determinantal F5 on generic instances and collects the
    reduction-to-zero counts as a DataFrame.
    """

    def __init__(self, prime: Optional[int] = None, max_retries: Optional[int] = None):
        """
        Initialize the runner.

        Args:
            prime: field characteristic (settings default when omitted)
            max_retries: degeneracy retries per instance
        """
        settings = get_settings()
        self.field = PrimeField(prime or settings.prime)
        self.max_retries = settings.max_retries if max_retries is None else max_retries
        self.schema = BenchSchema()

    def _rank_checks(self, system: DetSystem, stats) -> bool:
        if system.r != system.n - 2 or system.k != 4:
            return stats.reductions_to_zero == 0
        return all(stats.rank_at(d) == hilbert_coeff(system.n, d)
                   for d in range(system.n - 1, 2 * system.n - 2))

    def run_row(self, n: int, r: int, k: int, seed: int, D: Optional[int] = None) -> BenchRow:
        """Run both algorithms on one generic instance."""
        D = default_degree(n, r) if D is None else D
        logger.info(f"Bench row n={n}, r={r}, k={k}, D={D}, seed={seed}")
        try:
            system = generate_generic_system(n, k, r, self.field, seed, self.max_retries)
            _, std_stats = standard_f5(system.gens, D, F5Config(label="std", seed=system.M.seed))
            if r == n - 2:
                _, det_stats = det_f5_corank_one(system.M, D, system=system, strict=False)
                red_det = det_stats.reductions_to_zero
            else:
                _, det_stats = det_f5(system.M, r, D, system=system)
                red_det = det_stats.zero_by_degree().get(r + 2, 0)
            return BenchRow(
                n=n, r=r, k=k, D=D,
                red_std=std_stats.reductions_to_zero,
                red_det=red_det,
                seed=system.M.seed,
                rank_checks_passed=self._rank_checks(system, det_stats),
                ops_std=std_stats.field_ops,
                ops_det=det_stats.total_field_ops(),
                ops_det_main=det_stats.field_ops,
                time_std=std_stats.wall_time,
                time_det=det_stats.total_wall_time(),
                expected_std=expected_reductions(n, r, k),
            )
        except DeterminantalF5Error as e:
            logger.error(f"Error in bench row n={n}, r={r}, k={k}: {str(e)}")
            return BenchRow(n=n, r=r, k=k, D=D, red_std=-1, red_det=-1, seed=seed,
                            rank_checks_passed=False, expected_std=expected_reductions(n, r, k), error=str(e))

    def collect_and_transform(self, grid: Iterable[Tuple[int, int, int]], trials: int = 1,
                              seed: Optional[int] = None) -> pd.DataFrame:
        """
        Run every grid row ``trials`` times and return one averaged row each.

        Args:
            grid: (n, r, k) triples, each with r <= n - 2
            trials: instances per row; seeds are seed, seed + 1000, ...
            seed: master seed

        Returns:
            pd.DataFrame: bench rows in grid order
        """
        seed = get_settings().seed if seed is None else seed
        rows = []
        for idx, (n, r, k) in enumerate(grid):
            if not 1 <= r <= n - 2:
                logger.error(f"Skipping bench row n={n}, r={r}: need 1 <= r <= n - 2")
                continue
            runs = [self.run_row(n, r, k, seed + 1000 * t + 100000 * idx) for t in range(trials)]
            counts = {(run.red_std, run.red_det) for run in runs}
            if len(counts) > 1:
                logger.warning(f"Reduction counts differ across seeds for n={n}, r={r}, k={k}: {sorted(counts)}")
            frame = pd.DataFrame([run.to_dict() for run in runs])
            merged = runs[0].to_dict()
            for col in ("red_std", "red_det", "ops_std", "ops_det", "ops_det_main"):
                merged[col] = int(round(frame[col].mean()))
            for col in ("time_std", "time_det"):
                merged[col] = float(frame[col].mean())
            merged["rank_checks_passed"] = bool(frame["rank_checks_passed"].all())
            rows.append(merged)
        df = self.schema.apply(pd.DataFrame(rows))
        self.schema.validate(df)
        return df

    def save_to_csv(self, df: pd.DataFrame, output_path: str) -> None:
        """Save bench results to CSV."""
        try:
            directory = os.path.dirname(output_path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            df.to_csv(output_path, index=False)
            logger.info(f"Saved {len(df)} bench rows to {output_path}")
        except Exception as e:
            logger.error(f"Error saving bench results: {str(e)}")
            raise


def parse_grid(text: Optional[str], which: str = "corank-one") -> List[Tuple[int, int, int]]:
    """
    Grid from ``"n,r,k;n,r,k"`` or one of the built-in tables.

    Args:
        text: explicit grid, overrides ``which``
        which: corank-one, higher or all
    """
    if text:
        grid = []
        for chunk in text.split(";"):
            if chunk.strip():
                n, r, k = (int(x) for x in chunk.split(","))
                grid.append((n, r, k))
        return grid
    tables = {"corank-one": CORANK_ONE_TABLE, "higher": HIGHER_CORANK_TABLE, "all": TABLE}
    if which not in tables:
        raise ValueError(f"Unknown grid {which!r}, expected one of {sorted(tables)}")
    return [(e.n, e.r, e.k) for e in tables[which]]


def filter_grid(grid: Sequence[Tuple[int, int, int]], max_n: Optional[int]) -> List[Tuple[int, int, int]]:
    return [row for row in grid if max_n is None or row[0] <= max_n]
