from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..utils.config import get_settings
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


class InstanceSchema:
    """
    Schema definition and validation for instance records
    (``{"p", "n", "k", "r", "seed", "coeffs"}``).
    Handles type conversion and fills optional fields.
    """

    def __init__(self):
        self.required_fields = {
            'p': int,
            'n': int,
            'k': int,
            'r': int,
            'seed': int,
            'coeffs': list,
            'affine': bool,
            'retries': int,
        }

    def _clean_numeric(self, value: Any, type_: type) -> Any:
        """Convert numeric values, keeping None for missing ones."""
        if value is None:
            return None
        try:
            if isinstance(value, float) and not value.is_integer():
                return None
            return type_(value)
        except (ValueError, TypeError):
            return None

    def _clean_coeffs(self, value: Any) -> Optional[list]:
        if value is None:
            return None
        try:
            return np.asarray(value, dtype=np.int64).tolist()
        except (ValueError, TypeError):
            return value

    def apply(self, record: Dict[str, Any]) -> Dict[str, Any]:
        """Apply the schema to a raw record; unknown keys are dropped."""
        settings = get_settings()
        cleaned = {}
        for key in ('p', 'n', 'k', 'r', 'seed', 'retries'):
            cleaned[key] = self._clean_numeric(record.get(key), int)
        if cleaned['p'] is None:
            cleaned['p'] = settings.prime
        if cleaned['seed'] is None:
            cleaned['seed'] = settings.seed
        if cleaned['r'] is None and cleaned['n'] is not None:
            cleaned['r'] = cleaned['n'] - 2
        if cleaned['retries'] is None:
            cleaned['retries'] = 0
        cleaned['affine'] = bool(record.get('affine', False))
        cleaned['coeffs'] = self._clean_coeffs(record.get('coeffs'))
        return cleaned

    def problems(self, record: Dict[str, Any]) -> List[str]:
        """Everything wrong with a cleaned record; empty when valid."""
        issues = []
        for key, type_ in self.required_fields.items():
            if type_ is int and not isinstance(record.get(key), int):
                issues.append(f"field {key!r} must be an integer")
        if issues:
            return issues
        n, k, r = record['n'], record['k'], record['r']
        if n < 2:
            issues.append(f"n must be at least 2, got {n}")
        if k < 1:
            issues.append(f"k must be at least 1, got {k}")
        if not 0 <= r <= n - 1:
            issues.append(f"r must lie in [0, n - 1], got {r}")
        if not 2 <= record['p'] < 2 ** 31:
            issues.append(f"p must lie in [2, 2^31), got {record['p']}")
        coeffs = record.get('coeffs')
        if coeffs is not None:
            shape = np.shape(coeffs)
            if shape != (k, n, n):
                issues.append(f"coeffs has shape {shape}, expected {(k, n, n)}")
        return issues

    def validate(self, record: Dict[str, Any]) -> bool:
        """
        Validate that a cleaned record meets the schema.
        Returns True if valid, False otherwise.
        """
        issues = self.problems(record)
        for issue in issues:
            logger.warning(f"Invalid instance record: {issue}")
        return not issues


@dataclass
class BenchRow:
    """One reproduced row of the reduction-to-zero table."""

    n: int
    r: int
    k: int
    D: int
    red_std: int
    red_det: int
    seed: int
    rank_checks_passed: bool = True
    ops_std: int = 0
    ops_det: int = 0
    ops_det_main: int = 0
    time_std: float = 0.0
    time_det: float = 0.0
    expected_std: Optional[int] = None
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class BenchSchema:
    """Column order and dtypes of bench CSV output."""

    def __init__(self):
        self.required_columns = {
            'n': int,
            'r': int,
            'k': int,
            'D': int,
            'red_std': int,
            'red_det': int,
            'seed': int,
            'rank_checks_passed': bool,
            'ops_std': int,
            'ops_det': int,
            'ops_det_main': int,
            'time_std': float,
            'time_det': float,
            'expected_std': 'Int64',
            'error': object,
        }

    def apply(self, df: pd.DataFrame) -> pd.DataFrame:
        """Apply schema to DataFrame."""
        df = df.copy()
        for col, type_ in self.required_columns.items():
            if col not in df.columns:
                df[col] = None
            if type_ in (int, float, bool):
                df[col] = df[col].fillna(type_(0)).astype(type_)
            elif type_ == 'Int64':
                df[col] = df[col].astype('Int64')
        return df[list(self.required_columns.keys())]

    def validate(self, df: pd.DataFrame) -> bool:
        """
        Check columns and the reduction counts of every finished row.
        Returns True if valid, False otherwise.
        """
        missing_cols = set(self.required_columns.keys()) - set(df.columns)
        if missing_cols:
            logger.warning(f"Missing required columns: {missing_cols}")
            return False
        valid = True
        for _, row in df[df['error'].isna()].iterrows():
            where = f"n={row['n']}, r={row['r']}, k={row['k']}"
            if not pd.isna(row['expected_std']) and row['red_std'] != row['expected_std']:
                logger.warning(f"Bench row {where}: {row['red_std']} reductions to zero, table has "
                               f"{row['expected_std']}")
                valid = False
            if row['red_det'] != 0:
                logger.warning(f"Bench row {where}: determinantal run reduced {row['red_det']} rows to zero")
                valid = False
            if row['ops_det'] < row['ops_det_main']:
                logger.warning(f"Bench row {where}: total field operations below the main run's")
                valid = False
        return valid
