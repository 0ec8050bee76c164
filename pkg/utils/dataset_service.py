#!/usr/bin/env python3
"""
Dataset ingestion: CSV files, the synthetic benchmark and train/test splits.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from models import Dataset
from utils.errors import (
    DataFormatError,
    DataParseError,
    InvalidConfigError,
    SchemaMismatchError,
)

logger = logging.getLogger(__name__)

SYNTHETIC_FEATURES = ('x1', 'x2', 'x3', 'x4')
SYNTHETIC_LABEL = 'y'


@dataclass(frozen=True)
class SyntheticSpec:
    n: int = 10000
    mean: float = 10.0
    variance: float = 3.0
    a1: float = 5.0
    a2: float = 15.0
    seed: int = 42

    def __post_init__(self):
        if self.n < 1:
            raise InvalidConfigError(f"Synthetic dataset needs n >= 1, got {self.n}")
        if not self.variance > 0:
            raise InvalidConfigError(f"Synthetic variance must be > 0, got {self.variance}")


def synthetic_label(rows: np.ndarray, a1: float = 5.0, a2: float = 15.0) -> np.ndarray:
    """y = x1 + a1*x2 + a2*x3 + x4^2"""
    rows = np.asarray(rows, dtype=np.float64)
    return rows[:, 0] + a1 * rows[:, 1] + a2 * rows[:, 2] + rows[:, 3] ** 2


def synth_generate(spec: SyntheticSpec) -> Dataset:
    """Four i.i.d. Gaussian features (variance read literally) and the exact label"""
    rng = np.random.default_rng(spec.seed)
    rows = rng.normal(spec.mean, math.sqrt(spec.variance), size=(spec.n, len(SYNTHETIC_FEATURES)))
    labels = synthetic_label(rows, spec.a1, spec.a2)
    return Dataset(SYNTHETIC_FEATURES, rows, labels, SYNTHETIC_LABEL)


def _looks_numeric(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _to_float(text) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        return math.nan


def load_csv(path: Union[str, Path], label_column: Optional[str] = None) -> Dataset:
    """Read a headed, comma-separated, all-numeric file"""
    path = Path(path)
    try:
        # header=None keeps duplicate names as written; pandas would rename them
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, encoding='utf-8')
    except pd.errors.EmptyDataError:
        raise DataFormatError(f"{path} is empty") from None
    except pd.errors.ParserError as e:
        raise DataFormatError(f"{path} is not a rectangular CSV file: {e}") from None
    except UnicodeDecodeError as e:
        raise DataFormatError(f"{path} is not valid UTF-8: {e.reason} at byte {e.start}") from None

    header = [str(name).strip() for name in frame.iloc[0]]
    if not header or all(_looks_numeric(name) for name in header):
        raise DataFormatError(f"{path} has no header row")
    if any(not name for name in header):
        raise DataFormatError(f"{path} has an empty column name")
    duplicates = sorted({name for name in header if header.count(name) > 1})
    if duplicates:
        raise DataFormatError(f"{path} repeats column names: {', '.join(duplicates)}")
    frame = frame.iloc[1:].reset_index(drop=True)
    frame.columns = header

    if label_column is not None and label_column not in header:
        raise InvalidConfigError(f"Label column '{label_column}' not found in {path}")

    values = np.empty(frame.shape, dtype=np.float64)
    for j, name in enumerate(header):
        raw = frame[name].str.strip()
        numeric = raw.map(_to_float).to_numpy(dtype=np.float64)
        bad = ~np.isfinite(numeric)
        if bad.any():
            row = int(np.argmax(bad))
            # +2: one for the header line, one for 1-based numbering
            raise DataParseError(row + 2, name, raw.iloc[row])
        values[:, j] = numeric

    if label_column is None:
        dataset = Dataset(tuple(header), values)
    else:
        label_index = header.index(label_column)
        features = tuple(name for name in header if name != label_column)
        dataset = Dataset(
            features,
            np.delete(values, label_index, axis=1),
            values[:, label_index],
            label_column,
        )
    logger.info(f"Loaded {dataset.n_rows} rows x {dataset.n_features} features from {path}")
    return dataset


def to_frame(data: Dataset) -> pd.DataFrame:
    frame = pd.DataFrame(data.rows, columns=list(data.feature_names))
    if data.labels is not None:
        frame[data.label_name or SYNTHETIC_LABEL] = data.labels
    return frame


def write_csv(data: Dataset, path: Union[str, Path]):
    """Write features (and the label column, when present) with full float precision"""
    to_frame(data).to_csv(path, index=False, float_format='%.17g', lineterminator='\n')


def label_column(data: Dataset, name: str) -> np.ndarray:
    """Ground-truth values from the label or from a named feature column"""
    if data.labels is not None and data.label_name == name:
        return data.labels
    if name in data.feature_names:
        return data.column(name)
    raise SchemaMismatchError([name])


def split(data: Dataset, train_fraction: float = 0.7, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle, then the first floor(fraction*n) rows train; returns row indices"""
    if not 0.0 < train_fraction < 1.0:
        raise InvalidConfigError(f"train_fraction must lie in (0,1), got {train_fraction}")
    order = np.random.default_rng(seed).permutation(data.n_rows)
    n_train = int(math.floor(train_fraction * data.n_rows))
    return order[:n_train], order[n_train:]


def split_dataset(data: Dataset, train_fraction: float = 0.7, seed: int = 0) -> Tuple[Dataset, Dataset]:
    train_rows, test_rows = split(data, train_fraction, seed)
    return data.take(train_rows), data.take(test_rows)


def write_scores(row_ids, scores, path: Union[str, Path]):
    """Two columns, row_id and score; row_id is the row's index in the input file"""
    frame = pd.DataFrame({'row_id': np.asarray(row_ids, dtype=np.int64), 'score': np.asarray(scores, dtype=np.float64)})
    frame.to_csv(path, index=False, float_format='%.17g', lineterminator='\n')


def read_scores(path: Union[str, Path]) -> Tuple[np.ndarray, np.ndarray]:
    scores = load_csv(path)
    if 'score' not in scores.feature_names:
        raise DataFormatError(f"{path} has no 'score' column")
    if 'row_id' in scores.feature_names:
        row_ids = scores.column('row_id').astype(np.int64)
    else:
        row_ids = np.arange(scores.n_rows)
    return row_ids, scores.column('score')
