"""
eval: metrics for a scores file against the data it was computed from.
"""

import click
import numpy as np

from commands import handle_errors
from utils.constraint_config import load_config
from utils.dataset_service import label_column, load_csv, read_scores
from utils.errors import DataFormatError
from utils.evaluation_service import evaluate_scores, write_reports


def _align(row_ids: np.ndarray, n_rows: int) -> np.ndarray:
    if row_ids.size != n_rows:
        raise DataFormatError(f"{row_ids.size} scores for {n_rows} data rows")
    if row_ids.size and (row_ids.min() < 0 or row_ids.max() >= n_rows):
        raise DataFormatError(f"row_id values must lie in 0..{n_rows - 1}")
    if np.unique(row_ids).size != row_ids.size:
        raise DataFormatError("row_id values are not unique")
    return row_ids


@click.command('eval')
@click.option('--scores', 'scores_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--data', 'data_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--truth', help='Ground-truth column; enables rank_correlation and rmse')
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@handle_errors
def evaluate_cmd(scores_path, data_path, truth, config_path, out):
    """Write one metrics report as JSON"""
    constraints = load_config(config_path)
    row_ids, scores = read_scores(scores_path)
    data = load_csv(data_path)
    data = data.take(_align(row_ids, data.n_rows))

    truth_values = label_column(data, truth) if truth else None
    features = data.select(constraints.feature_names)
    report = evaluate_scores(scores, features, constraints, truth_values)
    write_reports(report, out)
    click.echo(f"Wrote metrics for {len(scores)} scores to {out}")
