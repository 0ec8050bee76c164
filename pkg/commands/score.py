"""
score: apply a saved model to a CSV file.
"""

import click
import numpy as np

from commands import handle_errors
from models_network import MonotoneMlp
from utils.dataset_service import load_csv, write_scores


@click.command('score')
@click.option('--model', 'model_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--data', 'data_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@handle_errors
def score_cmd(model_path, data_path, out):
    """Write row_id,score for every row of the data file"""
    model = MonotoneMlp.load(model_path)
    data = load_csv(data_path)
    scores = model.score(data)
    write_scores(np.arange(data.n_rows), scores, out)
    click.echo(f"Scored {data.n_rows} rows into {out}")
