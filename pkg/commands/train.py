"""
train: fit the scoring network on a CSV file under a constraint config.
"""

import logging
from pathlib import Path

import click

from commands import handle_errors, write_json
from utils.constraint_config import load_config
from utils.dataset_service import label_column, load_csv
from utils.training_service import run_pipeline

logger = logging.getLogger(__name__)


def report_path(model_path) -> Path:
    """model.json -> model.report.json"""
    return Path(model_path).with_suffix('.report.json')


@click.command('train')
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--data', 'data_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--out-model', type=click.Path(dir_okay=False), required=True)
@click.option('--supervised', is_flag=True, help='Regress on the --label column instead of the constraints')
@click.option('--label', help='Ground-truth column for --supervised')
@click.option('--no-monotone', is_flag=True, help='Use raw weights instead of exp(log-weights)')
@click.option('--epochs', type=click.IntRange(min=1), help='Override the configured epoch count')
@click.option('--seed', type=int, help='Override the configured seed')
@handle_errors
def train_cmd(config_path, data_path, out_model, supervised, label, no_monotone, epochs, seed):
    """Normalize, split 70/30 with the training seed, train, and save model plus report"""
    if supervised and not label:
        raise click.UsageError('--supervised requires --label')

    constraints = load_config(config_path)
    data = load_csv(data_path)
    cfg = constraints.train.with_overrides(epochs=epochs, seed=seed, monotone=False if no_monotone else None)
    labels = label_column(data, label) if supervised else None

    run = run_pipeline(data, constraints, cfg, labels=labels, supervised=supervised)
    run.model.save(out_model)
    write_json(run.report.to_dict(), report_path(out_model))
    click.echo(f"Trained for {cfg.epochs} epochs: loss {run.report.initial_loss:.6g} -> "
               f"{run.report.final_loss:.6g}; model written to {out_model}")
