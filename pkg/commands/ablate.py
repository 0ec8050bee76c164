"""
ablate: train and evaluate every loss combination, with and without
monotone weights, across one or more seeds.
"""

import click

from commands import handle_errors
from utils.ablation_service import run_ablation
from utils.constraint_config import load_config
from utils.dataset_service import load_csv
from utils.evaluation_service import write_reports


def parse_seeds(ctx, param, value):
    if value is None:
        return None
    try:
        seeds = [int(part) for part in value.split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter('expected a comma-separated list of integers') from None
    if not seeds:
        raise click.BadParameter('at least one seed is required')
    return seeds


@click.command('ablate')
@click.option('--data', 'data_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@click.option('--seeds', callback=parse_seeds, help='Comma-separated seeds, e.g. 1,2,3 (default: config seed)')
@click.option('--truth', help="Ground-truth column (default: the config's label when present)")
@click.option('--study', type=click.Choice(['losses', 'sensitivity']), default='losses', show_default=True)
@click.option('--epochs', type=click.IntRange(min=1), help='Override the configured epoch count')
@click.option('--workers', type=click.IntRange(min=1), default=1, show_default=True)
@handle_errors
def ablate_cmd(data_path, config_path, out, seeds, truth, study, epochs, workers):
    """Write one metrics row per case and seed as a JSON array"""
    constraints = load_config(config_path)
    data = load_csv(data_path)
    if truth is None and constraints.label in data.feature_names:
        truth = constraints.label
    reports = run_ablation(data, constraints, seeds or [constraints.train.seed], truth=truth,
                           study=study, epochs=epochs, workers=workers)
    write_reports(reports, out)
    click.echo(f"Wrote {len(reports)} rows to {out}")
