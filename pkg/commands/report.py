"""
report: kernel density estimate of a scores file, as a grid,density CSV.
"""

import click

from commands import handle_errors
from utils.dataset_service import read_scores
from utils.evaluation_service import kde, write_kde_csv


@click.command('report')
@click.option('--scores', 'scores_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@click.option('--bandwidth', type=float, help="Kernel bandwidth; Silverman's rule when omitted")
@handle_errors
def report_cmd(scores_path, out, bandwidth):
    _, scores = read_scores(scores_path)
    curve = kde(scores, bandwidth)
    write_kde_csv(curve, out)
    click.echo(f"Density over {len(scores)} scores (bandwidth {curve.bandwidth:.6g}) written to {out}")
