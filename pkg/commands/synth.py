"""
synth: write the synthetic benchmark dataset as CSV.
"""

import click

from commands import handle_errors
from utils.dataset_service import SyntheticSpec, synth_generate, write_csv


@click.command('synth')
@click.option('--n', 'n_rows', type=click.IntRange(min=1), default=10000, show_default=True,
              help='Number of rows')
@click.option('--seed', type=int, default=42, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), required=True, help='CSV file to write')
@handle_errors
def synth_cmd(n_rows, seed, out):
    """Generate x1..x4 ~ N(10, 3) and y = x1 + 5*x2 + 15*x3 + x4^2"""
    data = synth_generate(SyntheticSpec(n=n_rows, seed=seed))
    write_csv(data, out)
    click.echo(f"Wrote {data.n_rows} rows to {out}")
