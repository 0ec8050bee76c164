#!/usr/bin/env python3
"""
ScoreCraft - learn bounded, monotone scoring functions from expert constraints.

Builds the `scorecraft` command group and registers the subcommands.
"""

import logging
import os

import click
from dotenv import load_dotenv

from commands.ablate import ablate_cmd
from commands.evaluate import evaluate_cmd
from commands.report import report_cmd
from commands.score import score_cmd
from commands.synth import synth_cmd
from commands.train import train_cmd

__version__ = '1.0.0'

# Load environment variables (.env may set SCORECRAFT_LOG)
load_dotenv()

LOG_LEVELS = {
    'error': logging.ERROR,
    'info': logging.INFO,
    'debug': logging.DEBUG,
}

logger = logging.getLogger(__name__)


def configure_logging(level_name=None):
    """Root logging from SCORECRAFT_LOG (error|info|debug, default info)"""
    level_name = (level_name or os.environ.get('SCORECRAFT_LOG') or 'info').strip().lower()
    level = LOG_LEVELS.get(level_name)
    # rebind to the current stderr on every invocation
    logging.basicConfig(
        level=level or logging.INFO,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        force=True,
    )
    if level is None:
        logger.warning(f"Unknown SCORECRAFT_LOG value '{level_name}', using info")


@click.group()
@click.version_option(__version__, prog_name='scorecraft')
def app():
    """Train, score and evaluate constraint-driven scoring functions."""
    configure_logging()


app.add_command(synth_cmd)
app.add_command(train_cmd)
app.add_command(score_cmd)
app.add_command(evaluate_cmd)
app.add_command(report_cmd)
app.add_command(ablate_cmd)


if __name__ == '__main__':
    app()
