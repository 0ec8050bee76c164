"""
Subcommands of the scorecraft CLI, one module per command.

Library errors are turned into a message on stderr and the error's exit
code (2 for usage and validation problems, 3 for numerical divergence).
"""

import functools
import json
from pathlib import Path

import click

from utils.errors import ScoreCraftError


def handle_errors(command):
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ScoreCraftError as e:
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(e.exit_code)
        except OSError as e:
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(2)
    return wrapper


def write_json(payload, path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + '\n', encoding='utf-8')
