#!/usr/bin/env python3
"""
Script to export the shipped constraint presets as editable JSON files
"""

import os
import sys

# Add the project root to Python path
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, BASE_DIR)

from utils.constraint_config import serialize_config
from utils.presets import PRESETS, preset


def export_presets(out_dir):
    """Write <name>.json for every preset into out_dir"""
    os.makedirs(out_dir, exist_ok=True)
    for name in PRESETS:
        path = os.path.join(out_dir, f"{name}.json")
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(serialize_config(preset(name)) + '\n')
        print(f"Exported preset: {name} -> {path}")
    print(f"Exported {len(PRESETS)} presets")


if __name__ == '__main__':
    export_presets(sys.argv[1] if len(sys.argv) > 1 else os.path.join(BASE_DIR, 'configs'))
