#!/usr/bin/env python3
"""
Interactive config file builder for Integrable Lab.

Creates a JSON configuration file for one experiment, starting from the
defaults of its parameter schema.
"""

import argparse
import json
import sys
from pathlib import Path

from intlab import EXPERIMENT_PARAMS, ConfigError, validate_config


def parse_value(raw, default):
    """
    Read a typed answer: JSON when it parses, else the raw string.

    An empty answer keeps the default. Complex numbers are written as
    [re, im] pairs.
    """
    raw = raw.strip()
    if not raw:
        return default
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def prompt(label, default=None):
    """Prompt the user for a value shown with its default."""
    shown = json.dumps(default)
    return parse_value(input(f"  {label} [{shown}]: "), default)


def choose_experiment():
    names = sorted(EXPERIMENT_PARAMS)
    print("Which experiment?")
    for i, name in enumerate(names, 1):
        print(f"  {i:2d}. {name}")
    choice = input("  Choose [1]: ").strip()
    try:
        idx = int(choice) - 1 if choice else 0
        return names[idx]
    except (ValueError, IndexError):
        print(f"    Invalid choice. Using {names[0]}.")
        return names[0]


def build_config(experiment, params=None, output_path="results", seed=0):
    """
    Validated config dict for an experiment; params default to the schema.

    Raises:
        ConfigError: On unknown experiments or parameters
    """
    config = {
        "experiment": experiment,
        "params": dict(params or {}),
        "output_path": output_path,
        "seed": seed,
    }
    validate_config(json.loads(json.dumps(config)))
    return config


def main():
    parser = argparse.ArgumentParser(
        description="Interactively create an Integrable Lab configuration file.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Interactive mode
  python3 create_config.py

  # Template with all defaults, no questions asked
  python3 create_config.py --experiment qtm --defaults

  # Specify output config path
  python3 create_config.py --experiment toda --output configs/toda-hbar2.json
        """
    )

    parser.add_argument("--experiment", choices=sorted(EXPERIMENT_PARAMS), help="Experiment name")
    parser.add_argument("--output", help="Output config file path (default: configs/<experiment>.json)")
    parser.add_argument("--defaults", action="store_true", help="Write the schema defaults without prompting")

    args = parser.parse_args()

    print("=== Integrable Lab Config Builder ===\n")

    experiment = args.experiment or choose_experiment()
    schema = EXPERIMENT_PARAMS[experiment]
    print(f"  Experiment: {experiment}\n")

    params = dict(schema)
    output_path, seed = "results", 0
    if not args.defaults:
        print("=== Parameters ===")
        params = {key: prompt(key, default) for key, default in schema.items()}
        print()
        print("=== Options ===")
        output_path = prompt("Output directory", output_path)
        seed = prompt("Seed", seed)

    try:
        config = build_config(experiment, params, output_path, seed)
    except ConfigError as e:
        print(f"Error: {e}")
        sys.exit(1)

    out_file = Path(args.output) if args.output else Path("configs") / f"{experiment}.json"
    out_file.parent.mkdir(parents=True, exist_ok=True)

    if out_file.exists() and not args.defaults:
        overwrite = input(f"\n  {out_file} already exists. Overwrite? [y/N]: ").strip().lower()
        if overwrite != 'y':
            print("Aborted.")
            sys.exit(0)

    with open(out_file, 'w', encoding='utf-8') as f:
        json.dump(config, f, indent=2, ensure_ascii=False)
        f.write("\n")

    print(f"\n=== Config saved to {out_file} ===")
    print(f"\nTo run it:")
    print(f"  python3 integrable_lab.py --config {out_file}")


if __name__ == "__main__":
    main()
