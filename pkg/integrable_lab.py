#!/usr/bin/env python3
"""
Run one integrable-model experiment (or a sweep of it) from a JSON config.

Results go to <output_path>/<experiment>.csv and .json, each carrying a
provenance header. Exit status: 0 success, 1 config/domain error,
2 solver non-convergence, 3 tolerance failure in --check mode.
"""

import argparse
import json
import sys

from intlab import (
    IntlabError,
    ConfigError,
    setup_logging,
    load_config,
    validate_config,
    default_workers,
    run,
    sweep,
)


def parse_values(raw):
    """JSON list of sweep values, e.g. '[100, 200, 400]'."""
    try:
        values = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(f"--values: invalid JSON at column {e.colno}: {e.msg}")
    if not isinstance(values, list):
        raise ConfigError("--values must be a JSON list")
    return values


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Numerical experiments on quantum integrable models with brute-force checks.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Restricted sum identity, brute force against closed form
  python3 integrable_lab.py --config configs/sumid.json

  # XXZ free energy from the NLIE, checked against exact diagonalization
  python3 integrable_lab.py --config configs/qtm.json --check

  # Sweep x for the c-shifted factorization on 4 workers
  python3 integrable_lab.py --config configs/cshift.json --sweep x --values "[50, 100, 200]" --workers 4

Create a config file interactively:
  python3 create_config.py
        """
    )

    parser.add_argument("--config", required=True, help="Path to JSON configuration file")
    parser.add_argument("--check", action="store_true", help="Exit 3 when a comparison exceeds its tolerance")
    parser.add_argument("--out", help="Output directory (overrides output_path)")
    parser.add_argument("--seed", type=int, help="Random seed (overrides the config seed)")
    parser.add_argument("--workers", type=int, help="Sweep worker processes (default: INTLAB_WORKERS or 1)")
    parser.add_argument("--sweep", metavar="PARAM", help="Sweep this params key")
    parser.add_argument("--values", help="JSON list of values for --sweep")
    parser.add_argument("--verbose", action="store_true", help="Enable verbose output (DEBUG level)")
    parser.add_argument("--quiet", action="store_true", help="Suppress all output except errors")
    parser.add_argument("--no-progress", action="store_true", help="Disable progress bar (useful for logging)")

    cli_args = parser.parse_args()

    logger = setup_logging(verbose=cli_args.verbose, quiet=cli_args.quiet)

    try:
        logger.info(f"Loading configuration from {cli_args.config}")
        config = load_config(cli_args.config)
        if cli_args.seed is not None:
            config["seed"] = cli_args.seed
        if cli_args.sweep:
            if cli_args.values is None:
                raise ConfigError("--sweep needs --values")
            config["sweep"] = {"parameter": cli_args.sweep, "values": parse_values(cli_args.values)}
        config = validate_config(config)
        workers = cli_args.workers if cli_args.workers is not None else default_workers()
        if workers < 1:
            raise ConfigError(f"--workers must be positive, got {workers}")
    except ConfigError as e:
        logger.error(str(e))
        sys.exit(e.exit_code)

    out_dir = cli_args.out or config["output_path"]
    experiment = config["experiment"]
    show_progress = not cli_args.no_progress and not cli_args.quiet and not cli_args.verbose

    if config["sweep"] is not None:
        try:
            outcome = sweep(config, workers=workers, check=cli_args.check, out_dir=out_dir,
                            progress=show_progress, config_path=cli_args.config)
        except IntlabError as e:
            logger.error(str(e))
            sys.exit(e.exit_code)
        failed = sum(1 for status in outcome.statuses if status != "ok")
        logger.info(f"=== Sweep finished: {len(outcome.statuses) - failed} ok, {failed} failed ===")
        if outcome.paths:
            logger.info(f"Aggregated results: {outcome.paths[0]}")
        sys.exit(outcome.exit_code)

    logger.info(f"=== Running {experiment} ===")
    try:
        outcome = run(config, check=cli_args.check, out_dir=out_dir, config_path=cli_args.config)
    except IntlabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.exit(e.exit_code)

    logger.info(f"=== {experiment} complete ===")
    for path in outcome.paths:
        logger.info(f"Output: {path}")
    if outcome.result.flags:
        logger.warning(f"Assumption flags: {', '.join(outcome.result.flags)}")
