"""
Run orchestration: single runs and parameter sweeps.
"""

import copy
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from numbers import Number
from pathlib import Path

from .errors import ConfigError, IntlabError, ToleranceError
from .experiments import run_experiment
from .report_generator import build_provenance, write_results

try:
    from tqdm import tqdm
    TQDM_AVAILABLE = True
except ImportError:
    TQDM_AVAILABLE = False

logger = logging.getLogger(__name__)

# Summary entry whose decrease along a sweep is flagged in the 'monotone' column
SWEEP_HEADLINES = {
    "gsk": "error_x",
    "cshift": "diff_x",
    "toeplitz": "gain",
    "sinh": "diff_N",
    "qtm": "free_energy",
}


@dataclass(frozen=True)
class RunOutcome:
    result: object
    paths: tuple
    exit_code: int


@dataclass(frozen=True)
class SweepOutcome:
    statuses: tuple
    paths: tuple
    exit_code: int


def _summary_payload(result):
    return {
        "experiment": result.experiment,
        "summary": result.summary,
        "flags": list(result.flags),
        "checks": [
            {"quantity": c.quantity, "value": c.value, "bound": c.bound, "passed": c.passed}
            for c in result.checks
        ],
    }


def _guard_config(config_path, out_dir, stems):
    """Raise ConfigError if any result file would land on the config file."""
    if config_path is None:
        return
    source = Path(config_path).resolve()
    for stem in stems:
        for suffix in (".csv", ".json"):
            if (Path(out_dir) / f"{stem}{suffix}").resolve() == source:
                raise ConfigError(f"Results would overwrite the config {config_path}; "
                                  "choose another output directory")


def run(config, check=False, out_dir=None, stem=None, config_path=None):
    """
    Run the experiment of a validated config and write its results.

    Args:
        config: Validated config dict
        check: Raise ToleranceError on the first failed comparison
        out_dir: Output directory (default: config output_path)
        stem: Output file stem (default: experiment name)
        config_path: Source file of the config, never overwritten

    Returns:
        RunOutcome

    Raises:
        IntlabError subclasses from the solvers; ToleranceError in check mode
    """
    name = config["experiment"]
    out_dir = out_dir or config["output_path"]
    _guard_config(config_path, out_dir, [stem or name])
    result = run_experiment(name, config["params"], seed=config["seed"], tolerances=config["tolerances"])
    provenance = build_provenance(config, result.flags)
    paths = write_results(result.rows, _summary_payload(result), out_dir, stem or name, provenance)
    if paths is None:
        raise IntlabError(f"Could not write results for '{name}'")
    for c in result.checks:
        logger.info(f"  {c.quantity}: {c.value:.3e} (bound {c.bound:.1e}) {'ok' if c.passed else 'FAILED'}")
    if check and result.failed:
        first = result.failed[0]
        raise ToleranceError(first.quantity, first.value, first.bound)
    return RunOutcome(result=result, paths=paths, exit_code=0)


def _sweep_point(index, config, check, out_dir, stem):
    """One sweep value, run in a worker; never raises."""
    try:
        outcome = run(config, check=check, out_dir=out_dir, stem=stem)
        return index, "ok", 0, outcome.result
    except IntlabError as e:
        return index, f"{type(e).__name__}: {e}", e.exit_code, None


def _sub_config(config, parameter, value):
    sub = copy.deepcopy(config)
    sub["params"][parameter] = value
    sub["sweep"] = None
    return sub


def _aggregate_row(parameter, value, status, code, result):
    row = {parameter: value, "status": status, "exit_code": code}
    if result is None:
        return row
    for key, entry in result.summary.items():
        if isinstance(entry, Number) or isinstance(entry, str):
            row[key] = entry
    for c in result.checks:
        row[f"check_{c.quantity}"] = c.passed
    return row


def sweep(config, parameter=None, values=None, workers=1, check=False, out_dir=None, progress=True,
          config_path=None):
    """
    One independent sub-run per value, aggregated in value order.

    Args:
        config: Validated config dict; its 'sweep' entry supplies the
            parameter and values unless given explicitly
        parameter: Params key to vary
        values: Values to substitute
        workers: Process pool size (serial when 1)
        check: Check mode for every sub-run
        out_dir: Output directory
        progress: Show a tqdm bar when available
        config_path: Source file of the config, never overwritten

    Returns:
        SweepOutcome with per-value status and the highest exit code

    Raises:
        ConfigError: For an unknown parameter or an empty value list, or when a result file
            would overwrite config_path
    """
    spec = config.get("sweep") or {}
    parameter = parameter or spec.get("parameter")
    values = list(values if values is not None else spec.get("values") or [])
    if parameter not in config["params"]:
        raise ConfigError(f"Sweep parameter '{parameter}' is not a '{config['experiment']}' param")
    if not values:
        raise ConfigError("Sweep value list is empty")

    name = config["experiment"]
    out_dir = out_dir or config["output_path"]
    jobs = [(k, _sub_config(config, parameter, v), check, out_dir, f"{name}_{parameter}_{k:03d}")
            for k, v in enumerate(values)]
    _guard_config(config_path, out_dir, [job[4] for job in jobs] + [f"{name}_{parameter}_sweep"])
    logger.info(f"=== Sweeping {parameter} over {len(values)} values ({workers} workers) ===")

    collected = [None] * len(values)
    use_bar = progress and TQDM_AVAILABLE
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_point, *job) for job in jobs]
            iterator = tqdm(futures, desc=f"{name} sweep", unit="run") if use_bar else futures
            for future in iterator:
                index, status, code, result = future.result()
                collected[index] = (status, code, result)
    else:
        iterator = tqdm(jobs, desc=f"{name} sweep", unit="run") if use_bar else jobs
        for job in iterator:
            index, status, code, result = _sweep_point(*job)
            collected[index] = (status, code, result)

    rows = [_aggregate_row(parameter, v, *entry) for v, entry in zip(values, collected)]
    headline = SWEEP_HEADLINES.get(name)
    if headline:
        previous = None
        for row in rows:
            current = row.get(headline)
            row["monotone"] = previous is None or (current is not None and abs(current) < abs(previous))
            previous = current
    for value, (status, code, _) in zip(values, collected):
        if code:
            logger.error(f"Sweep value {parameter}={value} failed: {status}")

    exit_code = max(code for _, code, _ in collected)
    summary = {
        "experiment": name, "parameter": parameter, "values": values,
        "statuses": [status for status, _, _ in collected], "exit_code": exit_code,
    }
    flags = sorted({f for _, _, r in collected if r is not None for f in r.flags})
    paths = write_results(rows, summary, out_dir, f"{name}_{parameter}_sweep", build_provenance(config, flags))
    return SweepOutcome(statuses=tuple(summary["statuses"]), paths=paths or (), exit_code=exit_code)
