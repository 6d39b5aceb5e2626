"""
Command-line front end:

    opsis riesz-check|frame-check|reconstruct|channel-demo|sweep --config <path> --out <dir> [--seed N]

Exit codes: 0 success, 2 not a Riesz sequence / not a frame,
3 invalid configuration, 4 non-finite numerical output.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from source.errors import NotAFrameError, NotRieszError, NumericalError, OpsisError
from source.models.experiment import Command
from source.results_store import ResultsStore
from source.services import config_service, experiment_service

logger = logging.getLogger(__name__)

EXIT_OK = 0


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="opsis",
        description="Sampling and reconstruction of operators in lattice-shift-invariant spaces.")
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--config", type=Path, required=True, help="Path to the experiment JSON config")
    parser.add_argument("--out", type=Path, required=True, help="Directory for metrics.json and CSV tables")
    parser.add_argument("--seed", type=int, default=None, help="Overrides the seed in the config")
    parser.add_argument("--timing", action="store_true", help="Include wall-clock timing in metrics.json")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for debug output")
    return parser.parse_args(argv)


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _error_section(err: OpsisError) -> dict:
    section = {"type": type(err).__name__, "message": str(err)}
    if isinstance(err, NotAFrameError):
        section["alpha_A"] = err.alpha_a
        if err.beta_a is not None:
            section["beta_A"] = err.beta_a
    if isinstance(err, NotRieszError):
        section.update({"m": err.lower, "M": err.upper})
    return section


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    _configure_logging(args.verbose)
    command = Command(args.command)
    store = ResultsStore()
    exit_code = EXIT_OK
    timing = {}

    try:
        config = config_service.load_config(args.config)
        with np.errstate(all="ignore"):
            timing = experiment_service.run(store, command, config, args.seed)
    except OpsisError as err:
        logger.warning("%s failed: %s", command.value, err)
        exit_code = err.exit_code
        if isinstance(err, NumericalError):
            store.clear_all()
        store.put_section("error", _error_section(err))
    except np.linalg.LinAlgError as err:
        logger.error("%s: linear algebra failure: %s", command.value, err)
        exit_code = NumericalError.exit_code
        store.put_section("error", {"type": "LinAlgError", "message": str(err)})

    try:
        store.write(args.out, store.report(command, exit_code, timing), include_timing=args.timing)
    except NumericalError as err:
        # A non-finite metric: keep the tables out and write the diagnostic alone.
        exit_code = err.exit_code
        store.clear_all()
        store.put_section("error", {"type": "NumericalError", "message": str(err)})
        store.write(args.out, store.report(command, exit_code))

    status = "OK" if exit_code == EXIT_OK else f"FAIL (exit {exit_code})"
    print(f"[opsis {command.value}] {status} -> {args.out}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
