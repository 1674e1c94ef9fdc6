"""Command line entry point: ``sigma-extrapolate <stage> --config experiments/<name>/config.toml``.

Exit codes: 0 success, 1 stage failure, 2 configuration error.
"""

import argparse
import logging
import sys
from pathlib import Path

from .config import RuntimeSettings, load_experiment
from .errors import ConfigError, StageError
from .pipeline import run_experiment
from .set_logging import configure_logging

logger = logging.getLogger(__name__)

STAGES = ["solve", "extrapolate", "cascade", "gp-baseline", "validate-params", "export-filter"]

EXIT_OK = 0
EXIT_STAGE_FAILED = 1
EXIT_CONFIG_ERROR = 2


def parse_arguments(argv=None):
    """Parse command line arguments."""
    settings = RuntimeSettings()
    parser = argparse.ArgumentParser(
        description="Sigma-multiplier extrapolation of Fourier data, multiresolution and GP baseline",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Experiment TOML file", type=Path, required=True)
    common.add_argument(
        "--seed",
        help="Override the experiment seed (SIGMA_SEED)",
        type=int,
        default=settings.seed,
    )
    common.add_argument(
        "--out",
        help="Override the output directory",
        type=Path,
        default=None,
    )
    common.add_argument("--verbose", help="Enable verbose logging", action="store_true")

    commands = parser.add_subparsers(dest="command", required=True)
    for stage in STAGES:
        commands.add_parser(
            stage,
            parents=[common],
            help=f"Run the {stage} stage",
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
    commands.add_parser(
        "run",
        parents=[common],
        help="Run every stage listed in the config pipeline",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_arguments(argv)
    settings = RuntimeSettings()
    configure_logging("DEBUG" if args.verbose else settings.log_level, settings.log_dir)

    try:
        config = load_experiment(args.config)
    except ConfigError as exc:
        logger.error("Invalid configuration: %s", exc)
        return EXIT_CONFIG_ERROR

    output_dir = args.out
    if output_dir is None and not config.outputs.directory.is_absolute():
        output_dir = settings.output_dir / config.outputs.directory
    config = config.with_overrides(seed=args.seed, output_dir=output_dir)
    stages = None if args.command == "run" else [args.command]
    logger.info("Experiment %s: stages %s", config.name, stages or config.pipeline)

    try:
        result = run_experiment(config, settings, stages)
    except StageError as exc:
        logger.error("Stage %s failed: %s", exc.stage, exc.cause)
        if isinstance(exc.cause, ConfigError):
            return EXIT_CONFIG_ERROR
        return EXIT_STAGE_FAILED
    except ConfigError as exc:
        logger.error("Invalid configuration: %s", exc)
        return EXIT_CONFIG_ERROR
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_STAGE_FAILED

    logger.info("Wrote %d artifacts, manifest %s", len(result.files), result.manifest)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
