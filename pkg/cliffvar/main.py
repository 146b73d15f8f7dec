"""
Command-line entry point.

    cliffvar run <config.json> --out <dir> [--threads N] [--seed S]
    cliffvar validate <config.json>
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from cliffvar import __version__
from cliffvar.config import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_RUNTIME_ERROR, LOG_CONFIG, LOG_PATH
from cliffvar.errors import CliffvarError, ConfigError
from cliffvar.experiments.config import ExperimentConfig
from cliffvar.experiments.runner import ExperimentRunner

logger = logging.getLogger(__name__)


def setup_logging(level: Optional[str] = None) -> None:
    """Log to LOG_PATH/cliffvar.log and stdout."""
    os.makedirs(LOG_PATH, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, (level or LOG_CONFIG["level"]).upper(), logging.INFO),
        format=LOG_CONFIG["format"],
        handlers=[
            logging.FileHandler(os.path.join(LOG_PATH, LOG_CONFIG["filename"])),
            logging.StreamHandler(sys.stdout),
        ],
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cliffvar",
        description="Clifford-approximant estimates of gradient statistics for random parameterized circuits",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Override CLIFFVAR_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run an experiment configuration")
    run.add_argument("config", help="Path to the experiment JSON document")
    run.add_argument("--out", default=None, help="Output directory for CSV and summary JSON")
    run.add_argument("--threads", type=int, default=None, help="Worker processes for sample batches")
    run.add_argument("--seed", type=int, default=None, help="Override the master seed")

    validate = commands.add_parser("validate", help="Check an experiment configuration without running it")
    validate.add_argument("config", help="Path to the experiment JSON document")
    return parser


def load_config(path: str, seed: Optional[int] = None, threads: Optional[int] = None) -> ExperimentConfig:
    """Load a configuration and apply command-line overrides."""
    config = ExperimentConfig.load(path)
    if seed is not None:
        config.seed = seed
    if threads is not None:
        config.workers = threads
    config.validate()
    return config


def cmd_validate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    print(json.dumps(config.to_dict(), indent=2, default=str))
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config, seed=args.seed, threads=args.threads)
    runner = ExperimentRunner(config, output_dir=args.out)
    runner.run()
    paths = runner.export_results()
    for name, path in paths.items():
        logger.info(f"Wrote {name}: {path}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    handlers = {"run": cmd_run, "validate": cmd_validate}
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return EXIT_RUNTIME_ERROR
    except CliffvarError as e:
        logger.error(f"Run failed: {e}")
        return EXIT_RUNTIME_ERROR
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
