"""Command-line entry point: ``qcspectra <command> --config <file.json>``."""

import argparse
import sys

from .errors import ConfigError, FactorizationError, PreconditionError, QCSpectraError
from .experiments import COMMANDS, ExperimentConfig, load_config, run

# errors that signal an invalid request rather than a failed check
USAGE_ERRORS = (ConfigError, PreconditionError, FactorizationError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcspectra",
        description="Spectral analysis and verification sweeps for linearized QCF operators.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON experiment config; defaults are used when omitted")
    parser.add_argument("--out", help="output directory (overrides output_path)")
    parser.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    parser.add_argument("--seed", type=int, help="seed for random masks and right-hand sides")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.workers < 1:
            raise ConfigError(f"--workers must be >= 1, got {args.workers}")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if args.config:
            cfg = load_config(args.config)
            if cfg.command != args.command:
                raise ConfigError(
                    f"config is for {cfg.command!r} but the command line asks for {args.command!r}"
                )
        else:
            cfg = ExperimentConfig(args.command)
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.validate()
        code = run(cfg, args.out, args.workers)
    except USAGE_ERRORS as exc:
        print(f"qcspectra: error: {exc}", file=sys.stderr)
        return 2
    except QCSpectraError as exc:
        print(f"qcspectra: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    out = args.out or cfg.output_path
    print(f"qcspectra {args.command}: {'all checks passed' if code == 0 else 'some checks FAILED'} "
          f"(reports in {out})")
    return code


if __name__ == "__main__":
    sys.exit(main())
