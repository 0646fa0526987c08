import argparse
import logging
import sys

from speclab.errors import ConfigError, DomainError, ReportIOError
from speclab.experiments import EXPERIMENT_REGISTRY, default_config, run_experiment
from speclab.special_functions import bessel_zero
from utils.config import EXPERIMENTS, load_config
from utils.report_io import emit_report

logger = logging.getLogger("speclab")

EXIT_OK = 0
EXIT_CLAIM_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speclab",
        description="Sup-norm growth experiments for Laplace eigenfunctions on flat model domains.",
    )
    parser.add_argument("experiment", nargs="?", choices=EXPERIMENTS + ("all",),
                        help="experiment to run, or 'all' for every default configuration")
    parser.add_argument("--config", help="JSON configuration of the experiment")
    parser.add_argument("--out", help="output directory (overrides the configuration)")
    parser.add_argument("--threads", type=int, help="worker threads (overrides the configuration)")
    parser.add_argument("--dump-bessel", nargs=2, type=int, metavar=("M", "K"),
                        help="print the first K positive zeros of J_M as m,k,location")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def dump_bessel(m: int, k: int) -> None:
    print("m,k,location")
    for index in range(1, k + 1):
        print(f"{m},{index},{bessel_zero(m, index).location:.15g}")


def run_one(config) -> bool:
    report = run_experiment(config)
    emit_report(report, config.out)
    for claim in report.claims:
        status = "PASS" if claim.passed else "FAIL"
        print(f"{status} {report.experiment}.{claim.name}: measured {claim.measured} "
              f"({claim.comparison} {claim.expected})")
    return report.passed


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        if args.dump_bessel:
            dump_bessel(*args.dump_bessel)
            return EXIT_OK
        if args.experiment is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        if args.experiment == "all":
            if args.config:
                raise ConfigError("'all' runs the built-in configurations; --config is not accepted")
            configs = [default_config(name) for name in EXPERIMENT_REGISTRY]
        else:
            if not args.config:
                raise ConfigError(f"{args.experiment} needs --config")
            config = load_config(args.config)
            if config.experiment != args.experiment:
                raise ConfigError(f"configuration is for {config.experiment!r}, not {args.experiment!r}")
            configs = [config]
        configs = [config.with_overrides(out=args.out, threads=args.threads) for config in configs]
        passed = [run_one(config) for config in configs]
    except (ConfigError, DomainError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except ReportIOError as exc:
        logger.error("%s", exc)
        return EXIT_IO
    return EXIT_OK if all(passed) else EXIT_CLAIM_FAILED


if __name__ == "__main__":
    sys.exit(main())
