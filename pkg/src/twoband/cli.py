"""Command line entry point: ``twoband {run,sweep,regime,hsa-check}``.

Exit codes: 0 success, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import hsa
from .experiments import (
    RunConfig, run_hsa_check, run_regime, run_single, run_sweep, with_overrides,
)

EXIT_USAGE = 2
EXIT_IO = 3

# flag dest -> RunConfig field
_FLAG_FIELDS = {
    "n1": "n_upper",
    "n0": "n_lower",
    "spacing_upper": "spacing_upper",
    "spacing_lower": "spacing_lower",
    "coupling": "coupling",
    "seed": "seed",
    "seeds": "n_seeds",
    "t_max": "t_max",
    "samples": "n_samples",
    "out": "out",
    "sizes": "sizes",
    "tau": "tau",
    "p_ex": "p_ex",
    "hsa_samples": "hsa_samples",
    "workers": "workers",
}


def _sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file mirroring RunConfig; flags override it")
    common.add_argument("--n1", type=int, help="upper-band size")
    common.add_argument("--n0", type=int, help="lower-band size (default n1/2)")
    common.add_argument("--spacing-upper", type=float)
    common.add_argument("--spacing-lower", type=float)
    common.add_argument("--coupling", type=float, help="RMS coupling element lambda")
    common.add_argument("--complex-coupling", action="store_true", default=None)
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--seeds", type=int, help="number of seeds")
    common.add_argument("--t-max", type=float)
    common.add_argument("--samples", type=int, help="time samples per trajectory")
    common.add_argument("--out", help="output directory")
    common.add_argument("--sizes", type=_sizes, help="comma-separated n1 values for sweep")
    common.add_argument("--tau", type=float, help="step length for hsa-check")
    common.add_argument("--p-ex", type=float, help="fixed excitation probability for hsa-check")
    common.add_argument("--hsa-samples", type=int, help="Monte-Carlo samples for hsa-check")
    common.add_argument("--workers", type=int, help="parallel processes for sweep")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="twoband",
        description="Two-level system coupled to a two-band environment.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    sub.add_parser("run", parents=[common], help="single relaxation run(s)")
    sub.add_parser("sweep", parents=[common], help="container-size convergence sweep")
    sub.add_parser("regime", parents=[common], help="print parameter-validity report")
    sub.add_parser("hsa-check", parents=[common], help="Monte-Carlo Hilbert-average check")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    data["kind"] = args.kind
    config = RunConfig.from_dict(data)
    overrides = {field: getattr(args, flag) for flag, field in _FLAG_FIELDS.items()}
    overrides["complex_coupling"] = args.complex_coupling
    return with_overrides(config, **overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if config.kind == "regime":
            print(json.dumps(run_regime(config), indent=2, sort_keys=True))
        elif config.kind == "hsa-check":
            print(json.dumps(run_hsa_check(config), indent=2, sort_keys=True))
        elif config.kind == "run":
            report = hsa.regime_report(config.model_params())
            print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
            for path in run_single(config):
                print(path)
        else:
            summary = run_sweep(config)
            for size in summary["sizes"]:
                row = summary["per_size"][str(size)]
                print(f"n1={size:5d}  mean max|dp_gr|={row['mean_max_dev_p_gr']:.4f}  "
                      f"rate={row['mean_fitted_rate']:.5g} (theory {row['theory_rate']:.5g})")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
