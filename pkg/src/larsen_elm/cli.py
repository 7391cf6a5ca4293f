"""Command line entry point: ``larsen-elm {synth,bench,report}``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .bench import METHODS, ExperimentReport, ExperimentSpec, render_report, run_experiment
from .elm import ElmConfig
from .numerics import ContractError
from .pipeline import LarsenConfig


def _methods(text: str) -> tuple[str, ...]:
    out = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in out if m not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown methods {bad}; choose from {','.join(METHODS)}")
    return out


def _sigmas(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _add_common(p: argparse.ArgumentParser, default_methods: str) -> None:
    p.add_argument("--methods", type=_methods, default=_methods(default_methods),
                   help="comma-separated subset of " + ",".join(METHODS))
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden", type=int, default=50, help="hidden nodes per ELM")
    p.add_argument("--members", type=int, default=20, help="initial ensemble size")
    p.add_argument("--lambda", dest="lam", type=float, default=0.05,
                   help="GASEN weight threshold")
    p.add_argument("--generations", type=int, default=100)
    p.add_argument("--out", help="report path (JSON); .timing.json and .csv written alongside")
    p.add_argument("--format", choices=("text", "csv"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="larsen-elm", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="sum of two sines with blended Gaussian noise columns")
    synth.add_argument("--noise", choices=("none", "seven", "ten", "custom"), default="custom")
    synth.add_argument("--sigmas", type=_sigmas, default=(2.0,),
                       help="noise standard deviations for --noise custom (default: 2)")
    synth.add_argument("--predictions", help="write run-0 test-grid predictions to this CSV")
    _add_common(synth, "elm,larsen-elm")

    bench = sub.add_parser("bench", help="UCI-style regression benchmark")
    bench.add_argument("--dataset", default="boston", help="'boston' or a CSV path")
    bench.add_argument("--target", help="target column name for CSV datasets")
    bench.add_argument("--n-train", type=int, help="training rows (default: the standard size for known datasets, else 70%%)")
    bench.add_argument("--noise", choices=("none", "seven", "ten", "custom"), default="seven")
    bench.add_argument("--sigmas", type=_sigmas, default=())
    _add_common(bench, ",".join(METHODS))

    report = sub.add_parser("report", help="re-render saved JSON reports")
    report.add_argument("paths", nargs="+")
    report.add_argument("--format", choices=("text", "csv"), default="text")
    return parser


def _spec(args, dataset: str) -> ExperimentSpec:
    larsen = LarsenConfig(
        n_members=args.members,
        lam=args.lam,
        elm=ElmConfig(hidden_count=args.hidden),
    )
    larsen = replace(larsen, ga=replace(larsen.ga, generations=args.generations))
    return ExperimentSpec(
        dataset=dataset,
        noise=args.noise,
        sigmas=tuple(args.sigmas),
        methods=args.methods,
        runs=args.runs,
        seed=args.seed,
        larsen=larsen,
        target_column=getattr(args, "target", None),
        n_train=getattr(args, "n_train", None),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "report":
            reports = [ExperimentReport.load(p) for p in args.paths]
        else:
            dataset = "two_sines" if args.command == "synth" else args.dataset
            spec = _spec(args, dataset)
            report = run_experiment(spec, predictions_out=getattr(args, "predictions", None))
            if args.out:
                for path in report.save(args.out):
                    print(f"wrote {path}", file=sys.stderr)
            reports = [report]
        print(render_report(reports, args.format), end="")
    except (ContractError, OSError) as exc:
        print(f"larsen-elm: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
