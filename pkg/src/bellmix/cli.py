"""Command-line front end.

Subcommands: generate, simulate, reconstruct, metrics, sweep, paper-fixtures.
Exit codes: 0 success, 2 configuration error, 3 data error, 4 reconstruction
did not converge. The BELLMIX_SEED environment variable overrides any
configured or flagged seed.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys
from dataclasses import replace

from . import fixtures
from .counting import (
    AcquisitionConfig,
    counts_to_csv,
    read_counts_csv,
    read_counts_json,
    simulate_counts,
    write_counts_csv,
    write_counts_json,
)
from .errors import (
    BellmixError,
    ConfigParse,
    DataParse,
    IndexOutOfRange,
    InvalidConfig,
    InvalidState,
    MismatchedData,
    NoCounts,
    NonHermitianInput,
    NotNormalized,
    OutOfRange,
    ZeroTrace,
)
from .linalg import matrix_to_json_dict, read_state_json
from .metrics import report_for, write_metrics_json
from .optics import read_projector_set_json, standard_projector_set, write_projector_set_json
from .states import SourceConfig, generate, mix_duty_cycle
from .sweep import SweepSpec, run_sweep
from .tomography import (
    bootstrap_errors,
    mle_reconstruct,
    read_result_json,
    result_to_json_dict,
)

_CONFIG_ERRORS = (ConfigParse, InvalidConfig, OutOfRange, NotNormalized)
_DATA_ERRORS = (
    DataParse,
    MismatchedData,
    NoCounts,
    IndexOutOfRange,
    NonHermitianInput,
    InvalidState,
    ZeroTrace,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NO_CONVERGENCE = 4


def _effective_seed(flag_seed, config_seed: int) -> int:
    env = os.environ.get("BELLMIX_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise InvalidConfig(f"BELLMIX_SEED must be an integer, got {env!r}") from exc
    if flag_seed is not None:
        return int(flag_seed)
    return int(config_seed)


def _load_source_config(path) -> SourceConfig:
    if path is None:
        return SourceConfig()
    return SourceConfig.from_file(path)


def _emit_json(data: dict, out_path) -> None:
    text = json.dumps(data, indent=2) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_generate(args) -> int:
    config = _load_source_config(args.config)
    rho = generate(config)
    _emit_json(matrix_to_json_dict(rho.matrix), args.out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    config = _load_source_config(args.config)
    acq = AcquisitionConfig(
        pairs_per_setting=args.pairs,
        accidental_rate=args.accidentals,
        seed=_effective_seed(args.seed, 0),
    )
    pset = standard_projector_set()
    records = simulate_counts(generate(config), pset, acq)
    if args.out is None:
        sys.stdout.write(counts_to_csv(records))
    elif args.out.endswith(".json"):
        write_counts_json(args.out, records)
    else:
        write_counts_csv(args.out, records)
    if args.projectors_out is not None:
        write_projector_set_json(args.projectors_out, pset)
    return EXIT_OK


def _read_counts(path):
    if str(path).endswith(".json"):
        return read_counts_json(path)
    return read_counts_csv(path)


def _resolve_target(args):
    if getattr(args, "target", None) is not None:
        return read_state_json(args.target), f"state file {args.target}"
    if getattr(args, "alpha", None) is not None:
        return mix_duty_cycle(args.alpha), f"duty-cycle mixture alpha={args.alpha:g}"
    return None, None


def _cmd_reconstruct(args) -> int:
    records = _read_counts(args.counts)
    pset = (
        read_projector_set_json(args.projectors)
        if args.projectors is not None
        else standard_projector_set()
    )
    target, description = _resolve_target(args)
    result = mle_reconstruct(
        records,
        pset,
        max_iterations=args.max_iterations,
        tolerance=args.tolerance,
        dilution=args.dilution,
        target=target,
        target_description=description or "self",
    )
    if args.resamples >= 2:
        totals = [sum(record.outcome_counts) for record in records]
        acq = AcquisitionConfig(
            pairs_per_setting=max(1.0, sum(totals) / len(totals)),
            seed=_effective_seed(args.seed, 0),
        )
        result.metric_errors = bootstrap_errors(result, pset, acq, args.resamples)
    _emit_json(result_to_json_dict(result), args.out)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def _cmd_metrics(args) -> int:
    rho = read_state_json(args.state)
    target, description = _resolve_target(args)
    report = report_for(rho, target=target, target_description=description or "self")
    if args.out is None:
        _emit_json(report.to_json_dict(), None)
    else:
        write_metrics_json(args.out, report)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = SweepSpec.from_file(args.spec)
    acq = spec.acquisition
    if args.pairs is not None:
        acq = replace(acq, pairs_per_setting=args.pairs)
    acq = replace(acq, seed=_effective_seed(args.seed, acq.seed))
    spec = replace(
        spec,
        acquisition=acq,
        outputs=args.out if args.out is not None else spec.outputs,
        resamples=args.resamples if args.resamples is not None else spec.resamples,
    )
    outdir = run_sweep(spec, parallel=args.parallel)
    converged = True
    for recon_path in sorted(glob.glob(os.path.join(outdir, "*", "recon.json"))):
        converged &= read_result_json(recon_path).converged
    print(f"sweep written to {outdir}")
    return EXIT_OK if converged else EXIT_NO_CONVERGENCE


def _cmd_paper_fixtures(args) -> int:
    seed = _effective_seed(args.seed, 7)
    checks = fixtures.run_fixture_checks(pairs_per_setting=args.pairs, seed=seed)
    for check in checks:
        print(check.describe())
    return EXIT_OK if all(check.passed for check in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellmix",
        description=(
            "Simulate a duty-cycled two-photon mixed-state source, run the "
            "36-outcome tomography, reconstruct by maximum likelihood, and "
            "compute figures of merit."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit the configured source state as matrix JSON")
    p.add_argument("--config", help="source config JSON (defaults apply if omitted)")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("simulate", help="simulate coincidence counts for the configured state")
    p.add_argument("--config", help="source config JSON")
    p.add_argument("--pairs", type=float, default=1e5, help="mean detected pairs per setting")
    p.add_argument("--accidentals", type=float, default=0.0, help="flat accidental mean per outcome")
    p.add_argument("--seed", type=int, default=None, help="simulation seed")
    p.add_argument("--out", help="counts file (.csv or .json; stdout CSV if omitted)")
    p.add_argument("--projectors-out", help="also write the projector set JSON here")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("reconstruct", help="maximum-likelihood reconstruction from counts")
    p.add_argument("counts", help="counts file (.csv or .json)")
    p.add_argument("--projectors", help="projector set JSON (bundled standard set if omitted)")
    p.add_argument("--target", help="target state JSON for the fidelity metric")
    p.add_argument("--alpha", type=float, help="use the duty-cycle mixture at this alpha as target")
    p.add_argument("--max-iterations", type=int, default=10000)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--dilution", type=float, default=1.0)
    p.add_argument("--resamples", type=int, default=0, help="bootstrap resamples (0 disables)")
    p.add_argument("--seed", type=int, default=None, help="bootstrap seed")
    p.add_argument("--out", help="result JSON path (stdout if omitted)")
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("metrics", help="figures of merit of a stored state")
    p.add_argument("--state", required=True, help="state JSON file")
    p.add_argument("--target", help="target state JSON for fidelity")
    p.add_argument("--alpha", type=float, help="use the duty-cycle mixture at this alpha as target")
    p.add_argument("--out", help="metrics JSON path (stdout if omitted)")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("sweep", help="run a duty-cycle sweep from a spec file")
    p.add_argument("--spec", required=True, help="sweep spec JSON")
    p.add_argument("--out", help="output directory (overrides spec)")
    p.add_argument("--seed", type=int, default=None, help="master seed (overrides spec)")
    p.add_argument("--pairs", type=float, default=None, help="pairs per setting (overrides spec)")
    p.add_argument("--resamples", type=int, default=None, help="bootstrap resamples (overrides spec)")
    p.add_argument("--parallel", type=int, default=0, help="worker processes (0/1 = serial)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("paper-fixtures", help="check the bundled reference fixtures")
    p.add_argument("--pairs", type=float, default=1e5, help="pairs per setting for the band check")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_paper_fixtures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BellmixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
