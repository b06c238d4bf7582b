"""Duty-cycle sweep orchestration: generate, acquire, reconstruct, tabulate.

A sweep writes one directory per point (state.json, counts.csv, recon.json)
plus a top-level sweep.csv whose rows carry the reconstructed metrics, their
bootstrap error bars, and the closed-form theory columns. Every point derives
its seed from (master seed, point index), and all files are written by the
coordinating process in point order, so output bytes do not depend on whether
points ran serially or in a process pool.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .counting import (
    _SWEEP_STREAM,
    AcquisitionConfig,
    derive_seed,
    simulate_counts,
    write_counts_csv,
)
from .errors import BellmixError, ConfigParse, InvalidConfig, OutOfRange
from .linalg import write_state_json
from .metrics import family_purity, family_tangle, family_visibility
from .optics import standard_projector_set
from .states import NoiseParams, SourceConfig, completely_mixed, generate, mix_duty_cycle
from .tomography import bootstrap_errors, mle_reconstruct, write_result_json

SWEEP_CSV_HEADER = (
    "alpha,visibility,tangle,purity,fidelity,"
    "visibility_err,tangle_err,purity_err,fidelity_err,"
    "theory_visibility,theory_tangle,theory_purity,source"
)


@dataclass(frozen=True)
class SweepSpec:
    """Grid of duty cycles plus acquisition, noise, and output settings."""

    alphas: tuple
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    noise: NoiseParams = field(default_factory=NoiseParams)
    outputs: str = "sweep_out"
    include_completely_mixed: bool = False
    resamples: int = 25

    def __post_init__(self) -> None:
        if not self.alphas:
            raise OutOfRange("sweep needs at least one alpha value")
        for alpha in self.alphas:
            if not 0.0 <= alpha <= 1.0:
                raise OutOfRange(f"sweep alpha {alpha!r} outside [0, 1]")
        if self.resamples < 0:
            raise OutOfRange(f"resamples must be >= 0, got {self.resamples}")

    @classmethod
    def from_json_dict(cls, data: dict) -> "SweepSpec":
        if not isinstance(data, dict):
            raise InvalidConfig(f"sweep spec must be a JSON object, got {type(data).__name__}")
        known = {"alphas", "acquisition", "noise", "outputs", "include_completely_mixed", "resamples"}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown sweep fields: {sorted(unknown)}")
        try:
            alphas = tuple(float(a) for a in data["alphas"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfig(f"sweep spec needs a numeric 'alphas' list: {exc}") from exc
        noise_data = data.get("noise", {})
        try:
            noise = NoiseParams(
                dephasing=float(noise_data.get("dephasing", 0.0)),
                depolarizing=float(noise_data.get("depolarizing", 0.0)),
            )
            acquisition = AcquisitionConfig.from_json_dict(data.get("acquisition", {}))
            return cls(
                alphas=alphas,
                acquisition=acquisition,
                noise=noise,
                outputs=str(data.get("outputs", "sweep_out")),
                include_completely_mixed=bool(data.get("include_completely_mixed", False)),
                resamples=int(data.get("resamples", 25)),
            )
        except (OutOfRange, TypeError, ValueError) as exc:
            raise InvalidConfig(str(exc)) from exc

    @classmethod
    def from_file(cls, path) -> "SweepSpec":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigParse(f"cannot read sweep spec {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigParse(f"sweep spec {path} is not valid JSON: line {exc.lineno}: {exc.msg}") from exc
        return cls.from_json_dict(data)


@dataclass
class SweepPoint:
    """One completed sweep point, ready to serialize."""

    directory: str
    alpha: float
    source: str
    state: object
    records: list
    result: object
    errors: dict | None
    theory: tuple


def _format(value) -> str:
    return repr(float(value))


def _point_task(args) -> SweepPoint:
    (index, alpha, source, pairs, accidental, master_seed, dephasing, depolarizing, resamples) = args
    try:
        return _run_point(index, alpha, source, pairs, accidental, master_seed,
                          dephasing, depolarizing, resamples)
    except BellmixError as exc:
        raise type(exc)(f"sweep point alpha={alpha:g} ({source}): {exc}") from exc


def _run_point(index, alpha, source, pairs, accidental, master_seed,
               dephasing, depolarizing, resamples) -> SweepPoint:
    noise = NoiseParams(dephasing=dephasing, depolarizing=depolarizing)
    if source == "two_vpr":
        config = SourceConfig(alpha=alpha, signal_dc=0.5, noise=noise)
        target = completely_mixed()
        description = "identity/4"
        theory = (0.0, 0.0, 0.25)
        directory = "completely_mixed"
    else:
        config = SourceConfig(alpha=alpha, noise=noise)
        target = mix_duty_cycle(alpha)
        description = f"duty-cycle mixture alpha={alpha:g}"
        theory = (family_visibility(alpha), family_tangle(alpha), family_purity(alpha))
        directory = f"alpha_{alpha:g}"

    acq = AcquisitionConfig(
        pairs_per_setting=pairs,
        accidental_rate=accidental,
        seed=derive_seed(master_seed, _SWEEP_STREAM, index),
    )
    pset = standard_projector_set()
    state = generate(config)
    records = simulate_counts(state, pset, acq)
    result = mle_reconstruct(records, pset, target=target, target_description=description)
    errors = None
    if resamples >= 2:
        errors = bootstrap_errors(result, pset, acq, resamples)
        result.metric_errors = errors
    return SweepPoint(
        directory=directory,
        alpha=alpha,
        source=source,
        state=state,
        records=records,
        result=result,
        errors=errors,
        theory=theory,
    )


def run_sweep(spec: SweepSpec, parallel: int = 0) -> str:
    """Execute the sweep and write all artifacts; returns the output directory."""
    tasks = [
        (
            index,
            float(alpha),
            "pump_vpr",
            spec.acquisition.pairs_per_setting,
            spec.acquisition.accidental_rate,
            spec.acquisition.seed,
            spec.noise.dephasing,
            spec.noise.depolarizing,
            spec.resamples,
        )
        for index, alpha in enumerate(spec.alphas)
    ]
    if spec.include_completely_mixed:
        tasks.append(
            (
                len(tasks),
                0.5,
                "two_vpr",
                spec.acquisition.pairs_per_setting,
                spec.acquisition.accidental_rate,
                spec.acquisition.seed,
                spec.noise.dephasing,
                spec.noise.depolarizing,
                spec.resamples,
            )
        )

    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            points = list(pool.map(_point_task, tasks))
    else:
        points = [_point_task(task) for task in tasks]

    outdir = spec.outputs
    os.makedirs(outdir, exist_ok=True)
    rows = [SWEEP_CSV_HEADER]
    for point in points:
        point_dir = os.path.join(outdir, point.directory)
        os.makedirs(point_dir, exist_ok=True)
        write_state_json(os.path.join(point_dir, "state.json"), point.state)
        write_counts_csv(os.path.join(point_dir, "counts.csv"), point.records)
        write_result_json(os.path.join(point_dir, "recon.json"), point.result)

        metrics = point.result.metrics
        errors = point.errors or {}
        row = [
            _format(point.alpha),
            _format(metrics.visibility),
            _format(metrics.tangle),
            _format(metrics.purity),
            _format(metrics.fidelity_to_target),
            _format(errors["visibility"]) if errors else "",
            _format(errors["tangle"]) if errors else "",
            _format(errors["purity"]) if errors else "",
            _format(errors["fidelity"]) if errors else "",
            _format(point.theory[0]),
            _format(point.theory[1]),
            _format(point.theory[2]),
            point.source,
        ]
        rows.append(",".join(row))

    csv_path = os.path.join(outdir, "sweep.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")
    return outdir


def load_sweep_csv(path) -> list[dict]:
    """Parse sweep.csv back into dictionaries keyed by the header columns."""
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    header = lines[0].split(",")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        entry = {}
        for key, value in zip(header, parts):
            if key == "source":
                entry[key] = value
            else:
                entry[key] = float(value) if value else None
        out.append(entry)
    return out
