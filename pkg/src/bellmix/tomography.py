"""Maximum-likelihood reconstruction from 36-outcome coincidence counts.

The estimator is the diluted fixed-point iteration: with R(rho) built from the
count-weighted projectors, the update

    rho <- N[(1 + eps R) rho (1 + eps R)]

never leaves the physical cone, fixes exactly the likelihood maximizers, and
with dilution (halving eps whenever a step would lower the likelihood) is
monotone. The per-setting count totals are treated as fixed normalizations,
so only the within-setting Born probabilities enter the likelihood.

Error bars are parametric bootstrap: resimulate counts from the estimate,
re-reconstruct, and take the sample standard deviation of each metric over
the resamples. Every resample has a derived seed, so the result is
deterministic and independent of any parallel schedule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .counting import (
    _BOOTSTRAP_STREAM,
    AcquisitionConfig,
    derive_seed,
    simulate_counts,
    validate_against,
)
from .errors import DataParse, NoCounts
from .linalg import (
    DensityMatrix,
    hermitize,
    matrix_from_json_dict,
    matrix_to_json_dict,
)
from .metrics import MetricsReport, report_for
from .optics import ProjectorSet

PROBABILITY_FLOOR = 1e-15

_METRIC_NAMES = ("purity", "tangle", "visibility", "fidelity")


@dataclass
class ReconstructionResult:
    """Estimate, convergence diagnostics, figures of merit, and error bars.

    floored_outcomes counts observed outcomes whose fitted probability sits at
    the numerical floor; anything nonzero signals model mismatch between the
    counts and the projector set.
    """

    rho_hat: DensityMatrix
    log_likelihood: float
    ll_trace: list
    iterations: int
    converged: bool
    metrics: MetricsReport
    metric_errors: dict | None = None
    target: DensityMatrix | None = None
    floored_outcomes: int = 0


def _count_vector(records, pset: ProjectorSet) -> np.ndarray:
    """Counts as a flat (4 * n_settings,) vector in projector order."""
    validate_against(records, pset)
    ordered = sorted(records, key=lambda r: r.setting_index)
    return np.array(
        [float(c) for record in ordered for c in record.outcome_counts], dtype=float
    )


def _log_likelihood_flat(counts: np.ndarray, probs: np.ndarray) -> float:
    mask = counts > 0
    if not mask.any():
        return 0.0
    clipped = np.clip(probs[mask], PROBABILITY_FLOOR, None)
    return float(counts[mask] @ np.log(clipped))


def log_likelihood(rho: DensityMatrix, records, pset: ProjectorSet) -> float:
    """Sum of n_j log p_j(rho) over all outcomes, omitting n_j = 0 terms."""
    counts = _count_vector(records, pset)
    probs = np.real(pset.flattened() @ rho.matrix.T.reshape(16))
    return _log_likelihood_flat(counts, probs)


def mle_reconstruct(
    records,
    pset: ProjectorSet,
    *,
    max_iterations: int = 10000,
    tolerance: float = 1e-10,
    dilution: float = 1.0,
    target: DensityMatrix | None = None,
    target_description: str | None = None,
    on_iterate=None,
) -> ReconstructionResult:
    """Reconstruct the state maximizing the likelihood of the observed counts.

    Starts from the completely mixed state (full rank, so every probability is
    positive at the first step) and iterates until the relative likelihood
    gain per accepted step drops below `tolerance` or `max_iterations` is
    exhausted; the latter is reported as converged=False, never silently.
    """
    counts = _count_vector(records, pset)
    total = counts.sum()
    if total <= 0:
        raise NoCounts("all counts are zero; nothing to reconstruct")

    flat = pset.flattened()  # (36, 16) rows are projectors
    eye = np.eye(4, dtype=complex)
    rho = eye / 4.0

    def probs_of(matrix: np.ndarray) -> np.ndarray:
        return np.real(flat @ matrix.T.reshape(16))

    ll = _log_likelihood_flat(counts, probs_of(rho))
    trace = [ll]
    eps = dilution
    iterations = 0
    converged = False

    while iterations < max_iterations:
        iterations += 1
        probs = np.clip(probs_of(rho), PROBABILITY_FLOOR, None)
        r_op = ((counts / (total * probs)) @ flat).reshape(4, 4)
        step = eye + eps * r_op
        candidate = step @ rho @ step.conj().T
        candidate = hermitize(candidate)
        candidate /= np.real(np.trace(candidate))
        ll_new = _log_likelihood_flat(counts, probs_of(candidate))

        if ll_new < ll:
            # Dilute and retry from the same iterate; monotonicity is kept by
            # never accepting a downhill step.
            eps *= 0.5
            if eps < 1e-10:
                converged = True
                break
            continue

        gain = ll_new - ll
        rho = candidate
        ll = ll_new
        trace.append(ll)
        if on_iterate is not None:
            on_iterate(rho, ll)
        if gain / max(abs(ll), 1.0) < tolerance:
            converged = True
            break

    rho_hat = DensityMatrix(hermitize(rho))
    final_probs = probs_of(rho)
    floored = int(np.sum((counts > 0) & (final_probs <= PROBABILITY_FLOOR)))
    description = target_description or ("target" if target is not None else "self")
    metrics = report_for(rho_hat, target=target, target_description=description)
    return ReconstructionResult(
        rho_hat=rho_hat,
        log_likelihood=ll,
        ll_trace=trace,
        iterations=iterations,
        converged=converged,
        metrics=metrics,
        metric_errors=None,
        target=target,
        floored_outcomes=floored,
    )


def bootstrap_errors(
    result: ReconstructionResult,
    pset: ProjectorSet,
    acq: AcquisitionConfig,
    resamples: int,
    *,
    max_iterations: int = 10000,
    tolerance: float = 1e-10,
) -> dict:
    """Parametric-bootstrap standard deviations of the four metrics.

    Counts are resimulated from result.rho_hat with per-resample derived
    seeds, re-reconstructed, and the metrics recomputed against the original
    target (rho_hat itself when no target was supplied).
    """
    if resamples < 2:
        raise NoCounts(f"bootstrap needs at least 2 resamples, got {resamples}")
    target = result.target if result.target is not None else result.rho_hat
    samples = {name: [] for name in _METRIC_NAMES}
    for index in range(resamples):
        acq_r = replace(acq, seed=derive_seed(acq.seed, _BOOTSTRAP_STREAM, index))
        records = simulate_counts(result.rho_hat, pset, acq_r)
        res = mle_reconstruct(
            records,
            pset,
            max_iterations=max_iterations,
            tolerance=tolerance,
            target=target,
            target_description=result.metrics.target_description,
        )
        samples["purity"].append(res.metrics.purity)
        samples["tangle"].append(res.metrics.tangle)
        samples["visibility"].append(res.metrics.visibility)
        samples["fidelity"].append(res.metrics.fidelity_to_target)
    return {name: float(np.std(values, ddof=1)) for name, values in samples.items()}


def result_to_json_dict(result: ReconstructionResult) -> dict:
    return {
        "rho_hat": matrix_to_json_dict(result.rho_hat.matrix),
        "log_likelihood": float(result.log_likelihood),
        "ll_trace": [float(x) for x in result.ll_trace],
        "iterations": int(result.iterations),
        "converged": bool(result.converged),
        "metrics": result.metrics.to_json_dict(),
        "metric_errors": (
            {k: float(v) for k, v in result.metric_errors.items()}
            if result.metric_errors is not None
            else None
        ),
        "target": (
            matrix_to_json_dict(result.target.matrix) if result.target is not None else None
        ),
        "floored_outcomes": int(result.floored_outcomes),
    }


def result_from_json_dict(data: dict) -> ReconstructionResult:
    try:
        target = data.get("target")
        errors = data.get("metric_errors")
        return ReconstructionResult(
            rho_hat=DensityMatrix(matrix_from_json_dict(data["rho_hat"])),
            log_likelihood=float(data["log_likelihood"]),
            ll_trace=[float(x) for x in data["ll_trace"]],
            iterations=int(data["iterations"]),
            converged=bool(data["converged"]),
            metrics=MetricsReport.from_json_dict(data["metrics"]),
            metric_errors=({k: float(v) for k, v in errors.items()} if errors else None),
            target=(DensityMatrix(matrix_from_json_dict(target)) if target else None),
            floored_outcomes=int(data.get("floored_outcomes", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataParse(f"malformed reconstruction JSON: {exc}") from exc


def write_result_json(path, result: ReconstructionResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result_to_json_dict(result), fh, indent=2)
        fh.write("\n")


def read_result_json(path) -> ReconstructionResult:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataParse(f"cannot read reconstruction file {path}: {exc}") from exc
    return result_from_json_dict(data)
