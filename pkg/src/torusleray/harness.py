"""Monte Carlo experiments for the nodal-measure statistics.

Each trial draws an independent eigenfunction from its own RNG substream
(master seed + trial index), estimates the Leray functional, and the
report aggregates mean, sample variance, and standard error next to the
quadrature predictions: mean 1/sqrt(2pi), second moment I, variance
I - 1/2pi, and the large-multiplicity asymptote 1/(4piN).

Reproducibility contract: identical (config, seed) gives byte-identical
JSON (timestamps live in a separate field excluded from the canonical
payload).  Trials aggregate by ascending trial index regardless of the
worker pool, so thread count does not change the result.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__, ensemble, leray, moments
from .errors import (
    DomainError,
    EmptyEnsembleError,
    PreconditionError,
    ResolutionError,
)
from .lattice import FrequencySet, check_nondegeneracy, enumerate_frequencies

SURFACE = "surface_integral"
EPSILON = "epsilon_level"

#: fraction of trials allowed to fail (after one retry each) before abort
MAX_FAILURE_FRACTION = 0.01


@dataclass(frozen=True)
class ExperimentConfig:
    dim: int
    energy: int
    samples: int
    seed: int
    grid: int | None = None
    epsilon: float | None = None
    method: str | None = None
    output: str | None = None
    threads: int | None = None
    keep_trials: bool = False

    def resolved(self, freqs: FrequencySet) -> "ExperimentConfig":
        method = self.method
        if method is None:
            method = SURFACE if self.dim == 2 else EPSILON
        if method not in (SURFACE, EPSILON):
            raise DomainError(f"unknown method {method!r}")
        if method == SURFACE and self.dim != 2:
            raise DomainError("surface_integral method requires dim=2")
        grid = self.grid
        if grid is None:
            grid = 512 if method == SURFACE else 16 * math.ceil(math.sqrt(freqs.max_energy))
        epsilon = self.epsilon
        if epsilon is None and method == EPSILON:
            epsilon = 1e-3
        threads = self.threads
        if threads is None:
            threads = int(os.environ.get("LERAY_THREADS", "1"))
        if threads < 1:
            raise DomainError(f"threads must be positive, got {threads}")
        return dataclasses.replace(
            self, method=method, grid=grid, epsilon=epsilon, threads=threads
        )

    def to_json_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    multiplicity: int
    mean: float
    sample_variance: float
    standard_error: float | None
    second_moment_mean: float
    quadrature_second_moment: float | None
    predicted_mean: float
    predicted_variance: float | None
    predicted_asymptote: float
    failed_trials: int
    elapsed_seconds: float
    trials: tuple | None = None

    def to_json_dict(self, include_timing: bool = True) -> dict:
        out = {
            "version": __version__,
            "config": self.config.to_json_dict(),
            "multiplicity": self.multiplicity,
            "mean": self.mean,
            "sample_variance": self.sample_variance,
            "standard_error": self.standard_error,
            "second_moment_mean": self.second_moment_mean,
            "quadrature_second_moment": self.quadrature_second_moment,
            "predicted_mean": self.predicted_mean,
            "predicted_variance": self.predicted_variance,
            "predicted_asymptote": self.predicted_asymptote,
            "failed_trials": self.failed_trials,
        }
        if self.trials is not None:
            out["trials"] = list(self.trials)
        if include_timing:
            out["timing"] = {"elapsed_seconds": self.elapsed_seconds}
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_json_dict(include_timing=include_timing))

    def csv_rows(self) -> list[str]:
        cfg = self.config
        rows = ["trial,leray,method,epsilon,grid"]
        if self.trials is not None:
            for i, val in enumerate(self.trials):
                rows.append(f"{i},{val!r},{cfg.method},{cfg.epsilon},{cfg.grid}")
        rows.append(f"summary,{self.mean!r},{cfg.method},{cfg.epsilon},{cfg.grid}")
        return rows


def _estimate_one(
    freqs: FrequencySet, config: ExperimentConfig, trial: int, retry: int
) -> float:
    rng = np.random.default_rng(
        np.random.SeedSequence(config.seed, spawn_key=(trial, retry))
    )
    coeffs = rng.standard_normal((len(freqs.representatives), 2))
    f = ensemble.explicit_field(freqs, coeffs, math.sqrt(2.0 / freqs.multiplicity))
    f = dataclasses.replace(f, seed=config.seed, trial=trial)
    if config.method == SURFACE:
        return leray.leray_surface_2d(f, config.grid).value
    return leray.leray_epsilon(f, config.epsilon, config.grid).value


def _run_trials(freqs: FrequencySet, config: ExperimentConfig) -> tuple[np.ndarray, int]:
    def trial_value(trial: int) -> tuple[float, int]:
        try:
            return _estimate_one(freqs, config, trial, 0), 0
        except (DomainError, ResolutionError, FloatingPointError):
            return _estimate_one(freqs, config, trial, 1), 1

    failures = 0
    values = np.empty(config.samples)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(trial_value, range(config.samples)))
    else:
        results = [trial_value(t) for t in range(config.samples)]
    # ordered reduce keyed by trial index
    for t, (val, failed) in enumerate(results):
        values[t] = val
        failures += failed
    if failures > MAX_FAILURE_FRACTION * config.samples:
        raise PreconditionError(
            f"{failures}/{config.samples} trials failed even after retry"
        )
    return values, failures


def _base_report(
    freqs: FrequencySet, config: ExperimentConfig, with_quadrature: bool
) -> ExperimentReport:
    start = time.perf_counter()
    values, failures = _run_trials(freqs, config)
    elapsed = time.perf_counter() - start
    k = config.samples
    mean = float(np.mean(values))
    var = float(np.var(values, ddof=1)) if k >= 2 else 0.0
    se = math.sqrt(var / k) if k >= 2 else None
    second = None
    pred_var = None
    if with_quadrature:
        second = moments.second_moment_quadrature(freqs).value
        pred_var = second - 1.0 / (2.0 * math.pi)
    return ExperimentReport(
        config=config,
        multiplicity=freqs.multiplicity,
        mean=mean,
        sample_variance=var,
        standard_error=se,
        second_moment_mean=float(np.mean(values**2)),
        quadrature_second_moment=second,
        predicted_mean=1.0 / math.sqrt(2.0 * math.pi),
        predicted_variance=pred_var,
        predicted_asymptote=1.0 / (4.0 * math.pi * freqs.multiplicity),
        failed_trials=failures,
        elapsed_seconds=elapsed,
        trials=tuple(values.tolist()) if config.keep_trials else None,
    )


def _prepare(config: ExperimentConfig) -> tuple[FrequencySet, ExperimentConfig]:
    if config.samples < 1:
        raise DomainError(f"samples must be positive, got {config.samples}")
    freqs = enumerate_frequencies(config.dim, config.energy)
    if freqs.multiplicity == 0:
        raise EmptyEnsembleError(
            f"no frequencies with |lambda|^2 = {config.energy} in dim {config.dim}"
        )
    return freqs, config.resolved(freqs)


def run_expectation_experiment(config: ExperimentConfig) -> ExperimentReport:
    freqs, config = _prepare(config)
    return _base_report(freqs, config, with_quadrature=False)


def run_variance_experiment(config: ExperimentConfig) -> ExperimentReport:
    freqs, config = _prepare(config)
    if not check_nondegeneracy(freqs):
        raise PreconditionError(
            f"degenerate frequency set (d={config.dim}, E={config.energy})"
        )
    return _base_report(freqs, config, with_quadrature=True)
