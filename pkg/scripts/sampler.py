#!/usr/bin/env python
"""
Exact sampling of the n-point projection DPP with kernel K_n.

Points are drawn one at a time from the conditional densities
(|phi(x)|^2 - |E phi(x)|^2)/(n - i), where phi(x) = sqrt(w(x)) (p_0..p_{n-1})(x)
and the rows of E span the features of the points already placed. Each
draw rejects from a Beta proposal scaled to dominate K_n(x, x)/n.
"""
from __future__ import annotations
import math
import logging
import typing as _t
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.integrate import quad

try:
    from .errors import ParameterError, EnvelopeRefinementError
    from .weight import eval_weight
    from .orthopoly import KernelEvaluator, eval_basis, kernel_kn_diag
    from .worker_pool import map_ordered
except ImportError:
    from errors import ParameterError, EnvelopeRefinementError
    from weight import eval_weight
    from orthopoly import KernelEvaluator, eval_basis, kernel_kn_diag
    from worker_pool import map_ordered

MAX_POINTS = 200
SEED_LIMIT = 2 ** 64
EDGE = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class SamplerConfig:
    """Rejection-sampler settings."""
    envelope_grid: int = 4001
    envelope_safety: float = 1.05
    min_efficiency: float = 0.01
    reorth_every: int = 10
    batch: int = 64

    def __post_init__(self):
        if self.envelope_grid < 101:
            raise ParameterError("envelope_grid must be at least 101", envelope_grid=self.envelope_grid)
        if not self.envelope_safety >= 1:
            raise ParameterError("envelope_safety must be at least 1", envelope_safety=self.envelope_safety)
        if not 0 < self.min_efficiency < 1:
            raise ParameterError("min_efficiency must lie in (0, 1)", min_efficiency=self.min_efficiency)
        if self.reorth_every < 1 or self.batch < 1:
            raise ParameterError("reorth_every and batch must be positive",
                                 reorth_every=self.reorth_every, batch=self.batch)

    def to_dict(self) -> dict:
        return {"envelope_grid": self.envelope_grid, "envelope_safety": self.envelope_safety,
                "min_efficiency": self.min_efficiency, "reorth_every": self.reorth_every,
                "batch": self.batch}

    @classmethod
    def from_dict(cls, data: dict) -> 'SamplerConfig':
        return cls(**{k: v for k, v in data.items() if k in cls.__dataclass_fields__})


@dataclass(frozen=True, eq=False)
class SampleRun:
    """reps configurations of n sorted points each."""
    seed: int
    n: int
    reps: int
    points: np.ndarray
    proposals: int
    envelope: float
    exponent: float
    violations: int = 0

    @property
    def efficiency(self) -> float:
        return self.n * self.reps / self.proposals if self.proposals else 0.0

    def pooled(self) -> np.ndarray:
        return np.sort(self.points.ravel())

    def rows(self) -> _t.List[dict]:
        return [{"rep": rep, "index": i, "x": float(x)}
                for rep, config in enumerate(self.points) for i, x in enumerate(config)]

    def summary(self) -> dict:
        return {"seed": self.seed, "n": self.n, "reps": self.reps, "proposals": self.proposals,
                "efficiency": self.efficiency, "envelope": self.envelope, "exponent": self.exponent,
                "violations": self.violations}


# ───────────────────────────────────────── Proposal & Envelope ────
def proposal_exponent(ev: KernelEvaluator) -> float:
    """Beta(c+1, c+1) exponent c dominating the edge behaviour of K_n(x, x)."""
    spec = ev.spec
    if spec.merged:
        return min(spec.alpha + spec.beta, -0.5)
    c = min(spec.beta, -0.5)
    if spec.alpha < 0 and spec.alpha + spec.beta > -1:
        c = min(c, spec.alpha + spec.beta)
    return c


def _proposal_pdf(x: np.ndarray, c: float) -> np.ndarray:
    return 0.5 * stats.beta.pdf(0.5 * (x + 1), c + 1, c + 1)


def _features(ev: KernelEvaluator, x: np.ndarray) -> np.ndarray:
    return np.sqrt(eval_weight(ev.spec, x))[:, None] * eval_basis(ev.table, ev.n, x)


def envelope_constant(ev: KernelEvaluator, c: float, config: SamplerConfig) -> float:
    """safety * sup (K_n(x, x)/n) / g(x) on proposal quantiles."""
    levels = (np.arange(config.envelope_grid) + 0.5) / config.envelope_grid
    grid = np.clip(2 * stats.beta.ppf(levels, c + 1, c + 1) - 1, -EDGE, EDGE)
    density = np.sum(_features(ev, grid) ** 2, axis=1) / ev.n
    ratio = density / _proposal_pdf(grid, c)
    envelope = config.envelope_safety * float(np.max(ratio))
    if 1 / envelope < config.min_efficiency:
        raise EnvelopeRefinementError(
            f"proposal acceptance {1 / envelope:.4f} below floor {config.min_efficiency}",
            envelope=envelope, exponent=c)
    return envelope


# ───────────────────────────────────────── Sampling ────
def _substream(seed: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, rep])))


def _sample_configuration(ev: KernelEvaluator, rng: np.random.Generator, c: float, envelope: float,
                          config: SamplerConfig) -> _t.Tuple[np.ndarray, int, int]:
    n = ev.n
    basis = np.zeros((0, n))
    points = []
    proposals = violations = 0
    while len(points) < n:
        x = np.clip(2 * rng.beta(c + 1, c + 1, size=config.batch) - 1, -EDGE, EDGE)
        uniforms = rng.random(config.batch)
        feats = _features(ev, x)
        residual = np.sum(feats ** 2, axis=1) - np.sum((feats @ basis.T) ** 2, axis=1)
        accept = np.clip(residual, 0, None) / (n * envelope * _proposal_pdf(x, c))
        violations += int(np.count_nonzero(accept > 1))
        hits = np.flatnonzero(uniforms < accept)
        if hits.size == 0:
            proposals += config.batch
            continue
        j = int(hits[0])
        proposals += j + 1
        direction = feats[j] - basis.T @ (basis @ feats[j])
        basis = np.vstack([basis, direction / np.linalg.norm(direction)])
        points.append(x[j])
        if len(points) % config.reorth_every == 0:
            q, _ = np.linalg.qr(basis.T)
            basis = q.T
    return np.sort(np.asarray(points)), proposals, violations


def sample_dpp(ev: KernelEvaluator, seed: int, reps: int, workers: _t.Optional[int] = None,
               config: _t.Optional[SamplerConfig] = None) -> SampleRun:
    """
    reps independent configurations; repetition r draws from the Philox
    substream SeedSequence([seed, r]), so output is independent of scheduling.
    """
    config = config or SamplerConfig()
    if ev.n > MAX_POINTS:
        raise ParameterError(f"sampler supports n <= {MAX_POINTS}, got {ev.n}", n=ev.n)
    if not 0 <= seed < SEED_LIMIT:
        raise ParameterError("seed must be a 64-bit non-negative integer", seed=seed)
    if reps < 1:
        raise ParameterError(f"reps must be positive, got {reps}", reps=reps)
    c = proposal_exponent(ev)
    envelope = envelope_constant(ev, c, config)
    logging.info(f"Sampling {reps} configurations of {ev.n} points (seed={seed}, envelope={envelope:.3f})")

    def run(rep: int):
        return _sample_configuration(ev, _substream(seed, rep), c, envelope, config)

    results = map_ordered(run, range(reps), workers)
    points = np.vstack([r[0] for r in results])
    proposals = sum(r[1] for r in results)
    violations = sum(r[2] for r in results)
    if violations:
        logging.warning(f"{violations} proposals exceeded the envelope; raise envelope_grid or envelope_safety")
    sample = SampleRun(seed=seed, n=ev.n, reps=reps, points=points, proposals=proposals,
                       envelope=envelope, exponent=c, violations=violations)
    if sample.efficiency < config.min_efficiency:
        raise EnvelopeRefinementError(f"acceptance {sample.efficiency:.4f} below floor {config.min_efficiency}",
                                      efficiency=sample.efficiency)
    return sample


# ───────────────────────────────────────── Goodness of Fit ────
def arcsine_cdf(x):
    """(2/pi) arcsin(sqrt((x + 1)/2))."""
    return 2 / math.pi * np.arcsin(np.sqrt(np.clip((np.asarray(x) + 1) / 2, 0, 1)))


def ks_arcsine(run: SampleRun) -> dict:
    """Kolmogorov-Smirnov distance of the pooled points to the arcsine law."""
    result = stats.kstest(run.pooled(), arcsine_cdf)
    return {"statistic": float(result.statistic), "p_value": float(result.pvalue)}


def chi_square_density_test(run: SampleRun, ev: KernelEvaluator, bins: int = 20) -> dict:
    """Pooled counts on arcsine-equal bins against int K_n(x, x)/n over each bin."""
    if bins < 2:
        raise ParameterError("need at least two bins", bins=bins)
    edges = -np.cos(np.pi * np.arange(bins + 1) / bins)
    expected = np.array([
        quad(lambda x: kernel_kn_diag(ev, x) / ev.n, lo, hi, limit=200)[0]
        for lo, hi in zip(edges[:-1], edges[1:])
    ])
    observed, _ = np.histogram(run.pooled(), bins=edges)
    expected = expected / expected.sum() * observed.sum()
    result = stats.chisquare(observed, expected)
    return {"statistic": float(result.statistic), "p_value": float(result.pvalue), "bins": bins,
            "observed": observed.tolist(), "expected": expected.tolist()}
