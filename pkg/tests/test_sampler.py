#!/usr/bin/env python
"""
Tests for the projection-DPP sampler and its goodness-of-fit helpers.
"""
import pytest
import numpy as np

from ..scripts.weight import WeightSpec
from ..scripts.orthopoly import KernelEvaluator
from ..scripts.sampler import (
    SamplerConfig,
    SampleRun,
    proposal_exponent,
    envelope_constant,
    sample_dpp,
    arcsine_cdf,
    ks_arcsine,
    chi_square_density_test,
)
from ..scripts.errors import ParameterError, EnvelopeRefinementError

GENERIC = WeightSpec(1.0, 0.5, 1.5)


@pytest.fixture(scope="module")
def small_evaluator():
    return KernelEvaluator.from_spec(GENERIC, 10)


class TestSamplerConfig:
    """Sampler settings."""

    @pytest.mark.parametrize("kwargs", [
        {"envelope_grid": 50},
        {"envelope_safety": 0.9},
        {"min_efficiency": 1.0},
        {"reorth_every": 0},
        {"batch": 0},
    ])
    def test_rejects_bad_values(self, kwargs):
        """Out-of-range settings raise ParameterError."""
        with pytest.raises(ParameterError):
            SamplerConfig(**kwargs)

    def test_from_dict_ignores_unknown_keys(self):
        """Only dataclass fields are read."""
        cfg = SamplerConfig.from_dict({"envelope_grid": 1001, "colour": "red"})
        assert cfg.envelope_grid == 1001
        assert SamplerConfig.from_dict(cfg.to_dict()) == cfg


class TestProposal:
    """Beta proposal and envelope."""

    @pytest.mark.parametrize("spec, expected", [
        (WeightSpec(1.0, 0.5, 1.5), -0.5),
        (WeightSpec(0.5, 0.25, 1.0), -0.5),
        (WeightSpec(-0.5, -0.3, 1.0), -0.8),
        (WeightSpec(0.0, -0.7, 2.0), -0.7),
    ])
    def test_exponent(self, spec, expected):
        """The exponent never exceeds the arcsine value -1/2 and follows the edge exponent."""
        assert proposal_exponent(KernelEvaluator.from_spec(spec, 5)) == pytest.approx(expected)

    def test_envelope_dominates(self, small_evaluator):
        """The envelope is at least the safety factor, since both densities have unit mass."""
        cfg = SamplerConfig(envelope_grid=1001)
        assert envelope_constant(small_evaluator, -0.5, cfg) >= cfg.envelope_safety

    def test_efficiency_floor(self, small_evaluator):
        """A floor above the achievable acceptance raises EnvelopeRefinementError."""
        with pytest.raises(EnvelopeRefinementError):
            envelope_constant(small_evaluator, -0.5, SamplerConfig(min_efficiency=0.99))


class TestSampling:
    """Cardinality, determinism and validation."""

    def test_fixed_cardinality(self, small_evaluator):
        """Every configuration has exactly n sorted points in (-1, 1)."""
        run = sample_dpp(small_evaluator, seed=7, reps=3, workers=1)
        assert run.points.shape == (3, 10)
        assert np.all(np.diff(run.points, axis=1) > 0)
        assert np.all(np.abs(run.points) < 1)
        assert run.proposals >= 30
        assert 0 < run.efficiency <= 1

    def test_deterministic_under_seed(self, small_evaluator):
        """Same seed, same points, whatever the pool size."""
        first = sample_dpp(small_evaluator, seed=11, reps=4, workers=1)
        second = sample_dpp(small_evaluator, seed=11, reps=4, workers=3)
        np.testing.assert_array_equal(first.points, second.points)
        assert first.proposals == second.proposals

    def test_seed_changes_output(self, small_evaluator):
        """Different seeds give different configurations."""
        a = sample_dpp(small_evaluator, seed=1, reps=1, workers=1)
        b = sample_dpp(small_evaluator, seed=2, reps=1, workers=1)
        assert not np.array_equal(a.points, b.points)

    @pytest.mark.parametrize("kwargs", [{"seed": -1}, {"seed": 2 ** 64}, {"reps": 0}])
    def test_rejects_bad_arguments(self, small_evaluator, kwargs):
        """Seeds outside 64 bits and empty runs are rejected."""
        args = {"seed": 0, "reps": 1}
        args.update(kwargs)
        with pytest.raises(ParameterError):
            sample_dpp(small_evaluator, **args)

    def test_rejects_large_n(self):
        """n is capped."""
        ev = KernelEvaluator.from_spec(GENERIC, 201)
        with pytest.raises(ParameterError):
            sample_dpp(ev, seed=0, reps=1)

    def test_rows_and_summary(self, small_evaluator):
        """Rows are (rep, index, x); the summary carries the run parameters."""
        run = sample_dpp(small_evaluator, seed=3, reps=2, workers=1)
        rows = run.rows()
        assert len(rows) == 20
        assert rows[0]["rep"] == 0 and rows[-1]["index"] == 9
        assert run.summary()["seed"] == 3
        assert len(run.pooled()) == 20


class TestGoodnessOfFit:
    """Arcsine law and finite-n density comparisons."""

    def test_arcsine_cdf(self):
        """F(-1) = 0, F(0) = 1/2, F(1) = 1."""
        np.testing.assert_allclose(arcsine_cdf([-1.0, 0.0, 1.0]), [0.0, 0.5, 1.0], atol=1e-15)

    def test_bins_validation(self, small_evaluator):
        """At least two bins are needed."""
        run = SampleRun(seed=0, n=10, reps=1, points=np.zeros((1, 10)), proposals=10,
                        envelope=1.0, exponent=-0.5)
        with pytest.raises(ParameterError):
            chi_square_density_test(run, small_evaluator, bins=1)

    @pytest.mark.slow
    def test_pooled_points_follow_arcsine(self):
        """n = 50, 200 repetitions: KS distance to the arcsine law <= 0.05."""
        ev = KernelEvaluator.from_spec(GENERIC, 50)
        run = sample_dpp(ev, seed=0, reps=200)
        assert ks_arcsine(run)["statistic"] <= 0.05
        chi = chi_square_density_test(run, ev, bins=20)
        assert sum(chi["observed"]) == 50 * 200
        assert chi["p_value"] > 1e-4
