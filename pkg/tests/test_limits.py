#!/usr/bin/env python
"""
Tests for the scaling-limit experiments and the model parametrices.

The convergence runs at n >= 100 are marked slow.
"""
import math
import cmath

import pytest
import numpy as np

from ..scripts.weight import WeightSpec, t_from_s
from ..scripts.orthopoly import KernelEvaluator
from ..scripts import limits
from ..scripts.limits import (
    ScalingResult,
    uv_square,
    sine_kernel,
    bessel_kernel,
    bulk_density_experiment,
    bulk_sine_experiment,
    edge_bessel_experiment,
    psi_kernel_proxy,
    double_scaling_experiment,
    transition_scan,
    crossover_count,
    outer_poly_check,
    g_exponent_integral,
    g_exponent_quadrature,
    g_parametrix,
    bessel_parametrix_phi,
    phi_large_zeta_residual,
    e1_matrix,
    psi_large_s_approx,
    psi_small_s_approx,
    psi_kernel_from_pairs,
    small_s_order,
    large_zeta_coefficients,
    m_function,
    m_function_hyp2f1,
    JUMP_NEGATIVE_AXIS,
)
from ..scripts.errors import ParameterError, DomainError, BranchError

GENERIC = WeightSpec(1.0, 0.5, 1.5)
MERGED = WeightSpec(1.0, 0.5, 1.0)
APPROX_POINTS = (0.5, 1.5, 3.0, 5.0)


@pytest.fixture(scope="module")
def generic_120():
    return KernelEvaluator.from_spec(GENERIC, 120)


class TestScalingResult:
    """Result container."""

    def test_build_error_maxima(self):
        """Maxima are computed from the columns."""
        result = ScalingResult.build("bulk-density", [0.0, 0.5], [1.0, 2.2], [1.0, 2.0], {"n": 3})
        assert result.max_abs_err == pytest.approx(0.2)
        assert result.max_rel_err == pytest.approx(0.1)
        assert result.max_pointwise_rel_err == pytest.approx(0.1)
        assert result.gate_error == pytest.approx(0.1)

    def test_unknown_regime(self):
        """Only the known regimes are accepted."""
        with pytest.raises(ParameterError):
            ScalingResult.build("soft-edge", [0.0], [1.0], [1.0], {})

    def test_length_mismatch(self):
        """computed and reference must align."""
        with pytest.raises(ParameterError):
            ScalingResult.build("bulk-sine", [[0, 0]], [1.0, 2.0], [1.0], {})

    def test_rows_uv(self):
        """Two-dimensional grids produce u, v columns; alternates add two more."""
        result = ScalingResult.build("transition-scan", [[1.0, 2.0]], [0.3], [0.25], {},
                                     alt_reference=[0.5], alt_label="J_1")
        row = result.rows()[0]
        assert set(row) == {"u", "v", "computed", "reference", "abs_err", "alt_reference", "alt_abs_err"}
        assert row["alt_abs_err"] == pytest.approx(0.2)
        assert result.summary()["alt_reference"] == "J_1"


class TestLimitKernels:
    """Sine and Bessel kernels."""

    def test_sine_kernel(self):
        """sin(pi d)/(pi d) with value 1 at the origin."""
        assert sine_kernel(0.0) == 1.0
        assert sine_kernel(0.5) == pytest.approx(2 / math.pi)

    def test_bessel_kernel_symmetric(self):
        """J_nu(u, v) = J_nu(v, u)."""
        assert bessel_kernel(0.5, 1.0, 3.0) == pytest.approx(bessel_kernel(0.5, 3.0, 1.0), rel=1e-14)

    def test_bessel_kernel_diagonal_limit(self):
        """The diagonal formula is the limit of the off-diagonal one."""
        u = 2.7
        near = bessel_kernel(1.5, u - 1e-4, u + 1e-4)
        assert bessel_kernel(1.5, u, u) == pytest.approx(near, rel=1e-6)

    def test_bessel_half_closed_form(self):
        """J_{-1/2}(u, v) reduces to a sine kernel in sqrt(u), sqrt(v)."""
        u, v = 2.0, 5.0
        ru, rv = math.sqrt(u), math.sqrt(v)
        expected = (math.sin(ru - rv) / (ru - rv) + math.sin(ru + rv) / (ru + rv)) / (2 * math.pi * math.sqrt(ru * rv))
        assert bessel_kernel(-0.5, u, v) == pytest.approx(expected, rel=1e-12)

    def test_bessel_kernel_domain(self):
        """Arguments must be positive."""
        with pytest.raises(DomainError):
            bessel_kernel(0.5, 0.0, 1.0)

    @pytest.mark.parametrize("nu", [-1.0, -2.0, -1.5])
    def test_bessel_kernel_order(self, nu):
        """Orders nu <= -1 are rejected, integers included."""
        with pytest.raises(ParameterError):
            bessel_kernel(nu, 1.0, 2.0)

    def test_uv_square(self):
        """Row-major lattice including both ends."""
        grid = uv_square(0.5, 1.5, 0.5)
        assert grid.shape == (9, 2)
        assert grid[0].tolist() == [0.5, 0.5]
        assert grid[-1].tolist() == [1.5, 1.5]


class TestFiniteNExperiments:
    """Bulk and hard-edge scaling of K_n."""

    @pytest.mark.slow
    def test_bulk_density(self, generic_120):
        """Pointwise relative error <= 0.05 at n = 120, shrinking by 0.7 at n = 240."""
        grid = np.linspace(-0.8, 0.8, 161)
        coarse = bulk_density_experiment(generic_120, 120, grid)
        assert coarse.gate_error <= 0.05
        fine = bulk_density_experiment(KernelEvaluator.from_spec(GENERIC, 240), 240, grid)
        assert fine.gate_error <= 0.7 * coarse.gate_error

    def test_bulk_density_small_n(self):
        """Even modest n is close to the arcsine law in the bulk."""
        ev = KernelEvaluator.from_spec(GENERIC, 40)
        result = bulk_density_experiment(ev, 40, np.linspace(-0.5, 0.5, 11))
        assert result.gate_error <= 0.1
        assert result.meta["n"] == 40

    def test_bulk_density_domain(self, generic_120):
        """The grid must be interior."""
        with pytest.raises(DomainError):
            bulk_density_experiment(generic_120, 120, [0.0, 1.0])

    @pytest.mark.slow
    def test_bulk_sine(self):
        """Max abs error vs the sine kernel <= 0.05 at n = 200."""
        ev = KernelEvaluator.from_spec(GENERIC, 200)
        result = bulk_sine_experiment(ev, 200, 0.0, uv_square(-2.0, 2.0, 0.25))
        assert result.max_abs_err <= 0.05
        assert len(result.rows()) == 17 * 17

    @pytest.mark.slow
    def test_edge_fixed_t(self):
        """t = 1.5, n = 100: relative error vs J_beta <= 0.05."""
        ev = KernelEvaluator.from_spec(GENERIC, 100)
        result = edge_bessel_experiment(ev, 100, "fixed-t", uv_square(0.5, 8.0, 0.5))
        assert result.gate_error <= 0.05
        assert result.meta["order"] == 0.5

    @pytest.mark.slow
    def test_edge_merged(self):
        """Merged weight, n = 100: relative error vs J_{alpha+beta} <= 0.05."""
        ev = KernelEvaluator.from_spec(MERGED, 100)
        result = edge_bessel_experiment(ev, 100, "t-equals-1", uv_square(0.5, 8.0, 0.5))
        assert result.gate_error <= 0.05
        assert result.meta["order"] == 1.5

    def test_edge_mode_mismatch(self):
        """Each mode needs the matching weight."""
        ev = KernelEvaluator.from_spec(GENERIC, 10)
        with pytest.raises(ParameterError):
            edge_bessel_experiment(ev, 10, "t-equals-1", uv_square(1.0, 2.0, 1.0))
        with pytest.raises(ParameterError):
            edge_bessel_experiment(ev, 10, "soft", uv_square(1.0, 2.0, 1.0))

    def test_outer_asymptotics(self):
        """pi_n 2^n phi^-n approaches N_11 away from [-1, 1]."""
        ev = KernelEvaluator.from_spec(GENERIC, 60)
        assert outer_poly_check(ev, 60, 2.5) < outer_poly_check(ev, 10, 2.5)
        assert outer_poly_check(ev, 60, 2.5) < 0.05
        with pytest.raises(DomainError):
            outer_poly_check(ev, 60, 0.5)


class TestDoubleScaling:
    """The Psi-kernel proxy and the transition between Bessel limits."""

    @pytest.mark.slow
    def test_cauchy_convergence(self):
        """|proxy(n=60) - proxy(n=120)| <= 0.02 at s = 2."""
        spec = WeightSpec(1.0, 0.5, t_from_s(2.0, 60))
        result = double_scaling_experiment(spec, 2.0, 60, uv_square(0.5, 4.0, 0.5))
        assert result.max_abs_err <= 0.02
        assert result.meta["n_ref"] == 120

    def test_proxy_symmetric(self):
        """The proxy inherits the symmetry of K_n."""
        a = psi_kernel_proxy(GENERIC, 2.0, 30, 1.0, 2.5)
        b = psi_kernel_proxy(GENERIC, 2.0, 30, 2.5, 1.0)
        assert a == pytest.approx(b, rel=1e-9)

    def test_proxy_domain(self):
        """u, v must be positive."""
        with pytest.raises(DomainError):
            psi_kernel_proxy(GENERIC, 2.0, 30, -1.0, 1.0)

    @pytest.mark.slow
    def test_transition_crossover(self):
        """J_{alpha+beta} wins at s = 0.1, J_beta wins at s = 30."""
        results = transition_scan(GENERIC, [0.1, 30.0], 120, uv_square(0.5, 4.0, 0.5))
        small, large = results
        assert small.alt_max_abs_err < small.max_abs_err
        assert large.max_abs_err < large.alt_max_abs_err
        assert crossover_count(results) == 1

    def test_transition_requires_ascending(self):
        """s values must be positive and ascending."""
        with pytest.raises(ParameterError):
            transition_scan(GENERIC, [3.0, 1.0], 20, uv_square(1.0, 2.0, 1.0))

    def test_crossover_count(self):
        """Sign changes of the error difference are counted, ties skipped."""
        def scan_point(err, alt_err):
            return ScalingResult.build("transition-scan", [[1.0, 1.0]], [0.0], [err], {},
                                       alt_reference=[alt_err])

        errors = [(0.3, 0.1), (0.2, 0.2), (0.1, 0.3), (0.05, 0.4)]
        assert crossover_count([scan_point(*pair) for pair in errors]) == 1
        assert crossover_count([scan_point(*pair) for pair in errors + [(0.5, 0.1)]]) == 2
        assert crossover_count([]) == 0


class TestParametrices:
    """G, Phi, E1 and the approximants."""

    @pytest.mark.parametrize("zeta", [0.5 + 0.3j, -1.0 + 0.2j, 2.0, 0.1 - 0.05j, -3.0 - 1.0j])
    def test_g_exponent_closed_form(self, zeta):
        """The closed form equals the integral off [0, 1/4]."""
        assert abs(g_exponent_integral(zeta) - g_exponent_quadrature(zeta)) < 1e-10

    def test_g_needs_side_on_cut(self):
        """On the negative axis a side is required."""
        with pytest.raises(BranchError):
            g_parametrix(0.3, -1.0)
        with pytest.raises(DomainError):
            g_parametrix(0.3, 0.25)

    def test_g_jump_negative_axis(self):
        """G+ = G- (i sigma2) on (-inf, 0)."""
        alpha, zeta = 0.7, -0.8
        plus = g_parametrix(alpha, zeta, "+")
        minus = g_parametrix(alpha, zeta, "-")
        np.testing.assert_allclose(plus, minus @ JUMP_NEGATIVE_AXIS, atol=1e-12)

    def test_g_jump_on_interval(self):
        """G+ = G- e^(pi i alpha sigma3) on (0, 1/4)."""
        alpha, zeta = 0.7, 0.1
        plus = g_parametrix(alpha, zeta, "+")
        minus = g_parametrix(alpha, zeta, "-")
        jump = np.diag([cmath.exp(1j * math.pi * alpha), cmath.exp(-1j * math.pi * alpha)])
        np.testing.assert_allclose(plus, minus @ jump, atol=1e-12)

    def test_g_large_zeta(self):
        """G zeta^(-sigma3/4) tends to (I - i sigma1)/sqrt2."""
        zeta = 1e8 + 1e8j
        quarter = zeta ** 0.25
        normalized = np.diag([1 / quarter, quarter]) @ g_parametrix(0.4, zeta)
        np.testing.assert_allclose(normalized, limits.MINUS_ISIGMA1, atol=1e-3)

    @pytest.mark.parametrize("sector, arg", [("I", 0.0), ("I", 1.0), ("II", 2.5), ("III", -2.5)])
    @pytest.mark.parametrize("radius", [0.5, 2.0, 10.0])
    def test_phi_unimodular(self, sector, arg, radius):
        """det Phi = 1 in every sector."""
        zeta = radius * cmath.exp(1j * arg)
        det = np.linalg.det(bessel_parametrix_phi(0.5, zeta, sector))
        assert abs(det - 1) <= 1e-10

    def test_phi_sector_validation(self):
        """Arguments outside a sector are rejected."""
        with pytest.raises(DomainError):
            bessel_parametrix_phi(0.5, cmath.exp(2.5j), "I")
        with pytest.raises(ParameterError):
            bessel_parametrix_phi(0.5, 1.0, "IV")

    def test_phi_jump_negative_axis(self):
        """Phi_II = Phi_III [[0, 1], [-1, 0]] on the negative axis."""
        upper = bessel_parametrix_phi(0.3, -2.0, "II")
        lower = bessel_parametrix_phi(0.3, -2.0, "III")
        np.testing.assert_allclose(upper, lower @ JUMP_NEGATIVE_AXIS, atol=1e-10)

    def test_phi_large_zeta(self):
        """Phi matches its normalization at large |zeta|."""
        assert phi_large_zeta_residual(0.5, 400.0, "I") < 0.05
        assert phi_large_zeta_residual(0.5, 400.0, "I") < phi_large_zeta_residual(0.5, 25.0, "I")

    def test_e1_unimodular(self):
        """det E1 = 1."""
        for zeta, side in ((0.1 + 0.1j, None), (-0.05, "+"), (-0.05, "-")):
            assert abs(np.linalg.det(e1_matrix(0.4, 5.0, zeta, side)) - 1) < 1e-10

    def test_large_s_kernel_approaches_bessel(self):
        """The large-s approximant gives a kernel close to J_beta."""
        alpha, beta, s = 0.5, 0.5, 400.0
        for u, v in ((1.0, 2.0), (3.0, 0.5)):
            value = psi_kernel_from_pairs(psi_large_s_approx, alpha, beta, s, u, v)
            assert value == pytest.approx(bessel_kernel(beta, u, v), abs=0.05)

    @pytest.mark.parametrize("alpha", [0.0, 0.5])
    def test_large_s_kernel_within_inverse_s(self, alpha):
        """At s = 30 the large-s kernel is within 3/s of J_beta on [0.5, 5]^2."""
        beta, s = 0.5, 30.0
        for u in APPROX_POINTS:
            for v in APPROX_POINTS:
                value = psi_kernel_from_pairs(psi_large_s_approx, alpha, beta, s, u, v)
                assert abs(value - bessel_kernel(beta, u, v)) <= 3 / s, (u, v)

    def test_approximants_agree_for_alpha_zero(self):
        """With alpha = 0 both approximants target J_beta."""
        beta = 0.5
        for u, v in ((0.5, 2.0), (1.5, 5.0), (3.0, 3.0)):
            small = psi_kernel_from_pairs(psi_small_s_approx, 0.0, beta, 0.1, u, v)
            large = psi_kernel_from_pairs(psi_large_s_approx, 0.0, beta, 30.0, u, v)
            assert small == pytest.approx(bessel_kernel(beta, u, v), rel=1e-6)
            assert abs(small - large) <= 3 / 30.0

    @pytest.mark.slow
    def test_large_s_matches_proxy(self):
        """At s = 30, n = 120 the proxy and the large-s kernel agree within 0.05."""
        alpha, beta, s, n = 0.5, 0.5, 30.0, 120
        scale = 4 / (s * s)
        for u, v in ((0.5, 2.0), (1.5, 5.0), (3.0, 1.5)):
            proxy = scale * psi_kernel_proxy(WeightSpec(alpha, beta, 1.5), s, n, scale * u, scale * v)
            approx = psi_kernel_from_pairs(psi_large_s_approx, alpha, beta, s, u, v)
            assert abs(proxy - approx) <= 0.05, (u, v)

    @pytest.mark.slow
    def test_small_s_matches_proxy(self):
        """At s = 0.1, n = 120 the proxy and the small-s kernel agree within 0.05."""
        alpha, beta, s, n = 0.5, 0.5, 0.1, 120
        scale = 4 / (s * s)
        for u, v in ((0.5, 2.0), (1.5, 5.0), (3.0, 1.5)):
            proxy = scale * psi_kernel_proxy(WeightSpec(alpha, beta, 1.5), s, n, scale * u, scale * v)
            approx = psi_kernel_from_pairs(psi_small_s_approx, alpha, beta, s, u, v)
            assert abs(proxy - approx) <= 0.05, (u, v)

    def test_large_s_warns_for_small_s(self, caplog):
        """Using the large-s approximant at s < 10 logs a warning."""
        psi_large_s_approx(0.5, 0.5, 5.0, -0.01)
        assert "large-s approximant used" in caplog.text

    def test_small_s_kernel_is_bessel(self):
        """The leading small-s kernel is exactly J_{alpha+beta}."""
        alpha, beta, s = 0.5, 0.25, 0.1
        for u, v in ((1.0, 2.0), (0.7, 3.3)):
            value = psi_kernel_from_pairs(psi_small_s_approx, alpha, beta, s, u, v)
            assert value == pytest.approx(bessel_kernel(alpha + beta, u, v), rel=1e-10)

    def test_small_s_diagonal(self):
        """The diagonal uses a symmetric offset."""
        value = psi_kernel_from_pairs(psi_small_s_approx, 0.5, 0.25, 0.1, 2.0, 2.0)
        assert value == pytest.approx(bessel_kernel(0.75, 2.0, 2.0), rel=1e-6)

    def test_small_s_requires_integrable_exponent(self):
        """alpha + beta must exceed -1."""
        with pytest.raises(ParameterError):
            psi_small_s_approx(-0.8, -0.5, 0.1, -1.0)

    def test_small_s_order(self):
        """l = 2 min(1, alpha + beta + 1)."""
        assert small_s_order(0.5, 0.25) == 2.0
        assert small_s_order(-0.3, -0.4) == pytest.approx(0.6)

    def test_large_zeta_coefficients(self):
        """C2 vanishes when (alpha + beta)^2 = 1/4."""
        _, c2 = large_zeta_coefficients(0.25, 0.25)
        np.testing.assert_allclose(c2, 0.0, atol=1e-15)


class TestMFunction:
    """Scalar jump problem."""

    def test_quadrature_matches_hyp2f1(self):
        """Plemelj quadrature equals the 2F1 closed form to 1e-9."""
        assert abs(m_function(0.5, 0.25, 1.0, 1.0) - m_function_hyp2f1(0.5, 0.25, 1.0, 1.0)) <= 1e-9

    @pytest.mark.parametrize("zeta", [-1.0, 0.5 + 0.5j, 2.0 - 1.0j])
    def test_agreement_off_real_axis(self, zeta):
        """The two forms agree at complex zeta as well."""
        a = m_function(0.3, -0.2, 2.0, zeta)
        b = m_function_hyp2f1(0.3, -0.2, 2.0, zeta)
        assert abs(a - b) <= 1e-9 * max(1.0, abs(b))

    def test_alpha_zero(self):
        """m vanishes when alpha = 0."""
        assert m_function(0.0, 0.5, 1.0, 1.0) == 0

    def test_integer_order_uses_log_form(self):
        """Integer alpha + beta has no 2F1 form here but the quadrature works."""
        value = m_function(0.5, 0.5, 2.0, 1.0)
        assert cmath.isfinite(value)
        with pytest.raises(ParameterError):
            m_function_hyp2f1(0.5, 0.5, 2.0, 1.0)

    def test_interval_rejected(self):
        """zeta on [0, 1/4] is on the jump contour."""
        with pytest.raises(DomainError):
            m_function(0.5, 0.25, 1.0, 0.1)
