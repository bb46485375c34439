#!/usr/bin/env python
"""
Scaling limits of the finite-n kernel and the explicit model parametrices.

Experiments compare rescaled K_n against the sine kernel, the Bessel
kernels J_beta / J_{alpha+beta} and, through the double-scaling proxy,
against the large-s and small-s approximants of the Psi-kernel.
"""
from __future__ import annotations
import math
import cmath
import logging
import functools
import typing as _t
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

try:
    from .errors import ParameterError, DomainError, BranchError
    from .specfun import bessel_j, bessel_jp, bessel_i, bessel_ip, bessel_k, bessel_kp, gamma_fn, hyp2f1
    from .weight import WeightSpec, t_from_s, phi, outer_parametrix_n, DEFAULT_SZEGO_NODES
    from .orthopoly import KernelEvaluator, kernel_kn, kernel_kn_diag, log_monic
except ImportError:
    from errors import ParameterError, DomainError, BranchError
    from specfun import bessel_j, bessel_jp, bessel_i, bessel_ip, bessel_k, bessel_kp, gamma_fn, hyp2f1
    from weight import WeightSpec, t_from_s, phi, outer_parametrix_n, DEFAULT_SZEGO_NODES
    from orthopoly import KernelEvaluator, kernel_kn, kernel_kn_diag, log_monic

REGIMES = ("bulk-density", "bulk-sine", "edge-bessel", "double-scaling", "transition-scan")
T_MODES = ("fixed-t", "t-equals-1")
SECTORS = ("I", "II", "III")

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
MINUS_ISIGMA1 = (IDENTITY - 1j * SIGMA1) / math.sqrt(2)
PLUS_ISIGMA1 = (IDENTITY + 1j * SIGMA1) / math.sqrt(2)
JUMP_NEGATIVE_AXIS = np.array([[0, 1], [-1, 0]], dtype=complex)
DIAGONAL_GAP = 1e-8


def _diag(a, b) -> np.ndarray:
    return np.array([[a, 0], [0, b]], dtype=complex)


# ───────────────────────────────────────── Result Container ────
@dataclass
class ScalingResult:
    """Computed vs reference kernel values over a grid, with exact error maxima."""
    regime: str
    grid: np.ndarray
    computed: np.ndarray
    reference: np.ndarray
    max_abs_err: float
    max_rel_err: float
    meta: dict = field(default_factory=dict)
    reference_label: str = "reference"
    alt_reference: _t.Optional[np.ndarray] = None
    alt_label: _t.Optional[str] = None
    alt_max_abs_err: _t.Optional[float] = None

    @classmethod
    def build(cls, regime: str, grid, computed, reference, meta: dict,
              reference_label: str = "reference", alt_reference=None,
              alt_label: _t.Optional[str] = None) -> 'ScalingResult':
        """Fill in the error maxima from the raw columns."""
        if regime not in REGIMES:
            raise ParameterError(f"Unknown regime '{regime}'", regime=regime)
        computed = np.asarray(computed, dtype=float)
        reference = np.asarray(reference, dtype=float)
        if computed.shape != reference.shape:
            raise ParameterError("computed and reference differ in length",
                                 computed=computed.shape, reference=reference.shape)
        abs_err = np.abs(computed - reference)
        max_abs = float(np.max(abs_err))
        max_rel = max_abs / float(np.max(np.abs(reference)))
        alt_max = None
        if alt_reference is not None:
            alt_reference = np.asarray(alt_reference, dtype=float)
            alt_max = float(np.max(np.abs(computed - alt_reference)))
        return cls(regime=regime, grid=np.asarray(grid, dtype=float), computed=computed,
                   reference=reference, max_abs_err=max_abs, max_rel_err=max_rel, meta=dict(meta),
                   reference_label=reference_label, alt_reference=alt_reference,
                   alt_label=alt_label, alt_max_abs_err=alt_max)

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.computed - self.reference)

    @property
    def max_pointwise_rel_err(self) -> float:
        """max |computed/reference - 1|."""
        return float(np.max(self.abs_err / np.abs(self.reference)))

    @property
    def gate_error(self) -> float:
        """The error an --assert gate compares against its tolerance."""
        if self.regime == "bulk-density":
            return self.max_pointwise_rel_err
        if self.regime == "edge-bessel":
            return self.max_rel_err
        return self.max_abs_err

    def rows(self) -> _t.List[dict]:
        """One row per grid point: inputs, computed, reference, abs_err."""
        grid = self.grid.reshape(len(self.computed), -1)
        names = ["x"] if grid.shape[1] == 1 else ["u", "v"]
        rows = []
        for i in range(len(self.computed)):
            row = {name: float(grid[i, j]) for j, name in enumerate(names)}
            row["computed"] = float(self.computed[i])
            row["reference"] = float(self.reference[i])
            row["abs_err"] = float(abs(self.computed[i] - self.reference[i]))
            if self.alt_reference is not None:
                row["alt_reference"] = float(self.alt_reference[i])
                row["alt_abs_err"] = float(abs(self.computed[i] - self.alt_reference[i]))
            rows.append(row)
        return rows

    def summary(self) -> dict:
        """JSON summary mirroring meta plus the error maxima."""
        data = {
            "regime": self.regime,
            "meta": self.meta,
            "points": int(len(self.computed)),
            "reference": self.reference_label,
            "max_abs_err": self.max_abs_err,
            "max_rel_err": self.max_rel_err,
        }
        if self.alt_reference is not None:
            data["alt_reference"] = self.alt_label
            data["alt_max_abs_err"] = self.alt_max_abs_err
        return data


def _meta(ev: KernelEvaluator, n: int, s: _t.Optional[float] = None) -> dict:
    return {"n": n, "t": ev.spec.t, "s": s, "alpha": ev.spec.alpha, "beta": ev.spec.beta}


def _uv_columns(uv_grid) -> _t.Tuple[np.ndarray, np.ndarray, np.ndarray]:
    grid = np.asarray(uv_grid, dtype=float).reshape(-1, 2)
    return grid, grid[:, 0], grid[:, 1]


def uv_square(low: float, high: float, step: float) -> np.ndarray:
    """All (u, v) pairs on a square lattice, row-major."""
    axis = np.arange(low, high + step / 2, step)
    u, v = np.meshgrid(axis, axis, indexing="ij")
    return np.column_stack([u.ravel(), v.ravel()])


# ───────────────────────────────────────── Limit Kernels ────
def sine_kernel(delta):
    """sin(pi d)/(pi d), equal to 1 at d = 0."""
    values = np.sinc(np.asarray(delta, dtype=float))
    return values.item() if values.ndim == 0 else values


def bessel_kernel(nu: float, u, v):
    """
    Bessel kernel J_nu(u, v) with the confluent diagonal
    (1/4)(J_nu'(r)^2 + (1 - nu^2/r^2) J_nu(r)^2), r = sqrt(u).
    """
    if not nu > -1:
        raise ParameterError("Bessel kernel needs nu > -1", nu=nu)
    us, vs = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if np.any(us <= 0) or np.any(vs <= 0):
        raise DomainError("Bessel kernel arguments must be positive")
    ru, rv = np.sqrt(us), np.sqrt(vs)
    ju, jv = bessel_j(nu, ru), bessel_j(nu, rv)
    dju, djv = bessel_jp(nu, ru), bessel_jp(nu, rv)
    close = np.abs(us - vs) < DIAGONAL_GAP * np.maximum(1.0, us)
    diff = np.where(close, 1.0, us - vs)
    off = (ju * rv * djv - jv * ru * dju) / (2 * diff)
    diag = 0.25 * (dju ** 2 + (1 - nu * nu / us) * ju ** 2)
    values = np.where(close, diag, off)
    return values.item() if values.ndim == 0 else values


# ───────────────────────────────────────── Finite-n Experiments ────
def bulk_density_experiment(ev: KernelEvaluator, n: int, x_grid) -> ScalingResult:
    """(1/n) K_n(x, x) against 1/(pi sqrt(1 - x^2))."""
    ev = ev.with_n(n) if ev.n != n else ev
    xs = np.asarray(x_grid, dtype=float)
    if np.any(np.abs(xs) >= 1):
        raise DomainError("density grid must lie inside (-1, 1)")
    computed = kernel_kn_diag(ev, xs) / n
    reference = 1 / (math.pi * np.sqrt(1 - xs * xs))
    return ScalingResult.build("bulk-density", xs, computed, reference, _meta(ev, n),
                               reference_label="arcsine density")


def bulk_sine_experiment(ev: KernelEvaluator, n: int, x0: float, uv_grid) -> ScalingResult:
    """Rescaled K_n around an interior point against the sine kernel."""
    ev = ev.with_n(n) if ev.n != n else ev
    if not abs(x0) < 1:
        raise DomainError("x0 must be interior", x0=x0)
    grid, u, v = _uv_columns(uv_grid)
    scale = math.pi * math.sqrt(1 - x0 * x0) / n
    x, y = x0 + scale * u, x0 + scale * v
    if np.any(np.abs(x) >= 1) or np.any(np.abs(y) >= 1):
        raise DomainError("scaled points leave (-1, 1)", x0=x0, n=n)
    computed = scale * kernel_kn(ev, x, y, route_diagonal=True)
    meta = dict(_meta(ev, n), x0=x0)
    return ScalingResult.build("bulk-sine", grid, computed, sine_kernel(u - v), meta,
                               reference_label="sine")


def edge_bessel_experiment(ev: KernelEvaluator, n: int, t_mode: str, uv_grid) -> ScalingResult:
    """(1/2n^2) K_n(1 - u/2n^2, 1 - v/2n^2) against J_beta or J_{alpha+beta}."""
    ev = ev.with_n(n) if ev.n != n else ev
    if t_mode not in T_MODES:
        raise ParameterError(f"t_mode must be one of {T_MODES}", t_mode=t_mode)
    spec = ev.spec
    if t_mode == "t-equals-1" and not spec.merged:
        raise ParameterError("t-equals-1 mode needs a weight with t = 1", t=spec.t)
    if t_mode == "fixed-t" and spec.merged:
        raise ParameterError("fixed-t mode needs t > 1", t=spec.t)
    grid, u, v = _uv_columns(uv_grid)
    scale = 1 / (2.0 * n * n)
    x, y = 1 - scale * u, 1 - scale * v
    if np.any(np.abs(x) >= 1) or np.any(np.abs(y) >= 1):
        raise DomainError("scaled points leave (-1, 1)", n=n)
    computed = scale * kernel_kn(ev, x, y, route_diagonal=True)
    order = spec.beta if t_mode == "fixed-t" else spec.alpha + spec.beta
    meta = dict(_meta(ev, n), t_mode=t_mode, order=order)
    return ScalingResult.build("edge-bessel", grid, computed, bessel_kernel(order, u, v), meta,
                               reference_label=f"J_{order:g}")


@functools.lru_cache(maxsize=16)
def _proxy_evaluator(spec: WeightSpec, n: int, n_quad: _t.Optional[int]) -> KernelEvaluator:
    return KernelEvaluator.from_spec(spec, n, n_quad)


def psi_kernel_proxy(spec_base: WeightSpec, s: float, n: int, u, v,
                     n_quad: _t.Optional[int] = None):
    """(s^2/8n^2) K_n(1 - s^2 u/8n^2, 1 - s^2 v/8n^2) at t = cosh(s/4n)."""
    us, vs = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if np.any(us <= 0) or np.any(vs <= 0):
        raise DomainError("proxy arguments must be positive")
    t = t_from_s(s, n)
    ev = _proxy_evaluator(spec_base.with_t(t), n, n_quad)
    scale = s * s / (8.0 * n * n)
    x, y = 1 - scale * us, 1 - scale * vs
    if np.any(x <= -1) or np.any(y <= -1):
        raise DomainError("scaled points leave (-1, 1)", s=s, n=n)
    values = scale * kernel_kn(ev, x, y, route_diagonal=True)
    return np.asarray(values).item() if np.ndim(values) == 0 else values


def double_scaling_experiment(spec_base: WeightSpec, s: float, n: int, uv_grid,
                              n_ref: _t.Optional[int] = None,
                              n_quad: _t.Optional[int] = None) -> ScalingResult:
    """Cauchy comparison of the proxy at n against n_ref (default 2n)."""
    grid, u, v = _uv_columns(uv_grid)
    n_ref = n_ref or 2 * n
    computed = psi_kernel_proxy(spec_base, s, n, u, v, n_quad)
    reference = psi_kernel_proxy(spec_base, s, n_ref, u, v, n_quad)
    meta = {"n": n, "n_ref": n_ref, "t": t_from_s(s, n), "s": s,
            "alpha": spec_base.alpha, "beta": spec_base.beta}
    return ScalingResult.build("double-scaling", grid, computed, reference, meta,
                               reference_label=f"proxy n={n_ref}")


def transition_scan(spec_base: WeightSpec, s_list: _t.Sequence[float], n: int, uv_grid,
                    n_quad: _t.Optional[int] = None) -> _t.List[ScalingResult]:
    """(4/s^2) proxy(4u/s^2, 4v/s^2) against J_beta and J_{alpha+beta} for each s."""
    s_values = [float(s) for s in s_list]
    if any(s <= 0 for s in s_values) or s_values != sorted(s_values):
        raise ParameterError("s_list must be positive and ascending", s_list=s_values)
    grid, u, v = _uv_columns(uv_grid)
    alpha, beta = spec_base.alpha, spec_base.beta
    large_ref = bessel_kernel(beta, u, v)
    small_ref = bessel_kernel(alpha + beta, u, v)
    results = []
    for s in s_values:
        scale = 4 / (s * s)
        computed = scale * psi_kernel_proxy(spec_base, s, n, scale * u, scale * v, n_quad)
        meta = {"n": n, "t": t_from_s(s, n), "s": s, "alpha": alpha, "beta": beta}
        result = ScalingResult.build("transition-scan", grid, computed, large_ref, meta,
                                     reference_label=f"J_{beta:g}", alt_reference=small_ref,
                                     alt_label=f"J_{alpha + beta:g}")
        logging.info(f"transition s={s:g}: err vs J_beta={result.max_abs_err:.3e}, "
                     f"err vs J_alpha+beta={result.alt_max_abs_err:.3e}")
        results.append(result)
    return results


def crossover_count(results: _t.Sequence[ScalingResult]) -> int:
    """Number of sign changes of (err vs J_beta) - (err vs J_{alpha+beta}) along s."""
    signs = [np.sign(r.max_abs_err - r.alt_max_abs_err) for r in results]
    signs = [sgn for sgn in signs if sgn != 0]
    return int(sum(1 for a, b in zip(signs, signs[1:]) if a != b))


def outer_poly_check(ev: KernelEvaluator, n: int, z_outer: float, nodes: int = DEFAULT_SZEGO_NODES) -> float:
    """|pi_n(z) 2^n phi(z)^-n / N_11(z) - 1| for real z > 1, in log space."""
    if not (isinstance(z_outer, (int, float)) and z_outer > 1):
        raise DomainError("outer check needs real z > 1", z=z_outer)
    if n > ev.table.n_max:
        raise ParameterError(f"n={n} exceeds n_max={ev.table.n_max}", n=n)
    log_ratio = log_monic(ev.table, n, z_outer) + n * math.log(2) - n * math.log(phi(z_outer).real)
    n11 = outer_parametrix_n(ev.spec, z_outer, nodes)[0, 0]
    return abs(cmath.exp(log_ratio) / n11 - 1)


# ───────────────────────────────────────── Model Parametrices ────
def _on_negative_axis(zeta: complex) -> bool:
    return zeta.imag == 0 and zeta.real < 0


def _sqrt_with_side(zeta: complex, side: _t.Optional[str]) -> complex:
    if _on_negative_axis(zeta):
        root = math.sqrt(-zeta.real)
        return 1j * root if side == "+" else -1j * root
    return cmath.sqrt(zeta)


def _power_with_side(zeta: complex, exponent: float, side: _t.Optional[str]) -> complex:
    if _on_negative_axis(zeta):
        arg = math.pi if side == "+" else -math.pi
        return abs(zeta) ** exponent * cmath.exp(1j * arg * exponent)
    return complex(zeta) ** exponent


def _g_log(zeta: complex, side: _t.Optional[str]) -> complex:
    """L = ln((2c - 1)/(2c + 1)), c = sqrt(zeta), continued from L(inf) = 0."""
    if zeta == 0 or zeta == 0.25:
        raise DomainError("G is singular at 0 and 1/4", zeta=zeta)
    on_cut = zeta.imag == 0 and zeta.real < 0.25
    if on_cut and side not in ("+", "-"):
        raise BranchError("zeta lies on (-inf, 1/4]; give side '+' or '-'", zeta=zeta)
    c = _sqrt_with_side(zeta, side)
    ratio = (2 * c - 1) / (2 * c + 1)
    if on_cut and zeta.real > 0:
        arg = math.pi if side == "+" else -math.pi
        return complex(math.log(abs(ratio)), arg)
    return cmath.log(ratio)


def g_exponent_integral(zeta: complex, side: _t.Optional[str] = None) -> complex:
    """int_0^{1/4} tau^-1/2 (tau - zeta)^-1 d tau in closed form."""
    zeta = complex(zeta)
    return _g_log(zeta, side) / _sqrt_with_side(zeta, side)


def g_exponent_quadrature(zeta: complex) -> complex:
    """The same integral by adaptive quadrature, zeta off [0, 1/4]."""
    zeta = complex(zeta)

    def part(kind):
        return quad(lambda tau: kind(1 / (tau - zeta)), 0.0, 0.25, weight="alg", wvar=(-0.5, 0.0),
                    epsabs=0.0, epsrel=1e-13, limit=200)[0]

    return complex(part(lambda w: w.real), part(lambda w: w.imag))


def g_parametrix(alpha: float, zeta: complex, side: _t.Optional[str] = None) -> np.ndarray:
    """
    G(zeta) = zeta^(sigma3/4) (I - i sigma1)/sqrt2 exp{(alpha/2) L(zeta) sigma3}.

    On (-inf, 0) and (0, 1/4) the one-sided value for side '+' or '-' is
    returned; G+ = G- (i sigma2) on the first and G+ = G- e^(pi i alpha sigma3)
    on the second.
    """
    zeta = complex(zeta)
    exponent = 0.5 * alpha * _g_log(zeta, side)
    quarter = _power_with_side(zeta, 0.25, side)
    return _diag(quarter, 1 / quarter) @ MINUS_ISIGMA1 @ _diag(cmath.exp(exponent), cmath.exp(-exponent))


def _sector_argument(zeta: complex, sector: str) -> float:
    if sector not in SECTORS:
        raise ParameterError(f"sector must be one of {SECTORS}", sector=sector)
    if _on_negative_axis(zeta):
        if sector == "I":
            raise DomainError("negative axis belongs to sectors II and III", zeta=zeta)
        return math.pi if sector == "II" else -math.pi
    theta = cmath.phase(zeta)
    bound = 2 * math.pi / 3 + 1e-12
    ok = {"I": abs(theta) <= bound, "II": theta >= bound - 2e-12, "III": theta <= -bound + 2e-12}[sector]
    if not ok:
        raise DomainError(f"arg zeta = {theta:.6f} is outside sector {sector}", zeta=zeta, sector=sector)
    return theta


def bessel_parametrix_phi(nu: float, zeta: complex, sector: str) -> np.ndarray:
    """Bessel model solution Phi in sectors I (|arg| < 2pi/3), II and III."""
    zeta = complex(zeta)
    if zeta == 0:
        raise DomainError("Phi is singular at the origin")
    theta = _sector_argument(zeta, sector)
    root = math.sqrt(abs(zeta)) * cmath.exp(0.5j * theta)
    arg = 2 * root
    base = np.array([
        [bessel_i(nu, arg), 1j / math.pi * bessel_k(nu, arg)],
        [2j * math.pi * root * bessel_ip(nu, arg), -2 * root * bessel_kp(nu, arg)],
    ], dtype=complex)
    if sector == "I":
        return base
    if sector == "II":
        return base @ np.array([[1, 0], [-cmath.exp(1j * math.pi * nu), 1]], dtype=complex)
    return base @ np.array([[1, 0], [cmath.exp(-1j * math.pi * nu), 1]], dtype=complex)


def phi_large_zeta_residual(nu: float, zeta: complex, sector: str) -> float:
    """max |(4 pi^2 zeta)^(sigma3/4) Phi e^(-2 sqrt(zeta) sigma3) - (I + i sigma1)/sqrt2|."""
    zeta = complex(zeta)
    theta = _sector_argument(zeta, sector)
    root = math.sqrt(abs(zeta)) * cmath.exp(0.5j * theta)
    quarter = (4 * math.pi ** 2 * abs(zeta)) ** 0.25 * cmath.exp(0.25j * theta)
    normalized = _diag(quarter, 1 / quarter) @ bessel_parametrix_phi(nu, zeta, sector) \
        @ _diag(cmath.exp(-2 * root), cmath.exp(2 * root))
    return float(np.max(np.abs(normalized - PLUS_ISIGMA1)))


def e1_matrix(alpha: float, s: float, zeta: complex, side: _t.Optional[str] = None) -> np.ndarray:
    """E1 = G e^(-/+ pi i alpha sigma3/2) (I - i sigma1)/sqrt2 ((pi^2/4) s^2 zeta)^(sigma3/4)."""
    zeta = complex(zeta)
    upper = zeta.imag > 0 or (_on_negative_axis(zeta) and side == "+")
    sign = -1 if upper else 1
    quarter = _power_with_side((math.pi ** 2 / 4) * s * s * zeta, 0.25, side)
    phase = cmath.exp(sign * 0.5j * math.pi * alpha)
    return g_parametrix(alpha, zeta, side) @ _diag(phase, 1 / phase) @ MINUS_ISIGMA1 @ _diag(quarter, 1 / quarter)


def psi_large_s_approx(alpha: float, beta: float, s: float, zeta_neg: float) -> _t.Tuple[complex, complex]:
    """(psi1, psi2) ~ E1(zeta+) (J_beta(x), (pi i/2) s sqrt|zeta| J_beta'(x)), x = s sqrt|zeta|/2."""
    if not zeta_neg < 0:
        raise DomainError("large-s approximant is evaluated on the negative axis", zeta=zeta_neg)
    if s < 10:
        logging.warning(f"large-s approximant used at s={s}; error is O(1/s)")
    if abs(zeta_neg) >= 0.25:
        logging.warning(f"zeta={zeta_neg} is outside the disk |zeta| < 1/4 of the local parametrix")
    root = math.sqrt(-zeta_neg)
    x = 0.5 * s * root
    vector = np.array([bessel_j(beta, x), 0.5j * math.pi * s * root * bessel_jp(beta, x)], dtype=complex)
    psi = e1_matrix(alpha, s, complex(zeta_neg, 0.0), side="+") @ vector
    return complex(psi[0]), complex(psi[1])


def psi_small_s_approx(alpha: float, beta: float, s: float, zeta_neg: float) -> _t.Tuple[complex, complex]:
    """(psi1, psi2) ~ (pi s/2)^(-sigma3/2) (-i sigma1) (J_ab(y), pi i y J_ab'(y)), y = s sqrt|zeta|/2."""
    order = alpha + beta
    if not order > -1:
        raise ParameterError("small-s approximant needs alpha + beta > -1", alpha=alpha, beta=beta)
    if not zeta_neg < 0:
        raise DomainError("small-s approximant is evaluated on the negative axis", zeta=zeta_neg)
    if s > 0.5:
        logging.warning(f"small-s approximant used at s={s}; error is O(s^l)")
    y = 0.5 * s * math.sqrt(-zeta_neg)
    vector = np.array([bessel_j(order, y), 1j * math.pi * y * bessel_jp(order, y)], dtype=complex)
    scale = math.sqrt(math.pi * s / 2)
    left = _diag(1 / scale, scale) @ (-1j * SIGMA1)
    psi = left @ vector
    return complex(psi[0]), complex(psi[1])


def psi_kernel_from_pairs(psi_fn: _t.Callable, alpha: float, beta: float, s: float,
                          u: float, v: float) -> float:
    """(psi1(u) psi2(v) - psi1(v) psi2(u)) / (2 pi i (u - v)) at zeta = -4u/s^2."""
    if abs(u - v) < DIAGONAL_GAP * max(1.0, u):
        step = 1e-5 * max(1.0, u)
        return psi_kernel_from_pairs(psi_fn, alpha, beta, s, u + step, u - step)
    pu = psi_fn(alpha, beta, s, -4 * u / (s * s))
    pv = psi_fn(alpha, beta, s, -4 * v / (s * s))
    value = (pu[0] * pv[1] - pv[0] * pu[1]) / (2j * math.pi * (u - v))
    return value.real


def small_s_order(alpha: float, beta: float) -> float:
    """l = 2 min{1, alpha + beta + 1}."""
    return 2 * min(1.0, alpha + beta + 1)


def large_zeta_coefficients(alpha: float, beta: float) -> _t.Tuple[np.ndarray, np.ndarray]:
    """First two coefficients of the 1/sqrt(zeta) expansion in the small-s regime."""
    ab2 = (alpha + beta) ** 2
    c1 = -0.5j * SIGMA1 - (ab2 + 0.25) * SIGMA3
    c2 = (4 * ab2 - 1) / 8 * ((ab2 + 0.75) * IDENTITY + 3 * SIGMA2)
    return c1, c2


# ───────────────────────────────────────── Scalar RH Problem ────
def _check_m_arguments(alpha: float, beta: float, zeta: complex):
    if not alpha > -1:
        raise ParameterError("m(zeta) needs alpha > -1 for the Plemelj integral", alpha=alpha)
    if not beta > -1:
        raise ParameterError("m(zeta) needs beta > -1", beta=beta)
    if zeta.imag == 0 and 0 <= zeta.real <= 0.25:
        raise DomainError("m(zeta) is defined off [0, 1/4]", zeta=zeta)


def _plemelj(zeta: complex, wvar, weight: str = "alg") -> complex:
    def part(kind):
        return quad(lambda tau: kind(1 / (tau - zeta)), 0.0, 0.25, weight=weight, wvar=wvar,
                    epsabs=0.0, epsrel=1e-12, limit=200)[0]

    return complex(part(lambda w: w.real), part(lambda w: w.imag))


def m_function(alpha: float, beta: float, s: float, zeta: complex) -> complex:
    """
    Solution of the scalar jump problem on [0, 1/4] by the Plemelj integral.

    For integer alpha + beta the logarithmic variant with ln(s^2 tau) in the
    integrand is used.
    """
    zeta = complex(zeta)
    _check_m_arguments(alpha, beta, zeta)
    if alpha == 0:
        return 0j
    order = alpha + beta
    if float(order).is_integer():
        prefactor = math.sin(alpha * math.pi) * (-1) ** int(order) * s ** (2 * order) / (2j * math.pi)
        plain = _plemelj(zeta, (beta, alpha))
        logged = _plemelj(zeta, (beta, alpha), weight="alg-loga")
        return prefactor * (2 * math.log(s) * plain + logged)
    prefactor = -math.sin(alpha * math.pi) * s ** (2 * order) / (2j * math.pi * math.sin(order * math.pi))
    return prefactor * _plemelj(zeta, (beta, alpha))


def m_function_hyp2f1(alpha: float, beta: float, s: float, zeta: complex) -> complex:
    """Closed form of m(zeta) through 2F1(1, beta+1; alpha+beta+2; 1/(4 zeta))."""
    zeta = complex(zeta)
    _check_m_arguments(alpha, beta, zeta)
    order = alpha + beta
    if float(order).is_integer():
        raise ParameterError("the 2F1 form needs non-integer alpha + beta", alpha=alpha, beta=beta)
    beta_fn = gamma_fn(alpha + 1) * gamma_fn(beta + 1) / gamma_fn(order + 2)
    prefactor = math.sin(alpha * math.pi) / (8j * math.pi * zeta * math.sin(order * math.pi))
    return prefactor * beta_fn * (s / 2) ** (2 * order) * hyp2f1(1.0, beta + 1, order + 2, 1 / (4 * zeta))
