#!/usr/bin/env python
"""
Special functions used throughout the kernel library: Bessel J/I/K of real
order with derivatives, the gamma function and the Gauss hypergeometric
function.

The primary evaluators wrap scipy.special with domain validation and
error mapping. Independent reference evaluators (power series, Hankel
asymptotics, Euler integral) are kept for cross-checks and for the
``specfun-check`` subcommand.
"""
from __future__ import annotations
import math
import logging
import typing as _t
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.integrate import quad

try:
    from .errors import ParameterError, DomainError, BranchError, AccuracyError, RangeError
except ImportError:
    from errors import ParameterError, DomainError, BranchError, AccuracyError, RangeError

ArrayLike = _t.Union[float, complex, np.ndarray]


# ───────────────────────────────────────── Configuration ────
@dataclass(frozen=True)
class SpecFunConfig:
    """Tolerances for the reference evaluators."""
    series_tolerance: float = 1e-16
    max_terms: int = 300
    asymptotic_switch: float = 20.0

    def __post_init__(self):
        if not (0.0 < self.series_tolerance <= 1e-6):
            raise ParameterError(
                f"series_tolerance must lie in (0, 1e-6], got {self.series_tolerance}",
                series_tolerance=self.series_tolerance,
            )
        if int(self.max_terms) != self.max_terms or self.max_terms < 50:
            raise ParameterError(f"max_terms must be an integer >= 50, got {self.max_terms}",
                                 max_terms=self.max_terms)
        if self.asymptotic_switch <= 0:
            raise ParameterError("asymptotic_switch must be positive",
                                 asymptotic_switch=self.asymptotic_switch)

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization."""
        return {
            "series_tolerance": self.series_tolerance,
            "max_terms": self.max_terms,
            "asymptotic_switch": self.asymptotic_switch,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'SpecFunConfig':
        """Create a config from a [specfun] table, defaults for missing keys."""
        return cls(
            series_tolerance=float(data.get("series_tolerance", 1e-16)),
            max_terms=int(data.get("max_terms", 300)),
            asymptotic_switch=float(data.get("asymptotic_switch", 20.0)),
        )


# ───────────────────────────────────────── Helpers ────
def _is_integer(x: float) -> bool:
    return float(x).is_integer()


def _finite(values, name: str, **details):
    arr = np.asarray(values)
    if not np.all(np.isfinite(arr)):
        raise RangeError(f"{name} returned a non-finite value", **details)
    return values


def _scalar(values):
    arr = np.asarray(values)
    return arr.item() if arr.ndim == 0 else arr


def _prepare_argument(z: ArrayLike, nu: float) -> np.ndarray:
    """Promote to complex when the principal branch leaves the real line."""
    arr = np.asarray(z)
    if np.iscomplexobj(arr):
        return arr
    arr = arr.astype(float)
    if not _is_integer(nu) and np.any(arr < 0):
        return arr.astype(complex)
    return arr


def _check_j_order(nu: float):
    if nu <= -1 and not _is_integer(nu):
        raise ParameterError(f"Bessel order must exceed -1 (or be an integer), got {nu}", nu=nu)


# ───────────────────────────────────────── Primary Evaluators ────
def bessel_j(nu: float, z: ArrayLike) -> ArrayLike:
    """J_nu(z); negative integer orders follow J_{-m} = (-1)^m J_m."""
    _check_j_order(nu)
    arr = _prepare_argument(z, nu)
    if not np.all(np.isfinite(arr)):
        raise RangeError("Bessel J argument must be finite", nu=nu)
    with np.errstate(all="ignore"):
        values = special.jv(nu, arr)
    return _scalar(_finite(values, "bessel_j", nu=nu))


def bessel_jp(nu: float, z: ArrayLike) -> ArrayLike:
    """Derivative J'_nu(z)."""
    _check_j_order(nu)
    arr = _prepare_argument(z, nu)
    with np.errstate(all="ignore"):
        values = special.jvp(nu, arr)
    return _scalar(_finite(values, "bessel_jp", nu=nu))


def bessel_i(nu: float, z: ArrayLike) -> ArrayLike:
    """Modified Bessel function I_nu(z) of real order."""
    arr = _prepare_argument(z, nu)
    with np.errstate(all="ignore"):
        values = special.iv(nu, arr)
    return _scalar(_finite(values, "bessel_i", nu=nu))


def bessel_ip(nu: float, z: ArrayLike) -> ArrayLike:
    """Derivative I'_nu(z)."""
    arr = _prepare_argument(z, nu)
    with np.errstate(all="ignore"):
        values = special.ivp(nu, arr)
    return _scalar(_finite(values, "bessel_ip", nu=nu))


def _check_k_argument(z: ArrayLike) -> np.ndarray:
    arr = np.asarray(z)
    on_cut = (np.imag(arr) == 0) & (np.real(arr) <= 0)
    if np.any(on_cut):
        raise DomainError("Bessel K is undefined on the branch cut (-inf, 0]")
    return arr


def bessel_k(nu: float, z: ArrayLike) -> ArrayLike:
    """Modified Bessel function K_nu(z), arg z in (-pi, pi)."""
    arr = _check_k_argument(z)
    with np.errstate(all="ignore"):
        values = special.kv(nu, arr)
    return _scalar(_finite(values, "bessel_k", nu=nu))


def bessel_kp(nu: float, z: ArrayLike) -> ArrayLike:
    """Derivative K'_nu(z)."""
    arr = _check_k_argument(z)
    with np.errstate(all="ignore"):
        values = special.kvp(nu, arr)
    return _scalar(_finite(values, "bessel_kp", nu=nu))


def gamma_fn(x: ArrayLike) -> ArrayLike:
    """Gamma function; poles at non-positive integers raise DomainError."""
    arr = np.asarray(x)
    real = np.real(arr)
    if np.any((np.imag(arr) == 0) & (real <= 0) & (real == np.round(real))):
        raise DomainError("gamma has poles at the non-positive integers")
    values = special.gamma(arr)
    return _scalar(_finite(values, "gamma_fn"))


def hyp2f1(a: float, b: float, c: float, z: ArrayLike) -> ArrayLike:
    """Gauss hypergeometric function 2F1(a, b; c; z) off the cut [1, inf)."""
    if c <= 0 and _is_integer(c):
        raise ParameterError(f"c must not be a non-positive integer, got {c}", c=c)
    arr = np.asarray(z)
    if np.any((np.imag(arr) == 0) & (np.real(arr) >= 1)):
        raise BranchError("2F1 argument lies on the branch cut [1, inf)", a=a, b=b, c=c)
    values = special.hyp2f1(a, b, c, arr)
    return _scalar(_finite(values, "hyp2f1", a=a, b=b, c=c))


# ───────────────────────────────────────── Reference Evaluators ────
def _fsum_complex(terms: _t.List[complex]) -> complex:
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def bessel_j_series(nu: float, z: complex, config: _t.Optional[SpecFunConfig] = None) -> complex:
    """J_nu(z) from the ascending power series with compensated summation."""
    config = config or SpecFunConfig()
    _check_j_order(nu)
    if nu < 0 and _is_integer(nu):
        m = int(-nu)
        return (-1) ** m * bessel_j_series(float(m), z, config)
    z = complex(z)
    if z == 0:
        return 1.0 + 0j if nu == 0 else 0j
    half = z / 2
    term = half ** nu / special.gamma(nu + 1)
    terms = [term]
    q = -half * half
    for k in range(config.max_terms):
        term = term * q / ((k + 1) * (k + 1 + nu))
        terms.append(term)
        # terms shrink monotonically once k exceeds |z|/2
        if k > abs(half) and abs(term) <= config.series_tolerance * abs(_fsum_complex(terms)):
            return _fsum_complex(terms)
    raise AccuracyError(
        f"Bessel series did not converge in {config.max_terms} terms",
        nu=nu, z=z, max_terms=config.max_terms,
    )


def hankel_coefficient(nu: float, k: int) -> float:
    """a_k(nu) = prod_{j=1..k}(4nu^2 - (2j-1)^2) / (k! 8^k)."""
    mu = 4.0 * nu * nu
    value = 1.0
    for j in range(1, k + 1):
        value *= (mu - (2 * j - 1) ** 2) / (j * 8.0)
    return value


def bessel_j_asymptotic(nu: float, x: float, config: _t.Optional[SpecFunConfig] = None) -> float:
    """Large-argument Hankel expansion of J_nu(x) for real x > 0."""
    config = config or SpecFunConfig()
    if x <= 0:
        raise DomainError("asymptotic expansion needs a positive argument", x=x)
    p_terms, q_terms = [], []
    previous = math.inf
    for k in range(config.max_terms):
        term = hankel_coefficient(nu, k) / x ** k
        if abs(term) > previous:
            break
        sign = -1 if (k // 2) % 2 else 1
        (p_terms if k % 2 == 0 else q_terms).append(sign * term)
        previous = abs(term)
        if previous < config.series_tolerance:
            break
    omega = x - nu * math.pi / 2 - math.pi / 4
    p_sum, q_sum = math.fsum(p_terms), math.fsum(q_terms)
    return math.sqrt(2 / (math.pi * x)) * (p_sum * math.cos(omega) - q_sum * math.sin(omega))


def bessel_j_reference(nu: float, x: float, config: _t.Optional[SpecFunConfig] = None) -> complex:
    """Series below asymptotic_switch, Hankel expansion above."""
    config = config or SpecFunConfig()
    if abs(x) < config.asymptotic_switch or nu < 0:
        return bessel_j_series(nu, x, config)
    return complex(bessel_j_asymptotic(nu, x, config))


def hyp2f1_euler(a: float, b: float, c: float, z: complex) -> complex:
    """2F1 from the Euler integral, valid for c > b > 0 and z off [1, inf)."""
    if not c > b > 0:
        raise ParameterError("Euler integral needs c > b > 0", a=a, b=b, c=c)
    z = complex(z)
    if z.imag == 0 and z.real >= 1:
        raise BranchError("2F1 argument lies on the branch cut [1, inf)", z=z)

    def kernel(x):
        return (1 - z * x) ** (-a)

    opts = dict(a=0.0, b=1.0, weight="alg", wvar=(b - 1, c - b - 1), epsabs=0.0, epsrel=1e-13, limit=200)
    re, _ = quad(lambda x: kernel(x).real, **opts)
    im, _ = quad(lambda x: kernel(x).imag, **opts)
    prefactor = math.exp(math.lgamma(c) - math.lgamma(b) - math.lgamma(c - b))
    return prefactor * complex(re, im)


# ───────────────────────────────────────── Cross-check Table ────
def specfun_check(config: _t.Optional[SpecFunConfig] = None) -> _t.List[dict]:
    """Compare reference evaluators with the primary ones; one row per comparison."""
    config = config or SpecFunConfig()
    rows = []

    def record(kind, params, reference, primary):
        abs_err = abs(reference - primary)
        rows.append({
            "kind": kind,
            "params": params,
            "reference": complex(reference).real,
            "primary": complex(primary).real,
            "abs_err": abs_err,
            "rel_err": abs_err / max(abs(primary), 1e-300),
        })

    for nu in (0.0, 0.5, 1.7):
        for x in (0.5, 2.0, 8.0):
            record("j_series", f"nu={nu} z={x}", bessel_j_series(nu, x, config), bessel_j(nu, x))
        for x in (15.0, 17.5):
            record("j_overlap", f"nu={nu} z={x}",
                   bessel_j_series(nu, x, config), bessel_j_asymptotic(nu, x, config))
    for nu in (-0.5, 0.0, 0.3, 1.7):
        for x in (0.1, 1.0, 5.0, 20.0):
            w = bessel_i(nu, x) * bessel_kp(nu, x) - bessel_ip(nu, x) * bessel_k(nu, x)
            record("wronskian_ik", f"nu={nu} z={x}", w * x, -1.0)
    for (a, b, c, z) in ((1.0, 1.0, 2.0, 0.5), (1.0, 1.25, 2.75, 0.2), (1.0, 1.5, 3.2, -0.8)):
        record("hyp2f1_euler", f"a={a} b={b} c={c} z={z}", hyp2f1_euler(a, b, c, z), hyp2f1(a, b, c, z))
    logging.info(f"specfun check produced {len(rows)} comparisons")
    return rows
