#!/usr/bin/env python
"""
The perturbed Jacobi weight w(x) = (1-x^2)^beta (t^2-x^2)^alpha h(x) on (-1, 1),
together with the conformal maps, the Szego function and the outer
parametrix used by the large-n asymptotics.
"""
from __future__ import annotations
import math
import logging
import typing as _t
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

try:
    from .errors import ParameterError, DomainError, BranchError, AccuracyError
except ImportError:
    from errors import ParameterError, DomainError, BranchError, AccuracyError

SIGMA3 = np.diag([1.0, -1.0]).astype(complex)
M1 = (np.eye(2) + 1j * np.array([[0.0, 1.0], [1.0, 0.0]])) / math.sqrt(2.0)
M1_INV = (np.eye(2) - 1j * np.array([[0.0, 1.0], [1.0, 0.0]])) / math.sqrt(2.0)

DEFAULT_DISK_RADIUS = 0.6
DEFAULT_SZEGO_NODES = 400
SIDES = ("+", "-")


# ───────────────────────────────────────── Perturbations ────
def unit_h(x):
    """h(x) = 1."""
    return np.ones_like(np.asarray(x, dtype=float))


def cosh_h(x):
    """h(x) = cosh(x), even and positive."""
    return np.cosh(np.asarray(x, dtype=float))


def shift_h(x):
    """h(x) = 1 + x/2, positive on [-1, 1] but not even."""
    return 1.0 + 0.5 * np.asarray(x, dtype=float)


H_FUNCTIONS: _t.Dict[str, _t.Callable] = {
    "unit": unit_h,
    "cosh": cosh_h,
    "shift": shift_h,
}


# ───────────────────────────────────────── Weight Definition ────
@dataclass(frozen=True)
class WeightSpec:
    """
    Parameters of the perturbed Jacobi weight.

    t = 1 merges the two factors into the modified Jacobi weight
    (1-x^2)^(alpha+beta) h(x).
    """
    alpha: float
    beta: float
    t: float
    h: _t.Callable = field(default=unit_h, compare=False)
    h_name: str = "unit"

    def __post_init__(self):
        if not self.beta > -1:
            raise ParameterError(f"beta must exceed -1, got {self.beta}", beta=self.beta)
        if not self.t >= 1:
            raise ParameterError(f"t must be at least 1, got {self.t}", t=self.t)
        if self.t == 1 and not self.alpha + self.beta > -1:
            raise ParameterError(
                f"alpha + beta must exceed -1 when t = 1, got {self.alpha + self.beta}",
                alpha=self.alpha, beta=self.beta,
            )
        grid = np.linspace(-1.0, 1.0, 101)
        values = np.asarray(self.h(grid), dtype=float)
        if values.shape != grid.shape or not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ParameterError("h must be finite and positive on [-1, 1]", h=self.h_name)

    @property
    def merged(self) -> bool:
        """True when t = 1 and the weight has the single exponent alpha + beta."""
        return self.t == 1

    @property
    def is_even(self) -> bool:
        """True when h is even on a sampled grid, so the whole weight is even."""
        grid = np.linspace(0.0, 1.0, 51)
        return bool(np.allclose(self.h(grid), self.h(-grid), rtol=1e-14, atol=0.0))

    def with_t(self, t: float) -> 'WeightSpec':
        """Same weight with the singularity moved to t."""
        return WeightSpec(self.alpha, self.beta, t, self.h, self.h_name)

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization."""
        return {"alpha": self.alpha, "beta": self.beta, "t": self.t, "h": self.h_name}

    @classmethod
    def from_dict(cls, data: dict) -> 'WeightSpec':
        """Create a WeightSpec from a dictionary; h is looked up by name."""
        h_name = data.get("h", "unit")
        if h_name not in H_FUNCTIONS:
            raise ParameterError(f"Unknown perturbation h '{h_name}'", h=h_name)
        return cls(
            alpha=float(data.get("alpha", 0.0)),
            beta=float(data.get("beta", 0.0)),
            t=float(data.get("t", 2.0)),
            h=H_FUNCTIONS[h_name],
            h_name=h_name,
        )


def eval_weight(spec: WeightSpec, x):
    """w(x) for |x| < 1 (vectorized)."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) >= 1):
        raise DomainError("weight is evaluated on the open interval (-1, 1) only")
    one_minus = 1.0 - arr * arr
    if spec.merged:
        values = one_minus ** (spec.alpha + spec.beta) * spec.h(arr)
    else:
        values = one_minus ** spec.beta * (spec.t ** 2 - arr * arr) ** spec.alpha * spec.h(arr)
    return values.item() if values.ndim == 0 else values


def log_smooth_part(spec: WeightSpec, x):
    """g(x) = alpha ln(t^2 - x^2) + ln h(x), the part smooth on [-1, 1] for t > 1."""
    arr = np.asarray(x, dtype=float)
    return spec.alpha * np.log(spec.t ** 2 - arr * arr) + np.log(spec.h(arr))


def _log_smooth_derivative(spec: WeightSpec, x: float) -> float:
    step = 1e-6
    dh = (math.log(float(spec.h(x + step))) - math.log(float(spec.h(x - step)))) / (2 * step)
    return -2.0 * spec.alpha * x / (spec.t ** 2 - x * x) + dh


# ───────────────────────────────────────── Conformal Maps ────
def _on_cut(z: np.ndarray) -> np.ndarray:
    return (np.imag(z) == 0) & (np.abs(np.real(z)) < 1)


def _sqrt_z2m1(z):
    z = np.asarray(z, dtype=complex)
    return np.sqrt(z - 1) * np.sqrt(z + 1)


def phi(z, side: _t.Optional[str] = None):
    """
    phi(z) = z + sqrt(z-1) sqrt(z+1), principal branches.

    On the cut (-1, 1) the one-sided value x +/- i sqrt(1-x^2) is returned
    when side is given.
    """
    arr = np.asarray(z, dtype=complex)
    cut = _on_cut(arr)
    if np.any(cut):
        if side not in SIDES:
            raise BranchError("phi on (-1, 1) needs side '+' or '-'")
        x = np.real(arr)
        sign = 1.0 if side == "+" else -1.0
        values = np.where(cut, x + sign * 1j * np.sqrt(np.clip(1 - x * x, 0, None)), arr + _sqrt_z2m1(arr))
    else:
        values = arr + _sqrt_z2m1(arr)
    return values.item() if values.ndim == 0 else values


def a_function(z):
    """a(z) = (z-1)^(1/4) (z+1)^(-1/4), positive for real z > 1."""
    arr = np.asarray(z, dtype=complex)
    if np.any(_on_cut(arr)):
        raise BranchError("a(z) is evaluated off the cut [-1, 1]")
    values = (arr - 1) ** 0.25 * (arr + 1) ** -0.25
    return values.item() if values.ndim == 0 else values


def t_from_s(s: float, n: int) -> float:
    """t = cosh(s / 4n), the inverse of s = 4n ln phi(t)."""
    if not s > 0:
        raise ParameterError(f"s must be positive, got {s}", s=s)
    if n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}", n=n)
    return math.cosh(s / (4.0 * n))


def s_from_t(t: float, n: int) -> float:
    """s = 4n ln phi(t) = 4n arccosh(t)."""
    if not t >= 1:
        raise ParameterError(f"t must be at least 1, got {t}", t=t)
    return 4.0 * n * math.acosh(t)


def rho_t(t: float) -> float:
    """rho_t = 4 (ln phi(t))^2."""
    if not t > 1:
        raise ParameterError(f"rho_t needs t > 1, got {t}", t=t)
    return 4.0 * math.acosh(t) ** 2


@dataclass(frozen=True)
class EdgeMaps:
    """Edge quantities for a weight at a given n."""
    rho_t: float
    s: float
    t: float
    disk_radius: float = DEFAULT_DISK_RADIUS

    def f_t(self, z):
        """The conformal map f_t evaluated at z."""
        return _conformal(self.t, self.rho_t, self.disk_radius, z)

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization."""
        return {"rho_t": self.rho_t, "s": self.s, "t": self.t, "disk_radius": self.disk_radius}


def edge_maps(spec: WeightSpec, n: int, disk_radius: float = DEFAULT_DISK_RADIUS) -> EdgeMaps:
    """Bundle rho_t and s for the weight at size n."""
    return EdgeMaps(rho_t=rho_t(spec.t), s=s_from_t(spec.t, n), t=spec.t, disk_radius=disk_radius)


def _conformal(t: float, rho: float, radius: float, z):
    arr = np.asarray(z)
    if np.any(np.abs(arr - 1) >= radius):
        raise DomainError(f"f_t is analytic only on |z - 1| < {radius}", radius=radius)
    # (ln phi)^2 is single valued near 1 although ln phi itself is not
    values = np.arccosh(arr.astype(complex)) ** 2 / rho
    if not np.iscomplexobj(arr):
        values = values.real
    return values.item() if values.ndim == 0 else values


def conformal_ft(spec: WeightSpec, z, radius: float = DEFAULT_DISK_RADIUS):
    """f_t(z) = (ln phi(z))^2 / rho_t with f_t(1) = 0 and f_t(t) = 1/4."""
    if not spec.t > 1:
        raise ParameterError("f_t needs t > 1", t=spec.t)
    if spec.t - 1 >= radius:
        raise ParameterError(f"t = {spec.t} lies outside the disk |z - 1| < {radius}", t=spec.t)
    return _conformal(spec.t, rho_t(spec.t), radius, z)


# ───────────────────────────────────────── Szego Function ────
def _theta_rule(nodes: int) -> _t.Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(nodes)
    return 0.5 * math.pi * (x + 1), 0.5 * math.pi * w


def _require_t_above_one(spec: WeightSpec):
    if not spec.t > 1:
        raise ParameterError("the Szego function needs t > 1", t=spec.t)


def szego_d_infinity(spec: WeightSpec, nodes: int = DEFAULT_SZEGO_NODES) -> float:
    """D(inf) = 2^-beta exp((1/2pi) int_0^pi g(cos theta) d theta)."""
    _require_t_above_one(spec)
    theta, w = _theta_rule(nodes)
    integral = float(np.dot(w, log_smooth_part(spec, np.cos(theta))))
    return 2.0 ** (-spec.beta) * math.exp(integral / (2 * math.pi))


def _exponent_off_cut(spec: WeightSpec, z: np.ndarray, nodes: int) -> np.ndarray:
    theta, w = _theta_rule(nodes)
    cos_t = np.cos(theta)
    g = log_smooth_part(spec, cos_t)
    integral = (g * w / (z[:, None] - cos_t[None, :])).sum(axis=1)
    return _sqrt_z2m1(z) * integral / (2 * math.pi)


def _exponent_on_cut(spec: WeightSpec, x: float, side: str, nodes: int) -> complex:
    theta, w = _theta_rule(nodes)
    cos_t = np.cos(theta)
    g = log_smooth_part(spec, cos_t)
    gx = float(log_smooth_part(spec, x))
    diff = x - cos_t
    close = np.abs(diff) < 1e-12
    safe = np.where(close, 1.0, diff)
    integrand = np.where(close, -_log_smooth_derivative(spec, x), (g - gx) / safe)
    pv = float(np.dot(w, integrand))
    sign = 1.0 if side == "+" else -1.0
    return sign * 1j * math.sqrt(1 - x * x) * pv / (2 * math.pi) + gx / 2


def szego_d(spec: WeightSpec, z, side: _t.Optional[str] = None,
            nodes: int = DEFAULT_SZEGO_NODES, tol: float = 1e-10):
    """
    Szego function D(z) = ((1 - phi^-2)/2)^beta exp(F(z)) of the weight.

    F is computed by Gauss-Legendre quadrature in theta (x = cos theta) at
    nodes and 2*nodes points; disagreement beyond tol raises AccuracyError.
    On the cut the one-sided values are returned for side '+' or '-'.
    """
    _require_t_above_one(spec)
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    cut = _on_cut(arr)
    if np.any(cut) and side not in SIDES:
        raise BranchError("D on (-1, 1) needs side '+' or '-'")
    if np.any(np.abs(np.real(arr[np.imag(arr) == 0])) == 1):
        raise DomainError("D is singular at the endpoints +/-1 when beta != 0")

    exponent = np.empty(arr.shape, dtype=complex)
    off = ~cut
    if np.any(off):
        coarse = _exponent_off_cut(spec, arr[off], nodes)
        fine = _exponent_off_cut(spec, arr[off], 2 * nodes)
        gap = np.max(np.abs(fine - coarse) / np.maximum(1.0, np.abs(fine)))
        if gap > tol:
            raise AccuracyError(
                f"Szego quadrature did not settle (relative gap {gap:.3e})",
                nodes=nodes, gap=gap, alpha=spec.alpha, t=spec.t,
            )
        exponent[off] = fine
    for i in np.flatnonzero(cut):
        exponent[i] = _exponent_on_cut(spec, float(arr[i].real), side, 2 * nodes)

    phis = np.atleast_1d(np.asarray(phi(arr, side=side), dtype=complex))
    values = ((1 - phis ** -2) / 2) ** spec.beta * np.exp(exponent)
    if np.ndim(z) == 0:
        return complex(values[0])
    return values


# ───────────────────────────────────────── Outer Parametrix ────
def outer_parametrix_n(spec: WeightSpec, z, nodes: int = DEFAULT_SZEGO_NODES) -> np.ndarray:
    """N(z) = D(inf)^sigma3 M1^-1 a(z)^-sigma3 M1 D(z)^-sigma3 for a single z off [-1, 1]."""
    z = complex(z)
    d_inf = szego_d_infinity(spec, nodes)
    d_z = szego_d(spec, z, nodes=nodes)
    a = a_function(z)
    left = np.diag([d_inf, 1 / d_inf]).astype(complex)
    middle = M1_INV @ np.diag([1 / a, a]) @ M1
    right = np.diag([1 / d_z, d_z])
    result = left @ middle @ right
    logging.debug(f"outer parametrix at z={z}: det={np.linalg.det(result)}")
    return result
