#!/usr/bin/env python
"""
Orthogonal polynomials for the perturbed Jacobi weight.

Recurrence coefficients come from a discretized Stieltjes (Lanczos)
procedure on a Gauss-Jacobi rule that absorbs the endpoint singularities;
the finite-n Christoffel-Darboux kernel K_n built from them is the ground
truth every limit experiment compares against.
"""
from __future__ import annotations
import math
import logging
import typing as _t
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

try:
    from .errors import ParameterError, NumericalBreakdownError, ConfluentPointError
    from .weight import WeightSpec, eval_weight
except ImportError:
    from errors import ParameterError, NumericalBreakdownError, ConfluentPointError
    from weight import WeightSpec, eval_weight

CONFLUENT_GAP = 1e-10
GRADED_RATIO = 0.5
DEFAULT_GRADED_THRESHOLD = 1e-3


# ───────────────────────────────────────── Quadrature Rules ────
def _is_nonneg_integer(x: float) -> bool:
    return x >= 0 and float(x).is_integer()


def _jacobi_rule(spec: WeightSpec, n_quad: int) -> _t.Tuple[np.ndarray, np.ndarray]:
    if spec.merged:
        exponent = spec.alpha + spec.beta
        x, w = roots_jacobi(n_quad, exponent, exponent)
        return x, w * spec.h(x)
    x, w = roots_jacobi(n_quad, spec.beta, spec.beta)
    return x, w * (spec.t ** 2 - x * x) ** spec.alpha * spec.h(x)


def _graded_rule(spec: WeightSpec, n_quad: int) -> _t.Tuple[np.ndarray, np.ndarray]:
    """Composite rule on [-1, 1] with panels shrinking geometrically toward +/-1."""
    limit = (spec.t - 1) / 4
    breaks = [0.0]
    width = 1.0
    while width > limit:
        width *= GRADED_RATIO
        breaks.append(1.0 - width)
    nodes, weights = [], []
    for left, right in zip(breaks[:-1], breaks[1:]):
        k = max(24, int(math.ceil(n_quad * (right - left))))
        xi, wi = leggauss(k)
        x = left + (right - left) * (xi + 1) / 2
        nodes.append(x)
        weights.append(wi * (right - left) / 2 * eval_weight(spec, x))
    # end panel [c, 1] carries (1 - x)^beta exactly
    c = breaks[-1]
    k = max(24, n_quad // 4)
    xi, wi = roots_jacobi(k, spec.beta, 0.0)
    half = (1 - c) / 2
    x = c + half * (xi + 1)
    nodes.append(x)
    weights.append(wi * half ** (spec.beta + 1) * (1 + x) ** spec.beta
                   * (spec.t ** 2 - x * x) ** spec.alpha * spec.h(x))
    right_x = np.concatenate(nodes)
    right_w = np.concatenate(weights)
    # mirror; h need not be even so reweight the left half
    left_x = -right_x[::-1]
    left_w = right_w[::-1] * spec.h(left_x) / spec.h(-left_x)
    keep = right_x > 0
    x_all = np.concatenate([left_x[left_x < 0], right_x[keep]])
    w_all = np.concatenate([left_w[left_x < 0], right_w[keep]])
    return x_all, w_all


def quadrature_rule(spec: WeightSpec, n_quad: int,
                    graded_threshold: float = DEFAULT_GRADED_THRESHOLD) -> _t.Tuple[np.ndarray, np.ndarray, str]:
    """Nodes and weights for integrals against w, plus the rule's name."""
    if not spec.merged and spec.t - 1 < graded_threshold and not _is_nonneg_integer(spec.alpha):
        x, w = _graded_rule(spec, n_quad)
        return x, w, "graded"
    x, w = _jacobi_rule(spec, n_quad)
    return x, w, "gauss-jacobi"


# ───────────────────────────────────────── Recurrence Table ────
@dataclass(frozen=True, eq=False)
class RecurrenceTable:
    """
    Monic recurrence pi_{k+1} = (x - a_k) pi_k - bsq_k pi_{k-1}.

    bsq[0] holds mu_0 = int w; gamma[k] is the leading coefficient of the
    orthonormal polynomial p_k = gamma[k] pi_k.
    """
    n_max: int
    mu0: float
    a: np.ndarray
    bsq: np.ndarray
    gamma: np.ndarray
    quad_nodes: np.ndarray
    quad_weights: np.ndarray
    n_quad: int
    rule: str = "gauss-jacobi"

    @property
    def b(self) -> np.ndarray:
        """Orthonormal off-diagonal terms sqrt(bsq); b[0] is unused."""
        return np.sqrt(self.bsq)

    def rows(self) -> _t.List[dict]:
        """One row per degree for CSV export."""
        return [
            {"k": k, "a": float(self.a[k]), "bsq": float(self.bsq[k]),
             "gamma": float(self.gamma[k])}
            for k in range(self.n_max + 1)
        ]

    def to_dict(self) -> dict:
        """Summary metadata for serialization."""
        return {"n_max": self.n_max, "mu0": self.mu0, "n_quad": self.n_quad, "rule": self.rule}


def _lanczos(nodes: np.ndarray, weights: np.ndarray, n_max: int,
             reorthogonalize: bool) -> _t.Tuple[np.ndarray, np.ndarray]:
    q_prev = np.zeros_like(nodes)
    q = np.sqrt(weights)
    norm = math.sqrt(math.fsum(q * q))
    q = q / norm
    basis = [q]
    a = np.zeros(n_max + 1)
    bsq = np.zeros(n_max + 1)
    b_k = 0.0
    for k in range(n_max + 1):
        v = nodes * q - b_k * q_prev
        a[k] = math.fsum(q * v)
        if k == n_max:
            break
        v = v - a[k] * q
        if reorthogonalize:
            stacked = np.array(basis)
            v = v - stacked.T @ (stacked @ v)
        b_next_sq = math.fsum(v * v)
        if not math.isfinite(b_next_sq) or b_next_sq <= 1e-28:
            raise NumericalBreakdownError(
                f"recurrence lost positivity at degree {k + 1}; increase n_quad",
                degree=k + 1, bsq=b_next_sq, nodes=len(nodes),
            )
        b_next = math.sqrt(b_next_sq)
        q_prev, q = q, v / b_next
        basis.append(q)
        bsq[k + 1] = b_next_sq
        b_k = b_next
    return a, bsq


def build_recurrence(spec: WeightSpec, n_max: int, n_quad: _t.Optional[int] = None,
                     reorthogonalize: bool = True,
                     graded_threshold: float = DEFAULT_GRADED_THRESHOLD) -> RecurrenceTable:
    """Recurrence coefficients up to degree n_max by the discretized Stieltjes procedure."""
    if n_max < 1:
        raise ParameterError(f"n_max must be positive, got {n_max}", n_max=n_max)
    if n_quad is None:
        n_quad = 4 * n_max + 40
    if n_quad < 4 * n_max:
        raise ParameterError(f"n_quad must be at least 4*n_max = {4 * n_max}, got {n_quad}",
                             n_quad=n_quad, n_max=n_max)
    nodes, weights, rule = quadrature_rule(spec, n_quad, graded_threshold)
    mu0 = math.fsum(weights)
    a, bsq = _lanczos(nodes, weights, n_max, reorthogonalize)
    bsq[0] = mu0
    gamma = np.empty(n_max + 1)
    gamma[0] = 1 / math.sqrt(mu0)
    for k in range(1, n_max + 1):
        gamma[k] = gamma[k - 1] / math.sqrt(bsq[k])
    logging.info(f"Built recurrence to degree {n_max} on {len(nodes)} {rule} nodes (mu0={mu0:.12g})")
    return RecurrenceTable(n_max=n_max, mu0=mu0, a=a, bsq=bsq, gamma=gamma,
                           quad_nodes=nodes, quad_weights=weights, n_quad=n_quad, rule=rule)


# ───────────────────────────────────────── Polynomial Evaluation ────
def _check_degree(table: RecurrenceTable, k: int):
    if k < 0 or k > table.n_max:
        raise ParameterError(f"degree {k} outside 0..{table.n_max}", k=k, n_max=table.n_max)


def eval_basis(table: RecurrenceTable, n: int, x) -> np.ndarray:
    """Matrix of p_0..p_{n-1} at the points x, shape (len(x), n)."""
    _check_degree(table, n - 1)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((xs.size, n))
    b = table.b
    out[:, 0] = table.gamma[0]
    if n > 1:
        out[:, 1] = (xs - table.a[0]) * out[:, 0] / b[1]
    for k in range(1, n - 1):
        out[:, k + 1] = ((xs - table.a[k]) * out[:, k] - b[k] * out[:, k - 1]) / b[k + 1]
    return out


def _orthonormal_pair(table: RecurrenceTable, k: int, x, with_derivative: bool = False):
    """p_k, p_{k-1} and optionally their derivatives."""
    xs = np.asarray(x, dtype=float)
    b = table.b
    p_prev = np.zeros_like(xs)
    p = np.full_like(xs, table.gamma[0])
    dp_prev = np.zeros_like(xs)
    dp = np.zeros_like(xs)
    for j in range(k):
        b_j = b[j] if j else 0.0
        p_next = ((xs - table.a[j]) * p - b_j * p_prev) / b[j + 1]
        if with_derivative:
            dp_next = ((xs - table.a[j]) * dp + p - b_j * dp_prev) / b[j + 1]
            dp_prev, dp = dp, dp_next
        p_prev, p = p, p_next
    return p, p_prev, dp, dp_prev


def eval_poly(table: RecurrenceTable, k: int, x):
    """(pi_k(x), p_k(x)): monic and orthonormal values of degree k."""
    _check_degree(table, k)
    p, _, _, _ = _orthonormal_pair(table, k, x)
    return p / table.gamma[k], p


def eval_poly_derivative(table: RecurrenceTable, k: int, x):
    """(p_k(x), p_k'(x)) from the differentiated recurrence."""
    _check_degree(table, k)
    p, _, dp, _ = _orthonormal_pair(table, k, x, with_derivative=True)
    return p, dp


def log_monic(table: RecurrenceTable, n: int, z: float) -> float:
    """ln pi_n(z) for real z > 1 through the ratio recurrence (overflow-safe)."""
    _check_degree(table, n)
    if not z > 1:
        raise ParameterError("log_monic needs real z > 1", z=z)
    if n == 0:
        return 0.0
    total = []
    ratio = z - table.a[0]
    total.append(math.log(ratio))
    for k in range(1, n):
        ratio = (z - table.a[k]) - table.bsq[k] / ratio
        total.append(math.log(ratio))
    return math.fsum(total)


def orthonormality_residual(table: RecurrenceTable, spec: WeightSpec,
                            graded_threshold: float = DEFAULT_GRADED_THRESHOLD) -> float:
    """max |int p_j p_k w - delta_jk| under the table's rule refined 2x."""
    nodes, weights, _ = quadrature_rule(spec, 2 * table.n_quad, graded_threshold)
    basis = eval_basis(table, table.n_max + 1, nodes)
    gram = basis.T @ (weights[:, None] * basis)
    return float(np.max(np.abs(gram - np.eye(table.n_max + 1))))


# ───────────────────────────────────────── Kernel Evaluator ────
@dataclass(frozen=True, eq=False)
class KernelEvaluator:
    """A weight bound to its recurrence; evaluates K_n."""
    spec: WeightSpec
    table: RecurrenceTable
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= self.table.n_max:
            raise ParameterError(f"kernel size n={self.n} needs 1 <= n <= n_max={self.table.n_max}",
                                 n=self.n, n_max=self.table.n_max)

    @classmethod
    def from_spec(cls, spec: WeightSpec, n: int, n_quad: _t.Optional[int] = None,
                  **kwargs) -> 'KernelEvaluator':
        """Build the recurrence to degree n and bind it."""
        return cls(spec=spec, table=build_recurrence(spec, n, n_quad, **kwargs), n=n)

    def with_n(self, n: int) -> 'KernelEvaluator':
        """Same weight and table at another kernel size."""
        return KernelEvaluator(self.spec, self.table, n)


def kernel_kn_diag(ev: KernelEvaluator, x):
    """K_n(x, x) = w(x) b_n (p_n' p_{n-1} - p_{n-1}' p_n)."""
    xs = np.asarray(x, dtype=float)
    p, p_prev, dp, dp_prev = _orthonormal_pair(ev.table, ev.n, xs, with_derivative=True)
    values = eval_weight(ev.spec, xs) * ev.table.b[ev.n] * (dp * p_prev - dp_prev * p)
    return values.item() if np.ndim(values) == 0 else values


def kernel_kn(ev: KernelEvaluator, x, y, route_diagonal: bool = False):
    """
    Christoffel-Darboux form of K_n(x, y).

    Points with |x - y| < 1e-10 raise ConfluentPointError unless
    route_diagonal is set, in which case kernel_kn_diag is used there.
    """
    xs, ys = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    close = np.abs(xs - ys) < CONFLUENT_GAP
    if np.any(close) and not route_diagonal:
        raise ConfluentPointError("x and y coincide; use kernel_kn_diag", gap=CONFLUENT_GAP)
    px, px_prev, _, _ = _orthonormal_pair(ev.table, ev.n, xs)
    py, py_prev, _, _ = _orthonormal_pair(ev.table, ev.n, ys)
    diff = np.where(close, 1.0, xs - ys)
    weight = np.sqrt(eval_weight(ev.spec, xs) * eval_weight(ev.spec, ys))
    values = weight * ev.table.b[ev.n] * (px * py_prev - px_prev * py) / diff
    if np.any(close):
        values = np.where(close, kernel_kn_diag(ev, xs), values)
    return values.item() if np.ndim(values) == 0 else values


def kernel_direct_sum(ev: KernelEvaluator, x, y):
    """sqrt(w(x) w(y)) sum_{k<n} p_k(x) p_k(y)."""
    xs, ys = np.broadcast_arrays(np.atleast_1d(np.asarray(x, dtype=float)),
                                 np.atleast_1d(np.asarray(y, dtype=float)))
    bx = eval_basis(ev.table, ev.n, xs.ravel())
    by = eval_basis(ev.table, ev.n, ys.ravel())
    weight = np.sqrt(eval_weight(ev.spec, xs.ravel()) * eval_weight(ev.spec, ys.ravel()))
    values = (weight * np.sum(bx * by, axis=1)).reshape(xs.shape)
    return values.item() if np.ndim(x) == 0 and np.ndim(y) == 0 else values


def trace_identity(ev: KernelEvaluator) -> float:
    """int K_n(x, x) dx on the table's rule; equals n."""
    nodes, weights = ev.table.quad_nodes, ev.table.quad_weights
    values = kernel_kn_diag(ev, nodes) / eval_weight(ev.spec, nodes)
    return math.fsum(weights * values)


def reproducing_residual(ev: KernelEvaluator, points: _t.Sequence[_t.Tuple[float, float]]) -> float:
    """max |int K_n(x, z) K_n(z, y) dz - K_n(x, y)| over the given pairs."""
    nodes, weights = ev.table.quad_nodes, ev.table.quad_weights
    w_nodes = eval_weight(ev.spec, nodes)
    worst = 0.0
    for x, y in points:
        left = kernel_kn(ev, x, nodes, route_diagonal=True)
        right = kernel_kn(ev, nodes, y, route_diagonal=True)
        integral = math.fsum(weights * left * right / w_nodes)
        target = kernel_kn(ev, x, y, route_diagonal=True)
        worst = max(worst, abs(integral - target))
    return worst
