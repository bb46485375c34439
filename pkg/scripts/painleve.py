#!/usr/bin/env python
"""
Schlesinger system behind the double-scaling kernel, its scalar reductions
and the monodromy data of the associated RH problem.

The integrator works in the polynomial variables (b, p, q) with
p = b/y and q = (b + Theta) y, where the constraint p q = b (b + Theta)
is a first integral and y in {0, +1, -1} are regular points. Derivatives
for the residual checks come from Taylor jets of the vector field at the
interpolated state, so they carry no finite-difference error.
"""
from __future__ import annotations
import math
import cmath
import logging
import typing as _t
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

try:
    from .errors import (ParameterError, PoleError, InsufficientRangeError, SingularityError,
                         StiffnessError, TransformationSingularError)
except ImportError:
    from errors import (ParameterError, PoleError, InsufficientRangeError, SingularityError,
                        StiffnessError, TransformationSingularError)

POLE_TOLERANCE = 1e-12
DEFAULT_BLOWUP = 1e8
DEFAULT_JET_ORDER = 5
SIGNS = ("+", "-")
BOUNDARY_ENDS = ("small-s", "large-s")

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)


def _sign_value(sign: str) -> int:
    if sign not in SIGNS:
        raise ParameterError(f"sign must be '+' or '-', got {sign!r}", sign=sign)
    return 1 if sign == "+" else -1


@dataclass(frozen=True)
class PainleveParams:
    """Theta and gamma of the Lax pair; Theta = -alpha, gamma = beta - 1/2 for the kernel."""
    theta: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.gamma)):
            raise ParameterError("Theta and gamma must be finite", theta=self.theta, gamma=self.gamma)

    @classmethod
    def from_weight(cls, alpha: float, beta: float) -> 'PainleveParams':
        return cls(theta=-alpha, gamma=beta - 0.5)

    def to_dict(self) -> dict:
        return {"theta": self.theta, "gamma": self.gamma}


# ───────────────────────────────────────── Taylor Jets ────
class Jet:
    """
    Truncated Taylor series in h = s - s*, batched over trailing axes.

    coeffs[k] is the k-th Taylor coefficient; derivative(k) = k! coeffs[k].
    """
    __array_ufunc__ = None

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs)

    @classmethod
    def constant(cls, value, order: int) -> 'Jet':
        value = np.asarray(value)
        coeffs = np.zeros((order + 1,) + value.shape, dtype=value.dtype if value.dtype.kind == "c" else float)
        coeffs[0] = value
        return cls(coeffs)

    @classmethod
    def variable(cls, value, order: int) -> 'Jet':
        """The independent variable s* + h."""
        jet = cls.constant(value, order)
        if order >= 1:
            jet.coeffs[1] = 1.0
        return jet

    @classmethod
    def where(cls, condition, a: 'Jet', b: 'Jet') -> 'Jet':
        return cls(np.where(condition, a.coeffs, b.coeffs))

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self):
        return self.coeffs[0]

    def derivative(self, k: int):
        if k > self.order:
            raise ParameterError(f"jet of order {self.order} has no derivative {k}", k=k)
        return math.factorial(k) * self.coeffs[k]

    def _lift(self, other) -> np.ndarray:
        if isinstance(other, Jet):
            return other.coeffs
        other = np.asarray(other)
        coeffs = np.zeros(np.broadcast_shapes(self.coeffs.shape, (1,) + other.shape),
                          dtype=np.result_type(self.coeffs, other))
        coeffs[0] = other
        return coeffs

    def __add__(self, other):
        return Jet(self.coeffs + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Jet(self.coeffs - self._lift(other))

    def __rsub__(self, other):
        return Jet(self._lift(other) - self.coeffs)

    def __neg__(self):
        return Jet(-self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * np.asarray(other))
        a, b = np.broadcast_arrays(self.coeffs, other.coeffs)
        out = np.zeros(a.shape, dtype=np.result_type(a, b))
        for k in range(self.order + 1):
            out[k] = sum(a[j] * b[k - j] for j in range(k + 1))
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs / np.asarray(other))
        a, b = np.broadcast_arrays(self.coeffs, other.coeffs)
        out = np.zeros(a.shape, dtype=np.result_type(a, b, float))
        for k in range(self.order + 1):
            out[k] = (a[k] - sum(b[j] * out[k - j] for j in range(1, k + 1))) / b[0]
        return Jet(out)

    def __rtruediv__(self, other):
        return Jet(self._lift(other)) / self

    def __pow__(self, power: int):
        if not isinstance(power, int) or power < 0:
            raise ParameterError("jets support non-negative integer powers only", power=power)
        result = Jet.constant(np.ones_like(self.value), self.order)
        for _ in range(power):
            result = result * self
        return result

    def sqrt(self) -> 'Jet':
        out = np.zeros(self.coeffs.shape, dtype=np.result_type(self.coeffs, float))
        out[0] = np.sqrt(self.coeffs[0])
        for k in range(1, self.order + 1):
            cross = sum(out[j] * out[k - j] for j in range(1, k))
            out[k] = (self.coeffs[k] - cross) / (2 * out[0])
        return Jet(out)


def _value(x):
    return x.value if isinstance(x, Jet) else x


def _unwrap(x):
    if isinstance(x, np.ndarray) and x.ndim == 0:
        return x.item()
    return x


def _select(condition, a, b):
    if isinstance(a, Jet) or isinstance(b, Jet):
        order = a.order if isinstance(a, Jet) else b.order
        a = a if isinstance(a, Jet) else Jet.constant(a, order)
        b = b if isinstance(b, Jet) else Jet.constant(b, order)
        return Jet.where(condition, a, b)
    picked = np.where(condition, a, b)
    return picked.item() if np.ndim(picked) == 0 else picked


# ───────────────────────────────────────── Vector Field ────
def _vector_field(params: PainleveParams, s, b, p, q):
    """(b', p', q') of the Schlesinger system; works on floats, arrays and jets."""
    u = (p - q + params.gamma) / s
    lin = u * (2 * b + params.theta)
    return u * (p + q), lin + 0.5 * p, lin - 0.5 * q


def taylor_jets(params: PainleveParams, s, state, order: int = DEFAULT_JET_ORDER) -> _t.Tuple[Jet, Jet, Jet]:
    """Taylor jets of (b, p, q) through the given state, by Picard recursion."""
    s_points = np.atleast_1d(np.asarray(s, dtype=float))
    state = np.asarray(state, dtype=float).reshape(3, -1)
    coeffs = np.zeros((3, order + 1, s_points.size))
    coeffs[:, 0] = state
    s_jet = Jet.variable(s_points, order)
    for k in range(order):
        field = _vector_field(params, s_jet, Jet(coeffs[0]), Jet(coeffs[1]), Jet(coeffs[2]))
        for i, component in enumerate(field):
            coeffs[i, k + 1] = component.coeffs[k] / (k + 1)
    return Jet(coeffs[0]), Jet(coeffs[1]), Jet(coeffs[2])


def _y_from_state(params: PainleveParams, b, p, q):
    """y = b/p or q/(b + Theta), whichever denominator is larger."""
    shifted = b + params.theta
    use_p = np.abs(_value(p)) >= np.abs(_value(shifted))
    with np.errstate(all="ignore"):
        return _select(use_p, b / p, q / shifted)


def _project(params: PainleveParams, state: np.ndarray) -> np.ndarray:
    """Restore p q = b (b + Theta) keeping b and y."""
    b, p, q = state
    y = _y_from_state(params, b, p, q)
    use_p = np.abs(p) >= np.abs(b + params.theta)
    with np.errstate(all="ignore"):
        p_new = np.where(use_p | (y == 0), p, b / y)
        q_new = np.where(use_p, (b + params.theta) * y, q)
    return np.array([b, p_new, q_new])


# ───────────────────────────────────────── Scalar Reductions ────
def _near(value, target) -> bool:
    return abs(value - target) < POLE_TOLERANCE


def residual_second_order(params: PainleveParams, y: float, y1: float, y2: float, s: float) -> float:
    """Left-hand side of the second-order equation for y."""
    if _near(y, 1) or _near(y, -1):
        raise PoleError("second-order equation has poles at y = +/-1", y=y)
    if not s > 0:
        raise ParameterError("s must be positive", s=s)
    yy = y * y
    return (y2 - 2 * y * y1 * y1 / (yy - 1) + y1 / s + y * (yy + 1) / (4 * (yy - 1))
            + y / (2 * s) - params.theta * y / s + params.gamma * (yy + 1) / (2 * s))


def residual_first_order(params: PainleveParams, b: float, b1: float, y: float, y1: float,
                         s: float) -> _t.Tuple[float, float]:
    """Residuals of s b' and s y' against the first-order pair."""
    if _near(y, 0):
        raise PoleError("first-order pair has a pole at y = 0", y=y)
    theta, gamma = params.theta, params.gamma
    yy = y * y
    rb = s * b1 - (b * b / yy - (b + theta) ** 2 * yy + gamma * (b / y + y * (b + theta)))
    ry = s * y1 - (-s * y / 2 + b * (yy - 1) ** 2 / y + theta * (yy - 1) * y - gamma * (yy - 1))
    return rb, ry


def residual_gpv(params: PainleveParams, omega: float, omega1: float, omega2: float, s: float,
                 sign: str = "+") -> float:
    """Left-hand side of the generalized Painleve V for omega = y^2; sign picks +/- gamma sqrt(omega)."""
    eps = _sign_value(sign)
    if _near(omega, 0) or _near(omega, 1):
        raise PoleError("generalized PV has poles at omega = 0, 1", omega=omega)
    root = math.sqrt(omega)
    return (omega2 - (1 / (omega - 1) + 1 / (2 * omega)) * omega1 * omega1 + omega1 / s
            - (2 * params.theta - 1) * omega / s + omega * (omega + 1) / (2 * (omega - 1))
            + eps * params.gamma * root * (omega + 1) / s)


def mobius_to_p3(y):
    """v = (y + 1)/(y - 1)."""
    if np.any(np.asarray(_value(y)) == 1):
        raise PoleError("Mobius map has a pole at y = 1")
    return (y + 1) / (y - 1)


def residual_p3(params: PainleveParams, v: float, v1: float, v2: float, s: float) -> float:
    """Left-hand side of the Painleve III equation for v."""
    if _near(v, 0):
        raise PoleError("Painleve III has a pole at v = 0", v=v)
    theta, gamma = params.theta, params.gamma
    return (v2 - v1 * v1 / v + v1 / s
            + ((theta - gamma - 0.5) / 2 * v * v - (theta + gamma - 0.5) / 2) / s
            - v ** 3 / 16 + 1 / (16 * v))


def residual_u_ode(params: PainleveParams, u: float, u1: float, u2: float, u3: float, s: float) -> float:
    """Left-hand side of the third-order equation for u."""
    if _near(u, 0):
        raise PoleError("third-order equation has a pole at u = 0", u=u)
    return (s * u3 + u2 * (3 - s * u1 / u) - 2 * u1 * u1 / u - 4 * s * u1 * u * u
            - 4 * u ** 3 - u / 4 - params.gamma * u1 / (4 * u))


# ───────────────────────────────────────── Trajectory ────
@dataclass(frozen=True, eq=False)
class PainleveTrajectory:
    """Ascending samples of (b, p, q) with the dense interpolant of the run."""
    params: PainleveParams
    s_grid: np.ndarray
    states: np.ndarray
    solution: _t.Any
    s_start: float
    s_end: float
    stopped_at: _t.Optional[float] = None
    constraint_drift: float = 0.0

    @property
    def b(self) -> np.ndarray:
        return self.states[0]

    @property
    def p(self) -> np.ndarray:
        return self.states[1]

    @property
    def q(self) -> np.ndarray:
        return self.states[2]

    @property
    def y(self) -> np.ndarray:
        return _y_from_state(self.params, self.b, self.p, self.q)

    @property
    def u(self) -> np.ndarray:
        return (self.p - self.q + self.params.gamma) / self.s_grid

    @property
    def sigma(self) -> np.ndarray:
        return (self.b + self.params.theta / 2) * self.s_grid - (self.s_grid * self.u) ** 2

    @property
    def omega(self) -> np.ndarray:
        return self.y ** 2

    @property
    def v(self) -> np.ndarray:
        with np.errstate(all="ignore"):
            return (self.y + 1) / (self.y - 1)

    @property
    def c2hat(self) -> np.ndarray:
        u = self.u
        return (u + u * self.sigma - 0.5 * (self.p + self.q)) / self.s_grid

    @property
    def s_range(self) -> _t.Tuple[float, float]:
        return float(self.s_grid[0]), float(self.s_grid[-1])

    def state_at(self, s) -> np.ndarray:
        """Interpolated (b, p, q), projected back onto the constraint."""
        s_points = np.atleast_1d(np.asarray(s, dtype=float))
        low, high = self.s_range
        if np.any(s_points < low - 1e-12) or np.any(s_points > high + 1e-12):
            raise InsufficientRangeError(f"s outside the integrated range [{low}, {high}]",
                                         low=low, high=high)
        return _project(self.params, self.solution(s_points).reshape(3, -1))

    def jets(self, s, order: int = DEFAULT_JET_ORDER) -> _t.Tuple[Jet, Jet, Jet]:
        return taylor_jets(self.params, s, self.state_at(s), order)


def _constraint(params: PainleveParams, states: np.ndarray) -> np.ndarray:
    b, p, q = states
    return p * q - b * (b + params.theta)


def integrate_schlesinger(params: PainleveParams, s0: float, s1: float, b0: float, y0: float,
                          tol: float = 1e-10, atol: float = 1e-12, blowup: float = DEFAULT_BLOWUP,
                          stop_at_singular_manifold: bool = False,
                          truncate: bool = False) -> PainleveTrajectory:
    """
    Integrate from s0 to s1 (either direction) with DOP853 and dense output.

    Blow-up of the state past `blowup` raises SingularityError carrying the
    last good s, or ends the trajectory there when `truncate` is set.
    """
    if not (s0 > 0 and s1 > 0):
        raise ParameterError("s0 and s1 must be positive", s0=s0, s1=s1)
    if s0 == s1:
        raise ParameterError("s0 and s1 must differ", s0=s0)
    if _near(y0, 0) or _near(y0, 1) or _near(y0, -1):
        raise ParameterError("y0 lies on the singular manifold {0, +1, -1}", y0=y0)
    if _near(2 * b0 + params.theta, 0):
        raise ParameterError("2 b0 + Theta must not vanish", b0=b0, theta=params.theta)
    if not 0 < tol < 1:
        raise ParameterError("tol must lie in (0, 1)", tol=tol)
    theta = params.theta
    initial = np.array([b0, b0 / y0, (b0 + theta) * y0], dtype=float)

    def field(s, x):
        return np.array(_vector_field(params, s, x[0], x[1], x[2]))

    def blown_up(s, x):
        return blowup - np.max(np.abs(x))

    blown_up.terminal = True
    events = [blown_up]
    if stop_at_singular_manifold:
        def unit_y(s, x):
            return x[0] * x[2] - x[1] * (x[0] + theta)

        def zero_y(s, x):
            return x[0]

        unit_y.terminal = zero_y.terminal = True
        events += [unit_y, zero_y]

    logging.info(f"Integrating Schlesinger system theta={theta}, gamma={params.gamma} "
                 f"from s={s0} to s={s1}")
    sol = solve_ivp(field, (s0, s1), initial, method="DOP853", rtol=tol, atol=atol,
                    dense_output=True, events=events)
    if sol.status == -1:
        raise StiffnessError(f"integrator failed: {sol.message}", last_s=float(sol.t[-1]))
    stopped_at = None
    if sol.status == 1:
        last_s = float(sol.t[-1])
        fired = [i for i, times in enumerate(sol.t_events) if len(times)]
        reason = "blow-up" if fired and fired[0] == 0 else "singular manifold"
        if not truncate or len(sol.t) < 3:
            raise SingularityError(f"trajectory hit a {reason} near s={last_s}", last_s=last_s,
                                   reason=reason)
        logging.warning(f"Trajectory truncated at s={last_s} ({reason})")
        stopped_at = last_s
    order = np.argsort(sol.t)
    s_grid, states = sol.t[order], sol.y[:, order]
    drift = float(np.max(np.abs(_constraint(params, states))))
    logging.debug(f"Trajectory: {len(s_grid)} steps, constraint drift {drift:.3e}")
    return PainleveTrajectory(params=params, s_grid=s_grid, states=states, solution=sol.sol,
                              s_start=float(s0), s_end=float(s1), stopped_at=stopped_at,
                              constraint_drift=drift)


# ───────────────────────────────────────── Residual Sweep ────
def _grid(traj: PainleveTrajectory, n_points: int) -> np.ndarray:
    low, high = traj.s_range
    pad = 1e-9 * (high - low)
    return np.linspace(low + pad, high - pad, n_points)


def _sweep(values: _t.Callable[[int], float], mask: np.ndarray) -> np.ndarray:
    out = np.full(mask.shape, np.nan)
    for i in np.flatnonzero(~mask):
        out[i] = values(i)
    return out


def trajectory_residuals(traj: PainleveTrajectory, n_points: int = 400,
                         pole_margin: float = 0.05) -> dict:
    """
    All scalar-equation residuals plus the definition identities on a uniform grid.

    Points within pole_margin of a singular manifold of an equation are
    masked (NaN) for that equation only.
    """
    if n_points < 2:
        raise ParameterError("n_points must be at least 2", n_points=n_points)
    params = traj.params
    theta, gamma = params.theta, params.gamma
    s = _grid(traj, n_points)
    b, p, q = traj.jets(s)
    s_jet = Jet.variable(s, b.order)
    with np.errstate(all="ignore"):
        y = _y_from_state(params, b, p, q)
        u = (p - q + gamma) / s_jet
        sigma = (b + theta / 2) * s_jet - (s_jet * u) ** 2
        c2hat = (u + u * sigma - 0.5 * (p + q)) / s_jet
        omega = y * y
        v = (y + 1) / (y - 1)
    yv, uv = y.value, u.value
    finite = np.all(np.isfinite(y.coeffs[:4]), axis=0) & np.all(np.isfinite(u.coeffs[:4]), axis=0)
    masks = {
        "first_order": ~finite | (np.abs(yv) < pole_margin),
        "second_order": ~finite | (np.abs(yv * yv - 1) < pole_margin),
        "gpv": ~finite | (np.abs(yv * yv) < pole_margin) | (np.abs(yv * yv - 1) < pole_margin),
        "p3": ~finite | (np.abs(yv - 1) < pole_margin) | (np.abs(yv + 1) < pole_margin),
        "u_ode": ~finite | (np.abs(uv) < pole_margin),
    }
    d = {name: [jet.derivative(k) for k in range(4)] for name, jet in
         (("b", b), ("y", y), ("omega", omega), ("v", v), ("u", u), ("sigma", sigma))}

    def first_order(i):
        rb, ry = residual_first_order(params, d["b"][0][i], d["b"][1][i], d["y"][0][i], d["y"][1][i], s[i])
        return max(abs(rb), abs(ry))

    residuals = {
        "first_order": _sweep(first_order, masks["first_order"]),
        "second_order": _sweep(lambda i: abs(residual_second_order(
            params, d["y"][0][i], d["y"][1][i], d["y"][2][i], s[i])), masks["second_order"]),
        "gpv": _sweep(lambda i: abs(residual_gpv(
            params, d["omega"][0][i], d["omega"][1][i], d["omega"][2][i], s[i],
            "+" if d["y"][0][i] > 0 else "-")), masks["gpv"]),
        "p3": _sweep(lambda i: abs(residual_p3(
            params, d["v"][0][i], d["v"][1][i], d["v"][2][i], s[i])), masks["p3"]),
        "u_ode": _sweep(lambda i: abs(residual_u_ode(
            params, d["u"][0][i], d["u"][1][i], d["u"][2][i], d["u"][3][i], s[i])), masks["u_ode"]),
    }
    with np.errstate(all="ignore"):
        rebuilt = (gamma + 2 * uv + 2 * uv * sigma.value - uv * s - 2 * c2hat.value * s) / (2 * (b.value + theta))
        identities = {
            "sigma_derivative": np.abs(d["sigma"][1] - (b.value + theta / 2)),
            "u_definition": np.where(np.abs(yv) > pole_margin,
                                     np.abs(uv * s - (b.value / yv - (b.value + theta) * yv + gamma)), np.nan),
            "c2hat_reconstruction": np.abs(rebuilt - yv),
        }
    residuals.update(identities)
    maxima = {name: float(np.nanmax(vals)) if np.any(np.isfinite(vals)) else float("nan")
              for name, vals in residuals.items()}
    masked = {name: int(np.count_nonzero(mask)) for name, mask in masks.items()}
    logging.info(f"Residual sweep over [{s[0]:.4g}, {s[-1]:.4g}] at {n_points} points: "
                 + ", ".join(f"{k}={v:.2e}" for k, v in maxima.items()))
    return {"s": s, "residuals": residuals, "max": maxima, "masked": masked,
            "constraint_drift": traj.constraint_drift}


def trajectory_rows(traj: PainleveTrajectory, s_points=None) -> _t.List[dict]:
    """CSV rows (s, b, y, u, sigma, omega, v, c2hat, residual) at the given points or solver steps."""
    s = traj.s_grid if s_points is None else np.asarray(s_points, dtype=float)
    params = traj.params
    b, p, q = traj.jets(s, order=2)
    s_jet = Jet.variable(s, 2)
    with np.errstate(all="ignore"):
        y = _y_from_state(params, b, p, q)
        u = (p - q + params.gamma) / s_jet
    rows = []
    for i, si in enumerate(s):
        yi, ui, bi = float(y.value[i]), float(u.value[i]), float(b.value[i])
        sigma = (bi + params.theta / 2) * si - (si * ui) ** 2
        try:
            residual = abs(residual_second_order(params, yi, y.derivative(1)[i], y.derivative(2)[i], si))
        except PoleError:
            residual = float("nan")
        rows.append({
            "s": float(si), "b": bi, "y": yi, "u": ui, "sigma": sigma, "omega": yi * yi,
            "v": (yi + 1) / (yi - 1) if yi != 1 else float("inf"),
            "c2hat": (ui + ui * sigma - 0.5 * float(p.value[i] + q.value[i])) / si,
            "residual_second_order": residual,
        })
    return rows


# ───────────────────────────────────────── Backlund Transformation ────
@dataclass(frozen=True)
class BacklundResult:
    params: PainleveParams
    b: _t.Any
    y: _t.Any
    kappa: _t.Any


def backlund(params: PainleveParams, s, b, y, sign: str) -> BacklundResult:
    """
    Gauge (b, y) by I - 2F1 with F1 = kappa (sigma3 + sign i sigma2).

    gamma maps to -gamma + sign and Theta is kept. Plain arithmetic only,
    so floats, arrays and jets all pass through.
    """
    eps = _sign_value(sign)
    theta, gamma = params.theta, params.gamma
    if np.any(np.asarray(_value(y)) == 0):
        raise ParameterError("backlund needs y != 0")
    b, y, s = (x if isinstance(x, Jet) else np.asarray(x, dtype=float) for x in (b, y, s))
    gamma_t = -gamma + eps
    denominator = eps * 8 * (b + theta / 2) + 4 * b / y + 4 * (b + theta) * y + eps * s
    if np.any(np.abs(np.asarray(_value(denominator))) < POLE_TOLERANCE):
        raise TransformationSingularError("kappa denominator vanishes", theta=theta, gamma=gamma)
    kappa = (gamma - gamma_t) / denominator
    k = 2 * kappa
    b11, b12, b21 = b + theta / 2, -(b + theta) * y, b / y
    c11 = b11 * (1 + k) - eps * k * b12
    c12 = eps * k * b11 + (1 - k) * b12
    c21 = (1 + k) * b21 + eps * k * b11
    c22 = eps * k * b21 - (1 - k) * b11
    t11 = (1 - k) * c11 - eps * k * c21
    t12 = (1 - k) * c12 - eps * k * c22
    t21 = eps * k * c11 + (1 + k) * c21
    b_t = t11 - theta / 2
    shifted = b_t + theta
    use_shift = np.abs(np.asarray(_value(shifted))) >= np.abs(np.asarray(_value(t21)))
    with np.errstate(all="ignore"):
        y_t = _select(use_shift, -t12 / shifted, b_t / t21)
    return BacklundResult(params=PainleveParams(theta, gamma_t), b=_unwrap(b_t), y=_unwrap(y_t),
                          kappa=_unwrap(kappa))


def backlund_roundtrip(params: PainleveParams, s: float, b: float, y: float, sign: str) -> float:
    """max |(b, y) - B(B(b, y))|; the map with one sign is its own inverse on gamma -> sign - gamma."""
    first = backlund(params, s, b, y, sign)
    second = backlund(first.params, s, first.b, first.y, sign)
    return float(max(np.max(np.abs(second.b - b)), np.max(np.abs(second.y - y))))


def backlund_trajectory(traj: PainleveTrajectory, sign: str, n_points: int = 200,
                        pole_margin: float = 0.05) -> dict:
    """Transformed samples along a trajectory with the second-order residual for the new gamma."""
    s = _grid(traj, n_points)
    params = traj.params
    b, p, q = traj.jets(s, order=3)
    y = _y_from_state(params, b, p, q)
    result = backlund(params, Jet.variable(s, 3), b, y, sign)
    yt = result.y
    yv = yt.value
    mask = ~np.all(np.isfinite(yt.coeffs[:3]), axis=0) | (np.abs(yv * yv - 1) < pole_margin)
    residual = _sweep(lambda i: abs(residual_second_order(
        result.params, yv[i], yt.derivative(1)[i], yt.derivative(2)[i], s[i])), mask)
    return {
        "s": s, "params": result.params, "b": result.b.value, "y": yv, "kappa": result.kappa.value,
        "residual_second_order": residual,
        "max_residual": float(np.nanmax(residual)) if np.any(~mask) else float("nan"),
        "masked": int(np.count_nonzero(mask)),
    }


# ───────────────────────────────────────── Monodromy ────
@dataclass(frozen=True, eq=False)
class MonodromyData:
    s0: complex
    E12: np.ndarray
    E0: np.ndarray
    c: float
    branch: str

    def to_dict(self) -> dict:
        def pack(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in m]

        return {"s0": [self.s0.real, self.s0.imag], "E12": pack(self.E12), "E0": pack(self.E0),
                "c": self.c, "branch": self.branch}


def _half_integer_gamma(gamma: float) -> bool:
    return float(gamma + 0.5).is_integer()


def monodromy_constants(params: PainleveParams, branch: _t.Optional[str] = None) -> MonodromyData:
    """Stokes multiplier and connection matrices; branch 'generic' or 'half-integer'."""
    theta, gamma = params.theta, params.gamma
    natural = "half-integer" if _half_integer_gamma(gamma) else "generic"
    branch = branch or natural
    if branch != natural:
        raise ParameterError(f"gamma={gamma} selects the {natural} branch, not {branch}",
                             gamma=gamma, branch=branch)
    s0 = -2j * math.sin(math.pi * (gamma - theta))
    e12 = np.array([[1, 0], [-cmath.exp(1j * math.pi * (theta - gamma)), 1]], dtype=complex)
    if branch == "generic":
        scale = cmath.sqrt(cmath.exp(1j * math.pi * theta) / (-2 * math.cos(math.pi * gamma)))
        e0 = scale * np.array([
            [-cmath.exp(1j * math.pi * gamma), -cmath.exp(-1j * math.pi * theta)],
            [-cmath.exp(-1j * math.pi * gamma), cmath.exp(-1j * math.pi * theta)],
        ], dtype=complex)
        c = 0.0
    else:
        e0 = np.array([
            [cmath.exp(0.5j * math.pi * theta), 0],
            [-cmath.exp(1j * math.pi * (theta / 2 - gamma)), cmath.exp(-0.5j * math.pi * theta)],
        ], dtype=complex)
        c = (-1) ** int(round(gamma + 0.5)) / math.pi
    return MonodromyData(s0=complex(s0), E12=e12, E0=e0, c=c, branch=branch)


def verify_cyclic(md: MonodromyData, params: PainleveParams) -> float:
    """max entrywise |(J S1 sigma1)^2 - E0^-1 e^(-2 pi i gamma sigma3) [[1, -2 c pi i], [0, 1]] E0|."""
    theta, gamma = params.theta, params.gamma
    jump = np.linalg.solve(md.E12, np.diag([cmath.exp(-1j * math.pi * theta),
                                            cmath.exp(1j * math.pi * theta)]) @ md.E12)
    stokes = np.array([[1, 0], [md.s0, 1]], dtype=complex)
    left = np.linalg.matrix_power(jump @ stokes @ SIGMA1, 2)
    log_part = np.array([[1, -2j * math.pi * md.c], [0, 1]], dtype=complex)
    right = np.linalg.solve(md.E0, np.diag([cmath.exp(-2j * math.pi * gamma),
                                            cmath.exp(2j * math.pi * gamma)]) @ log_part @ md.E0)
    return float(np.max(np.abs(left - right)))


# ───────────────────────────────────────── Boundary Behaviour ────
def small_s_expansion(alpha: float, beta: float, s: float) -> dict:
    """Leading small-s values; y solves s u = -1/2 exactly for the leading b."""
    if not s > 0:
        raise ParameterError("s must be positive", s=s)
    params = PainleveParams.from_weight(alpha, beta)
    ab = alpha + beta
    b = -ab * ab / s + alpha / 2
    shifted = b + params.theta
    half = params.gamma + 0.5
    if _near(shifted, 0):
        raise ParameterError("leading b + Theta vanishes", alpha=alpha, beta=beta, s=s)
    disc = half * half + 4 * b * shifted
    if disc < 0:
        raise ParameterError("no real y matches s u = -1/2 at this s", alpha=alpha, beta=beta, s=s)
    roots = [(half + sgn * math.sqrt(disc)) / (2 * shifted) for sgn in (1, -1)]
    y = min(roots, key=lambda r: abs(r - 1))
    return {
        "b": b, "y": y, "u": -0.5 / s, "sigma": -ab * ab - 0.25,
        "c2hat": 3 * (4 * ab * ab - 1) / (8 * s * s),
    }


def deviation_exponent(s, deviation) -> float:
    """Slope of log|deviation| against log s."""
    s = np.asarray(s, dtype=float)
    dev = np.abs(np.asarray(deviation, dtype=float))
    keep = np.isfinite(dev) & (dev > 0) & (s > 0)
    if np.count_nonzero(keep) < 3:
        raise InsufficientRangeError("need at least three non-zero deviations for a fit")
    slope, _ = np.polyfit(np.log(s[keep]), np.log(dev[keep]), 1)
    return float(slope)


def check_boundary_asymptotics(traj: PainleveTrajectory, end: str, alpha: float, beta: float,
                               tol: float = 0.1, small_s_max: float = 0.1,
                               n_points: int = 40) -> dict:
    """
    Classify a trajectory against the distinguished solution's leading behaviour
    at one end. Small s: y -> 1, s u -> -1/2, s b + (alpha+beta)^2 -> 0 and
    sigma -> -(alpha+beta)^2 - 1/4. Large s: sigma/s -> -alpha/2 and u = O(1/s).
    """
    if end not in BOUNDARY_ENDS:
        raise ParameterError(f"end must be one of {BOUNDARY_ENDS}", end=end)
    low, high = traj.s_range
    if high / low < 2:
        raise InsufficientRangeError("trajectory spans less than a factor 2 in s", low=low, high=high)
    ab = alpha + beta
    middle = math.sqrt(low * high)
    if end == "small-s":
        if low > small_s_max:
            raise InsufficientRangeError(f"small-s check needs s <= {small_s_max}", low=low)
        s = np.geomspace(low, middle, n_points)
    else:
        s = np.geomspace(middle, high, n_points)
    state = traj.state_at(s)
    b, p, q = state
    y = _y_from_state(traj.params, b, p, q)
    su = p - q + traj.params.gamma
    sigma = (b + traj.params.theta / 2) * s - su ** 2
    if end == "small-s":
        sigma_target = -ab * ab - 0.25
        checks = {
            "y_minus_1": float(abs(y[0] - 1)),
            "su_plus_half": float(abs(su[0] + 0.5)),
            "sb_plus_ab2": float(abs(s[0] * b[0] + ab * ab)),
            "sigma_offset": float(abs(sigma[0] - sigma_target)),
        }
        consistent = all(value <= tol for value in checks.values())
        try:
            exponent = deviation_exponent(s, sigma - sigma_target)
        except InsufficientRangeError:
            exponent = float("nan")
    else:
        checks = {
            "sigma_over_s_offset": float(abs(sigma[-1] / s[-1] + alpha / 2)),
            "max_su": float(np.max(np.abs(su))),
        }
        exponent = deviation_exponent(s, su / s)
        consistent = checks["sigma_over_s_offset"] <= tol and exponent <= -0.5
    report = {"end": end, "consistent": bool(consistent), "checks": checks,
              "deviation_exponent": exponent, "s_window": [float(s[0]), float(s[-1])]}
    logging.info(f"Boundary check {end}: consistent={consistent}, exponent={exponent:.3f}")
    return report
