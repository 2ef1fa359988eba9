"""Affine short-rate and intensity models.

Hull-White one-factor with a deterministic shift fitted to the yield curve:

    r(t) = x_r(t) + b_r(t),   dx_r = -a_r x_r dt + sigma_r dW_r,   x_r(0) = 0,
    b_r(t) = f(0,t) + (sigma_r^2 / 2) * B(0,t)^2,   B(t,T) = (1 - e^{-a(T-t)})/a.

CIR++ intensity with a deterministic shift fitted to the credit curve:

    lambda(t) = x(t) + b(t),  dx = a (theta - x) dt + sigma sqrt(x) dW,
    b(t) = f_mkt(0,t) - f_cir(0,t).

Zero-coupon bonds / survival factors are evaluated through the market-curve
reconstitution form, which reproduces the input curve at t=0 exactly instead
of carrying quadrature error from a tabulated shift integral. The tabulated
shift itself is what the path simulator consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .curves import Curve, FloatArray
from .errors import FellerViolation, TimeOrder

_A_TINY = 1e-12  # below this mean reversion, use the a -> 0 limits exactly


def ou_b(a: float, dt):
    """B(t, t+dt) = (1 - e^{-a dt})/a, continuous through a -> 0.

    Uses expm1 so there is no cancellation for small a*dt; at a = 0 the
    limit dt is returned.
    """
    if a < _A_TINY:
        return np.asarray(dt, dtype=float) if np.ndim(dt) else float(dt)
    return -np.expm1(-a * np.asarray(dt, dtype=float)) / a


def ou_step_moments(a: float, sigma: float, dt: float) -> tuple[float, float]:
    """(decay, stdev) of the exact OU transition over a step dt."""
    decay = float(np.exp(-a * dt))
    var = sigma * sigma * float(ou_b(2.0 * a, dt))
    return decay, float(np.sqrt(var))


def hw_variance_factor(a: float, sigma: float, t):
    """y(t) = sigma^2 (1 - e^{-2 a t}) / (2 a) = Var[x_r(t)]."""
    return sigma * sigma * ou_b(2.0 * a, t)


@dataclass(frozen=True)
class ShiftFunction:
    """Deterministic shift b(t), callable plus a dense tabulation.

    ``fn`` evaluates the defining formula exactly at any t; ``grid`` and
    ``values`` hold the dense tabulation used for diagnostics and integral
    reporting (trapezoid).
    """

    fn: Callable[[FloatArray], FloatArray] = field(repr=False)
    grid: FloatArray
    values: FloatArray

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    def integral(self, t1: float) -> float:
        """∫_0^t1 b(v) dv by trapezoid on the dense grid."""
        idx = np.searchsorted(self.grid, t1 + 1e-12)
        sub_t = np.append(self.grid[:idx], t1)
        sub_v = np.append(self.values[:idx], self(t1))
        return float(np.trapezoid(sub_v, sub_t))

    @property
    def min_value(self) -> float:
        return float(self.values.min())


def shift_grid(t_max: float) -> FloatArray:
    """Dense tabulation grid: 120 points/year near 0 decaying to 10/year.

    Segment spacings are chosen so every curve pillar (quarters below 1y,
    halves below 3y, integers beyond) lands exactly on a grid node.
    """
    pieces = []
    bounds = [(0.0, 1.0, 120), (1.0, 3.0, 60), (3.0, 10.0, 20), (10.0, t_max, 10)]
    for lo, hi, per_year in bounds:
        hi = min(hi, t_max)
        if hi <= lo:
            break
        n = int(round((hi - lo) * per_year))
        pieces.append(lo + np.arange(n) / per_year)
    pieces.append(np.array([t_max]))
    return np.concatenate(pieces)


def _tabulate(fn: Callable[[FloatArray], FloatArray], t_max: float) -> ShiftFunction:
    grid = shift_grid(t_max)
    return ShiftFunction(fn=fn, grid=grid, values=fn(grid))


# ---------------------------------------------------------------------------
# Hull-White
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HullWhiteParams:
    """Hull-White parameter bundle; immutable, pure-function operations."""

    a: float
    sigma: float
    base_curve: Curve
    shift: ShiftFunction = field(repr=False)
    x0: float = 0.0

    def __post_init__(self):
        if self.a <= 0.0 or self.sigma < 0.0:
            raise ValueError("require a > 0 and sigma >= 0")


def hw_shift(base_curve: Curve, a: float, sigma: float) -> ShiftFunction:
    """Shift b_r(t) = f(0,t) + (sigma^2/2) B(0,t)^2 on the dense grid.

    The expm1-based B(0,t) is uniformly accurate, so the small-a series
    limit f + sigma^2 t^2 / 2 is recovered automatically.
    """

    def fn(t: FloatArray) -> FloatArray:
        b = ou_b(a, t)
        return base_curve.inst_forward(t) + 0.5 * sigma * sigma * b * b

    return _tabulate(fn, base_curve.t_max)


def make_hull_white(base_curve: Curve, a: float, sigma: float, x0: float = 0.0) -> HullWhiteParams:
    return HullWhiteParams(a=a, sigma=sigma, base_curve=base_curve,
                           shift=hw_shift(base_curve, a, sigma), x0=x0)


def hw_phi(p: HullWhiteParams, t) -> float:
    """Mean of the shifted factor: phi(t) = b_r(t) - f(0,t) = (sigma^2/2) B(0,t)^2."""
    b = ou_b(p.a, t)
    return 0.5 * p.sigma * p.sigma * b * b


def hw_bond_factors(p: HullWhiteParams, t: float, maturities) -> tuple[FloatArray, FloatArray]:
    """(B, A) with P(t, T_i) = A_i exp(-B_i x_t) for the driftless factor.

    Affine reconstitution off the market curve:

        P(t,T) = df(T)/df(t) * exp(-(x_t + phi(t)) B(t,T) - 0.5 y(t) B(t,T)^2),

    where y(t) is the factor variance and phi(t) re-centres the driftless
    factor (whose shift exceeds the forward curve by phi). Reproduces the
    base curve at t=0 and makes discounted bonds martingales.
    """
    mats = np.asarray(maturities, dtype=float)
    b = ou_b(p.a, mats - t)
    y = hw_variance_factor(p.a, p.sigma, t)
    a_fac = (p.base_curve.df(mats) / p.base_curve.df(t)) * np.exp(
        -(hw_phi(p, t) + 0.5 * y * b) * b
    )
    return b, a_fac


def hw_zcb(p: HullWhiteParams, t: float, T: float, x_t):
    """Bond price P(t,T) given state x_r(t) = x_t (scalar or path array).

    P(t,t) = 1 exactly; at t=0 with x = 0 the base curve is reproduced
    exactly (fit by construction).
    """
    if T < t:
        raise TimeOrder(f"bond maturity {T} before valuation time {t}")
    b, a_fac = hw_bond_factors(p, t, T)
    out = a_fac * np.exp(-np.asarray(x_t, dtype=float) * b)
    return float(out) if np.ndim(x_t) == 0 else out


# ---------------------------------------------------------------------------
# CIR++
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CirParams:
    """CIR++ parameter bundle for one party's default intensity."""

    x0: float
    a: float
    theta: float
    sigma: float
    base_curve: Curve
    shift: ShiftFunction | None = field(default=None, repr=False)
    lgd: float = 0.6

    def __post_init__(self):
        if min(self.x0, self.a, self.theta, self.sigma) < 0.0 or self.a == 0.0:
            raise ValueError("require x0 >= 0 and a, theta, sigma > 0")
        if not 0.0 <= self.lgd <= 1.0:
            raise ValueError(f"lgd must lie in [0,1], got {self.lgd}")
        ok, margin = feller_check(self)
        if not ok:
            raise FellerViolation(
                f"2*a*theta = {2 * self.a * self.theta:.6g} <= sigma^2 = "
                f"{self.sigma ** 2:.6g} (margin {margin:.3g})"
            )

    @property
    def h(self) -> float:
        return float(np.sqrt(self.a * self.a + 2.0 * self.sigma * self.sigma))


def feller_check(p) -> tuple[bool, float]:
    """Whether 2*a*theta > sigma^2, and the margin 2*a*theta - sigma^2."""
    margin = 2.0 * p.a * p.theta - p.sigma * p.sigma
    return margin > 0.0, float(margin)


def _cir_ab(a: float, theta: float, sigma: float, h: float, tau):
    """(A, B) of the time-homogeneous CIR bond P = A exp(-B x) over tenor tau."""
    tau = np.asarray(tau, dtype=float)
    e = np.expm1(h * tau)  # e^{h tau} - 1
    den = 2.0 * h + (a + h) * e
    b = 2.0 * e / den
    if sigma == 0.0:
        # sigma -> 0: A = exp(-theta * (tau - B))
        return np.exp(-theta * (tau - b)), b
    log_a = (2.0 * a * theta / (sigma * sigma)) * (
        np.log(2.0 * h) + 0.5 * (a + h) * tau - np.log(den)
    )
    return np.exp(log_a), b


def cir_zcb_base(p: CirParams, tau, x):
    """Pure-CIR bond E[exp(-∫ x)] over tenor tau from state x."""
    a_fac, b_fac = _cir_ab(p.a, p.theta, p.sigma, p.h, tau)
    return a_fac * np.exp(-b_fac * np.asarray(x, dtype=float))


def cir_forward(p: CirParams, t):
    """Model instantaneous forward f_cir(0,t) implied by the CIR bond.

    f_cir(0,t) = 2 a theta (e^{th}-1) / (2h + (a+h)(e^{th}-1))
               + x0 * 4 h^2 e^{th} / (2h + (a+h)(e^{th}-1))^2,

    continuous in t with f_cir(0,0) = x0.
    """
    t = np.asarray(t, dtype=float)
    h = p.h
    e = np.expm1(h * t)
    den = 2.0 * h + (p.a + h) * e
    out = 2.0 * p.a * p.theta * e / den + p.x0 * 4.0 * h * h * (e + 1.0) / (den * den)
    return float(out) if out.ndim == 0 else out


def cir_mean(p: CirParams, t):
    """E[x(t)] = theta + (x0 - theta) e^{-a t}."""
    t = np.asarray(t, dtype=float)
    out = p.theta + (p.x0 - p.theta) * np.exp(-p.a * t)
    return float(out) if out.ndim == 0 else out


def cir_shift(base_curve: Curve, p: CirParams) -> ShiftFunction:
    """Shift b(t) = f_mkt(0,t) - f_cir(0,t) on the dense grid."""

    def fn(t: FloatArray) -> FloatArray:
        return base_curve.inst_forward(t) - cir_forward(p, t)

    return _tabulate(fn, base_curve.t_max)


def with_shift(p: CirParams) -> CirParams:
    """Return p with its market-fit shift installed."""
    return CirParams(x0=p.x0, a=p.a, theta=p.theta, sigma=p.sigma,
                     base_curve=p.base_curve, shift=cir_shift(p.base_curve, p),
                     lgd=p.lgd)


def cir_zcb(p: CirParams, t: float, T: float, x_t):
    """CIR++ survival factor P(t,T) given state x(t) = x_t.

    Reconstitution form: the pure-CIR bond at x_t times the market/model
    ratio, equivalent to exp(-∫_t^T b) in closed form. Exact to the credit
    curve at t=0, x_t=x0; P(t,t) = 1.
    """
    if T < t:
        raise TimeOrder(f"survival horizon {T} before valuation time {t}")
    mkt = p.base_curve.df(T) / p.base_curve.df(t)
    model_t = cir_zcb_base(p, t, p.x0)
    model_T = cir_zcb_base(p, T, p.x0)
    out = mkt * (model_t / model_T) * cir_zcb_base(p, T - t, x_t)
    return float(out) if np.ndim(x_t) == 0 else out
