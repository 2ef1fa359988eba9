"""Uncollateralized interest-rate swap: par rate, moneyness, pathwise value.

Single-curve valuation: the floating leg projects and discounts off the same
Hull-White curve. Both legs share the payment grid (annual by default). The
in-period floating rate is fixed at the period start from the pathwise bond
price P(T_{j-1}, T_j); exposure dates between payments therefore see the
fixed-at-start rate, not a freshly projected one.

Receiver value at u (institution receives fixed):

    V(u) = N [ K Σ_{T_i > u} τ P(u, T_i) - ( L τ P(u, T_j) + P(u, T_j) - P(u, T_m) ) ]

with L = (1/τ)(1/P(T_{j-1}, T_j) - 1) the running period's fixing and T_j
the next payment. Payer value is the negation; V(T_m) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .curves import Curve, FloatArray
from .errors import GridMismatch, MissingFixing, OutOfRange
from .ratemodels import HullWhiteParams, hw_bond_factors
from .simulation import PathBlock

MONEYNESS_SHOCK = 0.005  # 50 bp shock applied to the par rate


@dataclass(frozen=True)
class SwapSpec:
    """30y-style fixed/float swap on a shared payment grid.

    float_convention controls in-period valuation: "fixed_at_start" locks
    the running period's float rate from the bond price observed at the
    period start (the default); "fresh_reset" values the float leg as
    1 - P(u, T_m) at every date, the textbook shortcut that ignores the
    locked fixing.
    """

    notional: float = 10_000.0
    maturity: float = 30.0
    fixed_rate: float = 0.0
    direction: str = "receiver"
    pay_freq: int = 1
    moneyness_label: str = "atm"
    float_convention: str = "fixed_at_start"

    def __post_init__(self):
        if self.notional <= 0.0 or not np.isfinite(self.fixed_rate):
            raise ValueError("need positive notional and finite fixed rate")
        if self.direction not in ("receiver", "payer"):
            raise ValueError(f"direction must be receiver or payer, got {self.direction!r}")
        if self.float_convention not in ("fixed_at_start", "fresh_reset"):
            raise ValueError(f"unknown float convention {self.float_convention!r}")
        n = self.maturity * self.pay_freq
        if abs(n - round(n)) > 1e-9:
            raise ValueError("maturity must be a whole number of payment periods")

    @property
    def sign(self) -> float:
        return 1.0 if self.direction == "receiver" else -1.0

    @property
    def tau(self) -> float:
        return 1.0 / self.pay_freq

    @property
    def pay_times(self) -> FloatArray:
        n = int(round(self.maturity * self.pay_freq))
        return (1.0 + np.arange(n)) * self.tau


def par_rate(curve: Curve, maturity: float, pay_freq: int = 1) -> float:
    """K = (df(0) - df(T)) / Σ τ df(T_i) over the fixed-leg grid."""
    if maturity > curve.t_max + 1e-12:
        raise OutOfRange(f"maturity {maturity} beyond curve range {curve.t_max}")
    tau = 1.0 / pay_freq
    times = (1.0 + np.arange(int(round(maturity * pay_freq)))) * tau
    annuity = tau * float(np.sum(curve.df(times)))
    return (curve.df(0.0) - curve.df(maturity)) / annuity


def apply_moneyness(spec: SwapSpec, par: float, label: str) -> SwapSpec:
    """Set the fixed rate at par, or par +/- 50 bp.

    ITM always means a positive swap value for the institution: a receiver
    is ITM when the fixed rate is above par, a payer when below.
    """
    if label == "atm":
        shock = 0.0
    elif label == "itm":
        shock = MONEYNESS_SHOCK * spec.sign
    elif label == "otm":
        shock = -MONEYNESS_SHOCK * spec.sign
    else:
        raise ValueError(f"moneyness label must be atm/itm/otm, got {label!r}")
    return replace(spec, fixed_rate=par + shock, moneyness_label=label)


def _receiver_value(spec: SwapSpec, hw: HullWhiteParams, u: float, x, fixing_bond):
    """Receiver value per unit notional; x and fixing_bond may be arrays."""
    pay = spec.pay_times
    if u >= spec.maturity - 1e-12:
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0
    remaining = pay[pay > u + 1e-12]
    b, a_fac = hw_bond_factors(hw, u, remaining)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    bonds = np.exp(-np.multiply.outer(x_arr, b)) * a_fac  # (n, m)
    annuity = spec.tau * bonds.sum(axis=1)
    if spec.float_convention == "fresh_reset":
        float_leg = 1.0 - bonds[:, -1]
    else:
        float_leg = (1.0 / np.asarray(fixing_bond, dtype=float)) * bonds[:, 0] - bonds[:, -1]
    value = spec.fixed_rate * annuity - float_leg
    return value if np.ndim(x) else float(value[0])


def value_at(spec: SwapSpec, hw: HullWhiteParams, u: float, x_r, fixing_bond=None):
    """Swap value at exposure date u given state x_r.

    ``fixing_bond`` is the bond price P(T_{j-1}, T_j) observed at the
    running period's start on this path. It may be omitted only when u is
    a period start (the fixing is then computed from the current state)
    or when the spec uses the fresh_reset convention.
    """
    if fixing_bond is None and spec.float_convention == "fixed_at_start":
        k = u * spec.pay_freq
        if abs(k - round(k)) > 1e-9:
            raise MissingFixing(f"u={u} lies inside a period; pass the period-start fixing")
        if u >= spec.maturity - 1e-12:
            fixing_bond = 1.0
        else:
            b, a_fac = hw_bond_factors(hw, u, u + spec.tau)
            fixing_bond = a_fac * np.exp(-np.asarray(x_r, dtype=float) * b)
    value = _receiver_value(spec, hw, u, x_r, fixing_bond)
    return spec.sign * spec.notional * value


def pathwise_exposure(paths: PathBlock, spec: SwapSpec, hw: HullWhiteParams) -> FloatArray:
    """Discounted positive exposure h(u) = e^{-∫r} max(V(u), 0) per path/date.

    Walks the exposure grid recording the float fixing at every period
    start. Payment dates must be a subset of the grid.
    """
    grid = paths.grid
    pay = spec.pay_times
    pos = np.searchsorted(grid, pay)
    ok = (pos < len(grid)) & np.isclose(grid[np.minimum(pos, len(grid) - 1)], pay, atol=1e-9)
    if not ok.all():
        raise GridMismatch(f"payment dates {pay[~ok]} are not exposure-grid dates")

    n, k_max = paths.x_r.shape
    h = np.zeros((n, k_max))
    fixing = None
    for k in range(k_max):
        u = float(grid[k])
        if u >= spec.maturity - 1e-12:
            continue  # V = 0 at and beyond maturity
        x = paths.x_r[:, k]
        if spec.float_convention == "fixed_at_start":
            at_period_start = abs(u * spec.pay_freq - round(u * spec.pay_freq)) < 1e-9
            if at_period_start or fixing is None:
                b, a_fac = hw_bond_factors(hw, u, u + spec.tau)
                fixing = a_fac * np.exp(-x * b)
        value = spec.sign * spec.notional * _receiver_value(spec, hw, u, x, fixing)
        np.maximum(value, 0.0, out=value)
        h[:, k] = np.exp(-paths.int_r[:, k]) * value
    return h
