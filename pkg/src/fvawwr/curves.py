"""Pillar-based discount and survival term structures.

We work in *years*. A curve is a table of (t, df) pillars with df(0) = 1,
interpolated log-linearly in the discount factor, i.e. piecewise-constant
instantaneous forwards. df > 1 is legal (negative rates). No extrapolation
beyond the last pillar.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .errors import NonMonotoneTimes, NonPositiveFactor, OutOfRange, ParseError

FloatArray = npt.NDArray[np.float64]

_FD_STEP = 1e-4  # finite-difference step for instantaneous forwards, in years


@dataclass(frozen=True)
class Curve:
    """Immutable interpolated term structure.

    Attributes
    ----------
    times : FloatArray
        Pillar times, strictly increasing, times[0] == 0.
    log_dfs : FloatArray
        ln(df) at the pillars, log_dfs[0] == 0.
    kind : str
        "yield" or "credit"; informational only.
    """

    times: FloatArray
    log_dfs: FloatArray
    kind: str = "yield"
    name: str = field(default="", compare=False)

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    @property
    def pillars(self) -> list[tuple[float, float]]:
        return [(float(t), float(np.exp(l))) for t, l in zip(self.times, self.log_dfs)]

    def _check_range(self, t: FloatArray) -> None:
        if np.any(t < -1e-12) or np.any(t > self.t_max + 1e-12):
            bad = t[(t < -1e-12) | (t > self.t_max + 1e-12)]
            raise OutOfRange(
                f"t={np.atleast_1d(bad)[0]:.6g} outside [0, {self.t_max:g}] of curve {self.name or self.kind}"
            )

    def df(self, t):
        """Discount/survival factor at time t (scalar or array).

        Log-linear interpolation between pillars; exact at pillars.
        """
        arr = np.asarray(t, dtype=float)
        self._check_range(arr)
        out = np.exp(np.interp(arr, self.times, self.log_dfs))
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def zero_rate(self, t):
        """Continuously compounded zero rate -ln(df(t))/t, t > 0."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr <= 0.0):
            raise OutOfRange("zero_rate requires t > 0")
        self._check_range(arr)
        out = -np.interp(arr, self.times, self.log_dfs) / arr
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def inst_forward(self, t):
        """Instantaneous forward f(0,t) = -d/dt ln df(t).

        Central finite difference with step 1e-4y; one-sided at the
        boundaries. At a pillar the central difference lands on the
        average of the adjacent segment forwards.
        """
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        self._check_range(arr)
        lo = np.maximum(arr - _FD_STEP, 0.0)
        hi = np.minimum(arr + _FD_STEP, self.t_max)
        l_lo = np.interp(lo, self.times, self.log_dfs)
        l_hi = np.interp(hi, self.times, self.log_dfs)
        out = -(l_hi - l_lo) / (hi - lo)
        return float(out[0]) if np.isscalar(t) or np.asarray(t).ndim == 0 else out


def build_curve(pillars, kind: str = "yield", name: str = "") -> Curve:
    """Build a Curve from (t, df) pairs.

    Prepends (0, 1) when no t=0 pillar is given. Rejects duplicate or
    decreasing times and non-positive factors.
    """
    pts = [(float(t), float(df)) for t, df in pillars]
    if not pts:
        raise NonMonotoneTimes("curve needs at least one pillar")
    if pts[0][0] > 0.0:
        pts.insert(0, (0.0, 1.0))
    times = np.array([t for t, _ in pts])
    dfs = np.array([d for _, d in pts])
    if np.any(np.diff(times) <= 0.0):
        raise NonMonotoneTimes(f"pillar times not strictly increasing: {times.tolist()}")
    if times[0] < 0.0:
        raise NonMonotoneTimes("pillar times must start at t >= 0")
    if np.any(dfs <= 0.0):
        raise NonPositiveFactor("all discount/survival factors must be positive")
    if abs(dfs[0] - 1.0) > 1e-12:
        raise NonPositiveFactor(f"factor at t=0 must be 1, got {dfs[0]!r}")
    return Curve(times=times, log_dfs=np.log(dfs), kind=kind, name=name)


def load_curve_csv(path, kind: str = "yield", name: str = "") -> Curve:
    """Read a curve from a CSV file with header ``t,df``."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["t", "df"]:
            raise ParseError(f"{path}: expected header 't,df'")
        for rec in reader:
            if not rec or not rec[0].strip():
                continue
            try:
                rows.append((float(rec[0]), float(rec[1])))
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}: bad row {rec!r}") from exc
    return build_curve(rows, kind=kind, name=name or str(path))
