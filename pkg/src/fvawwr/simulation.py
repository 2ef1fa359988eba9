"""Correlated Monte Carlo paths of (x_r, ∫r, x_I, ∫λ_I, x_C, ∫λ_C).

One 3-vector of standard normals per sub-step, correlated through the
Cholesky factor of the (r, I, C) correlation matrix. The rate factor uses
the exact Ornstein-Uhlenbeck transition; the two square-root credit factors
use full-truncation Euler. Running integrals accumulate by trapezoid on the
sub-grid with the intensity floored at zero.

Paths are generated in fixed-size chunks; chunk ``i`` draws from the
substream ``SeedSequence((seed, i))`` under numpy's PCG64, so results are
reproducible bit-for-bit for a given SimConfig, identical for any worker
count, and the raw normal draws do not depend on the correlation block
(common random numbers across correlation variants).
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curves import FloatArray
from .errors import NotSPD, SimulationNan
from .ratemodels import CirParams, HullWhiteParams, cir_zcb_base, hw_phi, ou_step_moments


@dataclass(frozen=True)
class CorrelationBlock:
    """Correlations among the rate and the two credit drivers."""

    rho_ri: float = 0.0
    rho_rc: float = 0.0
    rho_ic: float = 0.0

    def matrix(self) -> FloatArray:
        return np.array(
            [
                [1.0, self.rho_ri, self.rho_rc],
                [self.rho_ri, 1.0, self.rho_ic],
                [self.rho_rc, self.rho_ic, 1.0],
            ]
        )


def cholesky3(block: CorrelationBlock) -> FloatArray:
    """Lower-triangular L with L L^T equal to the correlation matrix.

    Raises NotSPD naming the first non-positive leading minor.
    """
    m = block.matrix()
    minor2 = 1.0 - block.rho_ri**2
    minor3 = float(np.linalg.det(m))
    if minor2 <= 0.0:
        raise NotSPD(f"2x2 leading minor 1 - rho_ri^2 = {minor2:.6g} <= 0")
    if minor3 <= 0.0:
        raise NotSPD(f"determinant {minor3:.6g} <= 0 for {block}")
    return np.linalg.cholesky(m)


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo settings; chunk_size is part of the stream identity."""

    n_paths: int = 100_000
    dates_per_year: int = 10
    sub_steps: int = 10
    seed: int = 0
    antithetic: bool = False
    chunk_size: int = 25_000
    threads: int = 1

    def __post_init__(self):
        if self.n_paths < 2 or self.dates_per_year < 1 or self.sub_steps < 1:
            raise ValueError("need n_paths >= 2, dates_per_year >= 1, sub_steps >= 1")
        if self.antithetic and (self.n_paths % 2 or self.chunk_size % 2):
            raise ValueError("antithetic sampling needs even n_paths and chunk_size")


@dataclass
class PathBlock:
    """Per-path, per-exposure-date states and running integrals.

    Arrays have shape (n_paths, len(grid)); int_lam_* are non-decreasing
    along every path and all integrals start at zero.
    """

    grid: FloatArray
    x_r: FloatArray
    int_r: FloatArray
    x_i: FloatArray
    int_lam_i: FloatArray
    x_c: FloatArray
    int_lam_c: FloatArray
    seed: int = 0

    @property
    def n_paths(self) -> int:
        return self.x_r.shape[0]

    _FIELDS = ("x_r", "int_r", "x_i", "int_lam_i", "x_c", "int_lam_c")

    def dump(self, directory) -> None:
        """Debug dump: flat little-endian float64 arrays + JSON sidecar.

        Not a stability-guaranteed format.
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        meta = {"seed": self.seed, "shape": list(self.x_r.shape), "grid": self.grid.tolist()}
        for name in self._FIELDS:
            getattr(self, name).astype("<f8").tofile(directory / f"{name}.bin")
        (directory / "pathblock.json").write_text(json.dumps(meta))

    @classmethod
    def load(cls, directory) -> "PathBlock":
        directory = Path(directory)
        meta = json.loads((directory / "pathblock.json").read_text())
        shape = tuple(meta["shape"])
        arrays = {
            name: np.fromfile(directory / f"{name}.bin", dtype="<f8").reshape(shape)
            for name in cls._FIELDS
        }
        return cls(grid=np.array(meta["grid"]), seed=meta["seed"], **arrays)


def _chunk_bounds(n_paths: int, chunk_size: int) -> list[tuple[int, int]]:
    starts = list(range(0, n_paths, chunk_size))
    return [(s, min(s + chunk_size, n_paths)) for s in starts]


def _shift_corrections(hw, credit_i, credit_c, grid, sub_nodes, b_arrays):
    """Exact-minus-trapezoid integral of each deterministic shift, per date.

    The curve forwards are piecewise constant with kinks at the pillars;
    the sub-grid trapezoid of the shift leaves an uncancelled step*jump/4
    at any exposure date that IS a pillar, which at 1e5-path precision is
    a visible survival-fit bias. The shift integrals have closed forms
    (market log-df and the CIR bond), so the deterministic part of each
    running integral is corrected to be exact; the stochastic part keeps
    its trapezoid.
    """
    dt = sub_nodes[1] - sub_nodes[0]
    idx = np.rint(grid / dt).astype(int)
    out = []
    phi = hw_phi(hw, sub_nodes)
    exact_r = -np.log(hw.base_curve.df(grid)) + np.concatenate(
        ([0.0], np.cumsum(0.5 * dt * (phi[1:] + phi[:-1]))))[idx]
    for params, b in zip((None, credit_i, credit_c), b_arrays):
        trapz = np.concatenate(([0.0], np.cumsum(0.5 * dt * (b[1:] + b[:-1]))))[idx]
        if params is None:
            out.append(exact_r - trapz)
        else:
            exact = (np.log(cir_zcb_base(params, grid, params.x0))
                     - np.log(params.base_curve.df(grid)))
            out.append(exact - trapz)
    return out


def simulate(
    hw: HullWhiteParams,
    credit_i: CirParams,
    credit_c: CirParams,
    corr: CorrelationBlock,
    horizon: float,
    cfg: SimConfig,
) -> PathBlock:
    """Generate the correlated paths over [0, horizon].

    Both credit parameter bundles must carry their market-fit shifts.
    """
    if credit_i.shift is None or credit_c.shift is None:
        raise ValueError("credit parameters need their shift installed")
    chol = cholesky3(corr)

    n_dates = int(round(horizon * cfg.dates_per_year))
    grid = np.arange(n_dates + 1) / cfg.dates_per_year
    dt = 1.0 / (cfg.dates_per_year * cfg.sub_steps)
    sub_nodes = np.arange(n_dates * cfg.sub_steps + 1) * dt

    b_r = np.asarray(hw.shift(sub_nodes))
    b_i = np.asarray(credit_i.shift(sub_nodes))
    b_c = np.asarray(credit_c.shift(sub_nodes))
    corr_r, corr_i, corr_c = _shift_corrections(
        hw, credit_i, credit_c, grid, sub_nodes, (b_r, b_i, b_c))

    decay, ou_std = ou_step_moments(hw.a, hw.sigma, dt)
    sqrt_dt = np.sqrt(dt)

    out = {name: np.empty((cfg.n_paths, n_dates + 1)) for name in PathBlock._FIELDS}

    def run_chunk(start: int, stop: int) -> None:
        n = stop - start
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, start // cfg.chunk_size)))
        x_r = np.full(n, hw.x0)
        x_i = np.full(n, credit_i.x0)
        x_c = np.full(n, credit_c.x0)
        int_r = np.zeros(n)
        int_li = np.zeros(n)
        int_lc = np.zeros(n)

        r_prev = x_r + b_r[0]
        li_prev = np.maximum(x_i + b_i[0], 0.0)
        lc_prev = np.maximum(x_c + b_c[0], 0.0)

        sl = slice(start, stop)
        out["x_r"][sl, 0] = x_r
        out["int_r"][sl, 0] = 0.0
        out["x_i"][sl, 0] = x_i
        out["int_lam_i"][sl, 0] = 0.0
        out["x_c"][sl, 0] = x_c
        out["int_lam_c"][sl, 0] = 0.0

        node = 0
        for k in range(n_dates):
            if cfg.antithetic:
                half = rng.standard_normal((cfg.sub_steps, 3, n // 2))
                z = np.concatenate([half, -half], axis=2)
            else:
                z = rng.standard_normal((cfg.sub_steps, 3, n))
            w = chol @ z  # (sub_steps, 3, n)
            for s in range(cfg.sub_steps):
                node += 1
                x_r = decay * x_r + ou_std * w[s, 0]
                xp = np.maximum(x_i, 0.0)
                x_i = x_i + credit_i.a * (credit_i.theta - xp) * dt \
                    + credit_i.sigma * np.sqrt(xp) * sqrt_dt * w[s, 1]
                xp = np.maximum(x_c, 0.0)
                x_c = x_c + credit_c.a * (credit_c.theta - xp) * dt \
                    + credit_c.sigma * np.sqrt(xp) * sqrt_dt * w[s, 2]

                r_now = x_r + b_r[node]
                li_now = np.maximum(x_i + b_i[node], 0.0)
                lc_now = np.maximum(x_c + b_c[node], 0.0)
                int_r += 0.5 * dt * (r_prev + r_now)
                int_li += 0.5 * dt * (li_prev + li_now)
                int_lc += 0.5 * dt * (lc_prev + lc_now)
                r_prev, li_prev, lc_prev = r_now, li_now, lc_now

            date = k + 1
            for name, arr, corr in (("x_r", x_r, 0.0), ("int_r", int_r, corr_r[date]),
                                    ("x_i", x_i, 0.0), ("int_lam_i", int_li, corr_i[date]),
                                    ("x_c", x_c, 0.0), ("int_lam_c", int_lc, corr_c[date])):
                if np.isnan(arr).any():
                    path = start + int(np.flatnonzero(np.isnan(arr))[0])
                    raise SimulationNan(f"NaN in {name} at path {path}, date index {date}")
                if name.startswith("int_lam"):
                    # the date-dependent quadrature correction may jitter by
                    # ~1e-6 against a floored-flat stretch; keep Λ monotone
                    out[name][sl, date] = np.maximum(arr + corr, out[name][sl, date - 1])
                else:
                    out[name][sl, date] = arr + corr

    bounds = _chunk_bounds(cfg.n_paths, cfg.chunk_size)
    if cfg.threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            list(pool.map(lambda b: run_chunk(*b), bounds))
    else:
        for b in bounds:
            run_chunk(*b)

    return PathBlock(grid=grid, seed=cfg.seed, **out)
