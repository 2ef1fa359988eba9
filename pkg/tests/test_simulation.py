import numpy as np
import pytest

from fvawwr.errors import NotSPD, SimulationNan
from fvawwr.ratemodels import CirParams, HullWhiteParams, hw_shift, make_hull_white, ou_b, with_shift
from fvawwr.scenarios import build_models, load_scenario
from fvawwr.simulation import CorrelationBlock, PathBlock, SimConfig, cholesky3, simulate


def small_cfg(**kw):
    base = dict(n_paths=4000, dates_per_year=10, sub_steps=4, seed=7, chunk_size=1500)
    base.update(kw)
    return SimConfig(**base)


# --- correlation block -------------------------------------------------


def test_cholesky_identity():
    assert np.allclose(cholesky3(CorrelationBlock()), np.eye(3))


def test_cholesky_near_boundary_ok():
    block = CorrelationBlock(rho_ri=0.7, rho_rc=0.7, rho_ic=0.0)
    m = block.matrix()
    assert np.linalg.det(m) == pytest.approx(0.02, abs=1e-12)
    chol = cholesky3(block)
    assert np.allclose(chol @ chol.T, m)


def test_cholesky_rejects_non_spd():
    with pytest.raises(NotSPD):
        cholesky3(CorrelationBlock(rho_ri=0.8, rho_rc=0.7, rho_ic=0.0))


def test_empirical_correlation_matches():
    block = CorrelationBlock(rho_ri=-0.35, rho_rc=-0.5, rho_ic=0.1)
    chol = cholesky3(block)
    rng = np.random.default_rng(3)
    z = rng.standard_normal((3, 1_000_000))
    w = chol @ z
    emp = np.corrcoef(w)
    assert np.abs(emp - block.matrix()).max() < 0.01


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(n_paths=1)
    with pytest.raises(ValueError):
        SimConfig(n_paths=101, antithetic=True)


# --- path generation ----------------------------------------------------


def test_seed_determinism(models2):
    cfg = small_cfg()
    a = simulate(models2.hw, models2.credit_i, models2.credit_c, models2.corr, 30.0, cfg)
    b = simulate(models2.hw, models2.credit_i, models2.credit_c, models2.corr, 30.0, cfg)
    for name in PathBlock._FIELDS:
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_common_random_numbers_across_correlations(models2):
    # the rate factor consumes the first normal stream: bit-identical when
    # only the correlation block changes
    cfg = small_cfg()
    a = simulate(models2.hw, models2.credit_i, models2.credit_c,
                 CorrelationBlock(-0.35, -0.35, 0.0), 30.0, cfg)
    b = simulate(models2.hw, models2.credit_i, models2.credit_c,
                 CorrelationBlock(0.6, 0.2, 0.1), 30.0, cfg)
    assert np.array_equal(a.x_r, b.x_r)
    assert np.array_equal(a.int_r, b.int_r)
    assert not np.array_equal(a.x_i, b.x_i)


def test_thread_count_invariance(models2):
    a = simulate(models2.hw, models2.credit_i, models2.credit_c, models2.corr, 30.0,
                 small_cfg(threads=1))
    b = simulate(models2.hw, models2.credit_i, models2.credit_c, models2.corr, 30.0,
                 small_cfg(threads=4))
    for name in PathBlock._FIELDS:
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_integrated_intensities_nondecreasing(models11):
    m = models11
    paths = simulate(m.hw, m.credit_i, m.credit_c, m.corr, 30.0, small_cfg())
    assert (np.diff(paths.int_lam_i, axis=1) >= -1e-15).all()
    assert (np.diff(paths.int_lam_c, axis=1) >= -1e-15).all()
    assert np.all(paths.int_r[:, 0] == 0.0)
    assert np.all(paths.x_r[:, 0] == 0.0)
    assert np.all(paths.x_i[:, 0] == m.credit_i.x0)


def test_degenerate_zero_vol(flat5, aaa):
    hw = make_hull_white(flat5, 0.05, 0.0)
    ci = with_shift(CirParams(x0=0.0016939, a=0.05, theta=0.015390, sigma=0.0,
                              base_curve=aaa))
    paths = simulate(hw, ci, ci, CorrelationBlock(), 30.0,
                     small_cfg(n_paths=16, sub_steps=10))
    # all paths identical
    assert np.ptp(paths.x_r, axis=0).max() == 0.0
    assert np.ptp(paths.int_lam_i, axis=0).max() == 0.0
    # e^{-∫r} reproduces the curve within quadrature error
    for k in (10, 150, 300):
        u = paths.grid[k]
        assert np.exp(-paths.int_r[0, k]) == pytest.approx(flat5.df(u), rel=1e-6)
        # credit legs carry the Euler drift bias (~a*dt/2 of the mean path)
        # plus endpoint-kink quadrature error; both are << the 3-SE gates
        assert np.exp(-paths.int_lam_i[0, k]) == pytest.approx(aaa.df(u), rel=5e-5)


def test_martingale_and_survival_fit(models2):
    m = models2
    cfg = SimConfig(n_paths=30_000, dates_per_year=10, sub_steps=10, seed=5)
    paths = simulate(m.hw, m.credit_i, m.credit_c, m.corr, 30.0, cfg)
    for k in (10, 100, 200, 300):
        u = float(paths.grid[k])
        disc = np.exp(-paths.int_r[:, k])
        se = disc.std(ddof=1) / np.sqrt(cfg.n_paths)
        assert abs(disc.mean() - m.hw.base_curve.df(u)) < 3 * se
        surv = np.exp(-paths.int_lam_i[:, k])
        se = surv.std(ddof=1) / np.sqrt(cfg.n_paths)
        assert abs(surv.mean() - m.credit_i.base_curve.df(u)) < 3 * se


def test_sub_step_convergence_gate(flat5):
    # common-noise comparison: an exact-transition path sampled on the fine
    # sub-grid, integrated by trapezoid at sub_steps 40 vs the every-4th-node
    # coarsening (sub_steps 10). Isolates pure quadrature error.
    a, sigma, horizon = 1e-5, 0.00774, 30.0
    p = make_hull_white(flat5, a, sigma)
    n, per_year = 5000, 400
    steps = int(horizon * per_year)
    dt = 1.0 / per_year
    rng = np.random.default_rng(11)
    decay, std = np.exp(-a * dt), sigma * np.sqrt(ou_b(2 * a, dt))
    nodes = np.arange(steps + 1) * dt
    b_nodes = np.asarray(p.shift(nodes))
    x = np.zeros((n, steps + 1))
    for k in range(steps):
        x[:, k + 1] = decay * x[:, k] + std * rng.standard_normal(n)
    r = x + b_nodes[None, :]
    int_fine = np.trapezoid(r, dx=dt, axis=1)
    int_coarse = np.trapezoid(r[:, ::4], dx=4 * dt, axis=1)
    fine, coarse = np.exp(-int_fine).mean(), np.exp(-int_coarse).mean()
    assert abs(coarse - fine) / fine < 2e-4


def test_antithetic_mirrors_rate_factor(models2):
    m = models2
    cfg = small_cfg(n_paths=2000, chunk_size=2000, antithetic=True)
    paths = simulate(m.hw, m.credit_i, m.credit_c, m.corr, 30.0, cfg)
    half = cfg.n_paths // 2
    assert np.allclose(paths.x_r[half:], -paths.x_r[:half], atol=1e-14)


def test_nan_guard(flat5, models2):
    hw_bad = HullWhiteParams(a=1e-5, sigma=float("nan"), base_curve=flat5,
                             shift=hw_shift(flat5, 1e-5, 0.00774))
    with pytest.raises(SimulationNan):
        simulate(hw_bad, models2.credit_i, models2.credit_c, models2.corr, 30.0,
                 small_cfg(n_paths=64))


def test_pathblock_dump_roundtrip(tmp_path, models2):
    m = models2
    paths = simulate(m.hw, m.credit_i, m.credit_c, m.corr, 30.0,
                     small_cfg(n_paths=32))
    paths.dump(tmp_path / "blk")
    loaded = PathBlock.load(tmp_path / "blk")
    assert loaded.seed == paths.seed
    assert np.array_equal(loaded.grid, paths.grid)
    for name in PathBlock._FIELDS:
        assert np.array_equal(getattr(loaded, name), getattr(paths, name))
