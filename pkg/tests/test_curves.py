import numpy as np
import pytest

from fvawwr.curves import build_curve, load_curve_csv
from fvawwr.errors import NonMonotoneTimes, NonPositiveFactor, OutOfRange, ParseError


def test_build_prepends_origin():
    c = build_curve([(1.0, 0.951229)])
    assert c.df(0.0) == 1.0
    assert c.df(1.0) == pytest.approx(0.951229, rel=1e-12)


def test_build_rejects_bad_input():
    with pytest.raises(NonMonotoneTimes):
        build_curve([(0.0, 1.0), (1.0, 0.9), (1.0, 0.8)])
    with pytest.raises(NonMonotoneTimes):
        build_curve([(0.0, 1.0), (2.0, 0.9), (1.0, 0.95)])
    with pytest.raises(NonPositiveFactor):
        build_curve([(0.0, 1.0), (1.0, -0.5)])
    with pytest.raises(NonMonotoneTimes):
        build_curve([])


def test_degenerate_single_pillar():
    c = build_curve([(0.0, 1.0)])
    assert c.df(0.0) == 1.0
    with pytest.raises(OutOfRange):
        c.df(0.5)


def test_negative_rates_accepted():
    c = build_curve([(0.0, 1.0), (1.0, 1.005158)])
    assert c.zero_rate(1.0) == pytest.approx(-0.005145, abs=1e-6)


def test_pillars_reproduced_exactly(flat5, eur1d, aaa):
    for curve in (flat5, eur1d, aaa):
        for t, df in curve.pillars:
            assert curve.df(t) == pytest.approx(df, rel=1e-14)


def test_flat5_pinned_values(flat5):
    assert flat5.df(10.0) == pytest.approx(0.606531, rel=1e-6)
    assert flat5.zero_rate(20.0) == pytest.approx(0.05, abs=2e-7)
    # log-linear interpolation is exact on a flat curve
    assert flat5.df(0.5) == pytest.approx(np.exp(-0.025), rel=1e-6)


def test_zero_rate_pinned(aaa, eur1d):
    assert aaa.zero_rate(5.0) == pytest.approx(0.006217, abs=5e-7)
    assert eur1d.zero_rate(1.0) == pytest.approx(-0.005145, abs=5e-7)


def test_zero_rate_flat5_everywhere(flat5):
    # the shipped table is rounded to 6 decimals in df (~1e-6 in the rate);
    # an exactly-flat curve meets the 1e-12 bound at every queried t
    for t in np.linspace(0.01, 30.0, 173):
        assert flat5.zero_rate(float(t)) == pytest.approx(0.05, abs=2e-6)
    exact = build_curve([(t, np.exp(-0.05 * t)) for t in np.arange(0.0, 30.5, 0.5)])
    for t in np.linspace(0.01, 30.0, 173):
        assert exact.zero_rate(float(t)) == pytest.approx(0.05, abs=1e-12)


def test_zero_rate_identity_curve():
    c = build_curve([(0.0, 1.0), (10.0, 1.0), (30.0, 1.0)])
    for t in (0.5, 10.0, 29.0):
        assert c.zero_rate(t) == pytest.approx(0.0, abs=1e-15)


def test_zero_rate_domain(flat5):
    with pytest.raises(OutOfRange):
        flat5.zero_rate(0.0)
    with pytest.raises(OutOfRange):
        flat5.zero_rate(31.0)


def test_inst_forward_flat(flat5):
    # shipped table is 6-decimal rounded; the exact flat curve hits 1e-10
    assert flat5.inst_forward(3.0) == pytest.approx(0.05, abs=1e-6)
    exact = build_curve([(t, np.exp(-0.05 * t)) for t in np.arange(0.0, 30.5, 0.5)])
    assert exact.inst_forward(3.0) == pytest.approx(0.05, abs=1e-10)


def test_inst_forward_kink_average():
    # piecewise-flat zero curve: forward jumps at the pillar; central
    # differencing returns the average of the adjacent segment forwards
    c = build_curve([(0.0, 1.0), (1.0, np.exp(-0.02)), (2.0, np.exp(-0.02 - 0.04))])
    assert c.inst_forward(0.5) == pytest.approx(0.02, abs=1e-10)
    assert c.inst_forward(1.5) == pytest.approx(0.04, abs=1e-10)
    assert c.inst_forward(1.0) == pytest.approx(0.03, abs=1e-10)


def test_inst_forward_short_end_brute_force(aaa):
    # one-sided value at 0 against dense log-df differencing with h sweep
    for h in (1e-3, 1e-4, 1e-5):
        brute = -(np.log(aaa.df(h)) - np.log(aaa.df(0.0))) / h
        assert aaa.inst_forward(0.0) == pytest.approx(brute, rel=1e-6)
    assert 0.001 < aaa.inst_forward(0.0) < 0.003


def test_forward_integrates_back_to_df(flat5, eur1d, aaa):
    # exp(-∫_a^b f) = df(b)/df(a) by dense quadrature
    for curve in (flat5, eur1d, aaa):
        for a, b in ((0.0, 30.0), (0.3, 7.7), (12.0, 29.5)):
            ts = np.linspace(a, b, 20_001)
            integral = np.trapezoid(curve.inst_forward(ts), ts)
            assert np.exp(-integral) == pytest.approx(curve.df(b) / curve.df(a), rel=1e-6)


def test_out_of_range_no_extrapolation(flat5):
    with pytest.raises(OutOfRange):
        flat5.df(30.5)
    with pytest.raises(OutOfRange):
        flat5.df(-0.5)


def test_csv_roundtrip(tmp_path, flat5):
    p = tmp_path / "c.csv"
    p.write_text("t,df\n" + "\n".join(f"{t},{df:.17g}" for t, df in flat5.pillars) + "\n")
    c2 = load_curve_csv(p)
    assert np.allclose(c2.log_dfs, flat5.log_dfs)


def test_csv_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("time,factor\n0,1\n")
    with pytest.raises(ParseError):
        load_curve_csv(p)
