"""Scenario catalog and experiment orchestration.

A Scenario is the full parameter bundle for one experiment: yield curve,
Hull-White parameters, two CIR++ credit parameter sets, correlations and
LGDs. The built-in catalog holds 21 entries addressable as ``builtin:1`` ..
``builtin:21``; scenario 2 is the base most others derive from, scenario 1
pairs the negative-rate yield curve with mixed credit qualities. Scenario
files are JSON mirroring the dataclass fields, with curves referenced as
``builtin:<name>`` or a CSV path.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .curves import Curve, load_curve_csv
from .errors import NotSPD, ParseError, UnknownScenario
from .fva import ExposureProfile, FvaFlags, FvaResult, ModelSet, compute_fva
from .ratemodels import CirParams, make_hull_white, with_shift
from .simulation import CorrelationBlock, PathBlock, SimConfig, cholesky3, simulate
from .swaps import SwapSpec, apply_moneyness, par_rate, pathwise_exposure

BUILTIN_CURVES = {
    "flat5": ("yield_flat5.csv", "yield"),
    "eur1d": ("yield_eur1d.csv", "yield"),
    "aaa": ("credit_aaa.csv", "credit"),
    "bbb": ("credit_bbb.csv", "credit"),
    "b": ("credit_b.csv", "credit"),
}

RHO_RI_CURVES = (-0.7, -0.35, 0.0, 0.35, 0.7)
DEFAULT_SWEEP_GRID = (-0.7, -0.525, -0.35, -0.175, 0.0, 0.175, 0.35, 0.525, 0.7)


@dataclass(frozen=True)
class HwInputs:
    a: float
    sigma: float
    x0: float = 0.0
    implied_vol: float | None = None  # informational ATM quote


@dataclass(frozen=True)
class CreditInputs:
    curve: str
    x0: float
    a: float
    theta: float
    sigma: float
    lgd: float = 0.6
    implied_vol: float | None = None  # informational ATM quote


@dataclass(frozen=True)
class Scenario:
    name: str
    yield_curve: str
    hw: HwInputs
    credit_i: CreditInputs
    credit_c: CreditInputs
    corr: CorrelationBlock

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        try:
            return cls(
                name=data["name"],
                yield_curve=data["yield_curve"],
                hw=HwInputs(**data["hw"]),
                credit_i=CreditInputs(**data["credit_i"]),
                credit_c=CreditInputs(**data["credit_c"]),
                corr=CorrelationBlock(**data["corr"]),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"scenario record malformed: {exc}") from exc


def resolve_curve(ref: str, base_dir: Path | None = None) -> Curve:
    """Load a curve from ``builtin:<name>``, a bare builtin name, or a path."""
    name = ref.removeprefix("builtin:")
    if name in BUILTIN_CURVES:
        fname, kind = BUILTIN_CURVES[name]
        with resources.as_file(resources.files("fvawwr").joinpath("data", fname)) as p:
            return load_curve_csv(p, kind=kind, name=name)
    path = Path(ref)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    if not path.exists():
        raise ParseError(f"curve reference {ref!r} is neither builtin nor an existing file")
    return load_curve_csv(path, kind="yield", name=str(ref))


def _catalog() -> dict[int, Scenario]:
    aaa_i = CreditInputs(curve="aaa", x0=0.0016939, a=0.05, theta=0.015390,
                         sigma=0.02, implied_vol=0.07395)
    base = Scenario(
        name="builtin:2",
        yield_curve="flat5",
        hw=HwInputs(a=1e-5, sigma=0.00774, implied_vol=0.1),
        credit_i=aaa_i,
        credit_c=aaa_i,
        corr=CorrelationBlock(rho_ri=-0.35, rho_rc=-0.35, rho_ic=0.0),
    )
    bbb = CreditInputs(curve="bbb", x0=0.0098774, a=0.05, theta=0.041033,
                       sigma=0.02, implied_vol=0.05224)
    s8 = replace(base, name="builtin:8", credit_c=bbb)
    s9 = replace(s8, name="builtin:9", credit_c=CreditInputs(
        curve="bbb", x0=0.0078774, a=0.2, theta=0.033825, sigma=0.045, implied_vol=0.07359))
    s10 = replace(s8, name="builtin:10", credit_c=CreditInputs(
        curve="b", x0=0.071957, a=0.06, theta=0.16435, sigma=0.045, implied_vol=0.07330))

    cat = {
        1: Scenario(
            name="builtin:1",
            yield_curve="eur1d",
            hw=HwInputs(a=1e-5, sigma=0.00284, implied_vol=0.1),
            credit_i=replace(aaa_i, implied_vol=0.07351),
            credit_c=CreditInputs(curve="bbb", x0=0.0063774, a=0.2, theta=0.035447,
                                  sigma=0.08, implied_vol=0.12090),
            corr=CorrelationBlock(rho_ri=-0.35, rho_rc=-0.5, rho_ic=0.0),
        ),
        2: base,
        3: replace(base, name="builtin:3", hw=HwInputs(a=1e-5, sigma=0.01556, implied_vol=0.2)),
        4: replace(base, name="builtin:4", hw=HwInputs(a=0.05, sigma=0.01285, implied_vol=0.1)),
        5: replace(base, name="builtin:5", hw=HwInputs(a=0.05, sigma=0.02578, implied_vol=0.2)),
        6: replace(base, name="builtin:6", yield_curve="eur1d",
                   hw=HwInputs(a=1e-5, sigma=0.00284, implied_vol=0.1)),
        7: replace(base, name="builtin:7", credit_i=bbb, credit_c=bbb),
        8: s8,
        9: s9,
        10: s10,
        11: replace(s10, name="builtin:11", credit_c=CreditInputs(
            curve="b", x0=0.057657, a=0.02, theta=0.44319, sigma=0.08, implied_vol=0.13624)),
        12: replace(s8, name="builtin:12", credit_i=CreditInputs(
            curve="aaa", x0=0.0011139, a=0.15, theta=0.012183, sigma=0.02, implied_vol=0.05871)),
        13: replace(s8, name="builtin:13", credit_i=CreditInputs(
            curve="aaa", x0=0.0016539, a=0.05, theta=0.016763, sigma=0.04, implied_vol=0.14155)),
        14: replace(s8, name="builtin:14", credit_i=CreditInputs(
            curve="aaa", x0=0.00052392, a=0.15, theta=0.012475, sigma=0.04, implied_vol=0.11033)),
        15: replace(s8, name="builtin:15", credit_c=CreditInputs(
            curve="bbb", x0=0.0088774, a=0.15, theta=0.033506, sigma=0.02, implied_vol=0.03840)),
        16: replace(s8, name="builtin:16", credit_c=CreditInputs(
            curve="bbb", x0=0.0097774, a=0.05, theta=0.045113, sigma=0.04, implied_vol=0.10292)),
        17: replace(s8, name="builtin:17", credit_c=CreditInputs(
            curve="bbb", x0=0.0087774, a=0.15, theta=0.034305, sigma=0.04, implied_vol=0.07579)),
        18: replace(s9, name="builtin:18", corr=CorrelationBlock(-0.7, -0.35, 0.0)),
        19: replace(s9, name="builtin:19", corr=CorrelationBlock(-0.35, -0.7, 0.0)),
        20: replace(s9, name="builtin:20", corr=CorrelationBlock(-0.7, -0.7, 0.0)),
        21: replace(s9, name="builtin:21", corr=CorrelationBlock(0.7, 0.7, 0.0)),
    }
    return cat


CATALOG = _catalog()


def load_scenario(source) -> Scenario:
    """Resolve ``builtin:N``, an int id, a JSON path, or a dict."""
    if isinstance(source, Scenario):
        return source
    if isinstance(source, dict):
        return Scenario.from_dict(source)
    if isinstance(source, int):
        ident: str | int = source
    else:
        text = str(source)
        if text.startswith("builtin:"):
            ident = text.removeprefix("builtin:")
        elif text.isdigit():
            ident = text
        else:
            path = Path(text.removeprefix("file:"))
            if not path.exists():
                raise UnknownScenario(f"scenario file {path} does not exist")
            try:
                data = json.loads(path.read_text())
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}: {exc}") from exc
            return Scenario.from_dict(data)
    try:
        return CATALOG[int(ident)]
    except (KeyError, ValueError):
        raise UnknownScenario(f"no built-in scenario {ident!r} (catalog has 1..21)") from None


def build_models(scenario: Scenario, base_dir: Path | None = None) -> ModelSet:
    """Construct the validated model set: shifts fitted, Feller and SPD checked."""
    yield_curve = resolve_curve(scenario.yield_curve, base_dir)
    cholesky3(scenario.corr)  # NotSPD early
    hw = make_hull_white(yield_curve, scenario.hw.a, scenario.hw.sigma, scenario.hw.x0)

    def credit(ci: CreditInputs) -> CirParams:
        curve = resolve_curve(ci.curve, base_dir)
        return with_shift(CirParams(x0=ci.x0, a=ci.a, theta=ci.theta, sigma=ci.sigma,
                                    base_curve=curve, lgd=ci.lgd))

    return ModelSet(hw=hw, credit_i=credit(scenario.credit_i),
                    credit_c=credit(scenario.credit_c), corr=scenario.corr,
                    horizon=yield_curve.t_max)


def swap_variants(curve: Curve, notional: float = 10_000.0, maturity: float = 30.0,
                  pay_freq: int = 1) -> dict[tuple[str, str], SwapSpec]:
    """The six specs {receiver, payer} x {atm, itm, otm} off one par rate."""
    par = par_rate(curve, maturity, pay_freq)
    out = {}
    for direction in ("receiver", "payer"):
        base = SwapSpec(notional=notional, maturity=maturity, fixed_rate=par,
                        direction=direction, pay_freq=pay_freq)
        for label in ("atm", "itm", "otm"):
            out[(direction, label)] = apply_moneyness(base, par, label)
    return out


FLAG_CELLS = ((False, False), (True, False), (False, True), (True, True))


def run_flag_grid(models: ModelSet, swap: SwapSpec, cfg: SimConfig, spread_kind: str,
                  paths: PathBlock | None = None,
                  ) -> dict[tuple[bool, bool], tuple[FvaResult, ExposureProfile]]:
    """FVA for the 2x2 include/exclude grid off one shared path block."""
    if paths is None:
        paths = simulate(models.hw, models.credit_i, models.credit_c,
                         models.corr, models.horizon, cfg)
    h = pathwise_exposure(paths, swap, models.hw)
    out = {}
    for incl_i, incl_c in FLAG_CELLS:
        flags = FvaFlags(include_tau_i=incl_i, include_tau_c=incl_c, spread_kind=spread_kind)
        out[(incl_i, incl_c)] = compute_fva(models, swap, flags, cfg, paths=paths, h=h)
    return out


@dataclass
class SweepResult:
    axis: str
    values: tuple
    flags: FvaFlags
    curves: dict  # curve label (rho_ri or None) -> list[FvaResult]
    seed: int = 0

    def ratios(self, label=None) -> list[float]:
        return [r.ratio for r in self.curves[label]]


def _sweep_blocks(scenario: Scenario, axis: str, values) -> dict:
    """Correlation blocks per (curve label, grid value); validated SPD."""
    blocks, offending = {}, []
    labels: tuple = (None,)
    if axis == "rC":
        labels = RHO_RI_CURVES
    for label in labels:
        for v in values:
            c = scenario.corr
            if axis == "rI":
                c = replace(c, rho_ri=v)
            elif axis == "rC":
                c = replace(c, rho_ri=label, rho_rc=v)
            elif axis == "IC":
                c = replace(c, rho_ic=v)
            else:
                raise ValueError(f"axis must be rI, rC or IC, got {axis!r}")
            try:
                cholesky3(c)
            except NotSPD:
                offending.append((label, v))
            blocks[(label, v)] = c
    if offending:
        raise NotSPD(f"sweep points not SPD: {offending}")
    return blocks


def sweep_correlation(scenario: Scenario, axis: str, values, flags: FvaFlags,
                      cfg: SimConfig, swap: SwapSpec | None = None) -> SweepResult:
    """FVA across a correlation grid with common random numbers.

    axis "rC" produces one curve per rho_ri in RHO_RI_CURVES; "rI" and
    "IC" vary just that correlation. All grid points are validated SPD
    before any simulation runs.
    """
    values = tuple(values)
    if not values:
        raise ValueError("sweep grid must not be empty")
    blocks = _sweep_blocks(scenario, axis, values)
    models = build_models(scenario)
    if swap is None:
        variants = swap_variants(models.hw.base_curve)
        swap = variants[("receiver", "atm")]
    curves: dict = {}
    h_shared = None
    for (label, v), corr in blocks.items():
        m = ModelSet(hw=models.hw, credit_i=models.credit_i, credit_c=models.credit_c,
                     corr=corr, horizon=models.horizon)
        paths = simulate(m.hw, m.credit_i, m.credit_c, corr, m.horizon, cfg)
        if h_shared is None:
            # x_r and ∫r do not depend on the correlation block (common
            # random numbers), so the discounted exposure is shared.
            h_shared = pathwise_exposure(paths, swap, m.hw)
        result, _ = compute_fva(m, swap, flags, cfg, paths=paths, h=h_shared)
        curves.setdefault(label, []).append(result)
    return SweepResult(axis=axis, values=values, flags=flags, curves=curves, seed=cfg.seed)
