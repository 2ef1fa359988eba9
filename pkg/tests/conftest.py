import numpy as np
import pytest

from fvawwr.curves import build_curve
from fvawwr.scenarios import build_models, load_scenario, resolve_curve


@pytest.fixture(scope="session")
def flat5():
    return resolve_curve("flat5")


@pytest.fixture(scope="session")
def eur1d():
    return resolve_curve("eur1d")


@pytest.fixture(scope="session")
def aaa():
    return resolve_curve("aaa")


@pytest.fixture(scope="session")
def bcurve():
    return resolve_curve("b")


@pytest.fixture(scope="session")
def flat_hazard():
    """Flat 2% hazard curve, exactly e^{-0.02 t} at pillars."""
    ts = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0]
    return build_curve([(t, np.exp(-0.02 * t)) for t in ts], kind="credit", name="flat2")


@pytest.fixture(scope="session")
def models2():
    return build_models(load_scenario("builtin:2"))


@pytest.fixture(scope="session")
def models11():
    return build_models(load_scenario("builtin:11"))
