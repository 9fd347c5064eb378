import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from h1split import (
    FreeGroup,
    NormedSpace,
    PermGroup,
    Representation,
    lazy_uniform,
    markov,
    z1_basis,
)

settings.register_profile(
    "numeric", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("numeric")

SQRT3_HALF = math.sqrt(3.0) / 2.0
# rotation by 2*pi/3 with exact -1/2 diagonal, matching the scenario files
ROT_THIRD = np.array([[-0.5, -SQRT3_HALF], [SQRT3_HALF, -0.5]])


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _bundle(group, rep, seed):
    mu = lazy_uniform(group)
    return SimpleNamespace(
        group=group,
        rep=rep,
        mu=mu,
        op=markov(rep, mu, seed=seed),
        basis=z1_basis(rep),
        seed=seed,
    )


@pytest.fixture(scope="session")
def anchor_a():
    group = FreeGroup(1, labels=["a"])
    rep = Representation(group, NormedSpace(2, 2.0), [ROT_THIRD], "orthogonal")
    return _bundle(group, rep, seed=101)


@pytest.fixture(scope="session")
def anchor_b():
    group = FreeGroup(2, labels=["a", "b"])
    rep = Representation(
        group, NormedSpace(2, 2.0), [ROT_THIRD, ROT_THIRD], "orthogonal"
    )
    return _bundle(group, rep, seed=202)


@pytest.fixture(scope="session")
def anchor_c():
    group = PermGroup(3, [[1, 0, 2], [1, 2, 0]], labels=["s", "r"])
    rep = Representation(
        group,
        NormedSpace(2, 2.0),
        {"s": [[0, 1], [1, 0]], "r": [[0, -1], [1, -1]]},
        "unchecked",
    )
    return _bundle(group, rep, seed=303)


@pytest.fixture(scope="session")
def anchors(anchor_a, anchor_b, anchor_c):
    return [anchor_a, anchor_b, anchor_c]
