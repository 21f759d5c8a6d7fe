"""Session-scoped solver fixtures shared across test modules.

Ground-state searches take under a second each but are reused by many tests,
so they are computed once per session.
"""

import pytest

from nucleon_nls.scalar_model import Params
from nucleon_nls.shooting import find_ground_state
from nucleon_nls.sigma_omega import (
    ContinuationParams,
    RadialGrid,
    build_limit_state,
    continue_branch,
)


@pytest.fixture(scope="session")
def gs413():
    return find_ground_state(Params(4.0, 1.0, 3))


@pytest.fixture(scope="session")
def gs412():
    return find_ground_state(Params(4.0, 1.0, 2))


@pytest.fixture(scope="session")
def gs411():
    return find_ground_state(Params(4.0, 1.0, 1))


@pytest.fixture(scope="session")
def gs313():
    return find_ground_state(Params(3.0, 1.0, 3))


@pytest.fixture(scope="session")
def gs622():
    return find_ground_state(Params(6.0, 2.0, 2))


@pytest.fixture(scope="session")
def gs623():
    return find_ground_state(Params(6.0, 2.0, 3))


@pytest.fixture(scope="session")
def cp_default():
    return ContinuationParams()


@pytest.fixture(scope="session")
def so_limit(cp_default, gs413):
    grid = RadialGrid.default(cp_default)
    return build_limit_state(cp_default, grid=grid, gs=gs413)


@pytest.fixture(scope="session")
def so_branch(cp_default, gs413, so_limit):
    return continue_branch(
        [0.0, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1],
        cp_default,
        grid=so_limit.grid,
        gs=gs413,
    )
