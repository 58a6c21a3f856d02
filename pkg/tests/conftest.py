import pytest

from painleve.integrate import SolverConfig, integrate


@pytest.fixture(scope="session")
def cfg():
    return SolverConfig()


@pytest.fixture(scope="session")
def traj_pos_1(cfg):
    return integrate(1.0, "pos", 5.0, cfg)


@pytest.fixture(scope="session")
def traj_neg_03(cfg):
    return integrate(0.3, "neg", 40.0, cfg)
