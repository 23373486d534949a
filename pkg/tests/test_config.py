import pytest

from siegel_theta.config import ENV_EPS, Config


def test_defaults():
    c = Config()
    assert (c.eps, c.pd_tol, c.matrix_tol, c.check_radius, c.seed) == (1e-10, 1e-12, 1e-10, 1, 0)


@pytest.mark.parametrize("kw", [{"eps": 0.1}, {"eps": 1e-16}, {"pd_tol": 0}, {"matrix_tol": -1},
                                {"check_radius": 0}])
def test_invalid(kw):
    with pytest.raises(ValueError):
        Config(**kw)


def test_from_env(monkeypatch):
    monkeypatch.delenv(ENV_EPS, raising=False)
    assert Config.from_env().eps == 1e-10
    monkeypatch.setenv(ENV_EPS, "1e-6")
    assert Config.from_env().eps == 1e-6
    assert Config.from_env(eps=1e-8, seed=None).eps == 1e-8
    monkeypatch.setenv(ENV_EPS, "1")
    with pytest.raises(ValueError):
        Config.from_env()
