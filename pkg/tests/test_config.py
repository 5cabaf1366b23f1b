import pytest

from nctorus import config
from nctorus.algebra import DeformationMatrix
from nctorus.errors import ConfigError


def write(tmp_path, text):
    path = tmp_path / "run.ini"
    path.write_text(text)
    return str(path)


def test_defaults():
    cfg = config.build()
    assert cfg.theta == DeformationMatrix()
    assert (cfg.pr.alpha, cfg.pr.eps, cfg.pr.trunc, cfg.pr.samples) == (0.25, 0.125, 64, 1024)
    assert cfg.tol("gauge") == 1e-10
    assert cfg.truncations == (16, 32, 64, 128)
    assert cfg.t_grid == (0.01, 0.005, 0.002, 0.001)


def test_file_then_flags(tmp_path):
    path = write(
        tmp_path,
        "[algebra]\ntheta12 = 0.5\nn = 2\n\n[powers_rieffel]\ntrunc = 32\nsamples = 256\n\n"
        "[tolerances]\nwinding = 0.2\n\n[run]\nseed = 9\ntruncations = 8, 16\n",
    )
    cfg = config.build(path, {"n": 3, "seed": None, "tol_winding": None})
    assert cfg.theta.theta12 == 0.5
    assert cfg.n == 3
    assert cfg.seed == 9
    assert cfg.pr.trunc == 32
    assert cfg.tol("winding") == 0.2
    assert cfg.truncations == (8, 16)


@pytest.mark.parametrize(
    "text",
    [
        "[plots]\ncolor = red\n",
        "[algebra]\ntheta14 = 0.1\n",
        "[algebra]\nn = two\n",
        "[tolerances]\ngauge = 0\n",
        "[powers_rieffel]\nalpha = 0.7\n",
        "[run]\ntruncations = 8 x\n",
        "no section\n",
    ],
)
def test_file_errors(tmp_path, text):
    with pytest.raises(ConfigError):
        config.build(write(tmp_path, text))


def test_unknown_override():
    with pytest.raises(ConfigError):
        config.build(None, {"colour": 1})


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        config.build(str(tmp_path / "missing.ini"))


def test_worker_count(monkeypatch):
    monkeypatch.setenv(config.THREADS_ENV, "1")
    assert config.worker_count() == 1
    monkeypatch.setenv(config.THREADS_ENV, "many")
    with pytest.raises(ConfigError):
        config.worker_count()
    monkeypatch.setenv(config.THREADS_ENV, "0")
    with pytest.raises(ConfigError):
        config.worker_count()
    monkeypatch.delenv(config.THREADS_ENV)
    assert config.worker_count() >= 1
