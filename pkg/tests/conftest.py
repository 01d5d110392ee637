import pytest
from click.testing import CliRunner

from app import create_cli
from class_defs.problem_def import SparsityModel, TreeRegime
from config import Config


@pytest.fixture(autouse=True)
def serial_jobs(monkeypatch):
    """Run work units in-process; results do not depend on the worker count."""
    monkeypatch.setattr(Config, "PTLAB_JOBS", 1)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def ptlab():
    return create_cli()


@pytest.fixture
def all_models():
    return [
        SparsityModel.simple(),
        SparsityModel.block(zeta=0.25),
        SparsityModel.block(zeta=0.5),
        SparsityModel.block(zeta=0.75),
        SparsityModel.block(zeta=1.0),
        SparsityModel.tree(TreeRegime.SMALL_K),
        SparsityModel.tree(TreeRegime.LARGE_K),
    ]
