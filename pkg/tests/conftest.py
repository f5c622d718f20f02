import numpy as np
import pytest

from diracgap.basis import ExponentSet, builtin_exponents
from diracgap.models import PhysicalParams, PotentialSpec


@pytest.fixture
def params():
    return PhysicalParams()


@pytest.fixture
def coulomb(params):
    return PotentialSpec.point_coulomb(params)


@pytest.fixture
def well():
    return PotentialSpec.gaussian_well(-0.5, 1.0)


@pytest.fixture
def zero():
    return PotentialSpec.zero()


@pytest.fixture(scope="session")
def zn():
    return builtin_exponents("zn-6-31g")


@pytest.fixture
def small_exps():
    # well separated, so every small pencil is comfortably conditioned
    return ExponentSet("small", (0.5, 2.0, 8.0, 32.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def isolated_output(tmp_path, monkeypatch):
    from diracgap.config import settings

    monkeypatch.setattr(settings, "output_dir", tmp_path / "out")
    return tmp_path / "out"


@pytest.fixture(autouse=True)
def quadrature_rtol_restored():
    from diracgap.radial import quadrature_rtol, set_quadrature_rtol

    saved = quadrature_rtol()
    yield
    set_quadrature_rtol(saved)
