import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import polaronsim as ps


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


@pytest.fixture
def two_site_model():
    return ps.GeneralizedHolsteinModel(
        n_sites=2,
        coupling_matrix=np.array([[0.0, 0.5], [0.5, 0.0]]),
        site_energy=(0.0, 0.2),
        modes=((ps.Mode(1.5, 0.04),), (ps.Mode(2.0, 0.09),)),
    )


@pytest.fixture
def two_site_file(two_site_model, tmp_path):
    path = tmp_path / "two_site.json"
    ps.save_model(two_site_model, path)
    return path
