import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from curabeam import (
    Cura1DGeometry,
    DFTCodebook,
    PolarCodebook,
    PolarDirection,
    UniformPolarCodebook,
    UniformSphericalCodebook,
    focusing_vector,
)
from curabeam.geometry import polar_location

LAM = 0.01


@pytest.fixture(scope="module")
def geom():
    return Cura1DGeometry(32, math.pi / 6, LAM)


@pytest.fixture(scope="module")
def channels(geom):
    locs = [(3.0, 0.2, 0.1), (20.0, 0.8, -0.3), (150.0, 0.0, 0.0)]
    return np.array([focusing_vector(geom, polar_location(r, PolarDirection(a, b)))
                     for r, a, b in locs])


def test_params_roundtrip(geom):
    est = PolarCodebook(geom, delta_p=0.4, r_min=3.0)
    params = est.get_params()
    assert params["delta_p"] == 0.4 and params["r_min"] == 3.0
    twin = clone(est)
    assert twin.get_params()["geometry"] == geom
    est.set_params(delta_r=0.6)
    assert est.delta_r == 0.6


def test_unfitted_raises(geom, channels):
    with pytest.raises(NotFittedError):
        PolarCodebook(geom).predict(channels)


@pytest.mark.parametrize("make", [
    lambda g: PolarCodebook(g, r_min=2.0, r_max=200.0),
    lambda g: DFTCodebook(g),
    lambda g: UniformPolarCodebook(g, size=256, r_min=2.0, r_max=200.0),
    lambda g: UniformSphericalCodebook(g, size=256, r_min=2.0, r_max=200.0),
])
def test_fit_predict_transform(make, geom, channels):
    est = make(geom).fit(channels)
    assert est.n_features_in_ == 32
    assert est.n_codewords_ == len(est.codebook_)
    idx = est.predict(channels)
    gains = est.transform(channels)
    assert gains.shape == (3, est.n_codewords_)
    assert np.array_equal(idx, np.argmax(gains, axis=1))
    assert 0.0 <= est.score(channels) <= 1.0 + 1e-12
    assert np.allclose(est.fit_transform(channels), gains)


def test_polar_codebook_serves_its_users(geom, channels):
    est = PolarCodebook(geom, r_min=2.0, r_max=200.0).fit()
    assert est.score(channels) > 0.5


def test_bad_params(geom, channels):
    with pytest.raises(ValueError):
        PolarCodebook(geom, delta_p=1.2).fit()
    with pytest.raises((TypeError, ValueError)):
        PolarCodebook("not a geometry").fit()
    with pytest.raises(ValueError):
        DFTCodebook(geom).fit().predict(channels[:, :5])
