"""Scikit-learn style wrappers: ``fit`` builds a codebook, ``predict`` runs a sweep.

Channels are rows of ``X``.  ``predict`` returns the selected codeword index,
``transform`` the |h^H w|^2 gains against every codeword and ``score`` the
mean selected gain.

>>> from curabeam import Cura1DGeometry, PolarCodebook
>>> est = PolarCodebook(Cura1DGeometry(64, 0.5, 0.01), r_min=5.0).fit()
>>> est.n_codewords_ > 0
True
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._checks import check_channels, check_geometry, check_open_unit, check_positive_int
from .codebook import (
    DEFAULT_MAX_CODEWORDS,
    DesignSwitches,
    DesignThresholds,
    baseline_dft,
    baseline_uniform_polar,
    baseline_uniform_spherical,
    build_codebook_1d,
    build_codebook_2d,
)
from .geometry import Cura2DGeometry
from .trainsim import sweep_gains


class _SweepMixin:
    """Beam selection on top of a fitted ``codebook_``."""

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "codebook_")
        H = check_channels(X, self.codebook_.n_elements)
        return sweep_gains(self.codebook_, H)[0]

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "codebook_")
        H = check_channels(X, self.codebook_.n_elements)
        out = np.empty((H.shape[0], len(self.codebook_)))
        for start, W in self.codebook_.blocks():
            out[:, start:start + W.shape[0]] = np.abs(np.conj(H) @ W.T) ** 2
        return out

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)

    def score(self, X, y=None) -> float:
        check_is_fitted(self, "codebook_")
        H = check_channels(X, self.codebook_.n_elements)
        H = H / np.linalg.norm(H, axis=1, keepdims=True)
        return float(np.mean(sweep_gains(self.codebook_, H)[1]))

    def _finish_fit(self, X, codebook):
        if X is not None:
            check_channels(X, codebook.n_elements)
        self.codebook_ = codebook
        self.n_codewords_ = len(codebook)
        self.n_features_in_ = codebook.n_elements
        return self


class PolarCodebook(_SweepMixin, BaseEstimator):
    """ERD-gated polar-domain codebook for arc (1-D) or stacked-arc (2-D) arrays."""

    def __init__(self, geometry=None, delta_p=0.5, delta_r=0.5, delta_gain=0.5, eta_r=1.0,
                 eta_a=0.25, rho_max=0.5 * math.pi, r_min=10.0, r_max=2000.0,
                 theta_variant="appendix", strict_paper_formulas=True, phi_tilde_max=None,
                 max_codewords=DEFAULT_MAX_CODEWORDS):
        self.geometry = geometry
        self.delta_p = delta_p
        self.delta_r = delta_r
        self.delta_gain = delta_gain
        self.eta_r = eta_r
        self.eta_a = eta_a
        self.rho_max = rho_max
        self.r_min = r_min
        self.r_max = r_max
        self.theta_variant = theta_variant
        self.strict_paper_formulas = strict_paper_formulas
        self.phi_tilde_max = phi_tilde_max
        self.max_codewords = max_codewords

    def thresholds(self) -> DesignThresholds:
        for name in ("delta_p", "delta_r", "delta_gain", "eta_a"):
            check_open_unit(getattr(self, name), name)
        return DesignThresholds(self.delta_p, self.delta_r, self.delta_gain, self.eta_r, self.eta_a,
                                self.rho_max, self.r_min, self.r_max)

    def switches(self) -> DesignSwitches:
        return DesignSwitches(self.theta_variant, bool(self.strict_paper_formulas),
                              self.phi_tilde_max, check_positive_int(self.max_codewords, "max_codewords"))

    def fit(self, X=None, y=None):
        geom = check_geometry(self.geometry)
        build = build_codebook_2d if isinstance(geom, Cura2DGeometry) else build_codebook_1d
        return self._finish_fit(X, build(geom, self.thresholds(), self.switches()))


class DFTCodebook(_SweepMixin, BaseEstimator):
    """Unitary DFT columns, uniformly subsampled to ``size``."""

    def __init__(self, geometry=None, size=None):
        self.geometry = geometry
        self.size = size

    def fit(self, X=None, y=None):
        geom = check_geometry(self.geometry)
        size = geom.n_total if self.size is None else check_positive_int(self.size, "size")
        return self._finish_fit(X, baseline_dft(geom, size))


class _UniformBaseline(_SweepMixin, BaseEstimator):
    _builder = None

    def __init__(self, geometry=None, size=1024, r_min=10.0, r_max=2000.0, rho_max=0.5 * math.pi,
                 n_ranges=8, phi_tilde_max=None):
        self.geometry = geometry
        self.size = size
        self.r_min = r_min
        self.r_max = r_max
        self.rho_max = rho_max
        self.n_ranges = n_ranges
        self.phi_tilde_max = phi_tilde_max

    def fit(self, X=None, y=None):
        geom = check_geometry(self.geometry)
        thr = DesignThresholds(rho_max=self.rho_max, r_min=self.r_min, r_max=self.r_max)
        cb = type(self)._builder(geom, thr, check_positive_int(self.size, "size"),
                                 check_positive_int(self.n_ranges, "n_ranges"), self.phi_tilde_max)
        return self._finish_fit(X, cb)


class UniformPolarCodebook(_UniformBaseline):
    """Uniform (theta, phi) box crossed with reciprocal-range-uniform ranges."""

    _builder = staticmethod(baseline_uniform_polar)


class UniformSphericalCodebook(_UniformBaseline):
    """Uniform (r, theta, phi) grid."""

    _builder = staticmethod(baseline_uniform_spherical)
