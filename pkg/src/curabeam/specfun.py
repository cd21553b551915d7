"""Bessel J0, its principal-branch inverse, and Fresnel integrals.

Everything here is vectorised over numpy arrays and returns a Python float
when called with a scalar.  The evaluation regimes are:

* J0: power series for |x| < 12, Hankel asymptotic expansion beyond.
* C, S: Taylor series for x <= 2.5, 64-node Gauss-Legendre quadrature on
  [0, x] for 2.5 < x < 5, auxiliary-function asymptotics for x >= 5.
* Inverses: bisection on a bracket where the forward map is monotone.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DomainError

_J0_SERIES_LIMIT = 12.0
_J0_SERIES_TERMS = 60
_J0_ASYMPTOTIC_TERMS = 24

_FRESNEL_SERIES_LIMIT = 2.5
_FRESNEL_ASYMPTOTIC_LIMIT = 5.0
_FRESNEL_SERIES_TERMS = 60
_FRESNEL_ASYMPTOTIC_TERMS = 12
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)

_BISECTION_STEPS = 64


def _as_array(x, name: str) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr, arr.ndim == 0


def _result(arr: np.ndarray, scalar: bool):
    return float(arr) if scalar else arr


def _j0_series(x: np.ndarray) -> np.ndarray:
    q = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, _J0_SERIES_TERMS):
        term = term * (-q / (k * k))
        total = total + term
    return total


def _j0_asymptotic(x: np.ndarray) -> np.ndarray:
    # t_k = prod_{j<=k} (2j-1)^2 / (k! (8x)^k); P takes even k, Q odd k.
    p = np.ones_like(x)
    qsum = np.zeros_like(x)
    t = np.ones_like(x)
    for k in range(1, _J0_ASYMPTOTIC_TERMS + 1):
        t = t * ((2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2 == 0:
            p = p + (-1) ** (k // 2) * t
        else:
            qsum = qsum + (-1) ** ((k + 1) // 2) * t
    chi = x - 0.25 * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - qsum * np.sin(chi))


def bessel_j0(x):
    """Bessel function of the first kind, order zero."""
    arr, scalar = _as_array(x, "x")
    ax = np.abs(np.atleast_1d(arr))
    out = np.empty_like(ax)
    small = ax < _J0_SERIES_LIMIT
    if np.any(small):
        out[small] = _j0_series(ax[small])
    if np.any(~small):
        out[~small] = _j0_asymptotic(ax[~small])
    return _result(out.reshape(arr.shape), scalar)


def _first_j0_zero() -> float:
    lo, hi = 2.0, 3.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if bessel_j0(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


J0_FIRST_ZERO = _first_j0_zero()


def bessel_j0_inverse(y):
    """Unique x in [0, first zero of J0) with J0(x) = y, for 0 < y <= 1."""
    arr, scalar = _as_array(y, "y")
    if np.any(arr <= 0.0) or np.any(arr > 1.0):
        raise DomainError("J0 inverse is defined on (0, 1] for the principal branch")
    target = np.atleast_1d(arr)
    lo = np.zeros_like(target)
    hi = np.full_like(target, J0_FIRST_ZERO)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        above = bessel_j0(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    out = 0.5 * (lo + hi)
    out[target == 1.0] = 0.0
    return _result(out.reshape(arr.shape), scalar)


def _fresnel_series(x: np.ndarray) -> np.ndarray:
    # C + jS = sum_k (j pi x^2 / 2)^k / k! * x / (2k + 1)
    z = 0.5j * np.pi * x * x
    term = np.ones(x.shape, dtype=complex)
    total = np.zeros(x.shape, dtype=complex)
    for k in range(_FRESNEL_SERIES_TERMS):
        if k:
            term = term * z / k
        total = total + term / (2 * k + 1)
    return total * x


def _fresnel_quadrature(x: np.ndarray) -> np.ndarray:
    half = 0.5 * x[:, None]
    t = half * (_GL_NODES[None, :] + 1.0)
    vals = np.exp(0.5j * np.pi * t * t)
    return half[:, 0] * (vals @ _GL_WEIGHTS)


def _fresnel_asymptotic(x: np.ndarray) -> np.ndarray:
    u = np.pi * x * x
    inv2 = 1.0 / (u * u)
    f = np.zeros_like(x)
    g = np.zeros_like(x)
    fterm = np.ones_like(x)
    gterm = np.ones_like(x)
    for m in range(_FRESNEL_ASYMPTOTIC_TERMS):
        if m:
            fterm = fterm * -(4 * m - 3) * (4 * m - 1) * inv2
            gterm = gterm * -(4 * m - 1) * (4 * m + 1) * inv2
        f = f + fterm
        g = g + gterm
    f = f / (np.pi * x)
    g = g / (np.pi**2 * x**3)
    phase = 0.5 * u
    s, c = np.sin(phase), np.cos(phase)
    return (0.5 + f * s - g * c) + 1j * (0.5 - f * c - g * s)


def _fresnel_complex(x: np.ndarray) -> np.ndarray:
    out = np.empty(x.shape, dtype=complex)
    lo = x <= _FRESNEL_SERIES_LIMIT
    hi = x >= _FRESNEL_ASYMPTOTIC_LIMIT
    mid = ~(lo | hi)
    if np.any(lo):
        out[lo] = _fresnel_series(x[lo])
    if np.any(mid):
        out[mid] = _fresnel_quadrature(x[mid])
    if np.any(hi):
        out[hi] = _fresnel_asymptotic(x[hi])
    return out


def fresnel(x):
    """Fresnel integrals (C(x), S(x)) with the pi*t^2/2 normalisation."""
    arr, scalar = _as_array(x, "x")
    if np.any(arr < 0.0):
        raise DomainError("Fresnel integrals are evaluated for x >= 0 only")
    z = _fresnel_complex(np.atleast_1d(arr)).reshape(arr.shape)
    if scalar:
        return float(z.real), float(z.imag)
    return z.real.copy(), z.imag.copy()


def fresnel_envelope(eps):
    """G(eps) = |C(sqrt eps) + j S(sqrt eps)| / sqrt eps, with G(0) = 1."""
    arr, scalar = _as_array(eps, "eps")
    if np.any(arr < 0.0):
        raise DomainError("eps must be non-negative")
    e = np.atleast_1d(arr)
    out = np.ones_like(e)
    pos = e > 0.0
    if np.any(pos):
        root = np.sqrt(e[pos])
        out[pos] = np.abs(_fresnel_complex(root)) / root
    return _result(out.reshape(arr.shape), scalar)


def _envelope_bracket(delta: float) -> tuple[float, float]:
    # Walk forward on a fine grid; the first sign change brackets the smallest root.
    start, width, step = 0.0, 8.0, 1e-3
    while start < 1e7:
        grid = start + step * np.arange(int(round(width / step)) + 1)
        below = np.nonzero(fresnel_envelope(grid) <= delta)[0]
        if below.size:
            k = int(below[0])
            return float(grid[k - 1]), float(grid[k])
        start = float(grid[-1])
        width *= 4.0
        step *= 2.0
    raise DomainError(f"no envelope crossing found for delta={delta}")


def fresnel_envelope_inverse(delta):
    """Smallest eps > 0 with fresnel_envelope(eps) = delta, for 0 < delta < 1."""
    arr, scalar = _as_array(delta, "delta")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("delta must lie in (0, 1)")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    for idx, d in enumerate(flat):
        lo, hi = _envelope_bracket(float(d))
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if fresnel_envelope(mid) > d:
                lo = mid
            else:
                hi = mid
        out[idx] = 0.5 * (lo + hi)
    return _result(out.reshape(arr.shape), scalar)
