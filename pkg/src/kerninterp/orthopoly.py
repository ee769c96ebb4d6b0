"""Harmonic-space dimensions, normalized ultraspherical evaluation, and
univariate radial profiles (Wendland, Matern).

The ultraspherical family used throughout is normalized so that the
degree-n polynomial takes the value d_n at t = 1, where d_n is the
dimension of the degree-n spherical-harmonic space on S^d. With that
normalization the addition identity for an orthonormal harmonic basis
holds with no extra constant, which is the contract every downstream
computation relies on.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from ._series import series_sum


class OrthopolyError(ValueError):
    pass


def harmonic_dimension(d: int, n: int) -> int:
    """Dimension of the space of degree-n spherical harmonics on S^d.

    Uses d_n = (2n + d - 1) (n + d - 2)! / (n! (d - 1)!), evaluated in
    exact integer arithmetic. For d = 2 this is 2n + 1; on the circle
    (d = 1) it is 2 for n >= 1 and 1 for n = 0.
    """
    if d < 1:
        raise OrthopolyError("need sphere dimension d >= 1")
    if n < 0:
        raise OrthopolyError("need degree n >= 0")
    if n == 0:
        return 1
    num = (2 * n + d - 1) * factorial(n + d - 2)
    den = factorial(n) * factorial(d - 1)
    if num % den:
        raise OrthopolyError(f"dimension formula not integral at d={d}, n={n}")
    return num // den


@dataclass(frozen=True)
class SphereBasisTable:
    """Precomputed harmonic dimensions d_0..d_N for one sphere dimension."""

    d: int
    n_max: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise OrthopolyError("need sphere dimension d >= 1")
        if self.n_max < 0:
            raise OrthopolyError("need truncation degree >= 0")
        dims = np.array(
            [harmonic_dimension(self.d, n) for n in range(self.n_max + 1)],
            dtype=float,
        )
        dims.setflags(write=False)
        object.__setattr__(self, "_dims", dims)

    @property
    def dims(self) -> np.ndarray:
        """d_0..d_n_max as a read-only float array."""
        return self._dims

    @property
    def ultraspherical_lambda(self) -> float:
        """Recurrence parameter for S^d embedded in R^(d+1)."""
        return (self.d - 1) / 2.0


def gegenbauer_addition(d: int, n: int, t):
    """Evaluate the degree-n ultraspherical polynomial normalized to d_n at 1.

    For d = 2 this equals (2n + 1) P_n(t) with P_n the Legendre
    polynomial. Accepts a scalar or an array of arguments t in [-1, 1].

    Args:
        d: sphere dimension, >= 1.
        n: polynomial degree, >= 0.
        t: argument(s), |t| <= 1.

    Returns:
        Scalar for scalar input, ndarray otherwise.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1.0 + 1e-14):
        raise OrthopolyError("argument outside [-1, 1]")
    t_arr = np.clip(t_arr, -1.0, 1.0)
    dim = harmonic_dimension(d, n)
    weights = np.zeros(n + 1)
    weights[n] = float(dim)
    lam = (d - 1) / 2.0
    out = series_sum(weights, lam, np.atleast_1d(t_arr))
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(out[0])
    return out.reshape(t_arr.shape)


# Closed forms for the low-order Wendland functions, normalized to 1 at
# the origin, and the Sobolev exponent they carry in dimension d.
_WENDLAND_FORMS = {(1, 1), (3, 1), (1, 2), (3, 2)}
_MATERN_ORDERS = {1, 2}


@dataclass(frozen=True)
class RadialProfile:
    """Univariate radial profile r -> phi(r / rho).

    family is "wendland" (parameters d, k; compact support [0, rho]) or
    "matern" (parameter m; global support). The stored smoothness
    exponent s is the Fourier-decay order of the profile in the ambient
    dimension the study runs in: (d + 2k + 1) / 2 for wendland(d, k), and
    caller-supplied for Matern since the decay order depends on the
    ambient dimension, not on m alone.
    """

    family: str
    d: int | None
    k: int | None
    m: int | None
    s: float
    rho: float

    def __post_init__(self) -> None:
        if self.rho <= 0:
            raise OrthopolyError("scale rho must be positive")
        if self.family == "wendland":
            if (self.d, self.k) not in _WENDLAND_FORMS:
                raise OrthopolyError(
                    f"no closed form for wendland({self.d},{self.k}); "
                    f"available: {sorted(_WENDLAND_FORMS)}"
                )
        elif self.family == "matern":
            if self.m not in _MATERN_ORDERS:
                raise OrthopolyError(
                    f"matern order m={self.m} not available; use m in {sorted(_MATERN_ORDERS)}"
                )
            if self.s <= 0:
                raise OrthopolyError("matern profile needs a positive exponent s")
        else:
            raise OrthopolyError(f"unknown profile family: {self.family!r}")

    @property
    def support_radius(self) -> float:
        """rho for Wendland profiles, inf for Matern."""
        return self.rho if self.family == "wendland" else np.inf

    @property
    def label(self) -> str:
        if self.family == "wendland":
            return f"wendland({self.d},{self.k})"
        return f"matern({self.m})"


def wendland_profile(d: int, k: int, rho: float = 1.0) -> RadialProfile:
    """Compactly supported piecewise-polynomial profile of minimal degree.

    The smoothness exponent is s = (d + 2k + 1) / 2, the Fourier-decay
    order of the d-dimensional Wendland function.
    """
    return RadialProfile(family="wendland", d=d, k=k, m=None, s=(d + 2 * k + 1) / 2.0, rho=rho)


def matern_profile(m: int, s: float, rho: float = 1.0) -> RadialProfile:
    """Half-integer Matern profile, normalized to 1 at the origin.

    Args:
        m: order; m=1 is (1+u)e^-u, m=2 is (1+u+u^2/3)e^-u with u = r/rho.
        s: Fourier-decay exponent in the ambient dimension of the study.
            For m=1 in one dimension the transform is 4/(1+w^2)^2, so s=2.
        rho: length scale.
    """
    return RadialProfile(family="matern", d=None, k=None, m=m, s=float(s), rho=rho)


def radial_profile_eval(p: RadialProfile, r) -> np.ndarray | float:
    """Evaluate a radial profile at distances r >= 0 (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise OrthopolyError("radial argument must be nonnegative")
    u = r_arr / p.rho
    if p.family == "wendland":
        uc = np.minimum(u, 1.0)
        w = 1.0 - uc
        if (p.d, p.k) == (1, 1):
            out = w**3 * (3.0 * uc + 1.0)
        elif (p.d, p.k) == (3, 1):
            out = w**4 * (4.0 * uc + 1.0)
        elif (p.d, p.k) == (1, 2):
            out = w**5 * (8.0 * uc * uc + 5.0 * uc + 1.0)
        else:  # (3, 2)
            out = w**6 * (35.0 * uc * uc + 18.0 * uc + 3.0) / 3.0
    else:
        if p.m == 1:
            out = (1.0 + u) * np.exp(-u)
        else:
            out = (1.0 + u + u * u / 3.0) * np.exp(-u)
    if np.isscalar(r) or r_arr.ndim == 0:
        return float(out)
    return out
