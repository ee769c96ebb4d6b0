"""Kernel families: truncated zonal series on S^d and radial kernels on R^d.

A sphere kernel is phi(x . y) = sum_n a_n C~_n(x . y) with positive
coefficients a_n; a Euclidean kernel is phi(|x - y|) through a radial
profile. Both expose enough structure for the native-space machinery:
the sphere side hands out its coefficient sequence, the Euclidean side
its Fourier-decay exponent.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from ._series import series_sum
from .geometry import EuclidPoint, SpherePoint
from .orthopoly import (
    RadialProfile,
    SphereBasisTable,
    harmonic_dimension,
    matern_profile,
    radial_profile_eval,
    wendland_profile,
)

DEFAULT_N_MAX_CAP = 400
TAIL_TARGET = 1e-8


class KernelError(ValueError):
    pass


def _dims_ratio_bound(d: int, probe_max: int) -> float:
    """Largest observed d_n / (1+n)^(d-1) out to probe_max.

    The ratio tends to 2/(d-1)! and is monotone beyond small degrees, so
    probing well past the truncation gives a sound constant for the
    integral comparison.
    """
    best = 0.0
    for n in range(probe_max + 1):
        best = max(best, harmonic_dimension(d, n) / (1.0 + n) ** (d - 1))
    return best


def _powerlaw_tail_estimate(d: int, tau: float, amplitude: float, n_max: int) -> float:
    """Integral-comparison bound on sum_{n > n_max} d_n a_n."""
    c_d = _dims_ratio_bound(d, n_max + 1000)
    # integral of (1+x)^(d-1-2 tau) from n_max to infinity
    return amplitude * c_d * (1.0 + n_max) ** (d - 2.0 * tau) / (2.0 * tau - d)


def _auto_n_max(d: int, tau: float, amplitude: float, cap: int) -> int:
    """Smallest truncation meeting the relative tail target, capped.

    The cap can leave the target unmet for slowly decaying rules; the
    validation report carries the achieved estimate either way.
    """
    c_d = _dims_ratio_bound(d, cap + 1000)
    head = 0.0
    for n in range(cap + 1):
        head += harmonic_dimension(d, n) * amplitude * (1.0 + n) ** (-2.0 * tau)
        tail = amplitude * c_d * (1.0 + n) ** (d - 2.0 * tau) / (2.0 * tau - d)
        if tail / head < TAIL_TARGET:
            return n
    return cap


@dataclass(frozen=True)
class SphereSeriesKernel:
    """Zonal kernel phi = sum_n a_n C~_n on S^d, truncated at n_max.

    rule is "powerlaw" (a_n = A (1+n)^(-2 tau), needs 2 tau > d) or
    "explicit" (finite caller-supplied list). The truncated sequence is
    the kernel: every downstream quantity (Gram matrices, spectral norms,
    quadrature checks) uses the same truncation, so internal consistency
    tests are exact rather than truncation-limited.

    When n_max is not given for a power-law rule it is chosen as the
    smallest degree whose estimated relative series tail drops below
    1e-8, capped at 400 for d = 2.
    """

    d: int
    rule: str
    tau: float | None = None
    amplitude: float = 1.0
    n_max: int | None = None
    coeffs_list: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.d < 1:
            raise KernelError("need sphere dimension d >= 1")
        if self.rule == "powerlaw":
            if self.tau is None:
                raise KernelError("power-law rule needs tau")
            if not 2.0 * self.tau > self.d:
                raise KernelError(
                    f"power-law rule needs 2 tau > d for a convergent series; "
                    f"got tau={self.tau}, d={self.d}"
                )
            if self.amplitude <= 0:
                raise KernelError("amplitude must be positive")
            n_max = self.n_max
            if n_max is None:
                n_max = _auto_n_max(self.d, self.tau, self.amplitude, DEFAULT_N_MAX_CAP)
                object.__setattr__(self, "n_max", n_max)
            n = np.arange(n_max + 1, dtype=float)
            a = self.amplitude * (1.0 + n) ** (-2.0 * self.tau)
        elif self.rule == "explicit":
            if not self.coeffs_list:
                raise KernelError("explicit rule needs a nonempty coefficient list")
            a = np.asarray(self.coeffs_list, dtype=float)
            bad = np.flatnonzero(a <= 0)
            if bad.size:
                raise KernelError(
                    f"coefficients must be positive; first failure at n={bad[0]}"
                )
            object.__setattr__(self, "n_max", a.size - 1)
            object.__setattr__(self, "coeffs_list", tuple(float(v) for v in a))
        else:
            raise KernelError(f"unknown sphere kernel rule: {self.rule!r}")
        basis = SphereBasisTable(d=self.d, n_max=int(self.n_max))
        a = np.ascontiguousarray(a, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "_a", a)
        object.__setattr__(self, "_basis", basis)

    @property
    def coefficients(self) -> np.ndarray:
        """a_0..a_n_max, read-only."""
        return self._a

    @property
    def basis(self) -> SphereBasisTable:
        return self._basis

    @property
    def ultraspherical_lambda(self) -> float:
        return self._basis.ultraspherical_lambda

    @property
    def phi0(self) -> float:
        """phi at zero distance: sum_n a_n d_n under the truncation."""
        return float(np.sum(self._a * self._basis.dims))

    def eval_dots(self, t) -> np.ndarray:
        """Evaluate phi elementwise on an array of inner products."""
        weights = self._a * self._basis.dims
        return series_sum(weights, self.ultraspherical_lambda, np.asarray(t, dtype=float))

    def tail_estimate(self) -> float | None:
        """Relative series tail beyond the truncation (power-law rules only)."""
        if self.rule != "powerlaw":
            return None
        head = float(np.sum(self._a * self._basis.dims))
        tail = _powerlaw_tail_estimate(self.d, self.tau, self.amplitude, int(self.n_max))
        return tail / head


@dataclass(frozen=True)
class EuclidRadialKernel:
    """Radial kernel phi(|x - y|) on a d-dimensional Euclidean domain.

    The smoothness exponent s is forwarded from the profile and must
    exceed d/2 so the native space embeds in continuous functions.
    """

    profile: RadialProfile
    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise KernelError("need ambient dimension d >= 1")
        if not self.profile.s > self.d / 2.0:
            raise KernelError(
                f"need smoothness s > d/2; got s={self.profile.s}, d={self.d}"
            )

    @property
    def s(self) -> float:
        return self.profile.s

    @property
    def phi0(self) -> float:
        return 1.0

    def eval_distances(self, r) -> np.ndarray:
        return radial_profile_eval(self.profile, r)


Kernel = Union[SphereSeriesKernel, EuclidRadialKernel]


def kernel_eval(k: Kernel, x, y) -> float:
    """Evaluate the kernel at one pair of points.

    Accepts SpherePoint/EuclidPoint instances or raw coordinate arrays.
    Symmetric in (x, y) by construction.
    """
    xa = x.as_array() if isinstance(x, (SpherePoint, EuclidPoint)) else np.asarray(x, dtype=float)
    ya = y.as_array() if isinstance(y, (SpherePoint, EuclidPoint)) else np.asarray(y, dtype=float)
    if xa.shape != ya.shape:
        raise KernelError("dimension mismatch between points")
    if isinstance(k, SphereSeriesKernel):
        if xa.size != k.d + 1:
            raise KernelError(f"expected {k.d + 1} coordinates, got {xa.size}")
        t = float(np.clip(np.dot(xa, ya), -1.0, 1.0))
        return float(k.eval_dots(np.array([t]))[0])
    if xa.size != k.d:
        raise KernelError(f"expected {k.d} coordinates, got {xa.size}")
    r = float(np.linalg.norm(xa - ya))
    return float(k.eval_distances(r))


def gram_matrix(k: Kernel, coords: np.ndarray) -> np.ndarray:
    """Kernel matrix A_ij = phi(dist(y_i, y_j)) for rows of `coords`."""
    coords = np.asarray(coords, dtype=float)
    if isinstance(k, SphereSeriesKernel):
        dots = np.clip(coords @ coords.T, -1.0, 1.0)
        A = k.eval_dots(dots)
    else:
        sq = np.sum(coords * coords, axis=1)
        d2 = sq[:, None] - 2.0 * coords @ coords.T + sq[None, :]
        A = k.eval_distances(np.sqrt(np.maximum(0.0, d2)))
    return 0.5 * (A + A.T)


@dataclass(frozen=True)
class ValidationReport:
    admissible: bool
    failures: tuple[str, ...]
    positivity_ok: bool
    summability_margin: float | None
    tail_estimate: float | None
    tail_ok: bool | None
    s_margin: float | None

    def __str__(self) -> str:
        status = "admissible" if self.admissible else "rejected"
        parts = [status]
        if self.summability_margin is not None:
            parts.append(f"summability margin {self.summability_margin:g}")
        if self.tail_estimate is not None:
            parts.append(f"relative tail {self.tail_estimate:.3g}")
        if self.s_margin is not None:
            parts.append(f"s - d/2 = {self.s_margin:g}")
        if self.failures:
            parts.append("; ".join(self.failures))
        return "; ".join(parts)


def validate_kernel(k) -> ValidationReport:
    """Check admissibility and report margins without raising.

    Accepts a constructed kernel or a flat config mapping (see
    kernel_from_config) so inadmissible parameter sets, which the
    constructors refuse, can still be diagnosed.
    """
    if isinstance(k, Mapping):
        return _validate_config(dict(k))
    if isinstance(k, SphereSeriesKernel):
        failures = []
        a = k.coefficients
        positivity_ok = bool(np.all(a > 0))
        if not positivity_ok:
            failures.append(f"positivity failure at n={int(np.flatnonzero(a <= 0)[0])}")
        margin = 2.0 * k.tau - k.d if k.rule == "powerlaw" else None
        tail = k.tail_estimate()
        tail_ok = None if tail is None else bool(tail < TAIL_TARGET)
        if tail_ok is False:
            failures.append(
                f"relative series tail {tail:.3g} above target {TAIL_TARGET:g} "
                f"at truncation {k.n_max} (explicit truncation kept)"
            )
        return ValidationReport(
            admissible=positivity_ok,
            failures=tuple(failures),
            positivity_ok=positivity_ok,
            summability_margin=margin,
            tail_estimate=tail,
            tail_ok=tail_ok,
            s_margin=None,
        )
    if isinstance(k, EuclidRadialKernel):
        margin = k.s - k.d / 2.0
        ok = margin > 0
        failures = () if ok else (f"s = {k.s} does not exceed d/2 = {k.d / 2}",)
        return ValidationReport(
            admissible=ok,
            failures=failures,
            positivity_ok=True,
            summability_margin=None,
            tail_estimate=None,
            tail_ok=None,
            s_margin=margin,
        )
    raise KernelError(f"cannot validate object of type {type(k).__name__}")


_SPHERE_KEYS = {"kind", "d", "tau", "A", "N_max", "coeffs"}
_EUCLID_KEYS = {"family", "d", "k", "m", "rho", "s"}


def _validate_config(cfg: dict) -> ValidationReport:
    failures = []
    positivity_ok = True
    margin = None
    tail = None
    tail_ok = None
    s_margin = None
    try:
        k = kernel_from_config(cfg)
    except KernelError as exc:
        msg = str(exc)
        failures.append(msg)
        if "positive" in msg or "positivity" in msg:
            positivity_ok = False
        if "2 tau > d" in msg:
            d = int(cfg.get("d", 2))
            margin = 2.0 * float(cfg["tau"]) - d
        return ValidationReport(
            admissible=False,
            failures=tuple(failures),
            positivity_ok=positivity_ok,
            summability_margin=margin,
            tail_estimate=tail,
            tail_ok=tail_ok,
            s_margin=s_margin,
        )
    return validate_kernel(k)


def kernel_from_config(cfg: Mapping) -> Kernel:
    """Build a kernel from a flat key-value mapping.

    Sphere kernels: kind=powerlaw with d, tau, A, N_max (A and N_max
    optional), or kind=explicit with coeffs (comma-separated or a
    sequence). Euclidean kernels: family=wendland with d, k, rho, or
    family=matern with d, m, s, rho. Unknown keys are rejected.
    """
    cfg = dict(cfg)
    if "kind" in cfg:
        extra = set(cfg) - _SPHERE_KEYS
        if extra:
            raise KernelError(f"unknown kernel config keys: {sorted(extra)}")
        kind = cfg["kind"]
        d = int(cfg.get("d", 2))
        if kind == "powerlaw":
            if "tau" not in cfg:
                raise KernelError("powerlaw kernel config needs tau")
            n_max = cfg.get("N_max")
            return SphereSeriesKernel(
                d=d,
                rule="powerlaw",
                tau=float(cfg["tau"]),
                amplitude=float(cfg.get("A", 1.0)),
                n_max=None if n_max is None else int(n_max),
            )
        if kind == "explicit":
            raw = cfg.get("coeffs")
            if raw is None:
                raise KernelError("explicit kernel config needs coeffs")
            if isinstance(raw, str):
                coeffs = tuple(float(v) for v in raw.split(",") if v != "")
            else:
                coeffs = tuple(float(v) for v in raw)
            return SphereSeriesKernel(d=d, rule="explicit", coeffs_list=coeffs)
        raise KernelError(f"unknown sphere kernel kind: {kind!r}")
    if "family" in cfg:
        extra = set(cfg) - _EUCLID_KEYS
        if extra:
            raise KernelError(f"unknown kernel config keys: {sorted(extra)}")
        family = cfg["family"]
        d = int(cfg.get("d", 1))
        rho = float(cfg.get("rho", 1.0))
        try:
            if family == "wendland":
                if "k" not in cfg:
                    raise KernelError("wendland kernel config needs k")
                profile = wendland_profile(d=d, k=int(cfg["k"]), rho=rho)
            elif family == "matern":
                if "m" not in cfg or "s" not in cfg:
                    raise KernelError("matern kernel config needs m and s")
                profile = matern_profile(m=int(cfg["m"]), s=float(cfg["s"]), rho=rho)
            else:
                raise KernelError(f"unknown kernel family: {family!r}")
        except ValueError as exc:
            raise KernelError(str(exc)) from exc
        return EuclidRadialKernel(profile=profile, d=d)
    raise KernelError("kernel config needs a 'kind' (sphere) or 'family' (euclid) key")


def kernel_to_config(k: Kernel) -> dict:
    """Inverse of kernel_from_config, for report echoes and sidecars."""
    if isinstance(k, SphereSeriesKernel):
        if k.rule == "powerlaw":
            return {
                "kind": "powerlaw",
                "d": k.d,
                "tau": k.tau,
                "A": k.amplitude,
                "N_max": int(k.n_max),
            }
        return {
            "kind": "explicit",
            "d": k.d,
            "coeffs": list(k.coeffs_list),
        }
    p = k.profile
    if p.family == "wendland":
        return {"family": "wendland", "d": k.d, "k": p.k, "rho": p.rho}
    return {"family": "matern", "d": k.d, "m": p.m, "s": p.s, "rho": p.rho}
