"""Convergence studies: targets with prescribed smoothness, multi-level
interpolation experiments, slope fitting, and predicted decay exponents.

A study fixes a domain, a kernel, and a target, then refines a
deterministic point family over a list of levels, recording the fill
distance and the requested error metrics at each level. Slopes of
log(error) against log(h) are fitted by least squares and compared with
the exponents the decay theory predicts for the scenario.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import (
    Domain,
    PointSet,
    SPHERE_METRIC,
    candidate_grid,
    fibonacci_sphere,
    fill_distance,
    generate_points,
)
from .interpolation import (
    FactorizationError,
    Interpolant,
    build_interpolant,
    evaluate,
    native_norm_sq,
)
from .kernels import (
    EuclidRadialKernel,
    Kernel,
    SphereSeriesKernel,
    kernel_to_config,
    validate_kernel,
)
from .orthopoly import radial_profile_eval, wendland_profile
from .spectral import (
    PseudoDiffSymbol,
    SphereQuadrature,
    ZonalExpansion,
    apply_pseudodiff,
    hlambdaphi_norm_sq,
    hphi_norm_sq,
    power_symbol,
    zonal_eval,
)
from .geometry import SpherePoint

CONDITION_CAP = 1e12
ERROR_FLOOR = 1e-13
RATE_TOLERANCE = 0.35


class HarnessError(ValueError):
    pass


@dataclass(frozen=True)
class TargetSpec:
    """What target function to interpolate.

    kinds:
      - "zonal-powerlaw": c_n = +/-(1+n)^(-beta) with seeded signs and
        c_0 = 0, zonal about the north pole.
      - "zonal-bandlimited": seeded coefficients up to `degree`, scaled
        by 1/(1+n).
      - "euclid-bump": a Wendland bump, profile wendland(bump_d, bump_k)
        scaled to `radius` around `center`.
      - "euclid-kernel-translate": the kernel's own translate at `center`.
    """

    kind: str
    beta: float | None = None
    seed: int = 0
    degree: int | None = None
    bump_d: int | None = None
    bump_k: int | None = None
    center: tuple[float, ...] | None = None
    radius: float | None = None

    def __post_init__(self) -> None:
        kinds = (
            "zonal-powerlaw",
            "zonal-bandlimited",
            "euclid-bump",
            "euclid-kernel-translate",
        )
        if self.kind not in kinds:
            raise HarnessError(f"unknown target kind: {self.kind!r}")
        if self.kind == "zonal-powerlaw" and self.beta is None:
            raise HarnessError("zonal-powerlaw target needs beta")
        if self.kind == "zonal-bandlimited" and self.degree is None:
            raise HarnessError("zonal-bandlimited target needs degree")
        if self.kind == "euclid-bump":
            if self.bump_d is None or self.bump_k is None:
                raise HarnessError("euclid-bump target needs bump_d and bump_k")
            if self.center is None or self.radius is None:
                raise HarnessError("euclid-bump target needs center and radius")
        if self.kind == "euclid-kernel-translate" and self.center is None:
            raise HarnessError("euclid-kernel-translate target needs center")

    def to_config(self) -> dict:
        out = {"kind": self.kind, "seed": self.seed}
        for key in ("beta", "degree", "bump_d", "bump_k", "radius"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        if self.center is not None:
            out["center"] = list(self.center)
        return out


@dataclass(frozen=True, eq=False)
class BuiltTarget:
    """A target bound to a kernel, with its exact smoothness bookkeeping.

    For sphere targets the squared native norm is exact (the target is a
    finite zonal expansion sharing the kernel's truncation) and
    sigma_crit is the infimum operator order for which the
    operator-weighted norm stays finite under power-law decay. For
    Euclidean targets nu_star is the supremum Sobolev exponent the
    target's Fourier decay admits.
    """

    spec: TargetSpec
    domain_kind: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    zonal: ZonalExpansion | None = None
    hphi_norm_sq: float | None = None
    sigma_crit: float | None = None
    nu_star: float | None = None
    note: str = ""

    def lambdaphi_norm_sq(self, k: SphereSeriesKernel, sym: PseudoDiffSymbol) -> float:
        if self.zonal is None:
            raise HarnessError("operator-weighted norm needs a sphere target")
        return hlambdaphi_norm_sq(self.zonal, k, sym)


def build_target(spec: TargetSpec, k: Kernel, domain: Domain | None = None) -> BuiltTarget:
    """Construct the target evaluator and its exact norm data.

    Sphere targets are zonal expansions about the north pole sharing the
    kernel's truncation, so their native norms are finite sums evaluated
    exactly. Membership of a power-law target in the native space
    requires beta > tau + d/2 for the untruncated series; smaller beta is
    rejected rather than silently truncated into the space.

    Args:
        spec: target description.
        k: the kernel the target's norms are measured against.
        domain: optional; when given, Euclidean bump support is checked
            to sit strictly inside it.

    Raises:
        HarnessError: inadmissible combination (target outside the
            native space, bump touching the boundary, dimension clash).
    """
    if spec.kind.startswith("zonal"):
        if not isinstance(k, SphereSeriesKernel):
            raise HarnessError("zonal targets need a sphere series kernel")
        d = k.d
        pole = SpherePoint(tuple([0.0] * d + [1.0]))
        rng = np.random.default_rng(spec.seed)
        if spec.kind == "zonal-powerlaw":
            if k.rule != "powerlaw":
                raise HarnessError(
                    "zonal-powerlaw smoothness bookkeeping needs a power-law kernel"
                )
            beta = float(spec.beta)
            if not beta > k.tau + d / 2.0:
                raise HarnessError(
                    f"target outside native space: beta = {beta} does not exceed "
                    f"tau + d/2 = {k.tau + d / 2.0}; the untruncated series has "
                    "divergent native norm"
                )
            n = np.arange(k.n_max + 1, dtype=float)
            signs = rng.choice(np.array([-1.0, 1.0]), size=k.n_max + 1)
            coeffs = signs * (1.0 + n) ** (-beta)
            coeffs[0] = 0.0
            zonal = ZonalExpansion(d=d, pole=pole, coeffs=coeffs)
            sigma_crit = k.tau - beta / 2.0 + d / 4.0
            note = (
                f"power-law coefficients beta={beta:g}; operator-weighted norm "
                f"finite for orders above {sigma_crit:g}"
            )
        else:
            degree = int(spec.degree)
            if degree > k.n_max:
                raise HarnessError(
                    f"band limit {degree} exceeds kernel truncation {k.n_max}"
                )
            n = np.arange(degree + 1, dtype=float)
            coeffs = rng.standard_normal(degree + 1) / (1.0 + n)
            zonal = ZonalExpansion(d=d, pole=pole, coeffs=coeffs)
            sigma_crit = None
            note = f"band-limited at degree {degree}; in every smoothness class"
        return BuiltTarget(
            spec=spec,
            domain_kind="sphere",
            evaluator=lambda coords, _z=zonal: zonal_eval(_z, coords),
            zonal=zonal,
            hphi_norm_sq=hphi_norm_sq(zonal, k),
            sigma_crit=sigma_crit,
            note=note,
        )
    if not isinstance(k, EuclidRadialKernel):
        raise HarnessError("euclidean targets need a euclidean kernel")
    center = np.asarray(spec.center, dtype=float)
    if center.size != k.d:
        raise HarnessError(
            f"target center has {center.size} coordinates, kernel lives in R^{k.d}"
        )
    if spec.kind == "euclid-bump":
        if spec.bump_d != k.d:
            raise HarnessError(
                f"bump profile dimension {spec.bump_d} must match the ambient "
                f"dimension {k.d}"
            )
        profile = wendland_profile(d=spec.bump_d, k=spec.bump_k, rho=float(spec.radius))
        if domain is not None:
            if domain.kind != "box":
                raise HarnessError("euclid-bump support check needs a box domain")
            lo = np.asarray(domain.lower)
            hi = np.asarray(domain.upper)
            if not (np.all(center - spec.radius > lo) and np.all(center + spec.radius < hi)):
                raise HarnessError(
                    "bump support must sit strictly inside the domain"
                )
        s_target = profile.s
        nu_star = 2.0 * s_target - k.d / 2.0

        def evaluator(coords, _c=center, _p=profile):
            r = np.linalg.norm(np.atleast_2d(coords) - _c, axis=1)
            return radial_profile_eval(_p, r)

        note = (
            f"wendland({spec.bump_d},{spec.bump_k}) bump, decay exponent "
            f"{s_target:g}, Sobolev membership below {nu_star:g}"
        )
        return BuiltTarget(
            spec=spec,
            domain_kind="euclid",
            evaluator=evaluator,
            nu_star=nu_star,
            note=note,
        )
    # kernel translate
    nu_star = 2.0 * k.s - k.d / 2.0

    def evaluator(coords, _c=center, _k=k):
        r = np.linalg.norm(np.atleast_2d(coords) - _c, axis=1)
        return _k.eval_distances(r)

    return BuiltTarget(
        spec=spec,
        domain_kind="euclid",
        evaluator=evaluator,
        nu_star=nu_star,
        note=f"kernel translate, Sobolev membership below {nu_star:g}",
    )


_METRIC_RE = re.compile(r"^(sup|sup-inner|l2|native-residual|pseudo-sup|pseudo-l2|synthetic)(?:\(([^)]+)\))?$")


def parse_metric(name: str) -> tuple[str, float | None]:
    """Split a metric name like "pseudo-sup(0.5)" into (base, parameter)."""
    m = _METRIC_RE.match(name)
    if not m:
        raise HarnessError(f"unknown metric: {name!r}")
    base, arg = m.group(1), m.group(2)
    if base in ("pseudo-sup", "pseudo-l2", "synthetic"):
        if arg is None:
            raise HarnessError(f"metric {base} needs a parameter, e.g. {base}(0.5)")
        return base, float(arg)
    if arg is not None:
        raise HarnessError(f"metric {base} takes no parameter")
    return base, None


@dataclass(frozen=True)
class StudyConfig:
    """One convergence experiment.

    levels are point counts, strictly increasing, at least three. The
    metric menu: "sup", "l2", "native-residual" (sphere only),
    "pseudo-sup(s)", "pseudo-l2(s)" (sphere only, operator order s), and
    "synthetic(p)" which records h^p exactly and exists so slope fitting
    and rate assertion can be exercised against a known answer. Euclid
    studies with a "sup" metric also record "sup-inner", the same error
    on the 10 percent inner box, as a boundary-effect diagnostic.
    """

    domain: Domain
    kernel: Kernel
    target: TargetSpec
    levels: tuple[int, ...]
    metrics: tuple[str, ...] = ("sup",)
    eval_grid: int = 0
    candidates: int = 100_000
    generator: str | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.levels) < 3:
            raise HarnessError("need at least 3 levels")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise HarnessError("levels must be strictly increasing point counts")
        if not self.metrics:
            raise HarnessError("need at least one metric")
        for name in self.metrics:
            base, arg = parse_metric(name)
            if base in ("native-residual", "pseudo-sup", "pseudo-l2") and (
                self.domain.kind != "sphere"
            ):
                raise HarnessError(f"metric {name} needs a sphere domain")
        object.__setattr__(self, "levels", tuple(int(v) for v in self.levels))
        object.__setattr__(self, "metrics", tuple(self.metrics))

    def to_config(self) -> dict:
        dom = {"kind": self.domain.kind, "d": self.domain.d}
        if self.domain.lower is not None:
            dom["lower"] = list(self.domain.lower)
            dom["upper"] = list(self.domain.upper)
        if self.domain.center is not None:
            dom["center"] = list(self.domain.center)
            dom["radius"] = self.domain.radius
        return {
            "domain": dom,
            "kernel": kernel_to_config(self.kernel),
            "target": self.target.to_config(),
            "levels": list(self.levels),
            "metrics": list(self.metrics),
            "eval_grid": self.eval_grid,
            "candidates": self.candidates,
            "generator": self.generator or _default_generator(self.domain),
            "seed": self.seed,
        }


def _default_generator(domain: Domain) -> str:
    return "fibonacci-sphere" if domain.kind == "sphere" else "uniform-grid"


def _default_eval_grid(domain: Domain) -> int:
    return 20_000 if domain.kind == "sphere" else 10_000


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Per-level measurements plus fitted and predicted slopes.

    rows are sorted by decreasing fill distance. A row is usable when its
    interpolant was built and its condition estimate stays at or below
    1e12; fitted slopes also drop values at or below the 1e-13 error
    floor and appear only when at least three levels survive.
    """

    config: dict
    rows: tuple[dict, ...]
    fitted: dict
    predicted: dict

    @property
    def metrics(self) -> tuple[str, ...]:
        return tuple(self.config["metrics"])

    def to_csv_text(self) -> str:
        import csv as _csv
        import io

        metrics = list(self.metrics)
        buf = io.StringIO()
        writer = _csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["level", "n_points", "h", "cond"] + [f"metric:{m}" for m in metrics]
        )
        for row in self.rows:
            cells = [
                str(row["level"]),
                str(row["n_points"]),
                repr(float(row["h"])),
                repr(float(row["cond"])),
            ]
            for m in metrics:
                v = row["errors"].get(m)
                cells.append("" if v is None else repr(float(v)))
            writer.writerow(cells)
        for m in metrics:
            slope = self.fitted.get(m)
            if slope is not None:
                writer.writerow([f"fitted:{m}", repr(float(slope))])
        for m in metrics:
            if m in self.predicted:
                slope, prov = self.predicted[m]
                writer.writerow([f"predicted:{m}", repr(float(slope)), prov])
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "config": self.config,
            "rows": [
                {
                    "level": r["level"],
                    "n_points": r["n_points"],
                    "h": r["h"],
                    "cond": r["cond"],
                    "usable": r["usable"],
                    "errors": {m: v for m, v in r["errors"].items()},
                }
                for r in self.rows
            ],
            "fitted": {m: v for m, v in self.fitted.items()},
            "predicted": {
                m: {"slope": s, "provenance": p} for m, (s, p) in self.predicted.items()
            },
        }


def fit_slope(pairs, floor: float = ERROR_FLOOR) -> float:
    """Least-squares slope of log(error) against log(h).

    Pairs with error at or below the floor are dropped (they sit in the
    rounding regime the decay theory does not model); fewer than three
    surviving pairs is an error.
    """
    usable = [
        (h, e)
        for h, e in pairs
        if np.isfinite(h) and np.isfinite(e) and h > 0 and e > floor
    ]
    if len(usable) < 3:
        raise HarnessError(
            f"need at least 3 pairs above the error floor, have {len(usable)}"
        )
    hs = np.log([h for h, _ in usable])
    es = np.log([e for _, e in usable])
    return float(np.polyfit(hs, es, 1)[0])


def predicted_rate(
    domain_kind: str,
    metric: str,
    *,
    d: int,
    tau: float | None = None,
    s: float | None = None,
    nu_star: float | None = None,
    sigma_crit: float | None = None,
) -> tuple[float, str]:
    """Decay exponent the theory predicts for one scenario.

    Euclid sup error: h^(nu - d/2) with nu = min(nu_star, 2s); the cap
    reflects that rates double at most once past the native smoothness.
    Sphere sup error for a power-law kernel (a_n ~ n^(-2 tau),
    d_n ~ n^(d-1)) and a target of operator-smoothness sigma: the tail
    sums behind the bounds are geometric-series estimates
    sum_{n>N} n^p ~ N^(p+1) with N ~ 1/(2h), giving
    max(tau - d/2, 2 tau - d - 2 sigma) after clamping sigma at 0 (the
    doubled-rate cap). Pseudo metrics of operator order sigma_op combine
    the operator's own tail exponent with the native-residual decay:
    (tau - d/2 - 2 sigma_op) + max(0, tau - d/2 - 2 sigma). The
    provenance string spells out the formula instantiated.

    Returns:
        (exponent, provenance).
    """
    base, arg = parse_metric(metric)
    if base == "synthetic":
        return float(arg), f"synthetic power law: error injected as h^{arg:g}"
    if domain_kind != "sphere":
        if base in ("native-residual", "pseudo-sup", "pseudo-l2"):
            raise HarnessError(f"metric {metric} has no euclidean rate")
        if nu_star is None or s is None:
            raise HarnessError("euclid rates need nu_star and s")
        nu = min(nu_star, 2.0 * s)
        rate = nu - d / 2.0
        prov = (
            f"euclid sup bound h^(nu - d/2) with nu = min(nu* = {nu_star:g}, "
            f"2s = {2.0 * s:g}) = {nu:g} -> {rate:g}"
        )
        if base == "l2":
            prov += "; L2 under the normalized measure is bounded by the sup"
        if base == "sup-inner":
            prov += "; inner-box diagnostic, same bound"
        return rate, prov
    if tau is None:
        raise HarnessError("sphere rates need tau")
    native = tau - d / 2.0
    sigma = max(0.0, sigma_crit) if sigma_crit is not None else 0.0
    sigma_note = (
        f"sigma = max(0, {sigma_crit:g})" if sigma_crit is not None else "band-limited target, sigma = 0"
    )
    residual_rate = max(0.0, native - 2.0 * sigma)
    degenerate = sigma >= native / 2.0
    if base == "sup":
        rate = max(native, 2.0 * tau - d - 2.0 * sigma)
        if degenerate:
            prov = (
                f"native rate tau - d/2 = {native:g}; intermediate tail estimate "
                f"degenerates at {sigma_note} (sum d_n lambda_n^2 a_n diverges)"
            )
        else:
            prov = (
                f"intermediate rate 2 tau - d - 2 sigma = {rate:g} with "
                f"{sigma_note}, tail sums ~ N^(p+1) at N ~ 1/(2h)"
            )
        return rate, prov
    if base == "native-residual":
        prov = (
            f"residual norm decay tau - d/2 - 2 sigma clamped at 0 -> "
            f"{residual_rate:g} with {sigma_note}"
        )
        return residual_rate, prov
    if base in ("pseudo-sup", "pseudo-l2", "l2"):
        sigma_op = 0.0 if base == "l2" else float(arg)
        rate = (native - 2.0 * sigma_op) + residual_rate
        prov = (
            f"operator tail exponent tau - d/2 - 2 sigma_op = "
            f"{native - 2.0 * sigma_op:g} plus residual decay {residual_rate:g} "
            f"-> {rate:g}"
        )
        if sigma_op >= native / 2.0:
            prov += (
                "; operator-weighted tail hypothesis sits at or past its "
                "boundary (sum d_n lambda_n^2 a_n diverges), rate from the "
                "norm-decay step alone"
            )
        return rate, prov
    raise HarnessError(f"no predicted rate for metric {metric!r}")


def _predicted_for(cfg: StudyConfig, target: BuiltTarget, metric: str):
    k = cfg.kernel
    if cfg.domain.kind == "sphere":
        return predicted_rate(
            "sphere",
            metric,
            d=cfg.domain.d,
            tau=getattr(k, "tau", None),
            sigma_crit=target.sigma_crit,
        )
    return predicted_rate(
        "euclid",
        metric,
        d=cfg.domain.d,
        s=k.s,
        nu_star=target.nu_star,
    )


def run_study(cfg: StudyConfig) -> ConvergenceReport:
    """Run one convergence experiment level by level.

    Per level: generate the point family, estimate the fill distance,
    build the interpolant, and record every requested metric. Levels
    whose Gram factorization fails are kept in the table (condition inf,
    no errors) but excluded from fitting, as are levels with condition
    estimates above 1e12. Fewer than three usable levels is an error.
    """
    report_kernel = validate_kernel(cfg.kernel)
    if not report_kernel.admissible:
        raise HarnessError(f"kernel inadmissible: {report_kernel}")
    domain = cfg.domain
    k = cfg.kernel
    target = build_target(cfg.target, k, domain=domain)
    generator = cfg.generator or _default_generator(domain)
    grid_n = cfg.eval_grid or _default_eval_grid(domain)

    metrics = list(cfg.metrics)
    parsed = [parse_metric(m) for m in metrics]
    if domain.kind != "sphere" and "sup" in metrics and "sup-inner" not in metrics:
        metrics.append("sup-inner")
        parsed.append(("sup-inner", None))

    # evaluation grid and target values, shared across levels
    if domain.kind == "sphere":
        grid = fibonacci_sphere(grid_n)
    else:
        grid = candidate_grid(domain, grid_n)
    needs_grid = any(b in ("sup", "sup-inner", "pseudo-sup") for b, _ in parsed) or (
        domain.kind != "sphere" and any(b == "l2" for b, _ in parsed)
    )
    f_grid = target.evaluator(grid) if needs_grid else None

    inner_mask = None
    if any(b == "sup-inner" for b, _ in parsed):
        lo = np.asarray(domain.lower)
        hi = np.asarray(domain.upper)
        m_lo = lo + 0.1 * (hi - lo)
        m_hi = hi - 0.1 * (hi - lo)
        inner_mask = np.all((grid >= m_lo) & (grid <= m_hi), axis=1)

    symbols: dict[float, PseudoDiffSymbol] = {}
    lf_grid: dict[float, np.ndarray] = {}
    lf_quad: dict[float, np.ndarray] = {}
    quad = None
    if domain.kind == "sphere":
        if any(b in ("l2", "pseudo-l2") for b, _ in parsed):
            quad = SphereQuadrature.for_truncation(k.n_max)
        for base, arg in parsed:
            if base in ("pseudo-sup", "pseudo-l2") and arg not in symbols:
                symbols[arg] = power_symbol(arg, domain.d, k.n_max)
        for base, arg in parsed:
            if base == "pseudo-sup" and arg not in lf_grid:
                lf = apply_pseudodiff(symbols[arg], target.zonal)
                lf_grid[arg] = zonal_eval(lf, grid)
            if base == "pseudo-l2" and arg not in lf_quad:
                lf = apply_pseudodiff(symbols[arg], target.zonal)
                lf_quad[arg] = zonal_eval(lf, quad.nodes)
        if any(b == "l2" for b, _ in parsed):
            f_quad = target.evaluator(quad.nodes)

    rows = []
    for idx, n in enumerate(cfg.levels, start=1):
        Y = generate_points(domain, generator, n, cfg.seed)
        h = fill_distance(Y, domain, cfg.candidates)
        fvals = target.evaluator(Y.coords_matrix)
        errors: dict[str, float | None] = {m: None for m in metrics}
        try:
            S = build_interpolant(k, Y, fvals)
        except FactorizationError:
            rows.append(
                {
                    "level": idx,
                    "n_points": n,
                    "h": h,
                    "cond": np.inf,
                    "errors": errors,
                    "usable": False,
                }
            )
            continue
        s_grid = evaluate(S, grid) if needs_grid else None
        for name, (base, arg) in zip(metrics, parsed):
            if base == "sup":
                errors[name] = float(np.max(np.abs(f_grid - s_grid)))
            elif base == "sup-inner":
                diff = np.abs(f_grid - s_grid)[inner_mask]
                errors[name] = float(np.max(diff)) if diff.size else None
            elif base == "synthetic":
                errors[name] = float(h**arg)
            elif base == "l2":
                if domain.kind == "sphere":
                    diff = f_quad - evaluate(S, quad.nodes)
                    errors[name] = float(np.sqrt(np.sum(quad.weights * diff * diff)))
                else:
                    diff = f_grid - s_grid
                    errors[name] = float(np.sqrt(np.mean(diff * diff)))
            elif base == "native-residual":
                resid = target.hphi_norm_sq - native_norm_sq(S)
                errors[name] = float(np.sqrt(max(0.0, resid)))
            elif base == "pseudo-sup":
                ls = apply_pseudodiff(symbols[arg], S)
                errors[name] = float(np.max(np.abs(lf_grid[arg] - ls(grid))))
            elif base == "pseudo-l2":
                ls = apply_pseudodiff(symbols[arg], S)
                diff = lf_quad[arg] - ls(quad.nodes)
                errors[name] = float(np.sqrt(np.sum(quad.weights * diff * diff)))
        usable = bool(S.condition_estimate <= CONDITION_CAP)
        rows.append(
            {
                "level": idx,
                "n_points": n,
                "h": h,
                "cond": float(S.condition_estimate),
                "errors": errors,
                "usable": usable,
            }
        )

    rows.sort(key=lambda r: -r["h"])
    if sum(r["usable"] for r in rows) < 3:
        raise HarnessError(
            "fewer than 3 usable levels (factorization failures or condition "
            "estimates beyond 1e12); cannot fit slopes"
        )

    fitted: dict[str, float | None] = {}
    for name in metrics:
        pairs = [
            (r["h"], r["errors"][name])
            for r in rows
            if r["usable"] and r["errors"][name] is not None
        ]
        try:
            fitted[name] = fit_slope(pairs)
        except HarnessError:
            fitted[name] = None

    predicted = {}
    for name in metrics:
        try:
            predicted[name] = _predicted_for(cfg, target, name)
        except HarnessError:
            pass

    config = cfg.to_config()
    config["metrics"] = metrics
    config["eval_grid"] = grid_n
    config["target_note"] = target.note
    return ConvergenceReport(
        config=config,
        rows=tuple(rows),
        fitted=fitted,
        predicted=predicted,
    )


def assert_rates(report: ConvergenceReport, tolerance: float = RATE_TOLERANCE) -> list[str]:
    """Compare fitted against predicted slopes; list the failures.

    A metric fails when both slopes exist and fitted < predicted -
    tolerance. The returned list is empty when everything passes.
    """
    failures = []
    for metric, (pred, _prov) in report.predicted.items():
        got = report.fitted.get(metric)
        if got is None:
            continue
        if got < pred - tolerance:
            failures.append(
                f"{metric}: fitted slope {got:.3f} below predicted {pred:.3f} "
                f"- {tolerance:g}"
            )
    return failures
