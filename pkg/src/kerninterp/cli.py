"""Command-line driver.

Subcommands: study (convergence experiment with slope footers), interp
(build one interpolant from a points+values CSV), power (power-function
map over a grid), pseudo (apply a symbol to a stored interpolant).

All configuration is flags; the resolved configuration is echoed into
JSON reports and available via --dump-config. Output is byte-identical
across runs with identical flags: floats are written with repr and JSON
keys are sorted. Data goes to stdout or --out; diagnostics go to stderr.
Exit codes: 0 success, 1 any error, 2 a --assert-rates comparison failed.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .geometry import (
    Domain,
    EUCLID_METRIC,
    GeometryError,
    PointSet,
    SPHERE_METRIC,
    candidate_grid,
    fibonacci_sphere,
    load_points_csv,
)
from .harness import (
    HarnessError,
    RATE_TOLERANCE,
    StudyConfig,
    TargetSpec,
    assert_rates,
    run_study,
)
from .interpolation import (
    InterpolationError,
    build_interpolant,
    evaluate,
    load_interpolant_csv,
    power_function,
    save_interpolant_csv,
)
from .kernels import KernelError, SphereSeriesKernel, kernel_from_config
from .orthopoly import OrthopolyError
from .spectral import (
    SpectralError,
    apply_pseudodiff,
    identity_symbol,
    power_symbol,
)


class CliError(ValueError):
    pass


KERNEL_GRAMMAR = """\
--kernel grammar (head:key=value,key=value,...):
  powerlaw:tau=2[,A=1][,N_max=300][,d=2]   sphere series a_n = A(1+n)^(-2 tau)
  explicit:coeffs=1:0.5:0.25[,d=2]         sphere series, listed coefficients
  wendland:d=1,k=2[,rho=1]                 compactly supported euclidean kernel
  matern:m=1,s=2[,rho=1][,d=1]             exponential-decay euclidean kernel
"""

TARGET_GRAMMAR = """\
--target grammar:
  zonal:beta=5[,seed=0]                    power-law zonal target about the pole
  bandlimited:degree=12[,seed=0]           seeded band-limited zonal target
  bump:d=1,k=1,center=0.5,radius=0.2       wendland bump (center axes ':'-separated)
  kernel-translate:center=0.5              the kernel's own translate
"""

DOMAIN_GRAMMAR = """\
--domain grammar:
  sphere2                                  unit sphere in R^3
  box:0,1                                  interval [0, 1]
  box:0,1x0,1                              box, axes separated by 'x'
"""

METRIC_GRAMMAR = """\
--metrics: comma-separated from
  sup, l2, native-residual (sphere), pseudo-sup(s), pseudo-l2(s) (sphere,
  operator order s), synthetic(p) (records h^p; slope-fitting fixture).
  Euclid studies with sup also record the sup-inner boundary diagnostic.
"""


def _parse_kv(body: str, what: str, allowed: set[str]) -> dict:
    out = {}
    if body:
        for piece in body.split(","):
            if not piece:
                continue
            key, sep, val = piece.partition("=")
            if not sep:
                raise CliError(f"bad {what} entry {piece!r}, expected key=value")
            out[key.strip()] = val.strip()
    extra = set(out) - allowed
    if extra:
        raise CliError(f"unknown {what} keys: {sorted(extra)}")
    return out


def parse_kernel(text: str):
    head, _, body = text.partition(":")
    if head in ("powerlaw", "explicit"):
        cfg = _parse_kv(body, "kernel", {"tau", "A", "N_max", "d", "coeffs"})
        cfg["kind"] = head
        if "coeffs" in cfg:
            cfg["coeffs"] = cfg["coeffs"].replace(":", ",")
    elif head in ("wendland", "matern"):
        cfg = _parse_kv(body, "kernel", {"d", "k", "m", "s", "rho"})
        cfg["family"] = head
    else:
        raise CliError(
            f"unknown kernel head {head!r}; expected powerlaw, explicit, "
            "wendland, or matern"
        )
    return kernel_from_config(cfg)


def parse_domain(text: str) -> Domain:
    if text == "sphere2":
        return Domain.sphere(2)
    head, sep, body = text.partition(":")
    if head == "box" and sep:
        lower = []
        upper = []
        for axis in body.split("x"):
            parts = axis.split(",")
            if len(parts) != 2:
                raise CliError(f"bad box axis {axis!r}, expected lo,hi")
            lower.append(float(parts[0]))
            upper.append(float(parts[1]))
        return Domain.box(lower, upper)
    raise CliError(f"unknown domain {text!r}; expected sphere2 or box:lo,hi[x...]")


def parse_target(text: str) -> TargetSpec:
    head, _, body = text.partition(":")
    if head == "zonal":
        kv = _parse_kv(body, "target", {"beta", "seed"})
        if "beta" not in kv:
            raise CliError("zonal target needs beta")
        return TargetSpec(
            kind="zonal-powerlaw",
            beta=float(kv["beta"]),
            seed=int(kv.get("seed", 0)),
        )
    if head == "bandlimited":
        kv = _parse_kv(body, "target", {"degree", "seed"})
        if "degree" not in kv:
            raise CliError("bandlimited target needs degree")
        return TargetSpec(
            kind="zonal-bandlimited",
            degree=int(kv["degree"]),
            seed=int(kv.get("seed", 0)),
        )
    if head == "bump":
        kv = _parse_kv(body, "target", {"d", "k", "center", "radius"})
        for key in ("d", "k", "center", "radius"):
            if key not in kv:
                raise CliError(f"bump target needs {key}")
        center = tuple(float(v) for v in kv["center"].split(":"))
        return TargetSpec(
            kind="euclid-bump",
            bump_d=int(kv["d"]),
            bump_k=int(kv["k"]),
            center=center,
            radius=float(kv["radius"]),
        )
    if head == "kernel-translate":
        kv = _parse_kv(body, "target", {"center"})
        if "center" not in kv:
            raise CliError("kernel-translate target needs center")
        center = tuple(float(v) for v in kv["center"].split(":"))
        return TargetSpec(kind="euclid-kernel-translate", center=center)
    raise CliError(
        f"unknown target head {head!r}; expected zonal, bandlimited, bump, "
        "or kernel-translate"
    )


def split_metrics(text: str) -> tuple[str, ...]:
    """Split a comma-separated metric list, keeping parentheses intact."""
    out = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "," and depth == 0:
            if cur:
                out.append("".join(cur).strip())
                cur = []
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        cur.append(ch)
    if cur:
        out.append("".join(cur).strip())
    if not out:
        raise CliError("empty metric list")
    return tuple(out)


def parse_symbol(text: str, d: int, n_max: int):
    if text == "identity":
        return identity_symbol(n_max)
    kv = _parse_kv(text, "symbol", {"s"})
    if "s" not in kv:
        raise CliError("symbol must be 'identity' or 's=<order>'")
    return power_symbol(float(kv["s"]), d, n_max)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _grid_for(domain: Domain, n: int) -> np.ndarray:
    if domain.kind == "sphere":
        return fibonacci_sphere(n)
    return candidate_grid(domain, n)


def _coords_csv_text(coords: np.ndarray, values: np.ndarray, value_name: str) -> str:
    import csv as _csv
    import io

    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    m = coords.shape[1]
    writer.writerow([f"x{i}" for i in range(m)] + [value_name])
    for row, v in zip(coords, values):
        writer.writerow([repr(float(c)) for c in row] + [repr(float(v))])
    return buf.getvalue()


def _cmd_study(args) -> int:
    kernel = parse_kernel(args.kernel)
    domain = parse_domain(args.domain)
    target = parse_target(args.target)
    levels = tuple(int(v) for v in args.levels.split(","))
    metrics = split_metrics(args.metrics)
    cfg = StudyConfig(
        domain=domain,
        kernel=kernel,
        target=target,
        levels=levels,
        metrics=metrics,
        eval_grid=args.grid,
        candidates=args.candidates,
        generator=args.generator,
        seed=args.seed,
    )
    if args.dump_config:
        sys.stdout.write(json.dumps(cfg.to_config(), sort_keys=True, indent=2) + "\n")
        return 0
    report = run_study(cfg)
    if args.format == "json":
        text = json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n"
    else:
        text = report.to_csv_text()
    _emit(text, args.out)
    if args.assert_rates:
        failures = assert_rates(report, args.rate_tol)
        if failures:
            for line in failures:
                print(f"rate check failed: {line}", file=sys.stderr)
            return 2
    return 0


def _load_data_csv(path: str, metric: str):
    """Read a points+values CSV (header x0,...,value)."""
    import csv as _csv

    with open(path, newline="") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CliError(f"{path}: empty file")
        if header[-1] != "value" or not header[:-1]:
            raise CliError(
                f"{path}: expected header x0,...,value; got {','.join(header)}"
            )
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise CliError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=float)
    coords, values = arr[:, :-1], arr[:, -1]
    return PointSet(coords_matrix=coords, metric=metric), values


def _kernel_metric(kernel) -> str:
    return SPHERE_METRIC if isinstance(kernel, SphereSeriesKernel) else EUCLID_METRIC


def _cmd_interp(args) -> int:
    kernel = parse_kernel(args.kernel)
    Y, values = _load_data_csv(args.data, _kernel_metric(kernel))
    S = build_interpolant(kernel, Y, values)
    save_interpolant_csv(S, args.out)
    if args.eval_out:
        domain = parse_domain(args.domain) if args.domain else None
        if domain is None:
            raise CliError("--eval-out needs --domain for the evaluation grid")
        grid = _grid_for(domain, args.grid)
        _emit(_coords_csv_text(grid, evaluate(S, grid), "value"), args.eval_out)
    return 0


def _cmd_power(args) -> int:
    kernel = parse_kernel(args.kernel)
    domain = parse_domain(args.domain)
    Y = None
    if args.centers:
        Y = load_points_csv(args.centers, _kernel_metric(kernel))
    grid = _grid_for(domain, args.grid)
    values = power_function(kernel, Y, grid)
    _emit(_coords_csv_text(grid, values, "power"), args.out)
    return 0


def _cmd_pseudo(args) -> int:
    S = load_interpolant_csv(args.interpolant)
    k = S.kernel
    if not isinstance(k, SphereSeriesKernel):
        raise CliError("pseudo needs a sphere-series interpolant")
    sym = parse_symbol(args.symbol, k.d, k.n_max)
    image = apply_pseudodiff(sym, S)
    grid = fibonacci_sphere(args.grid)
    _emit(_coords_csv_text(grid, image(grid), "value"), args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(
        prog="kerninterp",
        description="Kernel interpolation studies on spheres and boxes.",
        epilog=KERNEL_GRAMMAR + DOMAIN_GRAMMAR,
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--kernel", required=True, help="kernel spec, see grammar")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=0)

    p_study = sub.add_parser(
        "study",
        help="run a convergence study",
        epilog=KERNEL_GRAMMAR + TARGET_GRAMMAR + DOMAIN_GRAMMAR + METRIC_GRAMMAR,
        formatter_class=fmt,
    )
    add_common(p_study)
    p_study.add_argument("--domain", required=True, help="domain spec, see grammar")
    p_study.add_argument("--target", required=True, help="target spec, see grammar")
    p_study.add_argument(
        "--levels", required=True, help="comma-separated point counts, increasing"
    )
    p_study.add_argument("--metrics", default="sup", help="see grammar")
    p_study.add_argument(
        "--grid", type=int, default=0, help="evaluation grid size (0 = default)"
    )
    p_study.add_argument(
        "--candidates",
        type=int,
        default=100_000,
        help="fill-distance probe grid size",
    )
    p_study.add_argument(
        "--generator",
        default=None,
        help="point generator (default fibonacci-sphere / uniform-grid)",
    )
    p_study.add_argument("--format", choices=("csv", "json"), default="csv")
    p_study.add_argument(
        "--assert-rates",
        action="store_true",
        help="exit 2 when a fitted slope falls below predicted - tolerance",
    )
    p_study.add_argument(
        "--rate-tol",
        type=float,
        default=RATE_TOLERANCE,
        help="tolerance for --assert-rates",
    )
    p_study.add_argument(
        "--dump-config",
        action="store_true",
        help="print the resolved configuration as JSON and exit",
    )
    p_study.set_defaults(func=_cmd_study)

    p_interp = sub.add_parser(
        "interp",
        help="build an interpolant from a points+values CSV",
        epilog=KERNEL_GRAMMAR
        + "--data: CSV with header x0,...,value\n"
        + "--out: coefficient CSV (a JSON sidecar lands next to it)\n",
        formatter_class=fmt,
    )
    p_interp.add_argument("--kernel", required=True)
    p_interp.add_argument("--data", required=True, help="points+values CSV")
    p_interp.add_argument("--out", required=True, help="coefficient CSV path")
    p_interp.add_argument(
        "--eval-out", default=None, help="also evaluate on a grid, write CSV here"
    )
    p_interp.add_argument("--domain", default=None, help="grid domain for --eval-out")
    p_interp.add_argument("--grid", type=int, default=1000, help="grid size for --eval-out")
    p_interp.add_argument("--seed", type=int, default=0)
    p_interp.set_defaults(func=_cmd_interp)

    p_power = sub.add_parser(
        "power",
        help="evaluate the power function over a grid",
        epilog=KERNEL_GRAMMAR
        + DOMAIN_GRAMMAR
        + "--centers: points CSV (header x0,...); omit for the empty set\n",
        formatter_class=fmt,
    )
    add_common(p_power)
    p_power.add_argument("--domain", required=True)
    p_power.add_argument("--centers", default=None, help="centers CSV (optional)")
    p_power.add_argument("--grid", type=int, default=1000, help="evaluation grid size")
    p_power.set_defaults(func=_cmd_power)

    p_pseudo = sub.add_parser(
        "pseudo",
        help="apply a pseudodifferential symbol to a stored interpolant",
        epilog="--symbol: 'identity' or 's=<order>' (power symbol)\n"
        "--interpolant: coefficient CSV written by interp (sidecar required)\n",
        formatter_class=fmt,
    )
    p_pseudo.add_argument(
        "--interpolant", required=True, help="interpolant CSV with JSON sidecar"
    )
    p_pseudo.add_argument("--symbol", required=True, help="'identity' or 's=<order>'")
    p_pseudo.add_argument("--grid", type=int, default=1000, help="sphere grid size")
    p_pseudo.add_argument("--out", default=None, help="output path (default stdout)")
    p_pseudo.set_defaults(func=_cmd_pseudo)
    return parser


_ERRORS = (
    CliError,
    KernelError,
    GeometryError,
    HarnessError,
    InterpolationError,
    OrthopolyError,
    SpectralError,
    OSError,
    ValueError,
)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on flag errors; 2 is reserved for rate-assertion
        # failures here, so flag problems map to 1 and --help stays 0.
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    try:
        return args.func(args)
    except _ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
