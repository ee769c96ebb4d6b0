"""Points, domains, deterministic point generation, and fill-distance estimation.

Supports the unit sphere S^d embedded in R^(d+1) with the geodesic metric,
and axis-aligned boxes / balls in R^d with the Euclidean metric.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

_DUPLICATE_TOL = 1e-12

SPHERE_METRIC = "sphere-geodesic"
EUCLID_METRIC = "euclidean"


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class SpherePoint:
    """A point on S^d, stored as a unit vector in R^(d+1).

    Coordinates are renormalized on construction; a zero or non-finite
    vector is rejected.
    """

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        arr = np.asarray(self.coords, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise GeometryError("sphere point needs at least 2 coordinates")
        if not np.all(np.isfinite(arr)):
            raise GeometryError("sphere point coordinates must be finite")
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise GeometryError("cannot normalize the zero vector")
        if abs(norm - 1.0) > 1e-12:
            arr = arr / norm
        object.__setattr__(self, "coords", tuple(float(v) for v in arr))

    @property
    def d(self) -> int:
        """Sphere dimension (ambient dimension minus one)."""
        return len(self.coords) - 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class EuclidPoint:
    """A point in R^d."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        arr = np.asarray(self.coords, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise GeometryError("point needs at least 1 coordinate")
        if not np.all(np.isfinite(arr)):
            raise GeometryError("point coordinates must be finite")
        object.__setattr__(self, "coords", tuple(float(v) for v in arr))

    @property
    def d(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class Domain:
    """Region the interpolation lives on.

    kind is one of "sphere" (full S^d), "box" (axis-aligned product of
    intervals), or "ball". Boxes carry lower/upper corners; balls carry a
    center and radius. `d` is the intrinsic dimension: for a sphere domain
    the points have d+1 coordinates, otherwise d.
    """

    kind: str
    d: int
    lower: tuple[float, ...] | None = None
    upper: tuple[float, ...] | None = None
    center: tuple[float, ...] | None = None
    radius: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("sphere", "box", "ball"):
            raise GeometryError(f"unknown domain kind: {self.kind!r}")
        if self.d < 1:
            raise GeometryError("domain dimension must be >= 1")
        if self.kind == "box":
            if self.lower is None or self.upper is None:
                raise GeometryError("box domain needs lower and upper corners")
            lo = np.asarray(self.lower, dtype=float)
            hi = np.asarray(self.upper, dtype=float)
            if lo.shape != (self.d,) or hi.shape != (self.d,):
                raise GeometryError("box corners must have d coordinates")
            if not np.all(lo < hi):
                raise GeometryError("box corners must satisfy lower < upper")
        elif self.kind == "ball":
            if self.center is None or self.radius is None:
                raise GeometryError("ball domain needs center and radius")
            if len(self.center) != self.d:
                raise GeometryError("ball center must have d coordinates")
            if not self.radius > 0:
                raise GeometryError("ball radius must be positive")

    @staticmethod
    def sphere(d: int = 2) -> "Domain":
        return Domain(kind="sphere", d=d)

    @staticmethod
    def box(lower, upper) -> "Domain":
        lower = tuple(float(v) for v in np.atleast_1d(lower))
        upper = tuple(float(v) for v in np.atleast_1d(upper))
        return Domain(kind="box", d=len(lower), lower=lower, upper=upper)

    @staticmethod
    def ball(center, radius: float) -> "Domain":
        center = tuple(float(v) for v in np.atleast_1d(center))
        return Domain(kind="ball", d=len(center), center=center, radius=float(radius))

    @property
    def ambient_dim(self) -> int:
        return self.d + 1 if self.kind == "sphere" else self.d

    @property
    def metric(self) -> str:
        return SPHERE_METRIC if self.kind == "sphere" else EUCLID_METRIC

    def contains(self, coords: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Boolean mask of which rows of `coords` lie in the domain."""
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        if coords.shape[1] != self.ambient_dim:
            raise GeometryError(
                f"expected {self.ambient_dim} coordinates, got {coords.shape[1]}"
            )
        if self.kind == "sphere":
            return np.abs(np.linalg.norm(coords, axis=1) - 1.0) <= tol
        if self.kind == "box":
            lo = np.asarray(self.lower) - tol
            hi = np.asarray(self.upper) + tol
            return np.all((coords >= lo) & (coords <= hi), axis=1)
        c = np.asarray(self.center)
        return np.linalg.norm(coords - c, axis=1) <= self.radius + tol


def _pairwise_min_distance(coords: np.ndarray, metric: str) -> float:
    """Smallest pairwise distance, used for duplicate rejection."""
    n = coords.shape[0]
    if n < 2:
        return np.inf
    best = np.inf
    block = 1024
    for lo in range(0, n, block):
        chunk = coords[lo : lo + block]
        if metric == SPHERE_METRIC:
            dots = np.clip(chunk @ coords.T, -1.0, 1.0)
            d = np.arccos(dots)
        else:
            diff = chunk[:, None, :] - coords[None, :, :]
            d = np.sqrt(np.sum(diff * diff, axis=2))
        for i in range(chunk.shape[0]):
            d[i, lo + i] = np.inf
        best = min(best, float(d.min()))
    return best


@dataclass(frozen=True, eq=False)
class PointSet:
    """An ordered collection of points sharing one metric.

    The coordinate matrix has one point per row. Duplicate points (pairwise
    distance <= 1e-12) are rejected because they make Gram matrices
    singular. The optional generation descriptor records how the set was
    produced so reports can echo it.
    """

    coords_matrix: np.ndarray
    metric: str
    generator: str | None = None
    seed: int | None = None
    domain: Domain | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        arr = np.array(self.coords_matrix, dtype=float, copy=True)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise GeometryError("point set needs a 2-d coordinate array")
        if not np.all(np.isfinite(arr)):
            raise GeometryError("point coordinates must be finite")
        if self.metric not in (SPHERE_METRIC, EUCLID_METRIC):
            raise GeometryError(f"unknown metric: {self.metric!r}")
        if self.metric == SPHERE_METRIC and arr.shape[0]:
            norms = np.linalg.norm(arr, axis=1)
            if np.any(norms == 0.0):
                raise GeometryError("cannot normalize the zero vector")
            arr = arr / norms[:, None]
        arr.setflags(write=False)
        object.__setattr__(self, "coords_matrix", arr)
        if _pairwise_min_distance(arr, self.metric) <= _DUPLICATE_TOL:
            raise GeometryError("point set contains duplicate points")
        if self.domain is not None:
            if not bool(np.all(self.domain.contains(arr))):
                raise GeometryError("point set has points outside its domain")

    def __len__(self) -> int:
        return self.coords_matrix.shape[0]

    def __getitem__(self, i: int):
        row = tuple(self.coords_matrix[i])
        if self.metric == SPHERE_METRIC:
            return SpherePoint(row)
        return EuclidPoint(row)

    @property
    def ambient_dim(self) -> int:
        return self.coords_matrix.shape[1]


def geodesic_distance(x: SpherePoint, y: SpherePoint) -> float:
    """Great-circle distance arccos(x . y) in radians, in [0, pi].

    The inner product is clamped to [-1, 1] so rounding at coincident or
    antipodal points cannot produce NaN.
    """
    if x.d != y.d:
        raise GeometryError("dimension mismatch between sphere points")
    dot = float(np.dot(x.as_array(), y.as_array()))
    return float(np.arccos(min(1.0, max(-1.0, dot))))


def fibonacci_sphere(n: int) -> np.ndarray:
    """Fibonacci lattice of n points on S^2, as an (n, 3) array."""
    if n < 1:
        raise GeometryError("need n >= 1")
    i = np.arange(n, dtype=float)
    z = -1.0 + (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * (np.pi * (3.0 - np.sqrt(5.0)))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _radical_inverse(indices: np.ndarray, base: int) -> np.ndarray:
    out = np.zeros(indices.shape, dtype=float)
    denom = np.ones(indices.shape, dtype=float)
    idx = indices.copy()
    while np.any(idx > 0):
        denom *= base
        out += (idx % base) / denom
        idx //= base
    return out


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _halton(n: int, d: int, seed: int) -> np.ndarray:
    if d > len(_PRIMES):
        raise GeometryError(f"halton supports at most {len(_PRIMES)} dimensions")
    indices = np.arange(seed + 1, seed + n + 1, dtype=np.int64)
    cols = [_radical_inverse(indices, _PRIMES[j]) for j in range(d)]
    return np.column_stack(cols)


def _uniform_grid(domain: Domain, n: int) -> np.ndarray:
    lo = np.asarray(domain.lower, dtype=float)
    hi = np.asarray(domain.upper, dtype=float)
    d = domain.d
    if d == 1:
        if n == 1:
            return np.array([[0.5 * (lo[0] + hi[0])]])
        return np.linspace(lo[0], hi[0], n).reshape(-1, 1)
    m = round(n ** (1.0 / d))
    if m**d != n:
        raise GeometryError(
            f"uniform-grid in {d}-d needs n to be a perfect {d}-th power, got {n}"
        )
    axes = [np.linspace(lo[j], hi[j], m) for j in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([ax.ravel() for ax in mesh])


def generate_points(
    domain: Domain, generator: str, n: int, seed: int = 0
) -> PointSet:
    """Deterministically place n points in a domain.

    Args:
        domain: where the points go.
        generator: "fibonacci-sphere" (S^2 only), "uniform-grid"
            (boxes, endpoints inclusive; in d >= 2, n must be a perfect
            d-th power), or "halton" (boxes; seed offsets the start index
            of the low-discrepancy sequence).
        n: number of points, >= 1.
        seed: reproducibility knob; ignored by the non-random generators
            except halton's index offset.

    Returns:
        A PointSet tagged with the generation descriptor.

    Raises:
        GeometryError: unsupported generator/domain pairing or bad n.
    """
    if n < 1:
        raise GeometryError("need n >= 1")
    if generator == "fibonacci-sphere":
        if domain.kind != "sphere" or domain.d != 2:
            raise GeometryError("fibonacci-sphere requires the S^2 domain")
        coords = fibonacci_sphere(n)
    elif generator == "uniform-grid":
        if domain.kind != "box":
            raise GeometryError("uniform-grid requires a box domain")
        coords = _uniform_grid(domain, n)
    elif generator == "halton":
        if domain.kind != "box":
            raise GeometryError("halton requires a box domain")
        lo = np.asarray(domain.lower)
        hi = np.asarray(domain.upper)
        coords = lo + (hi - lo) * _halton(n, domain.d, seed)
    else:
        raise GeometryError(f"unknown generator: {generator!r}")
    return PointSet(
        coords_matrix=coords,
        metric=domain.metric,
        generator=generator,
        seed=seed,
        domain=domain,
    )


def _ball_volume_fraction(d: int) -> float:
    from math import gamma, pi

    return pi ** (d / 2.0) / (2.0**d * gamma(d / 2.0 + 1.0))


def candidate_grid(domain: Domain, candidates: int) -> np.ndarray:
    """Dense deterministic grid used as the probe set for fill_distance."""
    if domain.kind == "sphere":
        if domain.d != 2:
            raise GeometryError("candidate grids on spheres support only S^2")
        return fibonacci_sphere(candidates)
    if domain.kind == "box":
        d = domain.d
        lo = np.asarray(domain.lower, dtype=float)
        hi = np.asarray(domain.upper, dtype=float)
        m = max(2, int(np.ceil(candidates ** (1.0 / d))))
        axes = [np.linspace(lo[j], hi[j], m) for j in range(d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([ax.ravel() for ax in mesh])
    # ball: grid the bounding box, inflate so about `candidates` points
    # survive the radius filter
    d = domain.d
    c = np.asarray(domain.center, dtype=float)
    r = float(domain.radius)
    frac = _ball_volume_fraction(d)
    m = max(2, int(np.ceil((candidates / frac) ** (1.0 / d))))
    axes = [np.linspace(c[j] - r, c[j] + r, m) for j in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([ax.ravel() for ax in mesh])
    keep = np.linalg.norm(pts - c, axis=1) <= r
    return pts[keep]


def fill_distance(Y: PointSet, domain: Domain, candidates: int = 100_000) -> float:
    """Estimate h(Y, domain) = sup over the domain of the distance to Y.

    The supremum is approximated from below by brute force over a fixed
    dense candidate grid (Fibonacci lattice on S^2, uniform grids on boxes
    and balls), so the value is a lower estimate of the true fill distance
    but is consistent across refinement levels, which is all the rate
    fitting needs. Monotone under adding points to Y for a fixed grid.

    Args:
        Y: nonempty point set.
        domain: region the supremum ranges over.
        candidates: size of the probe grid, at least 1000.

    Returns:
        The max-min distance in the point set's metric.
    """
    if len(Y) == 0:
        raise GeometryError("fill_distance needs a nonempty point set")
    if candidates < 1000:
        raise GeometryError("need at least 1000 candidates")
    cand = candidate_grid(domain, candidates)
    pts = Y.coords_matrix
    if cand.shape[1] != pts.shape[1]:
        raise GeometryError("dimension mismatch between point set and domain")
    worst = -np.inf
    block = 20_000
    if Y.metric == SPHERE_METRIC:
        # geodesic distance is monotone decreasing in the inner product,
        # so max-min distance is arccos of min-max dot
        best_dot = np.inf
        for lo in range(0, cand.shape[0], block):
            dots = cand[lo : lo + block] @ pts.T
            best_dot = min(best_dot, float(dots.max(axis=1).min()))
        return float(np.arccos(min(1.0, max(-1.0, best_dot))))
    for lo in range(0, cand.shape[0], block):
        chunk = cand[lo : lo + block]
        d2 = (
            np.sum(chunk * chunk, axis=1)[:, None]
            - 2.0 * chunk @ pts.T
            + np.sum(pts * pts, axis=1)[None, :]
        )
        nearest = np.sqrt(np.maximum(0.0, d2.min(axis=1)))
        worst = max(worst, float(nearest.max()))
    return worst


def save_points_csv(ps: PointSet, path) -> None:
    """Write one point per row with header x0,x1,..."""
    m = ps.ambient_dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j}" for j in range(m)])
        for row in ps.coords_matrix:
            writer.writerow([repr(float(v)) for v in row])


def load_points_csv(path, metric: str, domain: Domain | None = None) -> PointSet:
    """Read a point set written by save_points_csv."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not header or not header[0].startswith("x"):
            raise GeometryError(f"{path}: expected a header row x0,x1,...")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise GeometryError(f"{path}: no points")
    return PointSet(coords_matrix=np.asarray(rows), metric=metric, domain=domain)
