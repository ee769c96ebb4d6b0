from __future__ import annotations

import numpy as np
import pytest

from kerninterp import _series
from kerninterp.geometry import (
    Domain,
    PointSet,
    SPHERE_METRIC,
    SpherePoint,
    fibonacci_sphere,
    generate_points,
)
from kerninterp.interpolation import build_interpolant, native_norm_sq
from kerninterp.kernels import SphereSeriesKernel
from kerninterp.orthopoly import gegenbauer_addition
from kerninterp.spectral import (
    PseudoDiffSymbol,
    SphereQuadrature,
    SpectralError,
    ZonalExpansion,
    apply_pseudodiff,
    error_hphi_norm_sq,
    error_mode_norms_sq,
    error_pseudo_l2_norm_sq,
    explicit_symbol,
    hlambdaphi_norm_sq,
    hphi_norm_sq,
    identity_symbol,
    interpolant_hphi_norm_sq,
    interpolant_mode_norms_sq,
    l2_norm,
    norm_comparison_check,
    power_symbol,
    zonal_eval,
)

NORTH = SpherePoint((0.0, 0.0, 1.0))


def _kernel(n_max=30, tau=2.0):
    return SphereSeriesKernel(d=2, rule="powerlaw", tau=tau, n_max=n_max)


def _zonal(n_max=30, seed=2, zero_mean=True):
    rng = np.random.default_rng(seed)
    n = np.arange(n_max + 1, dtype=float)
    coeffs = rng.standard_normal(n_max + 1) / (1.0 + n) ** 2
    if zero_mean:
        coeffs[0] = 0.0
    return ZonalExpansion(d=2, pole=NORTH, coeffs=coeffs)


def _interpolant(k, n_points=60, seed=2):
    f = _zonal(n_max=k.n_max, seed=seed)
    Y = generate_points(Domain.sphere(2), "fibonacci-sphere", n_points, 0)
    S = build_interpolant(k, Y, zonal_eval(f, Y.coords_matrix))
    return f, S


def test_zonal_eval_matches_direct_mode_sum():
    f = _zonal(n_max=8)
    pts = fibonacci_sphere(50)
    t = pts @ NORTH.as_array()
    direct = sum(
        f.coeffs[n] * gegenbauer_addition(2, n, t) for n in range(9)
    )
    np.testing.assert_allclose(zonal_eval(f, pts), direct, atol=1e-12)


def test_zonal_expansion_validation():
    with pytest.raises(SpectralError):
        ZonalExpansion(d=2, pole=NORTH, coeffs=np.empty(0))
    with pytest.raises(SpectralError):
        ZonalExpansion(d=1, pole=NORTH, coeffs=np.array([1.0]))


def test_power_symbol_values():
    sym = power_symbol(0.5, 2, 5)
    assert sym.values[0] == 0.0
    # n(d + n - 2) on S^2 is n^2, so the order-1/2 symbol is n itself
    np.testing.assert_allclose(sym.values[1:], [1.0, 2.0, 3.0, 4.0, 5.0])
    circle = power_symbol(1.0, 1, 3)
    assert circle.values[1] == 0.0  # degree-1 symbol vanishes on the circle too
    assert circle.values[2] == pytest.approx(2.0)


def test_symbol_constructors_and_validation():
    assert np.all(identity_symbol(4).values == 1.0)
    sym = explicit_symbol([0.0, 2.0, 5.0])
    assert sym.n_max == 2
    with pytest.raises(SpectralError):
        explicit_symbol([0.0, -1.0])
    with pytest.raises(SpectralError):
        power_symbol(-0.5, 2, 4)


def test_quadrature_weights_normalized():
    q = SphereQuadrature.for_truncation(30)
    assert q.nodes.shape == (31 * 62, 3)
    assert q.exact_degree == 61
    assert np.sum(q.weights) == pytest.approx(1.0, abs=1e-14)
    assert np.all(q.weights > 0)


def test_quadrature_mode_orthogonality_to_constants():
    q = SphereQuadrature.for_truncation(30)
    t = q.nodes @ NORTH.as_array()
    for n in range(1, 31):
        integral = float(np.sum(q.weights * gegenbauer_addition(2, n, t)))
        assert abs(integral) < 1e-9, f"degree {n} integrates to {integral}"


def test_quadrature_mode_pair_products():
    # the integral of C~_n(p.x) C~_m(p.x) over the sphere is delta_nm d_n
    q = SphereQuadrature.for_truncation(20)
    t = q.nodes @ NORTH.as_array()
    for n, m, expected in [(3, 3, 7.0), (5, 5, 11.0), (2, 7, 0.0), (1, 14, 0.0)]:
        prod = gegenbauer_addition(2, n, t) * gegenbauer_addition(2, m, t)
        val = float(np.sum(q.weights * prod))
        assert val == pytest.approx(expected, abs=1e-9)


def test_l2_norm_of_constant():
    q = SphereQuadrature.for_truncation(10)
    const = ZonalExpansion(d=2, pole=NORTH, coeffs=np.array([1.0]))
    assert l2_norm(const, q) == pytest.approx(1.0, rel=1e-12)


def test_hphi_norm_hand_sum():
    k = _kernel(n_max=12)
    f = _zonal(n_max=12, zero_mean=False)
    dims = k.basis.dims
    expected = float(np.sum(f.coeffs**2 * dims / k.coefficients))
    assert hphi_norm_sq(f, k) == pytest.approx(expected, rel=1e-13)


def test_hlambdaphi_norm_hand_sum_and_annihilation():
    k = _kernel(n_max=12)
    sym = power_symbol(0.5, 2, 12)
    f = _zonal(n_max=12)  # c_0 = 0 so the zero mode carries nothing
    lam = sym.values
    a = k.coefficients
    dims = k.basis.dims
    expected = float(np.sum(f.coeffs[1:] ** 2 * dims[1:] / (lam[1:] * a[1:]) ** 2))
    assert hlambdaphi_norm_sq(f, k, sym) == pytest.approx(expected, rel=1e-12)

    with_mean = _zonal(n_max=12, zero_mean=False)
    with pytest.raises(SpectralError) as err:
        hlambdaphi_norm_sq(with_mean, k, sym)
    assert "annihilated" in str(err.value)


def test_apply_pseudodiff_scales_zonal_coefficients():
    f = _zonal(n_max=6)
    sym = power_symbol(1.0, 2, 6)
    lf = apply_pseudodiff(sym, f)
    np.testing.assert_allclose(lf.coeffs, sym.values * f.coeffs)


def test_pseudodiff_image_l2_matches_exact_modes():
    k = _kernel(n_max=25)
    _, S = _interpolant(k, n_points=50)
    sym = power_symbol(0.5, 2, 25)
    image = apply_pseudodiff(sym, S)
    q = SphereQuadrature.for_truncation(25)
    quad_sq = l2_norm(image, q) ** 2
    exact_sq = float(np.sum(sym.values**2 * interpolant_mode_norms_sq(S)))
    assert quad_sq == pytest.approx(exact_sq, rel=1e-9)


def test_spectral_interpolant_norm_matches_quadratic_form():
    k = _kernel(n_max=40)
    _, S = _interpolant(k, n_points=70)
    qf = native_norm_sq(S)
    sp = interpolant_hphi_norm_sq(S)
    assert abs(qf - sp) < 1e-7 * qf


def test_error_modes_spectral_pythagoras():
    k = _kernel(n_max=30)
    f, S = _interpolant(k, n_points=60)
    fsq = hphi_norm_sq(f, k)
    esq = error_hphi_norm_sq(f, S)
    ssq = native_norm_sq(S)
    assert abs(fsq - esq - ssq) < 1e-7 * fsq
    assert np.all(error_mode_norms_sq(f, S) >= 0.0)


def test_error_pseudo_l2_spectral_vs_quadrature():
    k = _kernel(n_max=30)
    f, S = _interpolant(k, n_points=60)
    sym = power_symbol(0.5, 2, 30)
    exact_sq = error_pseudo_l2_norm_sq(f, S, sym)

    q = SphereQuadrature.for_truncation(30)
    lf = apply_pseudodiff(sym, f)
    ls = apply_pseudodiff(sym, S)
    diff = zonal_eval(lf, q.nodes) - ls(q.nodes)
    quad_sq = float(np.sum(q.weights * diff * diff))
    assert quad_sq == pytest.approx(exact_sq, rel=1e-7)


def test_error_modes_require_compatible_truncations():
    k = _kernel(n_max=10)
    _, S = _interpolant(k, n_points=30)
    too_wide = _zonal(n_max=20)
    with pytest.raises(SpectralError):
        error_mode_norms_sq(too_wide, S)


def test_norm_comparison_single_modes():
    f = _zonal(n_max=30, zero_mean=False)
    q = SphereQuadrature.for_truncation(30)
    grid = PointSet(coords_matrix=fibonacci_sphere(20_000), metric=SPHERE_METRIC)
    for n in range(31):
        lhs, rhs = norm_comparison_check(f, n, q, grid)
        assert lhs <= rhs * (1.0 + 1e-6), f"mode {n}: sup {lhs} > bound {rhs}"
    # sharp at the pole: the ratio approaches 1 on a fine grid
    lhs, rhs = norm_comparison_check(f, 7, q, grid)
    assert lhs / rhs > 0.95


def test_numpy_backend_agrees_with_numba():
    if not _series.HAVE_NUMBA:
        pytest.skip("numba backend unavailable")
    k = _kernel(n_max=20)
    f, S = _interpolant(k, n_points=40)
    grid = fibonacci_sphere(300)
    with_numba_series = zonal_eval(f, grid)
    with_numba_translate = _series.translate_sum(
        grid,
        S.centers.coords_matrix,
        np.asarray(S.coefficients),
        k.coefficients * k.basis.dims,
        k.ultraspherical_lambda,
    )
    _series.USE_NUMBA = False
    try:
        plain_series = zonal_eval(f, grid)
        plain_translate = _series.translate_sum(
            grid,
            S.centers.coords_matrix,
            np.asarray(S.coefficients),
            k.coefficients * k.basis.dims,
            k.ultraspherical_lambda,
        )
    finally:
        _series.USE_NUMBA = True
    np.testing.assert_allclose(plain_series, with_numba_series, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(
        plain_translate, with_numba_translate, rtol=1e-12, atol=1e-13
    )
