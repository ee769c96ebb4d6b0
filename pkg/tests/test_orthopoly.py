from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.special import eval_chebyu, eval_legendre

from kerninterp.orthopoly import (
    OrthopolyError,
    SphereBasisTable,
    gegenbauer_addition,
    harmonic_dimension,
    matern_profile,
    radial_profile_eval,
    wendland_profile,
)


def test_harmonic_dimension_circle():
    assert [harmonic_dimension(1, n) for n in range(4)] == [1, 2, 2, 2]


def test_harmonic_dimension_s2():
    assert [harmonic_dimension(2, n) for n in range(6)] == [1, 3, 5, 7, 9, 11]


def test_harmonic_dimension_s3():
    assert [harmonic_dimension(3, n) for n in range(5)] == [1, 4, 9, 16, 25]


def test_harmonic_dimension_s4_frozen():
    # (2n+3)(n+1)(n+2)/6
    assert [harmonic_dimension(4, n) for n in range(4)] == [1, 5, 14, 30]


def test_harmonic_dimension_rejects_bad_args():
    with pytest.raises(OrthopolyError):
        harmonic_dimension(0, 1)
    with pytest.raises(OrthopolyError):
        harmonic_dimension(2, -1)


def test_basis_table_dims_match_exact_integers():
    table = SphereBasisTable(d=2, n_max=10)
    np.testing.assert_array_equal(
        table.dims, [harmonic_dimension(2, n) for n in range(11)]
    )
    assert table.ultraspherical_lambda == 0.5


def test_addition_kernel_matches_legendre_on_s2():
    # on S^2 the degree-n addition kernel is (2n+1) P_n
    t = np.linspace(-1.0, 1.0, 41)
    for n in (0, 1, 2, 5, 13, 30):
        ours = gegenbauer_addition(2, n, t)
        ref = (2 * n + 1) * eval_legendre(n, t)
        np.testing.assert_allclose(ours, ref, atol=1e-10, rtol=1e-10)


def test_addition_kernel_matches_chebyshev_on_s3():
    # on S^3 it is (n+1) U_n
    t = np.linspace(-1.0, 1.0, 41)
    for n in (0, 1, 2, 7, 20):
        ours = gegenbauer_addition(3, n, t)
        ref = (n + 1) * eval_chebyu(n, t)
        np.testing.assert_allclose(ours, ref, atol=1e-9, rtol=1e-9)


def test_addition_kernel_value_at_one_is_dimension():
    for d in (2, 3):
        for n in range(51):
            assert gegenbauer_addition(d, n, 1.0) == pytest.approx(
                harmonic_dimension(d, n), rel=1e-10
            )


def test_addition_kernel_rejects_out_of_range_argument():
    with pytest.raises(OrthopolyError):
        gegenbauer_addition(2, 3, 1.5)


def test_wendland_profile_frozen_values():
    cases = {
        (1, 1): 0.3125,
        (3, 1): 0.1875,
        (1, 2): 0.171875,
        (3, 2): 0.015625 * 20.75 / 3.0,
    }
    for (d, k), expected in cases.items():
        p = wendland_profile(d=d, k=k)
        assert radial_profile_eval(p, 0.5) == pytest.approx(expected, rel=1e-14)
        assert radial_profile_eval(p, 0.0) == 1.0
        assert radial_profile_eval(p, 1.0) == 0.0
        assert radial_profile_eval(p, 2.0) == 0.0


def test_wendland_smoothness_exponents():
    assert wendland_profile(1, 1).s == 2.0
    assert wendland_profile(3, 1).s == 3.0
    assert wendland_profile(1, 2).s == 3.0
    assert wendland_profile(3, 2).s == 4.0


def test_wendland_scaling():
    p = wendland_profile(1, 1, rho=0.2)
    assert p.support_radius == 0.2
    assert radial_profile_eval(p, 0.1) == pytest.approx(0.3125, rel=1e-14)
    assert radial_profile_eval(p, 0.3) == 0.0


def test_matern_frozen_values():
    m1 = matern_profile(m=1, s=2.0)
    assert radial_profile_eval(m1, 0.0) == 1.0
    assert radial_profile_eval(m1, 1.0) == pytest.approx(2.0 / math.e, rel=1e-14)
    m2 = matern_profile(m=2, s=3.0)
    assert radial_profile_eval(m2, 1.0) == pytest.approx(7.0 / (3.0 * math.e), rel=1e-14)
    assert math.isinf(m2.support_radius)


def test_matern_scaling_changes_argument():
    p = matern_profile(m=1, s=2.0, rho=0.5)
    assert radial_profile_eval(p, 0.5) == pytest.approx(2.0 / math.e, rel=1e-14)


def test_profile_rejections():
    with pytest.raises(OrthopolyError):
        wendland_profile(2, 1)
    with pytest.raises(OrthopolyError):
        wendland_profile(1, 3)
    with pytest.raises(OrthopolyError):
        matern_profile(m=3, s=2.0)
    with pytest.raises(OrthopolyError):
        matern_profile(m=1, s=0.0)
    p = wendland_profile(1, 1)
    with pytest.raises(OrthopolyError):
        radial_profile_eval(p, -0.1)


def test_profile_vectorized_eval():
    p = wendland_profile(1, 1)
    r = np.array([0.0, 0.5, 1.0, 3.0])
    out = radial_profile_eval(p, r)
    np.testing.assert_allclose(out, [1.0, 0.3125, 0.0, 0.0])
