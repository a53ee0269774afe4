import math

import numpy as np
import pytest

from torusfourier import kernels
from torusfourier.oracles import CoefficientOracle
from torusfourier.polydisc import dense_section_matrix

nb = pytest.importorskip("numba")
NUMBA = kernels.get_backend("numba")
NUMPY = kernels.get_backend("numpy")


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("cuda")
    assert kernels.BACKEND in ("numba", "numpy")


def test_compensated_sum_beats_naive():
    vals = np.array([1e16, 1.0, -1e16, 1.0] * 100)
    for be in (NUMBA, NUMPY):
        re, im = be.compensated_sum(vals, np.zeros_like(vals))
        assert re == 200.0 and im == 0.0
    rng = np.random.default_rng(0)
    x = rng.normal(size=10_000) * 10.0 ** rng.integers(-8, 8, 10_000)
    assert NUMBA.compensated_sum(x, x)[0] == NUMPY.compensated_sum(x, x)[0] == pytest.approx(math.fsum(x), abs=1e-9)


def test_bilinear_sections_agree():
    orc = CoefficientOracle.toeplitz_composite(2)
    mat = dense_section_matrix(orc, 20)
    mi, ni = np.nonzero(mat)
    c = mat[mi, ni]
    rng = np.random.default_rng(1)
    x = np.exp(2j * np.pi * rng.random((50, 20)))
    y = np.exp(2j * np.pi * rng.random((50, 20)))
    args = (mi.astype(np.int64), ni.astype(np.int64), c.real.copy(), c.imag.copy(),
            x.real.copy(), x.imag.copy(), y.real.copy(), y.imag.copy())
    a_re, a_im = NUMBA.bilinear_sections(*args)
    b_re, b_im = NUMPY.bilinear_sections(*args)
    np.testing.assert_allclose(a_re, b_re, rtol=0, atol=1e-15)
    np.testing.assert_allclose(a_im, b_im, rtol=0, atol=1e-15)
    direct = np.einsum("sm,mn,sn->s", x, mat, y)
    np.testing.assert_allclose(a_re + 1j * a_im, direct, atol=1e-13)


def test_partial_sums_and_cauchy_agree():
    rng = np.random.default_rng(2)
    t = rng.normal(size=(24, 24)) / np.arange(1, 25) ** 2
    a = NUMBA.partial_sum_table(t, np.zeros_like(t))
    b = NUMPY.partial_sum_table(t, np.zeros_like(t))
    np.testing.assert_array_equal(a[0], b[0])
    for x, y in zip(NUMBA.cauchy_violations_2d(a[0], a[1]), NUMPY.cauchy_violations_2d(b[0], b[1])):
        np.testing.assert_array_equal(x, y)
    for x, y in zip(NUMBA.cauchy_violations_1d(a[0], a[1]), NUMPY.cauchy_violations_1d(b[0], b[1])):
        np.testing.assert_array_equal(x, y)


def test_coordinate_ascent_agree():
    mat = dense_section_matrix(CoefficientOracle.single_toeplitz_block(2), 16)
    rng = np.random.default_rng(3)
    z0 = np.exp(2j * np.pi * rng.random((3, 16)))
    ra = NUMBA.coordinate_ascent(mat, z0, 360, 30, 40, 1e-14)
    rb = NUMPY.coordinate_ascent(mat, z0, 360, 30, 40, 1e-14)
    # numpy's matmul reduces in a different order, and the ascent amplifies
    # last-bit differences along an unconverged trajectory
    np.testing.assert_allclose(ra[1], rb[1], rtol=1e-9)
    assert ra[2] == pytest.approx(rb[2], rel=1e-9)
    assert np.all(np.abs(np.abs(ra[0]) - 1) < 1e-12)
