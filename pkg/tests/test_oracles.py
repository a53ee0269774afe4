import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusfourier.oracles import (
    CoefficientOracle,
    CoefficientStatus,
    BlockLayout,
    LittlewoodSpec,
    ToeplitzSpec,
    WeightSequence,
    cyclotomic,
    littlewood_exponent,
    littlewood_exponents,
    littlewood_matrix_exponents,
    littlewood_recursive,
    toeplitz_entry,
    toeplitz_matrix,
    toeplitz_recursive,
    toeplitz_signs,
    verify_unitary_exact,
)

C1 = np.array([[-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1], [1, 1, 1, -1]])


def test_c1_is_j_minus_2i():
    assert np.array_equal(toeplitz_matrix(ToeplitzSpec(1)), C1)
    assert np.array_equal(toeplitz_recursive(1), C1)


@pytest.mark.parametrize("alpha", [1, 2, 3, 4])
def test_digit_oracle_matches_kronecker_power(alpha):
    kron = np.array([[1]])
    for _ in range(alpha):
        kron = np.kron(kron, C1)
    assert np.array_equal(toeplitz_matrix(ToeplitzSpec(alpha)), kron)
    assert np.array_equal(toeplitz_recursive(alpha), kron)


def test_littlewood_n3_mu1_table():
    assert littlewood_matrix_exponents(LittlewoodSpec(3, 1)).tolist() == [[1, 2, 0], [2, 1, 0], [0, 0, 0]]


@pytest.mark.parametrize("n_base, mu", [(3, 1), (3, 2), (4, 2), (5, 2), (3, 3)])
def test_littlewood_digit_oracle_matches_recursion(n_base, mu):
    assert np.array_equal(littlewood_matrix_exponents(LittlewoodSpec(n_base, mu)), littlewood_recursive(n_base, mu))


def test_scalar_and_vector_oracles_agree():
    spec = ToeplitzSpec(3)
    m, n = np.meshgrid(np.arange(1, 65), np.arange(1, 65), indexing="ij")
    vec = toeplitz_signs(3, m, n)
    assert all(vec[i, j] == toeplitz_entry(spec, i + 1, j + 1) for i in range(0, 64, 7) for j in range(0, 64, 5))
    lw = LittlewoodSpec(4, 2)
    m, n = np.meshgrid(np.arange(1, 17), np.arange(1, 17), indexing="ij")
    vec = littlewood_exponents(4, 2, m, n)
    assert all(vec[i, j] == littlewood_exponent(lw, i + 1, j + 1) for i in range(16) for j in range(16))


@given(alpha=st.integers(1, 6), data=st.data())
def test_toeplitz_entries_symmetric_and_signed(alpha, data):
    dim = 4 ** alpha
    m = data.draw(st.integers(1, dim))
    n = data.draw(st.integers(1, dim))
    spec = ToeplitzSpec(alpha)
    e = toeplitz_entry(spec, m, n)
    assert e in (-1, 1)
    assert e == toeplitz_entry(spec, n, m)


@given(n_base=st.integers(3, 7), mu=st.integers(1, 4), data=st.data())
def test_littlewood_exponent_symmetric_and_in_range(n_base, mu, data):
    dim = n_base ** mu
    m = data.draw(st.integers(1, dim))
    n = data.draw(st.integers(1, dim))
    spec = LittlewoodSpec(n_base, mu)
    e = littlewood_exponent(spec, m, n)
    assert 0 <= e < n_base
    assert e == littlewood_exponent(spec, n, m)


def test_out_of_range_indices_rejected():
    with pytest.raises(IndexError):
        toeplitz_entry(ToeplitzSpec(1), 5, 1)
    with pytest.raises(IndexError):
        toeplitz_entry(ToeplitzSpec(1), 0, 1)
    with pytest.raises(IndexError):
        littlewood_exponent(LittlewoodSpec(3, 1), 1, 4)


@pytest.mark.parametrize("bad", [0, -1])
def test_invalid_specs(bad):
    with pytest.raises(ValueError):
        ToeplitzSpec(bad)
    with pytest.raises(ValueError):
        LittlewoodSpec(3, bad)


def test_littlewood_requires_n_above_two():
    with pytest.raises(ValueError):
        LittlewoodSpec(2, 1)


def test_dimension_guard():
    with pytest.raises(MemoryError):
        toeplitz_matrix(ToeplitzSpec(7))
    with pytest.raises(MemoryError):
        toeplitz_matrix(ToeplitzSpec(3), max_dim=63)
    # the entry oracle itself is unaffected by the guard
    assert toeplitz_entry(ToeplitzSpec(20), 4 ** 20, 1) in (-1, 1)


@pytest.mark.parametrize("alpha", [1, 2, 3])
def test_toeplitz_unitary_exact(alpha):
    rep = verify_unitary_exact(ToeplitzSpec(alpha))
    assert rep.is_unitary and rep.max_deviation == 0 and rep.scale == 4 ** alpha


@pytest.mark.parametrize("n_base", [3, 4, 5, 6])
@pytest.mark.parametrize("mu", [1, 2, 3])
def test_littlewood_unitary_exact(n_base, mu):
    rep = verify_unitary_exact(LittlewoodSpec(n_base, mu))
    assert rep.is_unitary and rep.max_deviation == 0


def test_unitarity_agrees_with_float_check():
    m = np.exp(2j * np.pi * littlewood_recursive(4, 2) / 4)
    assert np.allclose(m @ m.conj().T, 16 * np.eye(16), atol=1e-12)


@pytest.mark.parametrize("n, coeffs", [(1, (-1, 1)), (2, (1, 1)), (3, (1, 1, 1)), (4, (1, 0, 1)), (6, (1, -1, 1))])
def test_cyclotomic(n, coeffs):
    assert cyclotomic(n) == coeffs


def test_cyclotomic_product_identity():
    # x^12 - 1 is the product of the cyclotomic polynomials of the divisors of 12
    prod = np.array([1])
    for d in (1, 2, 3, 4, 6, 12):
        prod = np.convolve(prod, cyclotomic(d))
    expected = np.zeros(13, dtype=int)
    expected[0], expected[12] = -1, 1
    assert prod.tolist() == expected.tolist()


def test_weights():
    inv = WeightSequence.inverse_square()
    assert inv(3) == 1 / 9
    assert math.isclose(inv.total(), math.pi ** 2 / 6)
    geo = WeightSequence.geometric()
    assert geo(4) == 1 / 16 and geo.total() == 1.0
    lw = WeightSequence.littlewood(3)
    assert math.isclose(lw(2), 3 ** -3 / 4)
    with pytest.raises(IndexError):
        inv(0)
    with pytest.raises(ValueError):
        WeightSequence.from_name("custom")


def test_block_layout():
    layout = BlockLayout((4, 16, 64))
    assert layout.offsets == (0, 4, 20, 84)
    assert layout.total == 84 and layout.n_blocks == 3
    assert [layout.block_of(m) for m in (1, 4, 5, 20, 21, 84, 85)] == [1, 1, 2, 2, 3, 3, None]
    assert layout.block_span(2) == (5, 20)


def test_composite_toeplitz_metadata():
    orc = CoefficientOracle.toeplitz_composite(3)
    assert orc.layout.block_sizes == (4, 16, 64)
    assert [orc.block_bound(b) for b in (1, 2, 3)] == [1.0, 0.25, 1 / 9]
    assert math.isclose(orc.certified_bound, 49 / 36, rel_tol=1e-15)
    assert math.isclose(orc.sup_bound, math.pi ** 2 / 6, rel_tol=1e-15)
    assert [orc.block_mass_closed_form(b) for b in (1, 2, 3)] == [2.0, 1.0, 8 / 9]
    geo = CoefficientOracle.toeplitz_composite(3, WeightSequence.geometric())
    assert geo.sup_bound == 1.0


def test_composite_coefficients_and_status():
    orc = CoefficientOracle.toeplitz_composite(2)
    assert orc.coefficient(1, 1) == -1 / 8
    assert orc.coefficient(1, 2) == 1 / 8
    assert orc.status(1, 5) is CoefficientStatus.CROSS_BLOCK and orc.coefficient(1, 5) == 0
    assert orc.status(5, 6) is CoefficientStatus.IN_BLOCK
    assert orc.status(21, 21) is CoefficientStatus.TRUNCATED and orc.coefficient(21, 21) == 0
    # block 2: (1/4) / 64 times the C_2 entry
    assert orc.coefficient(5, 5) == pytest.approx(1 / 256)


def test_littlewood_composite_coefficients():
    orc = CoefficientOracle.littlewood_composite(3, 2)
    w = 3 ** -1.5
    assert orc.coefficient(3, 3) == pytest.approx(w)  # exponent 0
    assert orc.coefficient(1, 1) == pytest.approx(w * np.exp(2j * np.pi / 3))
    assert orc.block_bound(2) == pytest.approx(0.25)
    assert orc.block_mass_closed_form(1) == pytest.approx(math.sqrt(3))


def test_block_matrix_read_only():
    mat = CoefficientOracle.single_toeplitz_block(1).block_matrix(1)
    with pytest.raises(ValueError):
        mat[0, 0] = 5


def test_custom_oracle_from_matrix():
    mat = np.array([[0, 1], [1, 0]], dtype=float)
    orc = CoefficientOracle.custom(mat, bound=1.0)
    assert orc.coefficient(1, 2) == 1 and orc.coefficient(1, 1) == 0
    assert orc.certified_bound == 1.0
    with pytest.raises(ValueError):
        CoefficientOracle.custom(lambda m, n: 0.0)


def test_oracle_determinism():
    a = CoefficientOracle.toeplitz_composite(3)
    b = CoefficientOracle.toeplitz_composite(3)
    assert a == b and hash(a) == hash(b)
    assert all(a.coefficient(m, n) == b.coefficient(m, n) for m in range(1, 85, 9) for n in range(1, 85, 11))
