import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torusfourier.fourier import (
    MultiIndex,
    block_frequencies,
    divergence_ledger,
    fourier_coefficient,
    frequency_enumerator,
    quadrature_check,
)
from torusfourier.oracles import CoefficientOracle, WeightSequence

GEO = CoefficientOracle.toeplitz_composite(3, WeightSequence.geometric())
INV = CoefficientOracle.toeplitz_composite(3)


def test_parse_and_format():
    assert MultiIndex.parse("e1+e2") == MultiIndex.pair(1, 2)
    assert MultiIndex.parse("2e3") == MultiIndex.unit(3, 2)
    assert MultiIndex.parse("e2+e1") == MultiIndex.parse("e1+e2")
    assert MultiIndex.parse("e1+e1") == MultiIndex.unit(1, 2)
    assert MultiIndex.parse("e1-e1") == MultiIndex()
    assert str(MultiIndex.parse("e4-3e2")) == "-3e2+e4"
    with pytest.raises(ValueError):
        MultiIndex.parse("x1")


def test_trichotomy_examples():
    assert fourier_coefficient(GEO, MultiIndex.parse("e1+e2")) == 0.125
    assert fourier_coefficient(GEO, MultiIndex.parse("2e1")) == -1 / 16
    assert fourier_coefficient(GEO, MultiIndex.parse("e1")) == 0
    assert fourier_coefficient(GEO, MultiIndex()) == 0
    assert fourier_coefficient(GEO, MultiIndex.parse("e1+e5")) == 0  # different blocks
    assert fourier_coefficient(GEO, MultiIndex.parse("e1-e2")) == 0


@given(st.lists(st.tuples(st.integers(1, 84), st.integers(-3, 3)), min_size=1, max_size=5))
def test_degree_other_than_two_vanishes(parts):
    p = MultiIndex(tuple(parts))
    values = sorted(v for _, v in p.support)
    is_quadratic = values in ([1, 1], [2])
    if not is_quadratic:
        assert fourier_coefficient(INV, p) == 0


def test_enumeration_counts_and_uniqueness():
    t = list(frequency_enumerator(INV, 1))
    assert len(t) == 10
    assert len({f for f, _ in t}) == 10
    lw = CoefficientOracle.littlewood_composite(3, 2)
    assert len(list(frequency_enumerator(lw, 1))) == 6
    freqs = block_frequencies(INV, 2)
    assert len(freqs) == 16 * 17 // 2
    assert freqs.first.min() == 5 and freqs.second.max() == 20


def test_enumeration_matches_trichotomy():
    for f, v in frequency_enumerator(INV, 2):
        assert v == fourier_coefficient(INV, f)


def test_zero_block_flag():
    assert block_frequencies(CoefficientOracle.zero(), 1).all_zero


@pytest.mark.parametrize(
    "oracle",
    [INV, CoefficientOracle.littlewood_composite(3, 2), CoefficientOracle.littlewood_composite(4, 1)],
    ids=["toeplitz", "littlewood3", "littlewood4"],
)
def test_quadrature(oracle):
    assert quadrature_check(oracle, 5) <= 1e-10
    assert quadrature_check(oracle, 6) <= 1e-10


def test_quadrature_grid_too_small():
    with pytest.raises(ValueError):
        quadrature_check(INV, 4)


def test_ledger_inverse_square():
    ledger = divergence_ledger(CoefficientOracle.toeplitz_composite(1), 7)
    cum = [r.cumulative for r in ledger.rows]
    assert all(b > a for a, b in zip(cum, cum[1:]))
    assert ledger.first_exceeding(10) == 7
    assert cum[-1] == pytest.approx(10.55891156462585, rel=1e-14)
    assert ledger.sup_bound == pytest.approx(math.pi ** 2 / 6)
    assert ledger.consistent
    guarded = divergence_ledger(CoefficientOracle.toeplitz_composite(1), 7, enumeration_guard=64)
    assert [r.block for r in guarded.rows if r.enumerated is not None] == [1, 2, 3]
    assert [r.cumulative for r in guarded.rows] == cum


def test_ledger_geometric_mass_one():
    ledger = divergence_ledger(GEO, 6)
    assert [r.block_mass for r in ledger.rows] == [1.0] * 6
    assert [r.cumulative for r in ledger.rows] == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]


@pytest.mark.parametrize("n_base", [3, 4, 5])
def test_ledger_littlewood(n_base):
    ledger = divergence_ledger(CoefficientOracle.littlewood_composite(n_base, 1), 4)
    for r in ledger.rows:
        assert r.block_mass == pytest.approx(n_base ** (r.block / 2) / r.block ** 2, rel=1e-12)
        assert r.agrees


def test_ledger_empty_and_custom_limits():
    assert divergence_ledger(INV, 0).rows == ()
    with pytest.raises(ValueError):
        divergence_ledger(CoefficientOracle.zero(), 2)
