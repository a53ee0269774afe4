import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusfourier.oracles import CoefficientOracle, WeightSequence
from torusfourier.polydisc import (
    PhaseCoordinateAscent,
    PolydiscPoint,
    RandomSampling,
    Tail,
    analytic_gradient,
    bound_search,
    dense_section_matrix,
    eval_bilinear_section,
    eval_quadratic_section,
    gradient_check,
    uniform_tail_bound,
)

TOEPLITZ3 = CoefficientOracle.toeplitz_composite(3)


def torus_point(rng, size):
    return np.exp(2j * np.pi * rng.random(size))


def test_all_ones_values():
    assert eval_quadratic_section(CoefficientOracle.single_toeplitz_block(1), 4, PolydiscPoint.ones()).value == 8
    val = eval_quadratic_section(TOEPLITZ3, 84, PolydiscPoint.ones())
    assert abs(val.value - 49 / 36) < 1e-15
    assert val.terms_summed == 4 ** 2 + 16 ** 2 + 64 ** 2


def test_section_beyond_layout_is_truncated():
    small = eval_quadratic_section(TOEPLITZ3, 84, PolydiscPoint.ones())
    big = eval_quadratic_section(TOEPLITZ3, 500, PolydiscPoint.ones())
    assert big.truncated and not small.truncated
    assert big.value == small.value


def test_zero_oracle_and_zero_point():
    assert eval_quadratic_section(CoefficientOracle.zero(), 4, PolydiscPoint.ones()).value == 0
    assert eval_quadratic_section(TOEPLITZ3, 84, PolydiscPoint.zeros()).value == 0


def test_point_outside_polydisc_rejected():
    with pytest.raises(ValueError):
        PolydiscPoint([1.0, 1.5])


def test_tail_rules():
    p = PolydiscPoint([0.5], Tail.ONES)
    assert p.coords(3).tolist() == [0.5, 1, 1]
    assert PolydiscPoint([0.5]).coords(3).tolist() == [0.5, 0, 0]
    assert PolydiscPoint.from_torus([0.25]).coords(2) == pytest.approx([1j, 1])


def test_dense_matrix_matches_oracle_evaluation():
    rng = np.random.default_rng(3)
    z = torus_point(rng, 84)
    a = dense_section_matrix(TOEPLITZ3, 84)
    assert eval_quadratic_section(TOEPLITZ3, 84, z).value == pytest.approx(z @ a @ z, abs=1e-13)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), m=st.integers(1, 84), n=st.integers(1, 84))
def test_bilinear_symmetry(seed, m, n):
    rng = np.random.default_rng(seed)
    x, y = torus_point(rng, 84), torus_point(rng, 84)
    b_xy = eval_bilinear_section(TOEPLITZ3, m, n, x, y).value
    b_yx = eval_bilinear_section(TOEPLITZ3, n, m, y, x).value
    assert b_xy == pytest.approx(b_yx, abs=1e-13)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_bilinearity_and_polarization(seed):
    rng = np.random.default_rng(seed)
    x, y, w = (torus_point(rng, 84) * 0.5 for _ in range(3))
    a, b = complex(*rng.normal(size=2)) * 0.3, complex(*rng.normal(size=2)) * 0.3

    def B(u, v):
        return eval_bilinear_section(TOEPLITZ3, 84, 84, u, v).value

    def Q(u):
        return eval_quadratic_section(TOEPLITZ3, 84, u).value

    assert B(a * x + b * w, y) == pytest.approx(a * B(x, y) + b * B(w, y), abs=1e-13)
    assert B(x, y) == pytest.approx((Q(x + y) - Q(x - y)) / 4, abs=1e-13)


def test_gradient_at_all_ones_alpha1():
    orc = CoefficientOracle.single_toeplitz_block(1)
    assert analytic_gradient(orc, 4, PolydiscPoint.ones(), 1) == 4
    assert analytic_gradient(orc, 4, np.zeros(4), 1) == 0


def test_gradient_check_passes():
    cases = [(CoefficientOracle.single_toeplitz_block(a), 4 ** a) for a in (1, 2)] + [(TOEPLITZ3, 84)]
    rep = gradient_check(cases, triples=100, seed=1)
    assert rep.passed and rep.max_rel_error <= 1e-6


@pytest.mark.parametrize("alpha", [1, 2])
def test_ascent_attains_toeplitz_bound(alpha):
    orc = CoefficientOracle.single_toeplitz_block(alpha)
    res = bound_search(orc, 4 ** alpha, PhaseCoordinateAscent(restarts=3, sweeps=100, start="ones"))
    assert abs(res.best_modulus - 8 ** alpha) <= 1e-9
    assert not res.exceeded


def test_random_sampling_respects_bound():
    orc = CoefficientOracle.single_littlewood_block(3, 2)
    res = bound_search(orc, 9, RandomSampling(samples=2000, seed=5))
    assert res.points_tested == 2000
    assert res.max_seen <= 27 + 1e-9 and not res.exceeded


def test_bound_search_flags_violation():
    orc = CoefficientOracle.custom(np.ones((2, 2)), bound=1.0)
    res = bound_search(orc, 2, RandomSampling(samples=200, seed=0))
    assert res.exceeded and res.max_seen > 3.9
    assert len(res.as_dict()["argmax_prefix"]) == 2


def test_bound_search_deterministic():
    strat = PhaseCoordinateAscent(restarts=2, sweeps=20, seed=11)
    a = bound_search(TOEPLITZ3, 84, strat).as_dict()
    b = bound_search(TOEPLITZ3, 84, strat).as_dict()
    assert a == b


def test_uniform_tail_bound():
    res = uniform_tail_bound(TOEPLITZ3, 4, 20, samples=500)
    assert res.analytic_tail == 0.25 and res.respected
    lw = CoefficientOracle.littlewood_composite(3, 2)
    res = uniform_tail_bound(lw, 3, 12, samples=500)
    assert res.analytic_tail == pytest.approx(0.25) and res.respected
    with pytest.raises(ValueError):
        uniform_tail_bound(TOEPLITZ3, 5, 20)


def test_geometric_weights_bound():
    orc = CoefficientOracle.toeplitz_composite(3, WeightSequence.geometric())
    assert eval_quadratic_section(orc, 84, PolydiscPoint.ones()).value == pytest.approx(0.875, abs=1e-15)
    assert math.isclose(orc.certified_bound, 0.875)
