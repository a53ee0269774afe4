import numpy as np
import pytest

from torusfourier.double_series import (
    Classification,
    TermOracle,
    absolute_diagnose,
    additivity_check,
    diagnose_ladder,
    form_terms,
    geometric_terms,
    harmonic_row_terms,
    iterated_sums,
    oscillating_terms,
    partial_sums,
    pringsheim_diagnose,
    rectangular_sum,
    regular_diagnose,
    unit_term,
)
from torusfourier.oracles import CoefficientOracle


def test_geometric_partial_sums_closed_form():
    table = partial_sums(geometric_terms(), 40)
    m = np.arange(41)
    expected = np.outer(1 - 2.0 ** -m, 1 - 2.0 ** -m)
    assert np.max(np.abs(table - expected)) <= 1e-12


def test_rectangular_sum_consistent_with_table():
    orc = oscillating_terms()
    table = partial_sums(orc, 12)
    assert rectangular_sum(orc, 7, 12) == table[7, 12]
    assert rectangular_sum(orc, 0, 5) == 0


def test_geometric_is_absolute_and_regular():
    assert regular_diagnose(geometric_terms(), 1e-6, 64).classification is Classification.REGULAR
    diag = absolute_diagnose(geometric_terms(), 1e-6, 64)
    assert diag.classification is Classification.ABSOLUTE
    assert all(diag.row_status) and all(diag.column_status)


def test_oscillating_undetermined_with_witness():
    diag = pringsheim_diagnose(oscillating_terms(), 1e-2, 64)
    assert diag.classification is Classification.UNDETERMINED
    v = diag.worst_violation
    assert v is not None and v.size >= 1e-2
    assert v.p > v.m and v.q > v.n
    table = partial_sums(oscillating_terms(), 64)
    assert abs(table[v.p, v.q] - table[v.m, v.n]) == pytest.approx(v.size)


def test_harmonic_rows_not_vacuous_near_corner():
    diag = pringsheim_diagnose(harmonic_row_terms(), 1e-2, 64)
    assert diag.classification is Classification.UNDETERMINED


def test_unit_term():
    diag = absolute_diagnose(unit_term(), 1e-12, 8)
    assert diag.classification is Classification.ABSOLUTE and diag.mu_witness == 1


def test_zero_formal_series_regular():
    zero = TermOracle(lambda m, n: np.zeros(np.broadcast(m, n).shape), vectorized=True, label="0")
    assert regular_diagnose(zero, 1e-12, 8).classification is Classification.REGULAR


def test_cancelling_pair_pringsheim_not_regular():
    # a_{m,1} = +1, a_{m,2} = -1: rectangles with N >= 2 vanish, yet the first column diverges
    def f(m, n):
        return np.where(n == 1, 1.0, np.where(n == 2, -1.0, 0.0)) + 0 * m

    orc = TermOracle(f, vectorized=True, label="pair")
    assert pringsheim_diagnose(orc, 1e-9, 32).classification is Classification.PRINGSHEIM
    reg = regular_diagnose(orc, 1e-9, 32)
    assert reg.classification is Classification.PRINGSHEIM
    assert not reg.column_status[0]


def test_ladder_monotone_witness():
    ladder = diagnose_ladder(geometric_terms(), 64)
    witnesses = [d.mu_witness for d in ladder]
    assert witnesses == sorted(witnesses)
    assert [d.epsilon for d in ladder] == [1e-2, 1e-4, 1e-6]


def test_ladder_matches_single_diagnoses():
    for d in diagnose_ladder(oscillating_terms(), 32, (1e-1, 1e-3)):
        single = absolute_diagnose(oscillating_terms(), d.epsilon, 32)
        assert d.as_dict() == single.as_dict()


def test_additivity_and_negation():
    a, b = geometric_terms(), oscillating_terms()
    assert additivity_check(a, b, 32) <= 1e-14
    assert np.max(np.abs(partial_sums(-a, 16) + partial_sums(a, 16))) == 0


def test_iterated_sums_agree_for_absolute():
    r, c = iterated_sums(geometric_terms(), 60)
    assert r == pytest.approx(c, abs=1e-15)


def test_form_terms_tail_bounds():
    orc = CoefficientOracle.toeplitz_composite(3)
    rng = np.random.default_rng(7)
    terms = form_terms(orc, np.exp(2j * np.pi * rng.random(84)))
    diag = pringsheim_diagnose(terms, 1e-9, 168)
    assert diag.passed
    for k in range(3):
        mu = orc.layout.offsets[k] + 1
        assert diag.tail_sup(mu) <= terms.tail_bound(k) + 1e-9
    assert terms.tail_bound(3) == 0


def test_form_terms_at_ones_sum_to_form_value():
    orc = CoefficientOracle.toeplitz_composite(2)
    assert rectangular_sum(form_terms(orc), 20, 20) == pytest.approx(1 + 1 / 4)


def test_bad_arguments():
    with pytest.raises(ValueError):
        pringsheim_diagnose(geometric_terms(), 0, 10)
    with pytest.raises(ValueError):
        regular_diagnose(geometric_terms(), 1e-3, 1)
