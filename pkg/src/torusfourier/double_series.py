"""Windowed convergence diagnostics for double series ``sum_{m,n>=1} a_mn``.

A finite scan can only corroborate or refute convergence up to its corner,
so every verdict here is relative to the scanned window ``m, n <= corner``.

The Pringsheim Cauchy test asks for the least ``mu`` with
``|s_PQ - s_MN| < eps`` whenever ``P > M >= mu`` and ``Q > N >= mu``. A
witness is only accepted for ``mu <= corner // 2`` so that the window beyond
it is at least as long as the stretch before it; otherwise a slowly divergent
series (harmonic rows, say) would pass vacuously just below the corner.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .oracles import CoefficientOracle
from .polydisc import PointLike, as_point

DEFAULT_EPSILONS = (1e-2, 1e-4, 1e-6)


class Classification(str, enum.Enum):
    ABSOLUTE = "absolute"
    REGULAR = "regular"
    PRINGSHEIM = "pringsheim"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class TermOracle:
    """Pure term function ``(m, n) -> a_mn`` on 1-based indices.

    With ``vectorized=True`` the function is called once on broadcast index
    grids instead of once per term.
    """

    func: Callable
    vectorized: bool = False
    label: str = "terms"
    tail_bound: Optional[Callable[[int], float]] = None

    def __call__(self, m: int, n: int) -> complex:
        return complex(self.func(m, n))

    def table(self, rows: int, cols: Optional[int] = None) -> np.ndarray:
        cols = rows if cols is None else cols
        if rows == 0 or cols == 0:
            return np.zeros((rows, cols), dtype=np.complex128)
        m = np.arange(1, rows + 1)[:, None]
        n = np.arange(1, cols + 1)[None, :]
        if self.vectorized:
            out = np.asarray(self.func(m, n), dtype=np.complex128)
            return np.ascontiguousarray(np.broadcast_to(out, (rows, cols)))
        return np.array([[complex(self.func(i, j)) for j in range(1, cols + 1)] for i in range(1, rows + 1)])

    def __add__(self, other: "TermOracle") -> "TermOracle":
        return TermOracle(_Sum(self, other), vectorized=True, label=f"({self.label})+({other.label})")

    def __neg__(self) -> "TermOracle":
        return TermOracle(_Neg(self), vectorized=True, label=f"-({self.label})")

    def modulus(self) -> "TermOracle":
        return TermOracle(_Abs(self), vectorized=True, label=f"|{self.label}|")


class _Combinator:
    def _eval(self, oracle, m, n):
        if oracle.vectorized:
            return np.asarray(oracle.func(m, n), dtype=np.complex128)
        return np.vectorize(lambda i, j: complex(oracle.func(int(i), int(j))), otypes=[np.complex128])(m, n)


class _Sum(_Combinator):
    def __init__(self, a, b):
        self.a, self.b = a, b

    def __call__(self, m, n):
        return self._eval(self.a, m, n) + self._eval(self.b, m, n)


class _Neg(_Combinator):
    def __init__(self, a):
        self.a = a

    def __call__(self, m, n):
        return -self._eval(self.a, m, n)


class _Abs(_Combinator):
    def __init__(self, a):
        self.a = a

    def __call__(self, m, n):
        return np.abs(self._eval(self.a, m, n)).astype(np.complex128)


# -- stock term oracles -------------------------------------------------------


def geometric_terms() -> TermOracle:
    """``a_mn = 2**(-m-n)``; ``s_MN = (1 - 2**-M)(1 - 2**-N)``."""
    return TermOracle(lambda m, n: np.ldexp(1.0, -(m + n)), vectorized=True, label="2^(-m-n)")


def oscillating_terms() -> TermOracle:
    """``a_mn = (-1)**(m+n)``: bounded partial sums that never settle."""
    return TermOracle(lambda m, n: np.where((m + n) % 2 == 0, 1.0, -1.0), vectorized=True, label="(-1)^(m+n)")


def harmonic_row_terms() -> TermOracle:
    """Row 1 is ``1/n``; every other row vanishes."""
    return TermOracle(lambda m, n: np.where(m == 1, 1.0 / n, 0.0), vectorized=True, label="[m=1]/n")


def unit_term() -> TermOracle:
    return TermOracle(lambda m, n: np.where((m == 1) & (n == 1), 1.0, 0.0), vectorized=True, label="[m=n=1]")


class _FormTerms:
    def __init__(self, oracle, coords, blocks):
        self.oracle = oracle
        self.coords = coords
        self.blocks = blocks

    def __call__(self, m, n):
        m, n = np.broadcast_arrays(np.asarray(m), np.asarray(n))
        out = np.zeros(m.shape, dtype=np.complex128)
        flat_m, flat_n = m.ravel(), n.ravel()
        layout = self.oracle.layout
        total = min(layout.total, self.coords.size)
        res = out.ravel()
        for b in range(1, layout.n_blocks + 1):
            if self.blocks is not None and b not in self.blocks:
                continue
            start, stop = layout.block_span(b)
            if start > total:
                break
            sel = (flat_m >= start) & (flat_m <= stop) & (flat_n >= start) & (flat_n <= stop)
            if not sel.any():
                continue
            mat = self.oracle.block_matrix(b)
            lm, ln = flat_m[sel] - start, flat_n[sel] - start
            res[sel] = mat[lm, ln] * self.coords[flat_m[sel] - 1] * self.coords[flat_n[sel] - 1]
        return res.reshape(m.shape)


def form_terms(
    oracle: CoefficientOracle, z: Optional[PointLike] = None, blocks: Optional[Sequence[int]] = None
) -> TermOracle:
    """Terms ``a_mn z_m z_n`` of a quadratic form at ``z`` (all ones by default).

    ``blocks`` keeps only the listed blocks, zeroing the rest.
    """
    width = oracle.layout.total
    coords = np.ones(width, dtype=np.complex128) if z is None else as_point(z).coords(width)
    label = f"{oracle.family.value} terms"
    chosen = None if blocks is None else frozenset(blocks)
    kept = [b for b in range(1, oracle.n_blocks + 1) if chosen is None or b in chosen]

    def tail(k: int) -> float:
        # analytic sup of the blocks after the first k
        return math.fsum(oracle.block_bound(b) for b in kept if b > k)

    return TermOracle(_FormTerms(oracle, coords, chosen), vectorized=True, label=label, tail_bound=tail)


# ---------------------------------------------------------------------------
# Partial sums


def partial_sums(oracle: TermOracle, m_limit: int, n_limit: Optional[int] = None) -> np.ndarray:
    """Table ``S[M, N] = s_MN`` for ``0 <= M <= m_limit``, ``0 <= N <= n_limit``.

    Each row is accumulated along ``n`` with compensation, then the row sums
    are accumulated along ``m``; :func:`rectangular_sum` uses the same order.
    """
    n_limit = m_limit if n_limit is None else n_limit
    if m_limit < 0 or n_limit < 0:
        raise ValueError("limits must be nonnegative")
    terms = oracle.table(m_limit, n_limit)
    sre, sim = kernels.partial_sum_table(np.ascontiguousarray(terms.real), np.ascontiguousarray(terms.imag))
    return sre + 1j * sim


def rectangular_sum(oracle: TermOracle, m_limit: int, n_limit: int) -> complex:
    """``s_MN = sum_{m <= M} sum_{n <= N} a_mn`` (zero when either limit is 0)."""
    if m_limit == 0 or n_limit == 0:
        return 0j
    return complex(partial_sums(oracle, m_limit, n_limit)[m_limit, n_limit])


# ---------------------------------------------------------------------------
# Diagnoses


@dataclass(frozen=True)
class Violation:
    m: int
    n: int
    p: int
    q: int
    size: float

    def as_dict(self) -> dict:
        return {"M": self.m, "N": self.n, "P": self.p, "Q": self.q, "size": self.size}


@dataclass(frozen=True, eq=False)
class SeriesDiagnosis:
    classification: Classification
    epsilon: float
    mu_witness: Optional[int]
    scan_corner: int
    worst_violation: Optional[Violation]
    tail_profile: np.ndarray = field(repr=False)
    row_status: tuple[bool, ...] = ()
    column_status: tuple[bool, ...] = ()
    label: str = ""

    @property
    def passed(self) -> bool:
        return self.classification is not Classification.UNDETERMINED

    def tail_sup(self, mu: int) -> float:
        """Largest scanned ``|s_PQ - s_MN|`` with ``P > M >= mu``, ``Q > N >= mu``."""
        return float(self.tail_profile[mu])

    def as_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "epsilon": self.epsilon,
            "mu_witness": self.mu_witness,
            "corner": self.scan_corner,
            "label": self.label,
            "violations": [self.worst_violation.as_dict()] if self.worst_violation else [],
            "rows_converged": list(self.row_status),
            "columns_converged": list(self.column_status),
        }


def _witness_limit(corner: int) -> int:
    return corner // 2


def _tail_profile_2d(table: np.ndarray):
    """``profile[mu]`` = worst Cauchy gap over ``M, N >= mu`` and its quadruple."""
    worst, arg_p, arg_q = kernels.cauchy_violations_2d(np.ascontiguousarray(table.real), np.ascontiguousarray(table.imag))
    corner = table.shape[0] - 1
    profile = np.zeros(corner + 1)
    where = [None] * (corner + 1)
    best = -1.0
    best_at = None
    # sweep mu downward, folding in the new L-shaped strip M = mu or N = mu;
    # ties keep the lexicographically smallest (M, N)
    for mu in range(corner - 1, 0, -1):
        strip = [(mu, n) for n in range(mu, corner)] + [(m, mu) for m in range(mu + 1, corner)]
        for m, n in strip:
            val = worst[m, n]
            if val > best or (val == best and best_at is not None and (m, n) < best_at):
                best, best_at = val, (m, n)
        profile[mu] = best
        m, n = best_at
        where[mu] = Violation(m, n, int(arg_p[m, n]), int(arg_q[m, n]), float(best))
    return profile, where


def _single_series_worst(prefix: np.ndarray) -> np.ndarray:
    """Suffix max of single-series Cauchy gaps for rows of prefix sums ``(R, K+1)``."""
    if prefix.shape[0] == 0:
        return np.zeros((0, prefix.shape[1]))
    worst, _ = kernels.cauchy_violations_1d(np.ascontiguousarray(prefix.real), np.ascontiguousarray(prefix.imag))
    return np.maximum.accumulate(worst[:, ::-1], axis=1)[:, ::-1]


def _single_series_status(suffix: np.ndarray, epsilon: float) -> np.ndarray:
    # pass iff some mu <= corner // 2 has every later gap below eps
    limit = _witness_limit(suffix.shape[1] - 1)
    return (suffix[:, 1: limit + 1] < epsilon).any(axis=1)


def _check_args(epsilon: float, corner_max: int) -> None:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if corner_max < 2:
        raise ValueError("corner_max must be at least 2")


class _Scan:
    """Tolerance-independent scan of one window; each stage is computed lazily once."""

    def __init__(self, oracle: TermOracle, corner: int):
        self.oracle = oracle
        self.corner = corner
        self._terms = None
        self._profile = None
        self._lines = None
        self._modulus = None

    @property
    def terms(self) -> np.ndarray:
        if self._terms is None:
            self._terms = self.oracle.table(self.corner)
        return self._terms

    @property
    def profile(self):
        if self._profile is None:
            t = self.terms
            sre, sim = kernels.partial_sum_table(np.ascontiguousarray(t.real), np.ascontiguousarray(t.imag))
            self._profile = _tail_profile_2d(sre + 1j * sim)
        return self._profile

    @property
    def lines(self):
        if self._lines is None:
            t = self.terms
            self._lines = (
                _single_series_worst(_prefix_rows(t)),
                _single_series_worst(_prefix_rows(np.ascontiguousarray(t.T))),
            )
        return self._lines

    @property
    def modulus(self) -> "_Scan":
        if self._modulus is None:
            self._modulus = _Scan(self.oracle.modulus(), self.corner)
            self._modulus._terms = np.abs(self.terms).astype(np.complex128)
        return self._modulus

    def pringsheim(self, epsilon: float) -> SeriesDiagnosis:
        profile, where = self.profile
        label = self.oracle.label
        for mu in range(1, _witness_limit(self.corner) + 1):
            if profile[mu] < epsilon:
                return SeriesDiagnosis(Classification.PRINGSHEIM, epsilon, mu, self.corner, None, profile, label=label)
        # report the worst gap that survives even at the deepest admissible mu
        deepest = max(1, _witness_limit(self.corner))
        return SeriesDiagnosis(Classification.UNDETERMINED, epsilon, None, self.corner, where[deepest], profile, label=label)

    def regular(self, epsilon: float) -> SeriesDiagnosis:
        base = self.pringsheim(epsilon)
        rows = _single_series_status(self.lines[0], epsilon)
        cols = _single_series_status(self.lines[1], epsilon)
        cls = base.classification
        if cls is Classification.PRINGSHEIM and rows.all() and cols.all():
            cls = Classification.REGULAR
        return SeriesDiagnosis(
            cls,
            epsilon,
            base.mu_witness,
            self.corner,
            base.worst_violation,
            base.tail_profile,
            tuple(bool(r) for r in rows),
            tuple(bool(c) for c in cols),
            self.oracle.label,
        )

    def absolute(self, epsilon: float) -> SeriesDiagnosis:
        reg = self.regular(epsilon)
        if reg.classification is Classification.REGULAR and self.modulus.pringsheim(epsilon).passed:
            return SeriesDiagnosis(
                Classification.ABSOLUTE,
                epsilon,
                self.modulus.pringsheim(epsilon).mu_witness,
                self.corner,
                None,
                reg.tail_profile,
                reg.row_status,
                reg.column_status,
                self.oracle.label,
            )
        return reg


def pringsheim_diagnose(oracle: TermOracle, epsilon: float, corner_max: int) -> SeriesDiagnosis:
    """Windowed Pringsheim Cauchy test."""
    _check_args(epsilon, corner_max)
    return _Scan(oracle, corner_max).pringsheim(epsilon)


def regular_diagnose(oracle: TermOracle, epsilon: float, corner_max: int) -> SeriesDiagnosis:
    """Pringsheim test plus a single-series Cauchy scan of every row and column."""
    _check_args(epsilon, corner_max)
    return _Scan(oracle, corner_max).regular(epsilon)


def _prefix_rows(terms: np.ndarray) -> np.ndarray:
    # one-row partial-sum tables reuse the 2-D kernel's compensated row pass
    rows = terms.shape[0]
    out = np.zeros((rows, terms.shape[1] + 1), dtype=np.complex128)
    for r in range(rows):
        sre, sim = kernels.partial_sum_table(
            np.ascontiguousarray(terms[r: r + 1].real), np.ascontiguousarray(terms[r: r + 1].imag)
        )
        out[r] = sre[1] + 1j * sim[1]
    return out


def absolute_diagnose(oracle: TermOracle, epsilon: float, corner_max: int) -> SeriesDiagnosis:
    """Classify as absolute when regular and ``sum |a_mn|`` passes the Pringsheim window test.

    When the modulus series passes, ``|s_PQ - s_MN|`` is dominated by its
    matching gap, so the plain tests pass on the same window as well.
    """
    _check_args(epsilon, corner_max)
    return _Scan(oracle, corner_max).absolute(epsilon)


def diagnose_ladder(
    oracle: TermOracle, corner_max: int, epsilons: Sequence[float] = DEFAULT_EPSILONS
) -> list[SeriesDiagnosis]:
    """Strongest classification at each tolerance of the ladder, from one shared scan."""
    for eps in epsilons:
        _check_args(eps, corner_max)
    scan = _Scan(oracle, corner_max)
    return [scan.absolute(eps) for eps in epsilons]


def additivity_check(oracle_a: TermOracle, oracle_b: TermOracle, corner_max: int) -> float:
    """``max |s_MN(a+b) - s_MN(a) - s_MN(b)|`` relative to the partial-sum scale."""
    if corner_max < 1:
        raise ValueError("corner_max must be at least 1")
    sa = partial_sums(oracle_a, corner_max)
    sb = partial_sums(oracle_b, corner_max)
    sab = partial_sums(oracle_a + oracle_b, corner_max)
    scale = max(1.0, float(np.max(np.abs(sa))), float(np.max(np.abs(sb))))
    return float(np.max(np.abs(sab - sa - sb))) / scale


def iterated_sums(oracle: TermOracle, corner: int) -> tuple[complex, complex]:
    """Row-first and column-first iterated sums over the square window."""
    terms = oracle.table(corner)
    from math import fsum

    def csum(values):
        return complex(fsum(values.real.tolist()), fsum(values.imag.tolist()))

    by_rows = csum(np.array([csum(terms[m]) for m in range(corner)]))
    by_cols = csum(np.array([csum(terms[:, n]) for n in range(corner)]))
    return by_rows, by_cols
