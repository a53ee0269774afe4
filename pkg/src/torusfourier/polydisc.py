"""Rectangular sections of quadratic and bilinear forms on the infinite polydisc.

A point of the polydisc is a finite prefix of complex coordinates (each of
modulus at most one) plus a tail convention for all later coordinates.
Sections are summed block by block, row-major within a block, with
Neumaier-compensated accumulation; cross-block coefficients are structurally
zero and never visited.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .oracles import CoefficientOracle

MODULUS_SLACK = 1e-12
BOUND_SLACK = 1e-9
GRADIENT_RTOL = 1e-6
MAX_TERMS = 1 << 24


class Tail(str, enum.Enum):
    ZEROS = "zeros"
    ONES = "ones"


@dataclass(frozen=True, eq=False)
class PolydiscPoint:
    """Point ``z`` of the closed polydisc given by a prefix and a tail rule."""

    prefix: np.ndarray
    tail: Tail = Tail.ZEROS

    def __post_init__(self):
        arr = np.array(self.prefix, dtype=np.complex128).ravel()
        if arr.size and float(np.max(np.abs(arr))) > 1.0 + MODULUS_SLACK:
            bad = int(np.argmax(np.abs(arr)))
            raise ValueError(f"coordinate {bad + 1} has modulus {abs(arr[bad])!r} > 1")
        arr.setflags(write=False)
        object.__setattr__(self, "prefix", arr)
        object.__setattr__(self, "tail", Tail(self.tail))

    @classmethod
    def from_torus(cls, x, tail: Tail = Tail.ONES) -> "PolydiscPoint":
        """``z_j = exp(2*pi*i*x_j)``; the torus tail ``x_j = 0`` maps to ones."""
        return cls(np.exp(2j * np.pi * np.asarray(x, dtype=np.float64)), tail)

    @classmethod
    def from_phases(cls, theta, tail: Tail = Tail.ZEROS) -> "PolydiscPoint":
        return cls(np.exp(1j * np.asarray(theta, dtype=np.float64)), tail)

    @classmethod
    def ones(cls) -> "PolydiscPoint":
        return cls(np.zeros(0, dtype=np.complex128), Tail.ONES)

    @classmethod
    def zeros(cls) -> "PolydiscPoint":
        return cls(np.zeros(0, dtype=np.complex128), Tail.ZEROS)

    def coords(self, count: int) -> np.ndarray:
        """First ``count`` coordinates, filling past the prefix by the tail rule."""
        if count <= self.prefix.size:
            return np.array(self.prefix[:count])
        fill = 1.0 if self.tail is Tail.ONES else 0.0
        out = np.full(count, fill, dtype=np.complex128)
        out[: self.prefix.size] = self.prefix
        return out

    def __len__(self) -> int:
        return self.prefix.size


PointLike = Union[PolydiscPoint, Sequence[complex], np.ndarray]


def as_point(z: PointLike) -> PolydiscPoint:
    return z if isinstance(z, PolydiscPoint) else PolydiscPoint(z)


# ---------------------------------------------------------------------------
# Term tables


@dataclass(frozen=True, eq=False)
class TermTable:
    """Nonzero-structure terms of a section in summation order (0-based indices)."""

    rows: np.ndarray
    cols: np.ndarray
    coef_re: np.ndarray
    coef_im: np.ndarray
    m_limit: int
    n_limit: int
    width: int
    truncated: bool

    @property
    def size(self) -> int:
        return int(self.rows.size)


def section_terms(
    oracle: CoefficientOracle,
    m_limit: int,
    n_limit: Optional[int] = None,
    blocks: Optional[tuple[int, int]] = None,
) -> TermTable:
    """Terms ``a_mn`` with ``m <= m_limit``, ``n <= n_limit``.

    ``blocks=(first, last)`` restricts to an inclusive range of blocks.
    """
    n_limit = m_limit if n_limit is None else n_limit
    if m_limit < 0 or n_limit < 0:
        raise ValueError("section limits must be nonnegative")
    return _section_terms(oracle, int(m_limit), int(n_limit), blocks)


@functools.lru_cache(maxsize=128)
def _section_terms(oracle, m_limit, n_limit, blocks):
    layout = oracle.layout
    first, last = blocks if blocks is not None else (1, layout.n_blocks)
    rows, cols, cre, cim = [], [], [], []
    count = 0
    for b in range(first, last + 1):
        start, stop = layout.block_span(b)
        r_stop = min(stop, m_limit)
        c_stop = min(stop, n_limit)
        if r_stop < start or c_stop < start:
            continue
        count += (r_stop - start + 1) * (c_stop - start + 1)
        if count > MAX_TERMS:
            raise MemoryError(f"section has more than {MAX_TERMS} terms")
        block = oracle.block_matrix(b, max_dim=MAX_TERMS)
        sub = block[: r_stop - start + 1, : c_stop - start + 1]
        rr, cc = np.meshgrid(np.arange(start - 1, r_stop), np.arange(start - 1, c_stop), indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        cre.append(sub.real.ravel())
        cim.append(sub.imag.ravel())

    def cat(parts, dtype):
        return np.ascontiguousarray(np.concatenate(parts) if parts else np.zeros(0, dtype=dtype), dtype=dtype)

    truncated = max(m_limit, n_limit) > layout.total
    return TermTable(
        cat(rows, np.int64),
        cat(cols, np.int64),
        cat(cre, np.float64),
        cat(cim, np.float64),
        m_limit,
        n_limit,
        min(max(m_limit, n_limit), layout.total),
        truncated,
    )


def _split(z: np.ndarray):
    z = np.atleast_2d(np.asarray(z, dtype=np.complex128))
    return np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag)


def bilinear_values(table: TermTable, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Section values for batches of points (rows of ``x`` and ``y``)."""
    xre, xim = _split(x)
    yre, yim = _split(y)
    if table.size == 0:
        return np.zeros(xre.shape[0], dtype=np.complex128)
    re, im = kernels.bilinear_sections(table.rows, table.cols, table.coef_re, table.coef_im, xre, xim, yre, yim)
    return re + 1j * im


def quadratic_values(oracle: CoefficientOracle, m_limit: int, z: np.ndarray) -> np.ndarray:
    """``C_M(z)`` for each row of the coordinate array ``z`` (no modulus check)."""
    table = section_terms(oracle, m_limit)
    z = np.atleast_2d(z)[:, : table.width]
    return bilinear_values(table, z, z)


# ---------------------------------------------------------------------------
# Section evaluation


@dataclass(frozen=True)
class SectionValue:
    value: complex
    m_limit: int
    n_limit: int
    terms_summed: int
    truncated: bool = False

    def __abs__(self) -> float:
        return abs(self.value)


def eval_quadratic_section(oracle: CoefficientOracle, m_limit: int, z: PointLike) -> SectionValue:
    """``C_M(z) = sum_{m, n <= M} a_mn z_m z_n``."""
    z = as_point(z)
    table = section_terms(oracle, m_limit)
    coords = z.coords(table.width)
    value = complex(bilinear_values(table, coords, coords)[0]) if table.size else 0j
    return SectionValue(value, m_limit, m_limit, table.size, table.truncated)


def eval_bilinear_section(
    oracle: CoefficientOracle, m_limit: int, n_limit: int, x: PointLike, y: PointLike
) -> SectionValue:
    """``Q_MN(x, y) = sum_{m <= M} sum_{n <= N} a_mn x_m y_n``."""
    x, y = as_point(x), as_point(y)
    table = section_terms(oracle, m_limit, n_limit)
    value = 0j
    if table.size:
        value = complex(bilinear_values(table, x.coords(table.width), y.coords(table.width))[0])
    return SectionValue(value, m_limit, n_limit, table.size, table.truncated)


def analytic_gradient(oracle: CoefficientOracle, m_limit: int, z: PointLike, p: int) -> complex:
    """Holomorphic partial ``dC_M/dz_p = sum_{j <= M} (a_pj + a_jp) z_j``."""
    if not 1 <= p <= m_limit:
        raise IndexError(f"p={p} outside 1..{m_limit}")
    block = oracle.layout.block_of(p)
    if block is None:
        return 0j
    start, stop = oracle.layout.block_span(block)
    stop = min(stop, m_limit)
    mat = oracle.block_matrix(block)
    lp = p - start
    width = stop - start + 1
    row = mat[lp, :width] + mat[:width, lp]
    coords = as_point(z).coords(stop)[start - 1:stop] if isinstance(z, PolydiscPoint) else np.asarray(z, dtype=np.complex128)[start - 1:stop]
    terms = row * coords
    re, im = kernels.compensated_sum(np.ascontiguousarray(terms.real), np.ascontiguousarray(terms.imag))
    return complex(re, im)


# ---------------------------------------------------------------------------
# Gradient check


@dataclass(frozen=True)
class GradientCheckReport:
    triples: int
    max_rel_error: float
    worst: Optional[dict]
    step: float
    tolerance: float = GRADIENT_RTOL

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "triples": self.triples,
            "max_rel_error": self.max_rel_error,
            "step": self.step,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "worst": self.worst,
        }


def gradient_check(
    cases: Union[tuple[CoefficientOracle, int], Sequence[tuple[CoefficientOracle, int]]],
    triples: int = 100,
    seed: int = 0,
    step: float = 1e-5,
    radius: float = 0.9,
) -> GradientCheckReport:
    """Compare :func:`analytic_gradient` with central differences.

    Each triple draws an (oracle, section) case, a point with coordinates
    uniform in the disc of ``radius`` (so perturbed points stay admissible),
    and an index ``p``. Both real and imaginary perturbation directions are
    checked against the holomorphic derivative.
    """
    if isinstance(cases, tuple) and isinstance(cases[0], CoefficientOracle):
        cases = [cases]
    rng = np.random.default_rng(seed)
    worst_err = 0.0
    worst = None
    for k in range(triples):
        oracle, m_limit = cases[int(rng.integers(len(cases)))]
        width = min(m_limit, oracle.layout.total)
        r = radius * np.sqrt(rng.random(width))
        z = r * np.exp(2j * np.pi * rng.random(width))
        p = int(rng.integers(1, width + 1))
        g = analytic_gradient(oracle, m_limit, z, p)
        probes = np.array([z, z, z, z])
        probes[0, p - 1] += step
        probes[1, p - 1] -= step
        probes[2, p - 1] += 1j * step
        probes[3, p - 1] -= 1j * step
        vals = quadratic_values(oracle, m_limit, probes)
        fd_re = (vals[0] - vals[1]) / (2 * step)
        fd_im = (vals[2] - vals[3]) / (2j * step)
        denom = abs(g) if g != 0 else 1.0
        err = max(abs(fd_re - g), abs(fd_im - g)) / denom
        if err > worst_err or worst is None:
            worst_err = max(err, worst_err)
            worst = {"triple": k, "family": oracle.family.value, "m_limit": m_limit, "p": p, "gradient": [g.real, g.imag], "rel_error": err}
    return GradientCheckReport(triples, worst_err, worst, step)


# ---------------------------------------------------------------------------
# Bound search


@dataclass(frozen=True)
class RandomSampling:
    samples: int = 10_000
    seed: int = 0
    batch: int = 4096
    interior: bool = False

    def as_dict(self) -> dict:
        return {"name": "random_sampling", "samples": self.samples, "seed": self.seed, "interior": self.interior}


@dataclass(frozen=True)
class PhaseCoordinateAscent:
    """One phase at a time: grid over ``[0, 2*pi)`` then golden-section refinement.

    ``start="ones"`` begins the first restart at the all-ones point; the
    remaining restarts (and all of them for ``start="random"``) begin at
    seeded random phases.
    """

    sweeps: int = 200
    phase_grid: int = 720
    seed: int = 0
    restarts: int = 10
    start: str = "random"
    golden_iterations: int = 60
    tol: float = 1e-14

    def as_dict(self) -> dict:
        return {
            "name": "phase_coordinate_ascent",
            "sweeps": self.sweeps,
            "phase_grid": self.phase_grid,
            "seed": self.seed,
            "restarts": self.restarts,
            "start": self.start,
        }


Strategy = Union[RandomSampling, PhaseCoordinateAscent]


@dataclass(frozen=True, eq=False)
class BoundSearchResult:
    best_modulus: float
    argmax: PolydiscPoint
    iterations: int
    certified_bound: Optional[float]
    points_tested: int
    max_seen: float
    strategy: dict
    oracle: dict
    m_limit: int
    restart_moduli: tuple[float, ...] = ()

    @property
    def exceeded(self) -> bool:
        """Whether any tested point beat the analytic bound (a falsification)."""
        if self.certified_bound is None:
            return False
        return max(self.best_modulus, self.max_seen) > self.certified_bound + BOUND_SLACK

    def as_dict(self) -> dict:
        return {
            "oracle": self.oracle,
            "m_limit": self.m_limit,
            "strategy": self.strategy,
            "seed": self.strategy.get("seed"),
            "best_modulus": self.best_modulus,
            "certified_bound": self.certified_bound,
            "max_seen": self.max_seen,
            "points_tested": self.points_tested,
            "iterations": self.iterations,
            "exceeded": self.exceeded,
            "argmax_prefix": [[float(c.real), float(c.imag)] for c in self.argmax.prefix],
        }


def _active_width(oracle: CoefficientOracle, m_limit: int) -> int:
    return min(m_limit, oracle.layout.total)


def _covered_blocks(oracle: CoefficientOracle, m_limit: int) -> int:
    width = _active_width(oracle, m_limit)
    return 0 if width == 0 else oracle.layout.block_of(width)


def bound_search(oracle: CoefficientOracle, m_limit: int, strategy: Strategy) -> BoundSearchResult:
    """Search for large ``|C_M(z)|``; the analytic bound is reported alongside."""
    width = _active_width(oracle, m_limit)
    bound = oracle.section_bound(_covered_blocks(oracle, m_limit)) if width else 0.0
    if isinstance(strategy, RandomSampling):
        best, arg, tested, iters, restarts = _random_search(oracle, m_limit, width, strategy)
        max_seen = best
    elif isinstance(strategy, PhaseCoordinateAscent):
        best, arg, tested, iters, max_seen, restarts = _ascent_search(oracle, m_limit, width, strategy)
    else:
        raise TypeError(f"unknown strategy {strategy!r}")
    return BoundSearchResult(
        best_modulus=best,
        argmax=PolydiscPoint(arg),
        iterations=iters,
        certified_bound=bound,
        points_tested=tested,
        max_seen=max_seen,
        strategy=strategy.as_dict(),
        oracle=oracle.describe(),
        m_limit=m_limit,
        restart_moduli=tuple(restarts),
    )


def _random_search(oracle, m_limit, width, strat: RandomSampling):
    rng = np.random.default_rng(strat.seed)
    best = -1.0
    arg = np.ones(width, dtype=np.complex128)
    done = 0
    while done < strat.samples:
        count = min(strat.batch, strat.samples - done)
        z = np.exp(2j * np.pi * rng.random((count, width)))
        if strat.interior:
            z *= np.sqrt(rng.random((count, width)))
        mods = np.abs(quadratic_values(oracle, m_limit, z)) if width else np.zeros(count)
        k = int(np.argmax(mods))
        if mods[k] > best:
            best = float(mods[k])
            arg = z[k].copy()
        done += count
    return max(best, 0.0), arg, done, done, ()


def dense_section_matrix(oracle: CoefficientOracle, m_limit: int) -> np.ndarray:
    """Coefficients ``a_mn``, ``m, n <= M``, as one dense (block-diagonal) array."""
    width = _active_width(oracle, m_limit)
    out = np.zeros((width, width), dtype=np.complex128)
    for b in range(1, _covered_blocks(oracle, m_limit) + 1):
        start, stop = oracle.layout.block_span(b)
        stop = min(stop, width)
        size = stop - start + 1
        out[start - 1:stop, start - 1:stop] = oracle.block_matrix(b)[:size, :size]
    return out


def _ascent_search(oracle, m_limit, width, strat: PhaseCoordinateAscent):
    if width == 0:
        return 0.0, np.zeros(0, dtype=np.complex128), 0, 0, 0.0, ()
    rng = np.random.default_rng(strat.seed)
    starts = np.exp(2j * np.pi * rng.random((strat.restarts, width)))
    if strat.start == "ones":
        starts[0] = 1.0
    elif strat.start != "random":
        raise ValueError(f"start must be 'ones' or 'random', got {strat.start!r}")
    mat = dense_section_matrix(oracle, m_limit)
    z, _, seen, iters = kernels.coordinate_ascent(
        mat, starts, strat.phase_grid, strat.sweeps, strat.golden_iterations, strat.tol
    )
    # report compensated section values, not the kernel's running sums
    finals = np.abs(quadratic_values(oracle, m_limit, z))
    k = int(np.argmax(finals))
    tested = int(iters.sum()) * (strat.phase_grid + strat.golden_iterations + 2)
    max_seen = float(max(seen.max(), finals.max()))
    return float(finals[k]), z[k].copy(), tested, int(iters.sum()), max_seen, [float(f) for f in finals]


# ---------------------------------------------------------------------------
# Uniform tail


@dataclass(frozen=True)
class TailBoundResult:
    empirical_sup: float
    analytic_tail: Optional[float]
    m_small: int
    m_large: int
    samples: int
    seed: int

    @property
    def respected(self) -> bool:
        return self.analytic_tail is None or self.empirical_sup <= self.analytic_tail + BOUND_SLACK


def uniform_tail_bound(
    oracle: CoefficientOracle, m_limit_small: int, m_limit_large: int, samples: int = 1000, seed: int = 0
) -> TailBoundResult:
    """Empirical ``sup |C_large(z) - C_small(z)|`` over random torus points.

    Both limits must sit on block boundaries; the gap is then exactly the sum
    of the intervening blocks' forms, each bounded by its analytic constant.
    """
    offsets = oracle.layout.offsets
    if m_limit_small not in offsets or m_limit_large not in offsets:
        raise ValueError(f"limits must be block boundaries {offsets}, got {m_limit_small}, {m_limit_large}")
    if m_limit_small > m_limit_large:
        raise ValueError("m_limit_small must not exceed m_limit_large")
    first = offsets.index(m_limit_small) + 1
    last = offsets.index(m_limit_large)
    if first > last:
        return TailBoundResult(0.0, 0.0, m_limit_small, m_limit_large, samples, seed)
    table = section_terms(oracle, m_limit_large, blocks=(first, last))
    rng = np.random.default_rng(seed)
    z = np.exp(2j * np.pi * rng.random((samples, m_limit_large)))
    sup = float(np.max(np.abs(bilinear_values(table, z, z))))
    bounds = [oracle.block_bound(b) for b in range(first, last + 1)]
    tail = None if any(v is None for v in bounds) else math.fsum(bounds)
    return TailBoundResult(sup, tail, m_limit_small, m_limit_large, samples, seed)
