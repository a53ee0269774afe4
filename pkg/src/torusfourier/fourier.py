"""Fourier coefficients of ``F(x) = C(exp(2*pi*i*x))`` on the infinite torus.

Expanding a quadratic form in the characters ``exp(2*pi*i*p.x)`` gives

    F^(e_m + e_n) = a_mn + a_nm   (m != n)
    F^(2 e_m)     = a_mm
    F^(p)         = 0             otherwise

so the coefficient mass over ``Z^infinity`` is the matrix mass ``sum |a_mn|``
when the form is symmetric.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .oracles import CoefficientOracle, Family
from .polydisc import bilinear_values, section_terms

LEDGER_RTOL = 1e-12
QUADRATURE_TOL = 1e-10
MAX_GRID_POINTS = 10_000_000
DEFAULT_ENUMERATION_GUARD = 256


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Finitely supported frequency, stored as sorted ``(position, value)`` pairs."""

    support: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        merged: dict[int, int] = {}
        for pos, val in self.support:
            if int(pos) != pos or pos < 1:
                raise ValueError(f"positions are 1-based integers, got {pos!r}")
            if int(val) != val:
                raise ValueError(f"frequency values must be integers, got {val!r}")
            merged[int(pos)] = merged.get(int(pos), 0) + int(val)
        canon = tuple(sorted((p, v) for p, v in merged.items() if v != 0))
        object.__setattr__(self, "support", canon)

    @classmethod
    def unit(cls, position: int, value: int = 1) -> "MultiIndex":
        return cls(((position, value),))

    @classmethod
    def pair(cls, m: int, n: int) -> "MultiIndex":
        return cls(((m, 1), (n, 1)))

    @classmethod
    def parse(cls, text: str) -> "MultiIndex":
        """Parse compact sums such as ``e1+e2``, ``2e3``, ``e1-e4`` or ``0``."""
        text = text.replace(" ", "")
        if text in ("", "0"):
            return cls()
        if not re.fullmatch(r"[+-]?\d*e\d+([+-]\d*e\d+)*", text):
            raise ValueError(f"cannot parse frequency {text!r}; expected terms like 'e1+2e3'")
        parts = []
        for sign, coef, pos in re.findall(r"([+-]?)(\d*)e(\d+)", text):
            val = int(coef) if coef else 1
            parts.append((int(pos), -val if sign == "-" else val))
        return cls(tuple(parts))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(self.support + other.support)

    @property
    def total_degree(self) -> int:
        return sum(abs(v) for _, v in self.support)

    @property
    def max_position(self) -> int:
        return self.support[-1][0] if self.support else 0

    def __str__(self) -> str:
        if not self.support:
            return "0"
        out = ""
        for pos, val in self.support:
            term = f"e{pos}" if abs(val) == 1 else f"{abs(val)}e{pos}"
            out += ("-" if val < 0 else ("+" if out else "")) + term
        return out

    def as_list(self) -> list[list[int]]:
        return [[p, v] for p, v in self.support]


def fourier_coefficient(oracle: CoefficientOracle, p: MultiIndex) -> complex:
    """Exact coefficient ``F^(p)`` from the quadratic-form trichotomy."""
    supp = p.support
    if len(supp) == 2 and supp[0][1] == 1 and supp[1][1] == 1:
        m, n = supp[0][0], supp[1][0]
        return oracle.coefficient(m, n) + oracle.coefficient(n, m)
    if len(supp) == 1 and supp[0][1] == 2:
        m = supp[0][0]
        return oracle.coefficient(m, m)
    return 0j


# ---------------------------------------------------------------------------
# Enumeration


@dataclass(frozen=True, eq=False)
class BlockFrequencies:
    """Every frequency supported in one block, as parallel arrays (1-based positions)."""

    block: int
    first: np.ndarray
    second: np.ndarray
    values: np.ndarray
    all_zero: bool

    def __len__(self) -> int:
        return int(self.values.size)

    def multi_index(self, k: int) -> MultiIndex:
        m, n = int(self.first[k]), int(self.second[k])
        return MultiIndex.unit(m, 2) if m == n else MultiIndex.pair(m, n)


def block_frequencies(oracle: CoefficientOracle, block: int, max_dim: int = DEFAULT_ENUMERATION_GUARD) -> BlockFrequencies:
    """Frequencies ``e_m + e_n`` (``m < n``) and ``2 e_m`` of ``block`` with their coefficients.

    Ordered by ``m`` then ``n`` with the diagonal frequency first in each row.
    """
    if not 1 <= block <= oracle.n_blocks:
        raise IndexError(f"block {block} outside 1..{oracle.n_blocks}")
    size = oracle.layout.block_sizes[block - 1]
    if size > max_dim:
        raise MemoryError(f"block {block} has {size} variables, above the enumeration guard {max_dim}")
    mat = oracle.block_matrix(block, max_dim=max_dim)
    rows, cols = np.triu_indices(size)
    vals = np.where(rows == cols, mat[rows, cols], mat[rows, cols] + mat[cols, rows])
    offset = oracle.layout.offsets[block - 1]
    return BlockFrequencies(block, rows + offset + 1, cols + offset + 1, vals, not np.any(vals))


def frequency_enumerator(oracle: CoefficientOracle, block: int, max_dim: int = DEFAULT_ENUMERATION_GUARD) -> Iterator[tuple[MultiIndex, complex]]:
    """Yield each frequency of ``block`` exactly once with its coefficient."""
    freqs = block_frequencies(oracle, block, max_dim)
    for k in range(len(freqs)):
        yield freqs.multi_index(k), complex(freqs.values[k])


# ---------------------------------------------------------------------------
# Quadrature oracle


def quadrature_check(oracle: CoefficientOracle, grid_points_per_dim: int = 5, block: int = 1) -> float:
    """Max ``|DFT coefficient - trichotomy value|`` for the form restricted to ``block``.

    The restricted form is a trigonometric polynomial with per-variable
    frequencies in ``{0, 1, 2}``, so a tensor grid with at least 5 points per
    variable recovers its coefficients without aliasing.
    """
    if grid_points_per_dim < 5:
        raise ValueError("need at least 5 grid points per variable")
    start, stop = oracle.layout.block_span(block)
    dims = stop - start + 1
    total = grid_points_per_dim ** dims
    if total > MAX_GRID_POINTS:
        raise MemoryError(f"grid of {total} points exceeds the cap {MAX_GRID_POINTS}")

    g = grid_points_per_dim
    axes = np.meshgrid(*([np.arange(g) / g] * dims), indexing="ij")
    x = np.stack([a.ravel() for a in axes], axis=1)
    z = np.ones((total, stop), dtype=np.complex128)
    z[:, start - 1:] = np.exp(2j * np.pi * x)
    table = section_terms(oracle, stop, blocks=(block, block))
    values = bilinear_values(table, z, z).reshape((g,) * dims)
    dft = np.fft.fftn(values) / total

    signed = np.where(np.arange(g) <= g // 2, np.arange(g), np.arange(g) - g)
    worst = 0.0
    for flat in range(total):
        ks = np.unravel_index(flat, (g,) * dims)
        freq = MultiIndex(tuple((start + j, int(signed[k])) for j, k in enumerate(ks)))
        worst = max(worst, abs(dft[ks] - fourier_coefficient(oracle, freq)))
    return float(worst)


# ---------------------------------------------------------------------------
# Divergence ledger


@dataclass(frozen=True)
class LedgerRow:
    block: int
    block_mass: float
    cumulative: float
    closed_form: Optional[float]
    enumerated: Optional[float]

    @property
    def agrees(self) -> bool:
        if self.closed_form is None or self.enumerated is None:
            return True
        scale = max(abs(self.closed_form), 1e-300)
        return abs(self.enumerated - self.closed_form) <= LEDGER_RTOL * scale


@dataclass(frozen=True)
class DivergenceLedger:
    """Per-block coefficient mass ``sum |F^|`` and its running total."""

    rows: tuple[LedgerRow, ...]
    sup_bound: Optional[float]
    oracle: dict

    @property
    def total(self) -> float:
        return self.rows[-1].cumulative if self.rows else 0.0

    @property
    def consistent(self) -> bool:
        return all(r.agrees for r in self.rows)

    def first_exceeding(self, threshold: float) -> Optional[int]:
        for row in self.rows:
            if row.cumulative > threshold:
                return row.block
        return None


def divergence_ledger(
    oracle: CoefficientOracle, blocks_max: int, enumeration_guard: int = DEFAULT_ENUMERATION_GUARD
) -> DivergenceLedger:
    """Coefficient mass per block, closed form cross-checked by enumeration.

    Blocks whose dimension exceeds ``enumeration_guard`` carry the closed form
    only (``enumerated is None``). Blocks beyond the configured layout are
    closed-form only as well, so long ledgers stay cheap.
    """
    if blocks_max < 0:
        raise ValueError("blocks_max must be nonnegative")
    if oracle.family is Family.CUSTOM and blocks_max > oracle.n_blocks:
        raise ValueError(f"custom oracle defines {oracle.n_blocks} blocks")
    extended = _extend(oracle, blocks_max)
    rows = []
    running = []
    for b in range(1, blocks_max + 1):
        closed = extended.block_mass_closed_form(b)
        enumerated = None
        if extended.layout.block_sizes[b - 1] <= enumeration_guard:
            freqs = block_frequencies(extended, b, enumeration_guard)
            enumerated = math.fsum(np.abs(freqs.values).tolist())
        mass = closed if closed is not None else enumerated
        running.append(mass)
        rows.append(LedgerRow(b, mass, math.fsum(running), closed, enumerated))
    return DivergenceLedger(tuple(rows), extended.sup_bound, oracle.describe())


def _extend(oracle: CoefficientOracle, blocks: int) -> CoefficientOracle:
    if blocks <= oracle.n_blocks or oracle.family is Family.CUSTOM:
        return oracle
    if oracle.family is Family.TOEPLITZ_COMPOSITE:
        return CoefficientOracle.toeplitz_composite(blocks, oracle.weights)
    if oracle.family is Family.LITTLEWOOD_COMPOSITE:
        return CoefficientOracle.littlewood_composite(oracle.n_base, blocks, oracle.weights)
    raise ValueError(f"{oracle.family.value} has a single block")
