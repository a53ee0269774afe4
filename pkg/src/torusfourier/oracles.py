"""Storage-free coefficient oracles for Toeplitz and Littlewood quadratic forms.

Toeplitz's matrices are the Kronecker powers of

    C_1 = [[-1, 1, 1, 1],
           [ 1,-1, 1, 1],
           [ 1, 1,-1, 1],
           [ 1, 1, 1,-1]]

so entry ``(m, n)`` of ``C_alpha`` is ``(-1) ** k`` where ``k`` counts the
base-4 digit positions at which ``m - 1`` and ``n - 1`` agree. Littlewood's
``M_mu`` are the Kronecker powers of ``W = (exp(2*pi*i*r*s/N))``, ``r, s = 1..N``;
their entries are kept as integer exponents ``k`` meaning ``exp(2*pi*i*k/N)``.

All public indices are 1-based.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

DEFAULT_MAX_DIM = 4096


# ---------------------------------------------------------------------------
# Single blocks


@dataclass(frozen=True)
class ToeplitzSpec:
    """Toeplitz's recursive sign matrix ``C_alpha`` of size ``4**alpha``."""

    alpha: int

    def __post_init__(self):
        if int(self.alpha) != self.alpha or self.alpha < 1:
            raise ValueError(f"alpha must be a positive integer, got {self.alpha!r}")

    @property
    def dimension(self) -> int:
        return 4 ** self.alpha

    @property
    def bound(self) -> float:
        """Maximum modulus of the form on the closed polydisc, ``8**alpha``."""
        return float(8 ** self.alpha)


@dataclass(frozen=True)
class LittlewoodSpec:
    """Littlewood's root-of-unity matrix ``M_mu`` of size ``N**mu``."""

    n_base: int
    mu: int

    def __post_init__(self):
        if int(self.n_base) != self.n_base or self.n_base <= 2:
            raise ValueError(f"n_base must be an integer > 2, got {self.n_base!r}")
        if int(self.mu) != self.mu or self.mu < 1:
            raise ValueError(f"mu must be a positive integer, got {self.mu!r}")

    @property
    def dimension(self) -> int:
        return self.n_base ** self.mu

    @property
    def bound(self) -> float:
        """Polydisc bound ``N**(3*mu/2)`` (from the unitarity of ``N**(-mu/2) M_mu``)."""
        return float(self.n_base) ** (1.5 * self.mu)


def _check_index(name: str, value: int, dimension: int) -> None:
    if not 1 <= value <= dimension:
        raise IndexError(f"{name}={value} outside 1..{dimension}")


def toeplitz_entry(spec: ToeplitzSpec, m: int, n: int) -> int:
    """Entry ``(m, n)`` of ``C_alpha``, exactly ``+1`` or ``-1``."""
    _check_index("m", m, spec.dimension)
    _check_index("n", n, spec.dimension)
    a, b = m - 1, n - 1
    sign = 1
    for _ in range(spec.alpha):
        if a % 4 == b % 4:
            sign = -sign
        a //= 4
        b //= 4
    return sign


def littlewood_exponent(spec: LittlewoodSpec, m: int, n: int) -> int:
    """Exponent ``k`` with ``M_mu[m, n] = exp(2*pi*i*k/N)``."""
    _check_index("m", m, spec.dimension)
    _check_index("n", n, spec.dimension)
    big_n = spec.n_base
    a, b = m - 1, n - 1
    total = 0
    for _ in range(spec.mu):
        total += (a % big_n + 1) * (b % big_n + 1)
        a //= big_n
        b //= big_n
    return total % big_n


def toeplitz_signs(alpha: int, m, n) -> np.ndarray:
    """Vectorized :func:`toeplitz_entry` over broadcastable 1-based index arrays."""
    a = np.asarray(m, dtype=np.int64) - 1
    b = np.asarray(n, dtype=np.int64) - 1
    a, b = np.broadcast_arrays(a, b)
    matches = np.zeros(a.shape, dtype=np.int64)
    a, b = a.copy(), b.copy()
    for _ in range(alpha):
        matches += (a % 4) == (b % 4)
        a //= 4
        b //= 4
    return np.where(matches % 2 == 1, -1, 1).astype(np.int64)


def littlewood_exponents(n_base: int, mu: int, m, n) -> np.ndarray:
    """Vectorized :func:`littlewood_exponent`."""
    a = np.asarray(m, dtype=np.int64) - 1
    b = np.asarray(n, dtype=np.int64) - 1
    a, b = np.broadcast_arrays(a, b)
    a, b = a.copy(), b.copy()
    total = np.zeros(a.shape, dtype=np.int64)
    for _ in range(mu):
        total += (a % n_base + 1) * (b % n_base + 1)
        a //= n_base
        b //= n_base
    return total % n_base


def _guard(dimension: int, max_dim: int) -> None:
    if dimension > max_dim:
        raise MemoryError(f"dimension {dimension} exceeds the materialization guard {max_dim}")


def toeplitz_matrix(spec: ToeplitzSpec, max_dim: int = DEFAULT_MAX_DIM) -> np.ndarray:
    """Dense ``C_alpha`` from the digit oracle (int64)."""
    _guard(spec.dimension, max_dim)
    idx = np.arange(1, spec.dimension + 1)
    return toeplitz_signs(spec.alpha, idx[:, None], idx[None, :])


def littlewood_matrix_exponents(spec: LittlewoodSpec, max_dim: int = DEFAULT_MAX_DIM) -> np.ndarray:
    """Dense exponent table of ``M_mu`` from the digit oracle (int64)."""
    _guard(spec.dimension, max_dim)
    idx = np.arange(1, spec.dimension + 1)
    return littlewood_exponents(spec.n_base, spec.mu, idx[:, None], idx[None, :])


def toeplitz_recursive(alpha: int, max_dim: int = DEFAULT_MAX_DIM) -> np.ndarray:
    """``C_alpha`` built by the block recursion: block ``(i, j)`` of ``C_{a+1}`` is ``C_1[i, j] * C_a``.

    Independent of the digit oracle; used for export and cross-checking.
    """
    _guard(4 ** alpha, max_dim)
    base = np.ones((4, 4), dtype=np.int64) - 2 * np.eye(4, dtype=np.int64)
    mat = base
    for _ in range(alpha - 1):
        mat = np.block([[base[i, j] * mat for j in range(4)] for i in range(4)])
    return mat


def littlewood_recursive(n_base: int, mu: int, max_dim: int = DEFAULT_MAX_DIM) -> np.ndarray:
    """Exponent table of ``M_mu`` by the block recursion ``M_mu = (w**(rs) * M_{mu-1})``."""
    _guard(n_base ** mu, max_dim)
    rs = np.arange(1, n_base + 1)
    base = np.outer(rs, rs) % n_base
    mat = base
    for _ in range(mu - 1):
        mat = np.block([[(base[i, j] + mat) % n_base for j in range(n_base)] for i in range(n_base)])
    return mat


# ---------------------------------------------------------------------------
# Exact unitarity


@functools.lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Integer coefficients of the ``n``-th cyclotomic polynomial, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _exact_div(poly, list(cyclotomic(d)))
    return tuple(poly)


def _exact_div(num: list[int], den: list[int]) -> list[int]:
    # den is monic; coefficients lowest degree first
    num = list(num)
    quot = [0] * (len(num) - len(den) + 1)
    for k in range(len(quot) - 1, -1, -1):
        coef = num[k + len(den) - 1]
        quot[k] = coef
        for j, dj in enumerate(den):
            num[k + j] -= coef * dj
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return quot


def _power_residues(n: int) -> np.ndarray:
    """Row ``k`` holds the coefficients of ``x**k mod Phi_n(x)`` for ``k < n``."""
    phi = cyclotomic(n)
    deg = len(phi) - 1
    table = np.zeros((n, deg), dtype=np.int64)
    current = [1] + [0] * (deg - 1)
    for k in range(n):
        table[k] = current
        # multiply by x, then reduce the overflowing x**deg term
        top = current[-1]
        current = [0] + current[:-1]
        current = [c - top * p for c, p in zip(current, phi[:-1])]
    return table


@dataclass(frozen=True)
class UnitarityReport:
    is_unitary: bool
    max_deviation: int
    dimension: int
    scale: int
    witness: Optional[tuple[int, int]] = None

    def as_dict(self) -> dict:
        return {
            "is_unitary": self.is_unitary,
            "max_deviation": self.max_deviation,
            "dimension": self.dimension,
            "scale": self.scale,
            "witness": list(self.witness) if self.witness else None,
        }


def verify_unitary_exact(spec: Union[ToeplitzSpec, LittlewoodSpec], max_dim: int = DEFAULT_MAX_DIM) -> UnitarityReport:
    """Check ``A A* = dim * I`` for ``C_alpha`` or ``M_mu`` in integer arithmetic.

    For Littlewood matrices each inner product is a polynomial in ``w = exp(2*pi*i/N)``
    with the exponent histogram as coefficients; it equals ``dim * delta_rs`` iff the
    difference vanishes modulo the ``N``-th cyclotomic polynomial. ``max_deviation``
    is the largest residual coefficient (0 means exactly unitary up to scale).
    """
    _guard(spec.dimension, max_dim)
    dim = spec.dimension
    if isinstance(spec, ToeplitzSpec):
        mat = toeplitz_matrix(spec, max_dim)
        resid = mat @ mat.T - dim * np.eye(dim, dtype=np.int64)
        absres = np.abs(resid)
        worst = int(absres.max())
        witness = None
        if worst:
            r, s = np.unravel_index(int(np.argmax(absres)), absres.shape)
            witness = (int(r) + 1, int(s) + 1)
        return UnitarityReport(worst == 0, worst, dim, dim, witness)

    big_n = spec.n_base
    exps = littlewood_matrix_exponents(spec, max_dim)
    residues = _power_residues(big_n)
    offsets = (np.arange(dim, dtype=np.int64) * big_n)[:, None]
    worst = 0
    witness = None
    for r in range(dim):
        diff = (exps[r][None, :] - exps) % big_n
        hist = np.bincount((offsets + diff).ravel(), minlength=dim * big_n).reshape(dim, big_n)
        hist[r, 0] -= dim
        resid = np.abs(hist @ residues)
        row_worst = int(resid.max())
        if row_worst > worst:
            worst = row_worst
            s = int(np.argmax(resid.max(axis=1)))
            witness = (r + 1, s + 1)
    return UnitarityReport(worst == 0, worst, dim, dim, witness)


# ---------------------------------------------------------------------------
# Weights and layouts


class WeightKind(str, enum.Enum):
    INVERSE_SQUARE = "inverse_square"
    GEOMETRIC = "geometric"
    LITTLEWOOD_FIXED = "littlewood_fixed"
    CUSTOM = "custom"


@dataclass(frozen=True)
class WeightSequence:
    """Block weights indexed from 1.

    ``inverse_square`` is ``1/a**2``, ``geometric`` is ``2**-a``, and
    ``littlewood_fixed`` is ``N**(-3*mu/2) / mu**2``. Custom weights are a
    finite tuple; ``summable`` records the caller's claim that the infinite
    continuation has a finite sum.
    """

    kind: WeightKind
    values: tuple[float, ...] = ()
    n_base: Optional[int] = None
    summable: bool = True

    def __post_init__(self):
        if self.kind is WeightKind.CUSTOM:
            if not self.values:
                raise ValueError("custom weights need at least one value")
            if any(not math.isfinite(v) or v < 0 for v in self.values):
                raise ValueError("custom weights must be finite and nonnegative")
        if self.kind is WeightKind.LITTLEWOOD_FIXED and (self.n_base is None or self.n_base <= 2):
            raise ValueError("littlewood_fixed weights need n_base > 2")

    @classmethod
    def inverse_square(cls) -> "WeightSequence":
        return cls(WeightKind.INVERSE_SQUARE)

    @classmethod
    def geometric(cls) -> "WeightSequence":
        return cls(WeightKind.GEOMETRIC)

    @classmethod
    def littlewood(cls, n_base: int) -> "WeightSequence":
        return cls(WeightKind.LITTLEWOOD_FIXED, n_base=n_base)

    @classmethod
    def custom(cls, values: Sequence[float], summable: bool = True) -> "WeightSequence":
        return cls(WeightKind.CUSTOM, tuple(float(v) for v in values), summable=summable)

    @classmethod
    def from_name(cls, name: str, n_base: Optional[int] = None) -> "WeightSequence":
        kind = WeightKind(name)
        if kind is WeightKind.LITTLEWOOD_FIXED:
            return cls.littlewood(n_base)
        if kind is WeightKind.CUSTOM:
            raise ValueError("custom weights must be given as explicit values")
        return cls(kind)

    @property
    def length(self) -> Optional[int]:
        return len(self.values) if self.kind is WeightKind.CUSTOM else None

    def __call__(self, index: int) -> float:
        if index < 1:
            raise IndexError("weights are indexed from 1")
        if self.kind is WeightKind.INVERSE_SQUARE:
            return 1.0 / index ** 2
        if self.kind is WeightKind.GEOMETRIC:
            return 2.0 ** -index
        if self.kind is WeightKind.LITTLEWOOD_FIXED:
            return float(self.n_base) ** (-1.5 * index) / index ** 2
        if index > len(self.values):
            raise IndexError(f"custom weights define {len(self.values)} blocks, asked for {index}")
        return self.values[index - 1]

    def partial_sum(self, count: int) -> float:
        return math.fsum(self(k) for k in range(1, count + 1))

    def total(self) -> float:
        """Sum over all indices (closed form where one exists)."""
        if self.kind is WeightKind.INVERSE_SQUARE:
            return math.pi ** 2 / 6
        if self.kind is WeightKind.GEOMETRIC:
            return 1.0
        if self.kind is WeightKind.LITTLEWOOD_FIXED:
            # dilogarithm at N**-1.5; terms fall geometrically
            return math.fsum(self(k) for k in range(1, 200))
        return math.fsum(self.values) if self.summable else math.inf


@dataclass(frozen=True)
class BlockLayout:
    """Consecutive variable blocks; ``offsets[a - 1]`` variables precede block ``a``."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.block_sizes or any(int(s) != s or s < 1 for s in self.block_sizes):
            raise ValueError(f"block sizes must be positive integers, got {self.block_sizes!r}")

    @functools.cached_property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for size in self.block_sizes:
            out.append(out[-1] + size)
        return tuple(out)

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def total(self) -> int:
        return self.offsets[-1]

    def block_of(self, m: int) -> Optional[int]:
        """1-based block containing variable ``m``, or ``None`` beyond the layout."""
        if m < 1 or m > self.total:
            return None
        import bisect

        return bisect.bisect_left(self.offsets, m)

    def block_span(self, block: int) -> tuple[int, int]:
        """Inclusive 1-based variable range of ``block``."""
        if not 1 <= block <= self.n_blocks:
            raise IndexError(f"block {block} outside 1..{self.n_blocks}")
        return self.offsets[block - 1] + 1, self.offsets[block]

    def block_index_after(self, m_limit: int) -> int:
        """Number of blocks lying entirely inside ``1..m_limit``."""
        return sum(1 for o in self.offsets[1:] if o <= m_limit)


# ---------------------------------------------------------------------------
# Composite oracles


class Family(str, enum.Enum):
    TOEPLITZ_COMPOSITE = "toeplitz_composite"
    LITTLEWOOD_COMPOSITE = "littlewood_composite"
    SINGLE_TOEPLITZ_BLOCK = "single_toeplitz_block"
    SINGLE_LITTLEWOOD_BLOCK = "single_littlewood_block"
    CUSTOM = "custom"


class CoefficientStatus(str, enum.Enum):
    IN_BLOCK = "in_block"
    CROSS_BLOCK = "cross_block"
    TRUNCATED = "truncated"


class DenseMatrix:
    """Hashable wrapper so a user matrix can back a custom oracle."""

    def __init__(self, matrix):
        self.matrix = np.array(matrix, dtype=np.complex128)
        self.matrix.setflags(write=False)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError("custom matrix must be square")

    def __call__(self, m: int, n: int) -> complex:
        return complex(self.matrix[m - 1, n - 1])

    def __repr__(self):
        return f"DenseMatrix(shape={self.matrix.shape})"


@dataclass(frozen=True)
class CoefficientOracle:
    """Pure map ``(m, n) -> a_mn`` for a block-diagonal quadratic form.

    Build with the classmethod constructors. Entries are computed on demand;
    dense per-block matrices are produced only through :meth:`block_matrix`
    under a dimension guard.
    """

    family: Family
    layout: BlockLayout
    weights: Optional[WeightSequence] = None
    alpha_max: Optional[int] = None
    n_base: Optional[int] = None
    mu_max: Optional[int] = None
    scale: float = 1.0
    func: Optional[Callable[[int, int], complex]] = field(default=None, compare=True)
    bound: Optional[float] = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def toeplitz_composite(cls, alpha_max: int, weights: Optional[WeightSequence] = None) -> "CoefficientOracle":
        weights = weights or WeightSequence.inverse_square()
        if alpha_max < 1:
            raise ValueError("alpha_max must be >= 1")
        if weights.length is not None and weights.length < alpha_max:
            raise ValueError(f"custom weights cover {weights.length} blocks, need {alpha_max}")
        return cls(
            Family.TOEPLITZ_COMPOSITE,
            BlockLayout(tuple(4 ** a for a in range(1, alpha_max + 1))),
            weights=weights,
            alpha_max=alpha_max,
        )

    @classmethod
    def littlewood_composite(cls, n_base: int, mu_max: int, weights: Optional[WeightSequence] = None) -> "CoefficientOracle":
        LittlewoodSpec(n_base, 1)
        if mu_max < 1:
            raise ValueError("mu_max must be >= 1")
        weights = weights or WeightSequence.littlewood(n_base)
        if weights.length is not None and weights.length < mu_max:
            raise ValueError(f"custom weights cover {weights.length} blocks, need {mu_max}")
        return cls(
            Family.LITTLEWOOD_COMPOSITE,
            BlockLayout(tuple(n_base ** k for k in range(1, mu_max + 1))),
            weights=weights,
            n_base=n_base,
            mu_max=mu_max,
        )

    @classmethod
    def single_toeplitz_block(cls, alpha: int, scale: float = 1.0) -> "CoefficientOracle":
        spec = ToeplitzSpec(alpha)
        return cls(Family.SINGLE_TOEPLITZ_BLOCK, BlockLayout((spec.dimension,)), alpha_max=alpha, scale=scale)

    @classmethod
    def single_littlewood_block(cls, n_base: int, mu: int, scale: float = 1.0) -> "CoefficientOracle":
        spec = LittlewoodSpec(n_base, mu)
        return cls(
            Family.SINGLE_LITTLEWOOD_BLOCK,
            BlockLayout((spec.dimension,)),
            n_base=n_base,
            mu_max=mu,
            scale=scale,
        )

    @classmethod
    def custom(
        cls,
        func: Union[Callable[[int, int], complex], np.ndarray],
        block_sizes: Optional[Sequence[int]] = None,
        bound: Optional[float] = None,
    ) -> "CoefficientOracle":
        """Wrap a user coefficient function or square matrix.

        ``func`` receives global 1-based indices of two variables in the same
        block; cross-block coefficients are zero. ``bound`` is the claimed
        analytic sup of the form on the polydisc, if any.
        """
        if not callable(func):
            func = DenseMatrix(func)
        if block_sizes is None:
            if not isinstance(func, DenseMatrix):
                raise ValueError("block_sizes is required for a callable custom oracle")
            block_sizes = (func.matrix.shape[0],)
        return cls(Family.CUSTOM, BlockLayout(tuple(block_sizes)), func=func, bound=bound)

    @classmethod
    def zero(cls, block_sizes: Sequence[int] = (4,)) -> "CoefficientOracle":
        return cls.custom(_zero_coefficient, block_sizes, bound=0.0)

    # -- block metadata ----------------------------------------------------

    @property
    def n_blocks(self) -> int:
        return self.layout.n_blocks

    @property
    def is_toeplitz(self) -> bool:
        return self.family in (Family.TOEPLITZ_COMPOSITE, Family.SINGLE_TOEPLITZ_BLOCK)

    @property
    def is_littlewood(self) -> bool:
        return self.family in (Family.LITTLEWOOD_COMPOSITE, Family.SINGLE_LITTLEWOOD_BLOCK)

    def block_level(self, block: int) -> int:
        """Recursion depth of the matrix occupying ``block``."""
        if self.family in (Family.SINGLE_TOEPLITZ_BLOCK, Family.SINGLE_LITTLEWOOD_BLOCK):
            return self.alpha_max if self.is_toeplitz else self.mu_max
        return block

    def block_scale(self, block: int) -> float:
        """Multiplier applied to the raw ``+-1`` / root-of-unity entries of ``block``."""
        if self.family is Family.TOEPLITZ_COMPOSITE:
            return self.weights(block) / 8.0 ** block
        if self.family is Family.LITTLEWOOD_COMPOSITE:
            return self.weights(block)
        if self.family is Family.CUSTOM:
            return 1.0
        return self.scale

    def block_bound(self, block: int) -> Optional[float]:
        """Analytic sup of the block's form on the polydisc, ``None`` if unknown."""
        if self.family is Family.TOEPLITZ_COMPOSITE:
            return self.weights(block)
        if self.family is Family.LITTLEWOOD_COMPOSITE:
            if self.weights.kind is WeightKind.LITTLEWOOD_FIXED:
                return 1.0 / block ** 2
            return self.weights(block) * LittlewoodSpec(self.n_base, block).bound
        if self.family is Family.SINGLE_TOEPLITZ_BLOCK:
            return abs(self.scale) * ToeplitzSpec(self.alpha_max).bound
        if self.family is Family.SINGLE_LITTLEWOOD_BLOCK:
            return abs(self.scale) * LittlewoodSpec(self.n_base, self.mu_max).bound
        return None

    def section_bound(self, blocks: Optional[int] = None) -> Optional[float]:
        """Analytic bound for the form restricted to the first ``blocks`` blocks."""
        if self.family is Family.CUSTOM:
            return self.bound
        blocks = self.n_blocks if blocks is None else blocks
        return math.fsum(self.block_bound(b) for b in range(1, blocks + 1))

    @property
    def certified_bound(self) -> Optional[float]:
        return self.section_bound()

    @property
    def sup_bound(self) -> Optional[float]:
        """Bound for the infinite form (all blocks, not just the configured ones)."""
        if self.family is Family.TOEPLITZ_COMPOSITE:
            return self.weights.total()
        if self.family is Family.LITTLEWOOD_COMPOSITE and self.weights.kind is WeightKind.LITTLEWOOD_FIXED:
            return math.pi ** 2 / 6
        return self.certified_bound

    def block_mass_closed_form(self, block: int) -> Optional[float]:
        """Closed-form sum of ``|a_mn|`` over block ``block``.

        Toeplitz: ``2**a * mu_a``. Littlewood with the fixed weights:
        ``N**(mu/2) / mu**2``.
        """
        if self.family is Family.TOEPLITZ_COMPOSITE:
            return 2.0 ** block * self.weights(block)
        if self.family is Family.LITTLEWOOD_COMPOSITE:
            if self.weights.kind is WeightKind.LITTLEWOOD_FIXED:
                return float(self.n_base) ** (block / 2) / block ** 2
            return self.weights(block) * float(self.n_base) ** (2 * block)
        if self.family in (Family.SINGLE_TOEPLITZ_BLOCK, Family.SINGLE_LITTLEWOOD_BLOCK):
            size = self.layout.block_sizes[0]
            return abs(self.scale) * size * size
        return None

    def describe(self) -> dict:
        out = {"family": self.family.value, "blocks": list(self.layout.block_sizes)}
        if self.weights is not None:
            out["weights"] = self.weights.kind.value
            if self.weights.kind is WeightKind.CUSTOM:
                out["weight_values"] = list(self.weights.values)
        for key in ("alpha_max", "n_base", "mu_max"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.family in (Family.SINGLE_TOEPLITZ_BLOCK, Family.SINGLE_LITTLEWOOD_BLOCK):
            out["scale"] = self.scale
        return out

    # -- entries -----------------------------------------------------------

    def status(self, m: int, n: int) -> CoefficientStatus:
        if m < 1 or n < 1:
            raise IndexError(f"indices are 1-based, got ({m}, {n})")
        bm = self.layout.block_of(m)
        bn = self.layout.block_of(n)
        if bm is None or bn is None:
            return CoefficientStatus.TRUNCATED
        return CoefficientStatus.IN_BLOCK if bm == bn else CoefficientStatus.CROSS_BLOCK

    def coefficient(self, m: int, n: int) -> complex:
        if self.status(m, n) is not CoefficientStatus.IN_BLOCK:
            return 0j
        block = self.layout.block_of(m)
        if self.family is Family.CUSTOM:
            return complex(self.func(m, n))
        offset = self.layout.offsets[block - 1]
        level = self.block_level(block)
        lm, ln = m - offset, n - offset
        scale = self.block_scale(block)
        if self.is_toeplitz:
            return complex(scale * toeplitz_entry(ToeplitzSpec(level), lm, ln))
        k = littlewood_exponent(LittlewoodSpec(self.n_base, level), lm, ln)
        return scale * _root_of_unity(k, self.n_base)

    def block_exponents(self, block: int, max_dim: int = DEFAULT_MAX_DIM) -> Optional[np.ndarray]:
        """Raw integer entries of ``block``: signs for Toeplitz, exponents for Littlewood."""
        size = self.layout.block_sizes[block - 1]
        _guard(size, max_dim)
        level = self.block_level(block)
        idx = np.arange(1, size + 1)
        if self.is_toeplitz:
            return toeplitz_signs(level, idx[:, None], idx[None, :])
        if self.is_littlewood:
            return littlewood_exponents(self.n_base, level, idx[:, None], idx[None, :])
        return None

    def block_matrix(self, block: int, max_dim: int = DEFAULT_MAX_DIM) -> np.ndarray:
        """Dense complex coefficient matrix of ``block`` (block-local indexing)."""
        size = self.layout.block_sizes[block - 1]
        _guard(size, max_dim)
        return _block_matrix_cached(self, block, max_dim)


def _zero_coefficient(m: int, n: int) -> complex:
    return 0j


def _root_of_unity(k: int, n: int) -> complex:
    # exact for the quarter turns, which keeps N=4 coefficients free of cos/sin residue
    quarter = {0: 1 + 0j, 1: 1j, 2: -1 + 0j, 3: -1j}
    if (4 * k) % n == 0:
        return quarter[(4 * k // n) % 4]
    angle = 2.0 * math.pi * k / n
    return complex(math.cos(angle), math.sin(angle))


def roots_of_unity(exponents: np.ndarray, n: int) -> np.ndarray:
    table = np.array([_root_of_unity(k, n) for k in range(n)])
    return table[exponents]


@functools.lru_cache(maxsize=64)
def _block_matrix_cached(oracle: CoefficientOracle, block: int, max_dim: int) -> np.ndarray:
    size = oracle.layout.block_sizes[block - 1]
    scale = oracle.block_scale(block)
    if oracle.family is Family.CUSTOM:
        if isinstance(oracle.func, DenseMatrix):
            start, stop = oracle.layout.block_span(block)
            out = oracle.func.matrix[start - 1:stop, start - 1:stop].copy()
        else:
            start = oracle.layout.offsets[block - 1]
            out = np.array(
                [[complex(oracle.func(start + i, start + j)) for j in range(1, size + 1)] for i in range(1, size + 1)],
                dtype=np.complex128,
            )
    elif oracle.is_toeplitz:
        out = scale * oracle.block_exponents(block, max_dim).astype(np.complex128)
    else:
        out = scale * roots_of_unity(oracle.block_exponents(block, max_dim), oracle.n_base)
    out.setflags(write=False)
    return out


def composite_coefficient(oracle: CoefficientOracle, m: int, n: int) -> complex:
    """Coefficient ``a_mn`` of the composite form; 0 across blocks or beyond the layout."""
    return oracle.coefficient(m, n)
