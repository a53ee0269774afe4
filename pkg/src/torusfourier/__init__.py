"""Bounded quadratic forms on the infinite torus whose Fourier series diverge absolutely."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .oracles import (
    CoefficientOracle,
    CoefficientStatus,
    BlockLayout,
    Family,
    LittlewoodSpec,
    ToeplitzSpec,
    UnitarityReport,
    WeightKind,
    WeightSequence,
    littlewood_exponent,
    littlewood_matrix_exponents,
    littlewood_recursive,
    toeplitz_entry,
    toeplitz_matrix,
    toeplitz_recursive,
    verify_unitary_exact,
)
from .polydisc import (
    BoundSearchResult,
    PhaseCoordinateAscent,
    PolydiscPoint,
    RandomSampling,
    SectionValue,
    Tail,
    analytic_gradient,
    bound_search,
    eval_bilinear_section,
    eval_quadratic_section,
    gradient_check,
    uniform_tail_bound,
)
from .fourier import (
    DivergenceLedger,
    LedgerRow,
    MultiIndex,
    divergence_ledger,
    fourier_coefficient,
    frequency_enumerator,
    quadrature_check,
)
from .double_series import (
    Classification,
    SeriesDiagnosis,
    TermOracle,
    absolute_diagnose,
    diagnose_ladder,
    form_terms,
    partial_sums,
    pringsheim_diagnose,
    regular_diagnose,
)

__all__ = [name for name in dir() if not name.startswith("_")]
