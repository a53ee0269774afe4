"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a mathematical check is
falsified (the report carries the witness), 2 for usage or configuration
errors. Settings resolve as CLI flags > ``--config`` JSON file > defaults,
and the effective configuration is embedded in every output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__, export
from .double_series import (
    DEFAULT_EPSILONS,
    diagnose_ladder,
    form_terms,
    geometric_terms,
    harmonic_row_terms,
    oscillating_terms,
    unit_term,
)
from .fourier import (
    DEFAULT_ENUMERATION_GUARD,
    LEDGER_RTOL,
    QUADRATURE_TOL,
    MultiIndex,
    divergence_ledger,
    fourier_coefficient,
    frequency_enumerator,
    quadrature_check,
)
from .oracles import (
    DEFAULT_MAX_DIM,
    CoefficientOracle,
    LittlewoodSpec,
    ToeplitzSpec,
    WeightSequence,
    littlewood_recursive,
    toeplitz_recursive,
    verify_unitary_exact,
)
from .polydisc import (
    BOUND_SLACK,
    GRADIENT_RTOL,
    PhaseCoordinateAscent,
    RandomSampling,
    bound_search,
    gradient_check,
)

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_USAGE = 2

TOLERANCE_KEYS = {
    "bound_slack": BOUND_SLACK,
    "gradient_rtol": GRADIENT_RTOL,
    "quadrature_tol": QUADRATURE_TOL,
    "ledger_rtol": LEDGER_RTOL,
}

SERIES_TERMS = ("geometric", "oscillating", "harmonic-row", "unit", "form")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    family: str = "toeplitz"
    weights: Optional[str] = None
    weight_values: Optional[list] = None
    alpha: int = 1
    alpha_max: int = 3
    n_base: int = 3
    mu: int = 1
    mu_max: int = 3
    seed: int = 0
    tol: dict = field(default_factory=dict)
    out: Optional[str] = None
    format: Optional[str] = None
    max_dim: int = DEFAULT_MAX_DIM
    samples: int = 10_000
    restarts: int = 10
    sweeps: int = 200
    phase_grid: int = 720
    start: str = "ones"
    strategy: str = "ascent"
    form: str = "single"
    m_limit: Optional[int] = None
    blocks: int = 7
    freq: Optional[list] = None
    block: Optional[int] = None
    grid: int = 5
    terms: str = "geometric"
    corner: int = 64
    eps: Optional[list] = None
    triples: int = 100
    step: float = 1e-5
    matrix: Optional[str] = None
    bound: Optional[float] = None

    def validate(self) -> "RunConfig":
        if self.family not in ("toeplitz", "littlewood"):
            raise ConfigError(f"family must be 'toeplitz' or 'littlewood', got {self.family!r}")
        for name in ("alpha", "alpha_max", "mu", "mu_max", "samples", "restarts", "sweeps", "phase_grid", "triples"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name.replace('_', '-')} must be >= 1, got {getattr(self, name)}")
        if self.blocks < 0:
            raise ConfigError("blocks must be >= 0")
        if self.family == "littlewood" and self.n_base <= 2:
            raise ConfigError(f"littlewood requires n > 2, got n={self.n_base}")
        if self.weights is None:
            self.weights = "custom" if self.weight_values else ("littlewood_fixed" if self.family == "littlewood" else "inverse_square")
        if self.weights not in ("inverse_square", "geometric", "littlewood_fixed", "custom"):
            raise ConfigError(f"unknown weights {self.weights!r}")
        if self.weights == "littlewood_fixed" and self.family != "littlewood":
            raise ConfigError("littlewood_fixed weights apply to the littlewood family only")
        if self.weights == "custom":
            if not self.weight_values:
                raise ConfigError("custom weights need --weight-values")
            if any(float(v) <= 0 for v in self.weight_values):
                raise ConfigError("weights must be strictly positive")
        for key in self.tol:
            if key not in TOLERANCE_KEYS:
                raise ConfigError(f"unknown tolerance {key!r}; known: {', '.join(sorted(TOLERANCE_KEYS))}")
        if self.format not in (None, "csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.grid < 5:
            raise ConfigError("grid must be >= 5")
        if self.corner < 2:
            raise ConfigError("corner must be >= 2")
        if self.terms not in SERIES_TERMS:
            raise ConfigError(f"terms must be one of {', '.join(SERIES_TERMS)}")
        if self.start not in ("ones", "random"):
            raise ConfigError("start must be 'ones' or 'random'")
        return self

    def tolerance(self, key: str) -> float:
        return float(self.tol.get(key, TOLERANCE_KEYS[key]))

    def effective(self) -> dict:
        out = asdict(self)
        out.pop("out")
        return out

    # -- oracle factories ---------------------------------------------------

    def weight_sequence(self) -> WeightSequence:
        if self.weights == "custom":
            return WeightSequence.custom([float(v) for v in self.weight_values])
        return WeightSequence.from_name(self.weights, n_base=self.n_base)

    def composite(self, blocks: Optional[int] = None) -> CoefficientOracle:
        if self.family == "toeplitz":
            return CoefficientOracle.toeplitz_composite(blocks or self.alpha_max, self.weight_sequence())
        return CoefficientOracle.littlewood_composite(self.n_base, blocks or self.mu_max, self.weight_sequence())

    def single(self, level: Optional[int] = None) -> CoefficientOracle:
        if self.family == "toeplitz":
            return CoefficientOracle.single_toeplitz_block(level or self.alpha)
        return CoefficientOracle.single_littlewood_block(self.n_base, level or self.mu)


# ---------------------------------------------------------------------------
# Commands. Each returns (text, exit_code).


def cmd_gen_matrix(cfg: RunConfig):
    if cfg.family == "toeplitz":
        spec = ToeplitzSpec(cfg.alpha)
        params = {"alpha": cfg.alpha}
    else:
        spec = LittlewoodSpec(cfg.n_base, cfg.mu)
        params = {"n_base": cfg.n_base, "mu": cfg.mu}
    if spec.dimension > cfg.max_dim:
        raise ConfigError(f"dimension {spec.dimension} exceeds --max-dim {cfg.max_dim}")
    if cfg.family == "toeplitz":
        mat = toeplitz_recursive(cfg.alpha, cfg.max_dim)
    else:
        mat = littlewood_recursive(cfg.n_base, cfg.mu, cfg.max_dim)
    fmt = cfg.format or "csv"
    if fmt == "csv":
        text = export.matrix_csv(mat, cfg.effective())
    else:
        text = export.matrix_json(mat, cfg.family, params, cfg.effective())
    print(f"dimension={spec.dimension} sha256={export.checksum(text)}", file=sys.stderr)
    return text, EXIT_OK


def _bound_check(name, oracle, m_limit, cfg: RunConfig, attain: bool):
    slack = cfg.tolerance("bound_slack")
    rnd = bound_search(oracle, m_limit, RandomSampling(samples=cfg.samples, seed=cfg.seed))
    asc = bound_search(
        oracle,
        m_limit,
        PhaseCoordinateAscent(sweeps=cfg.sweeps, phase_grid=cfg.phase_grid, seed=cfg.seed, restarts=cfg.restarts, start=cfg.start),
    )
    bound = asc.certified_bound
    checks = []
    for label, res in (("random", rnd), ("ascent", asc)):
        exceeded = bound is not None and max(res.best_modulus, res.max_seen) > bound + slack
        entry = {
            "name": f"{name}:bound:{label}",
            "passed": not exceeded,
            "best_modulus": res.best_modulus,
            "max_seen": res.max_seen,
            "certified_bound": bound,
            "points_tested": res.points_tested,
        }
        if exceeded:
            entry["witness"] = res.as_dict()["argmax_prefix"]
        checks.append(entry)
    if attain and bound is not None:
        checks.append(
            {
                "name": f"{name}:bound:attained",
                "passed": abs(asc.best_modulus - bound) <= slack,
                "best_modulus": asc.best_modulus,
                "certified_bound": bound,
            }
        )
    return checks


def cmd_verify(cfg: RunConfig):
    checks = []
    cases = []
    if cfg.matrix:
        mat = export.load_matrix(cfg.matrix)
        oracle = CoefficientOracle.custom(mat, bound=cfg.bound)
        checks += _bound_check("custom", oracle, oracle.layout.total, cfg, attain=False)
        cases.append((oracle, oracle.layout.total))
    elif cfg.family == "toeplitz":
        for a in range(1, cfg.alpha_max + 1):
            rep = verify_unitary_exact(ToeplitzSpec(a), cfg.max_dim)
            checks.append({"name": f"toeplitz[{a}]:unitary", "passed": rep.is_unitary, **rep.as_dict()})
            single = CoefficientOracle.single_toeplitz_block(a)
            checks += _bound_check(f"toeplitz[{a}]", single, single.layout.total, cfg, attain=cfg.start == "ones")
            cases.append((single, single.layout.total))
    else:
        for mu in range(1, cfg.mu_max + 1):
            rep = verify_unitary_exact(LittlewoodSpec(cfg.n_base, mu), cfg.max_dim)
            checks.append({"name": f"littlewood[{cfg.n_base},{mu}]:unitary", "passed": rep.is_unitary, **rep.as_dict()})
            single = CoefficientOracle.single_littlewood_block(cfg.n_base, mu)
            checks += _bound_check(f"littlewood[{cfg.n_base},{mu}]", single, single.layout.total, cfg, attain=False)
            cases.append((single, single.layout.total))
    if not cfg.matrix:
        comp = cfg.composite()
        # all-ones co-attains every Toeplitz block maximum when the weights are positive
        checks += _bound_check("composite", comp, comp.layout.total, cfg, attain=cfg.family == "toeplitz" and cfg.start == "ones")
        cases.append((comp, comp.layout.total))
    grad = gradient_check(cases, triples=cfg.triples, seed=cfg.seed, step=cfg.step)
    gtol = cfg.tolerance("gradient_rtol")
    checks.append({"name": "gradient", **grad.as_dict(), "tolerance": gtol, "passed": grad.max_rel_error <= gtol})
    passed = all(c["passed"] for c in checks)
    text = export.dumps_json({"passed": passed, "checks": checks}, cfg.effective())
    return text, EXIT_OK if passed else EXIT_FALSIFIED


def cmd_bound_search(cfg: RunConfig):
    oracle = cfg.single() if cfg.form == "single" else cfg.composite()
    m_limit = cfg.m_limit or oracle.layout.total
    if cfg.strategy == "random":
        strat = RandomSampling(samples=cfg.samples, seed=cfg.seed)
    elif cfg.strategy == "ascent":
        strat = PhaseCoordinateAscent(sweeps=cfg.sweeps, phase_grid=cfg.phase_grid, seed=cfg.seed, restarts=cfg.restarts, start=cfg.start)
    else:
        raise ConfigError("strategy must be 'random' or 'ascent'")
    res = bound_search(oracle, m_limit, strat)
    exceeded = res.certified_bound is not None and max(res.best_modulus, res.max_seen) > res.certified_bound + cfg.tolerance("bound_slack")
    text = export.dumps_json(res.as_dict(), cfg.effective())
    return text, EXIT_FALSIFIED if exceeded else EXIT_OK


def cmd_divergence_table(cfg: RunConfig):
    oracle = cfg.composite(1)
    ledger = divergence_ledger(oracle, cfg.blocks, DEFAULT_ENUMERATION_GUARD)
    rtol = cfg.tolerance("ledger_rtol")
    consistent = all(
        r.closed_form is None or r.enumerated is None or abs(r.enumerated - r.closed_form) <= rtol * abs(r.closed_form)
        for r in ledger.rows
    )
    fmt = cfg.format or "csv"
    if fmt == "csv":
        text = export.dumps_csv(
            ["block", "block_mass", "cumulative", "sup_bound"],
            [(r.block, r.block_mass, r.cumulative, ledger.sup_bound) for r in ledger.rows],
            cfg.effective(),
        )
    else:
        payload = {
            "sup_bound": ledger.sup_bound,
            "consistent": consistent,
            "rows": [
                {"block": r.block, "block_mass": r.block_mass, "cumulative": r.cumulative, "closed_form": r.closed_form, "enumerated": r.enumerated}
                for r in ledger.rows
            ],
        }
        text = export.dumps_json(payload, cfg.effective())
    return text, EXIT_OK if consistent else EXIT_FALSIFIED


def cmd_fourier(cfg: RunConfig):
    if cfg.block is not None:
        blocks = max(cfg.block, 1)
        oracle = cfg.composite(max(blocks, cfg.alpha_max if cfg.family == "toeplitz" else cfg.mu_max))
        if not 1 <= cfg.block <= oracle.n_blocks:
            raise ConfigError(f"block must be >= 1, got {cfg.block}")
        return export.frequencies_jsonl(frequency_enumerator(oracle, cfg.block)), EXIT_OK
    if not cfg.freq:
        raise ConfigError("fourier needs --freq or --block")
    freqs = []
    for text in cfg.freq:
        try:
            freqs.append(MultiIndex.parse(text))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    needed = max((f.max_position for f in freqs), default=1)
    oracle = cfg.composite()
    while oracle.layout.total < needed:
        oracle = cfg.composite(oracle.n_blocks + 1)
    values = [fourier_coefficient(oracle, f) for f in freqs]
    if (cfg.format or "csv") == "csv":
        text = export.dumps_csv(["frequency", "re", "im"], [(str(f), v.real, v.imag) for f, v in zip(freqs, values)], cfg.effective())
    else:
        text = export.dumps_json(
            {"coefficients": [{"support": f.as_list(), "re": v.real, "im": v.imag} for f, v in zip(freqs, values)]},
            cfg.effective(),
        )
    return text, EXIT_OK


def cmd_quadrature(cfg: RunConfig):
    oracle = cfg.composite(1)
    dev = quadrature_check(oracle, cfg.grid)
    tol = cfg.tolerance("quadrature_tol")
    text = export.dumps_json({"max_deviation": dev, "tolerance": tol, "passed": dev <= tol, "grid": cfg.grid}, cfg.effective())
    return text, EXIT_OK if dev <= tol else EXIT_FALSIFIED


def cmd_series(cfg: RunConfig):
    epsilons = [float(e) for e in cfg.eps] if cfg.eps else list(DEFAULT_EPSILONS)
    extra = {}
    if cfg.terms == "form":
        oracle = cfg.composite()
        rng = np.random.default_rng(cfg.seed)
        x = rng.random(oracle.layout.total)
        terms = form_terms(oracle, np.exp(2j * np.pi * x))
        # the form has finitely many terms; scan far enough past them for a witness
        corner = max(cfg.corner, 2 * oracle.layout.total)
        extra["torus_point"] = x.tolist()
    else:
        terms = {
            "geometric": geometric_terms,
            "oscillating": oscillating_terms,
            "harmonic-row": harmonic_row_terms,
            "unit": unit_term,
        }[cfg.terms]()
        corner = cfg.corner
    diags = diagnose_ladder(terms, corner, epsilons)
    code = EXIT_OK
    if cfg.terms == "form":
        tails = []
        for k in range(oracle.n_blocks):
            mu = oracle.layout.offsets[k] + 1
            observed, analytic = diags[0].tail_sup(mu), terms.tail_bound(k)
            ok = observed <= analytic + cfg.tolerance("bound_slack")
            tails.append({"blocks_before": k, "mu": mu, "tail_sup": observed, "analytic_tail": analytic, "passed": ok})
            code = code if ok else EXIT_FALSIFIED
        extra["tail_checks"] = tails
    payload = {"terms": terms.label, "diagnoses": [d.as_dict() for d in diags], **extra}
    return export.dumps_json(payload, cfg.effective()), code


def cmd_gradient_check(cfg: RunConfig):
    if cfg.family == "toeplitz":
        cases = [(CoefficientOracle.single_toeplitz_block(a), 4 ** a) for a in range(1, cfg.alpha_max + 1)]
    else:
        cases = [(CoefficientOracle.single_littlewood_block(cfg.n_base, m), cfg.n_base ** m) for m in range(1, cfg.mu_max + 1)]
    comp = cfg.composite()
    cases.append((comp, comp.layout.total))
    rep = gradient_check(cases, triples=cfg.triples, seed=cfg.seed, step=cfg.step)
    tol = cfg.tolerance("gradient_rtol")
    passed = rep.max_rel_error <= tol
    text = export.dumps_json({**rep.as_dict(), "tolerance": tol, "passed": passed}, cfg.effective())
    return text, EXIT_OK if passed else EXIT_FALSIFIED


COMMANDS = {
    "gen-matrix": cmd_gen_matrix,
    "verify": cmd_verify,
    "bound-search": cmd_bound_search,
    "divergence-table": cmd_divergence_table,
    "fourier": cmd_fourier,
    "quadrature": cmd_quadrature,
    "series": cmd_series,
    "gradient-check": cmd_gradient_check,
}


# ---------------------------------------------------------------------------
# Argument parsing


def _tol_pair(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected KEY=VALUE")
    key, val = text.split("=", 1)
    return key.strip(), float(val)


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=S, help="JSON file with settings (overridden by flags)")
    common.add_argument("--family", choices=["toeplitz", "littlewood"], default=S)
    common.add_argument("--weights", choices=["inverse_square", "geometric", "littlewood_fixed", "custom"], default=S)
    common.add_argument("--weight-values", dest="weight_values", type=lambda s: [float(v) for v in s.split(",")], default=S)
    common.add_argument("--alpha", type=int, default=S)
    common.add_argument("--alpha-max", dest="alpha_max", type=int, default=S)
    common.add_argument("--n", dest="n_base", type=int, default=S)
    common.add_argument("--mu", type=int, default=S)
    common.add_argument("--mu-max", dest="mu_max", type=int, default=S)
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--tol", type=_tol_pair, action="append", default=S, metavar="KEY=VALUE")
    common.add_argument("--format", choices=["csv", "json"], default=S)
    common.add_argument("--out", default=S, metavar="PATH")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--samples", type=int, default=S)
    search.add_argument("--restarts", type=int, default=S)
    search.add_argument("--sweeps", type=int, default=S)
    search.add_argument("--phase-grid", dest="phase_grid", type=int, default=S)
    search.add_argument("--start", choices=["ones", "random"], default=S)
    search.add_argument("--triples", type=int, default=S)
    search.add_argument("--step", type=float, default=S)

    parser = argparse.ArgumentParser(prog="torusfourier", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-matrix", parents=[common], help="export C_alpha or the exponents of M_mu")
    p.add_argument("--max-dim", dest="max_dim", type=int, default=S)

    p = sub.add_parser("verify", parents=[common, search], help="unitarity, bound and gradient checks")
    p.add_argument("--max-dim", dest="max_dim", type=int, default=S)
    p.add_argument("--matrix", default=S, help="custom coefficient matrix (CSV or JSON)")
    p.add_argument("--bound", type=float, default=S, help="claimed polydisc bound for --matrix")

    p = sub.add_parser("bound-search", parents=[common, search], help="search for large |C_M(z)|")
    p.add_argument("--strategy", choices=["random", "ascent"], default=S)
    p.add_argument("--form", choices=["single", "composite"], default=S)
    p.add_argument("--m-limit", dest="m_limit", type=int, default=S)

    p = sub.add_parser("divergence-table", parents=[common], help="coefficient-mass ledger")
    p.add_argument("--blocks", type=int, default=S)

    p = sub.add_parser("fourier", parents=[common], help="Fourier coefficients by the trichotomy")
    p.add_argument("--freq", action="append", default=S, help="frequency such as e1+e2 or 2e3")
    p.add_argument("--block", type=int, default=S, help="emit every frequency of a block as JSON lines")

    p = sub.add_parser("quadrature", parents=[common], help="DFT cross-check on block 1")
    p.add_argument("--grid", type=int, default=S)

    p = sub.add_parser("series", parents=[common], help="double-series convergence diagnostics")
    p.add_argument("--terms", choices=list(SERIES_TERMS), default=S)
    p.add_argument("--corner", type=int, default=S)
    p.add_argument("--eps", type=float, action="append", default=S)

    sub.add_parser("gradient-check", parents=[common, search], help="analytic gradient vs central differences")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = vars(args).copy()
    command = values.pop("command")
    settings: dict = {}
    path = values.pop("config", None)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                settings.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if "tol" in values:
        values["tol"] = {**settings.get("tol", {}), **dict(values["tol"])}
    settings.update(values)
    known = set(RunConfig.__dataclass_fields__) - {"command"}
    unknown = set(settings) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return RunConfig(command=command, **settings).validate()


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        text, code = COMMANDS[cfg.command](cfg)
    except (ConfigError, MemoryError, ValueError, IndexError) as exc:
        print(f"torusfourier {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
