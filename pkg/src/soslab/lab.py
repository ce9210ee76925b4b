"""Experiment harness: deterministic grids, replicates, and CSV output.

Seeding: replicate ``rep`` of grid point ``gi`` uses
``mix_seed(base_seed, gi * replicates + rep)``; the threshold sweep, which
draws paired null/alternative instances per multiplier, uses
``mix_seed(base_seed, ((gi * n_mult + ci) * replicates + rep) * 2 + hyp)``.
Rerunning a config reproduces every CSV byte except the runtime_ms column.

Formatting: floats carry 17 significant digits, booleans are ``true`` /
``false``, exact rationals are written as ``p/q`` by the report writer, and
a failed cell keeps its row with the failure in the ``error`` column.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, replace

from .certificate import (
    BINARY_ONE,
    SIGN_POSITIVE,
    build_certificate,
    certificate_objective,
    expansivity_table,
    positivity_graph,
    verify_certificate,
)
from .errors import InvalidParams, SoslabError
from .estimators import (
    BRANCH_AND_BOUND,
    DEFAULT_MAX_SUBSETS,
    EXHAUSTIVE,
    avg_estimate,
    lp_estimate,
    max_estimate,
    scan_estimate,
)
from .models import GAUSSIAN, SBM, SUBMATRIX, ModelParams, Noise, generate
from .sdp import SolverOptions, solve
from .seeds import mix_seed
from .sos import assemble_basic, assemble_level

GAP = "gap"
CERTIFICATE = "certificate"
THRESHOLD = "threshold"

GAP_COLUMNS = [
    "model", "d", "s_star", "beta_star", "noise", "estimator", "level",
    "rep", "seed", "estimate", "abs_error", "runtime_ms", "error",
]
CERTIFICATE_COLUMNS = [
    "model", "d", "s_star", "ell", "rep", "seed", "eta_empty",
    "rowsum_violation_zero", "min_eig", "psd", "objective", "sdp_value",
    "runtime_ms", "error",
]
THRESHOLD_COLUMNS = [
    "d", "s_star", "c", "rep", "seed", "hypothesis", "scan_value", "reject",
    "runtime_ms", "error",
]
THRESHOLD_SUMMARY_COLUMNS = [
    "d", "s_star", "c", "replicates", "type_i_error", "type_ii_error", "summed_error",
]

KNOWN_ESTIMATORS = ("scan", "avg", "max", "lp", "sos_basic", "sos_level")


@dataclass(frozen=True)
class GridPoint:
    """One model cell of the experiment grid (the seed comes per replicate)."""

    model: str
    d: int
    s_star: int
    beta_star: float = 0.0
    noise: Noise | None = None
    beta_tilde: float | None = None
    ell: int | None = None

    def params(self, seed: int, beta_star: float | None = None) -> ModelParams:
        p = ModelParams(
            kind=self.model,
            d=self.d,
            s_star=self.s_star,
            beta_star=self.beta_star if beta_star is None else beta_star,
            noise=self.noise,
            beta_tilde=self.beta_tilde,
            seed=seed,
        )
        p.validate()
        return p

    def noise_label(self) -> str:
        if self.model == SBM:
            return f"beta_tilde:{fmt_float(self.beta_tilde)}"
        assert self.noise is not None
        return f"{self.noise.kind}:{fmt_float(self.noise.scale)}"

    @classmethod
    def from_dict(cls, doc: dict) -> "GridPoint":
        model = doc.get("model", SUBMATRIX)
        noise = None
        if model == SUBMATRIX:
            noise = Noise.from_dict(doc.get("noise", {"kind": GAUSSIAN, "sigma": 1.0}))
        return cls(
            model=model,
            d=int(doc["d"]),
            s_star=int(doc["s_star"]),
            beta_star=float(doc.get("beta_star", 0.0)),
            noise=noise,
            beta_tilde=float(doc["beta_tilde"]) if "beta_tilde" in doc else None,
            ell=int(doc["ell"]) if "ell" in doc else None,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    grid: tuple[GridPoint, ...]
    replicates: int
    base_seed: int
    output: str
    estimators: tuple[str, ...] = ()
    multipliers: tuple[float, ...] = ()
    solver: SolverOptions = field(default_factory=SolverOptions)
    solve_sdp: bool = False
    scan_strategy: str = BRANCH_AND_BOUND
    max_subsets: int = DEFAULT_MAX_SUBSETS

    def validate(self) -> None:
        if self.experiment not in (GAP, CERTIFICATE, THRESHOLD):
            raise InvalidParams(f"unknown experiment {self.experiment!r}")
        if self.replicates < 1:
            raise InvalidParams("replicates must be >= 1")
        if not self.grid:
            raise InvalidParams("grid must be non-empty")
        for g in self.grid:
            g.params(seed=0)
        if self.experiment == GAP:
            if not self.estimators:
                raise InvalidParams("gap experiment needs at least one estimator")
            for name in self.estimators:
                _parse_estimator(name)
        if self.experiment == CERTIFICATE:
            for g in self.grid:
                if g.ell is None:
                    raise InvalidParams("certificate grid points need an 'ell' field")
        if self.experiment == THRESHOLD:
            if not self.multipliers:
                raise InvalidParams("threshold experiment needs signal multipliers")
            for g in self.grid:
                if g.model != SUBMATRIX or g.noise is None or g.noise.kind != GAUSSIAN:
                    raise InvalidParams("threshold sweep runs on gaussian submatrix grids")
        if self.scan_strategy not in (EXHAUSTIVE, BRANCH_AND_BOUND):
            raise InvalidParams(f"unknown scan strategy {self.scan_strategy!r}")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        solver_doc = doc.get("solver", {})
        solver = SolverOptions(
            tol=float(solver_doc.get("tol", 1e-7)),
            max_iter=int(solver_doc.get("max_iter", 100_000)),
            step=float(solver_doc.get("step", 1.0)),
        )
        cfg = cls(
            experiment=doc["experiment"],
            grid=tuple(GridPoint.from_dict(g) for g in doc["grid"]),
            replicates=int(doc["replicates"]),
            base_seed=int(doc["base_seed"]),
            output=doc["output"],
            estimators=tuple(doc.get("estimators", ())),
            multipliers=tuple(float(c) for c in doc.get("multipliers", ())),
            solver=solver,
            solve_sdp=bool(doc.get("solve_sdp", False)),
            scan_strategy=doc.get("scan_strategy", BRANCH_AND_BOUND),
            max_subsets=int(doc.get("max_subsets", DEFAULT_MAX_SUBSETS)),
        )
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def fmt_float(x) -> str:
    return format(float(x), ".17g")


def _fmt_cell(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def write_csv(path: str, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt_cell(row.get(col)) for col in columns])


def _parse_estimator(name: str) -> tuple[str, int | None]:
    base, _, level = name.partition(":")
    if base not in KNOWN_ESTIMATORS:
        raise InvalidParams(f"unknown estimator {name!r}")
    if base == "sos_level":
        if not level:
            raise InvalidParams("sos_level estimator needs a level, e.g. 'sos_level:2'")
        return base, int(level)
    if level:
        raise InvalidParams(f"estimator {base!r} does not take a level")
    return base, None


def _run_one_estimator(name: str, instance, cfg: ExperimentConfig) -> tuple[float, int | None]:
    base, level = _parse_estimator(name)
    X = instance.matrix
    s = instance.params.s_star
    if base == "scan":
        return scan_estimate(X, s, strategy=cfg.scan_strategy, max_subsets=cfg.max_subsets).value, None
    if base == "avg":
        return avg_estimate(X, s), None
    if base == "max":
        return max_estimate(X), None
    if base == "lp":
        return lp_estimate(X, s), None
    if base == "sos_basic":
        return solve(assemble_basic(X, s), cfg.solver).value, None
    return solve(assemble_level(X, s, level), cfg.solver).value, level


def run_gap_experiment(cfg: ExperimentConfig) -> list[dict]:
    """Estimate beta_star with every selected estimator on every replicate."""
    cfg.validate()
    rows: list[dict] = []
    for gi, g in enumerate(cfg.grid):
        for rep in range(cfg.replicates):
            seed = mix_seed(cfg.base_seed, gi * cfg.replicates + rep)
            instance = generate(g.params(seed))
            for name in cfg.estimators:
                row = {
                    "model": g.model,
                    "d": g.d,
                    "s_star": g.s_star,
                    "beta_star": float(g.beta_star),
                    "noise": g.noise_label(),
                    "estimator": name.partition(":")[0],
                    "level": "",
                    "rep": rep,
                    "seed": seed,
                }
                start = time.perf_counter()
                try:
                    estimate, level = _run_one_estimator(name, instance, cfg)
                    row["estimate"] = estimate
                    row["abs_error"] = abs(estimate - g.beta_star)
                    row["level"] = level if level is not None else ""
                    row["error"] = ""
                except SoslabError as exc:
                    row["estimate"] = ""
                    row["abs_error"] = ""
                    row["error"] = f"{type(exc).__name__}: {exc}"
                row["runtime_ms"] = (time.perf_counter() - start) * 1000.0
                rows.append(row)
    return rows


def run_certificate_experiment(cfg: ExperimentConfig) -> list[dict]:
    """Build and verify the expansivity certificate on null instances."""
    cfg.validate()
    rows: list[dict] = []
    for gi, g in enumerate(cfg.grid):
        mode = BINARY_ONE if g.model == SBM else SIGN_POSITIVE
        for rep in range(cfg.replicates):
            seed = mix_seed(cfg.base_seed, gi * cfg.replicates + rep)
            row = {
                "model": g.model,
                "d": g.d,
                "s_star": g.s_star,
                "ell": g.ell,
                "rep": rep,
                "seed": seed,
            }
            start = time.perf_counter()
            try:
                instance = generate(g.params(seed))
                X = instance.matrix
                graph = positivity_graph(X, mode)
                table = expansivity_table(graph, g.ell)
                row["eta_empty"] = table.clique_count
                pe = build_certificate(table, g.s_star, g.ell)
                report = verify_certificate(pe, g.d, g.s_star, g.ell)
                objective = certificate_objective(X, pe, g.s_star)
                row["rowsum_violation_zero"] = report.rowsum_max_violation == 0
                row["min_eig"] = report.min_eigenvalue
                row["psd"] = report.psd
                row["objective"] = float(objective)
                if cfg.solve_sdp:
                    program = assemble_level(X, g.s_star, g.ell)
                    row["sdp_value"] = solve(program, cfg.solver).value
                else:
                    row["sdp_value"] = ""
                row["error"] = ""
            except SoslabError as exc:
                row.setdefault("eta_empty", "")
                row["error"] = f"{type(exc).__name__}: {exc}"
            row["runtime_ms"] = (time.perf_counter() - start) * 1000.0
            rows.append(row)
    return rows


def run_threshold_sweep(cfg: ExperimentConfig) -> tuple[list[dict], list[dict]]:
    """Scan-test error sweep over signal multipliers.

    For multiplier c the separation is beta_bar = c * sqrt(log(d/s)/s); each
    replicate draws a null and an alternative instance and applies the test
    reject = (scan > beta_bar / 2). Returns (rows, summary_rows).
    """
    cfg.validate()
    rows: list[dict] = []
    summary: list[dict] = []
    n_mult = len(cfg.multipliers)
    for gi, g in enumerate(cfg.grid):
        for ci, c in enumerate(cfg.multipliers):
            beta_bar = c * math.sqrt(math.log(g.d / g.s_star) / g.s_star)
            errors = {0: 0, 1: 0}
            for rep in range(cfg.replicates):
                for hyp in (0, 1):
                    counter = ((gi * n_mult + ci) * cfg.replicates + rep) * 2 + hyp
                    seed = mix_seed(cfg.base_seed, counter)
                    row = {
                        "d": g.d,
                        "s_star": g.s_star,
                        "c": float(c),
                        "rep": rep,
                        "seed": seed,
                        "hypothesis": hyp,
                    }
                    start = time.perf_counter()
                    try:
                        beta = beta_bar if hyp == 1 else 0.0
                        instance = generate(g.params(seed, beta_star=beta))
                        value = scan_estimate(
                            instance.matrix,
                            g.s_star,
                            strategy=cfg.scan_strategy,
                            max_subsets=cfg.max_subsets,
                        ).value
                        reject = int(value > beta_bar / 2)
                        row["scan_value"] = value
                        row["reject"] = reject
                        row["error"] = ""
                        # type I: reject under H0; type II: accept under H1
                        errors[hyp] += reject if hyp == 0 else 1 - reject
                    except SoslabError as exc:
                        row["scan_value"] = ""
                        row["reject"] = ""
                        row["error"] = f"{type(exc).__name__}: {exc}"
                    row["runtime_ms"] = (time.perf_counter() - start) * 1000.0
                    rows.append(row)
            type_i = errors[0] / cfg.replicates
            type_ii = errors[1] / cfg.replicates
            summary.append(
                {
                    "d": g.d,
                    "s_star": g.s_star,
                    "c": float(c),
                    "replicates": cfg.replicates,
                    "type_i_error": type_i,
                    "type_ii_error": type_ii,
                    "summed_error": type_i + type_ii,
                }
            )
    return rows, summary


def summary_path(output: str) -> str:
    stem = output[:-4] if output.endswith(".csv") else output
    return stem + ".summary.csv"


def run_experiment(cfg: ExperimentConfig) -> list[str]:
    """Run the configured experiment and write its CSV file(s)."""
    cfg.validate()
    if cfg.experiment == GAP:
        write_csv(cfg.output, GAP_COLUMNS, run_gap_experiment(cfg))
        return [cfg.output]
    if cfg.experiment == CERTIFICATE:
        write_csv(cfg.output, CERTIFICATE_COLUMNS, run_certificate_experiment(cfg))
        return [cfg.output]
    rows, summary = run_threshold_sweep(cfg)
    write_csv(cfg.output, THRESHOLD_COLUMNS, rows)
    spath = summary_path(cfg.output)
    write_csv(spath, THRESHOLD_SUMMARY_COLUMNS, summary)
    return [cfg.output, spath]


def with_overrides(
    cfg: ExperimentConfig, output: str | None = None, base_seed: int | None = None
) -> ExperimentConfig:
    if output is not None:
        cfg = replace(cfg, output=output)
    if base_seed is not None:
        cfg = replace(cfg, base_seed=base_seed)
    return cfg
