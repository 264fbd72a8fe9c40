"""End-to-end per-instance analysis, suite aggregation and exclusion curves.

For each MPS file: parse -> presolve -> standard form -> rank repair ->
basis -> MNES and OSS operators at the all-ones iterate -> structural
sparsity and condition-number lower bounds -> query/cycle lower bounds
(tomography dimension m for the MNES, n for the OSS) -> classical solve ->
exclusion flags over a cycle-duration grid. Stage failures are recorded in
the instance record instead of aborting the suite.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import qcost
from .classical import IpmConfig, SolveOutcome, solve_external, solve_internal_ipm
from .lp_model import parse_mps
from .newton import build_fbar, build_oss, canonical_iterate, select_basis
from .spectral import (DifficultyEstimate, difficulty_estimate,
                       kappa_lower_mnes, kappa_lower_oss, sparsity_mnes,
                       sparsity_oss)
from .standardize import standardize

FORMULATIONS = ("mnes", "oss")


@dataclass
class AnalysisConfig:
    """Knobs of the per-instance pipeline; defaults match the harness CLI."""
    epsilon: float = 0.1
    beta: float = 0.5  # beta_mu = beta * (x's / n) at the build iterate
    seed: int = 0
    sigma_min_timeout: float = 60.0
    sigma_min_samples: int = 10000
    sigma_max_iters: int = 300
    duration_min: float = qcost.DEFAULT_DURATION_MIN
    duration_max: float = qcost.DEFAULT_DURATION_MAX
    duration_points: int = qcost.DEFAULT_DURATION_POINTS
    reference_duration: float = qcost.REFERENCE_CYCLE_DURATION
    classical_cmd: str | None = None
    classical_timeout: float = 600.0
    objective_pattern: str | None = None
    status_patterns: dict[str, str] | None = None
    skip_presolve: bool = False
    workers: int = 1
    ipm: IpmConfig = field(default_factory=IpmConfig)

    def durations(self) -> list[float]:
        return qcost.duration_grid(self.duration_min, self.duration_max,
                                   self.duration_points,
                                   self.reference_duration)

    def config_hash(self) -> str:
        payload = dataclasses.asdict(self)
        return hashlib.sha256(
            json.dumps(payload, sort_keys=True, default=str).encode()
        ).hexdigest()[:16]


def instance_seed(suite_seed: int, family: str, name: str) -> int:
    """Deterministic per-instance seed derived from the suite seed."""
    digest = hashlib.sha256(f"{suite_seed}:{family}/{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class FormulationResult:
    """Quantum-side analysis of one Newton-system formulation."""
    formulation: str
    d: int = 0
    dilated_dim: int = 0
    sparsity: int = 0
    kappa_lower: float = 0.0
    gamma: float = 0.0
    sigma_max_lb: float = 0.0
    sigma_min_ub: float = 0.0
    sigma_min_method: str = ""
    degenerate: bool = False
    query_count: int = 0
    total_cycles: int = 0
    elapsed: float = 0.0
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


@dataclass
class InstanceRecord:
    name: str
    family: str
    path: str = ""
    status: str = "ok"  # ok | error
    error: str | None = None
    m: int = 0
    n: int = 0
    seed: int = 0
    config_hash: str = ""
    timestamp: str = ""
    hardware: str = ""
    presolve_log_size: int = 0
    warnings: list[str] = field(default_factory=list)
    formulations: dict[str, FormulationResult] = field(default_factory=dict)
    classical: SolveOutcome | None = None
    exclusion: dict[str, list[bool]] = field(default_factory=dict)
    stage_seconds: dict[str, float] = field(default_factory=dict)

    def quantum_lb_below_classical(self, formulation: str,
                                   duration: float) -> bool | None:
        """Exact flag total_cycles * duration < classical wall time.

        None when either side is unavailable; an unconverged classical run
        has no legitimate solve time to compare against.
        """
        f = self.formulations.get(formulation)
        if f is None or not f.ok or self.classical is None or \
                self.classical.status != "optimal":
            return None
        lhs = Fraction(f.total_cycles) * qcost.to_fraction(duration)
        return lhs < Fraction(self.classical.wall_time)


@dataclass
class SuiteReport:
    records: list[InstanceRecord]
    duration_grid: list[float]
    reference_marker: float
    curves: dict[str, dict[str, list[float]]]  # family -> formulation -> fracs
    curve_counts: dict[str, dict[str, list[list[int]]]]
    excluded: dict[str, int]
    config: dict
    metadata: dict
    warnings: list[str] = field(default_factory=list)


def _difficulty(formulation: str, std, basis, it, beta_mu,
                cfg: AnalysisConfig, seed: int) -> DifficultyEstimate:
    if formulation == "mnes":
        fbar = build_fbar(basis, std.A, it)
        kb = kappa_lower_mnes(fbar, std.m, std.n,
                              timeout=cfg.sigma_min_timeout, seed=seed,
                              n_samples=cfg.sigma_min_samples,
                              max_iters=cfg.sigma_max_iters)
        s = sparsity_mnes(std.m)
    else:
        oss = build_oss(std, it, basis, beta_mu)
        kb = kappa_lower_oss(oss, timeout=cfg.sigma_min_timeout, seed=seed,
                             n_samples=cfg.sigma_min_samples,
                             max_iters=cfg.sigma_max_iters)
        s = sparsity_oss(std.A, std.m, std.n, basis)
    return difficulty_estimate(s, kb)


def _analyze_formulation(formulation: str, std, basis, it, beta_mu,
                         cfg: AnalysisConfig, seed: int) -> FormulationResult:
    t0 = time.perf_counter()
    result = FormulationResult(formulation=formulation)
    try:
        est = _difficulty(formulation, std, basis, it, beta_mu, cfg, seed)
        d = std.m if formulation == "mnes" else std.n
        dilated, _, _ = qcost.hermitian_dilation_params(
            d, est.sparsity, est.kappa_lower,
            is_hermitian=(formulation == "mnes"))
        result.d = d
        result.dilated_dim = dilated
        result.sparsity = est.sparsity
        result.kappa_lower = est.kappa_lower
        result.gamma = est.gamma
        result.sigma_max_lb = est.sigma_max_lb
        result.sigma_min_ub = est.sigma_min_ub
        result.sigma_min_method = est.sigma_min_method
        result.degenerate = d < 2
        gamma = est.sparsity * qcost.to_fraction(est.kappa_lower)
        result.query_count = qcost.qlsa_query_count(
            est.sparsity, est.kappa_lower, cfg.epsilon)
        result.total_cycles = qcost.total_quantum_cycles(
            d, gamma, cfg.epsilon)
    except Exception as exc:  # recorded, never aborts the suite
        result.failure = f"{type(exc).__name__}: {exc}"
    result.elapsed = time.perf_counter() - t0
    return result


def analyze_instance(path: str | Path, config: AnalysisConfig | None = None,
                     family: str = "misc") -> InstanceRecord:
    """Run the full pipeline on one MPS file; failures become record fields."""
    cfg = config or AnalysisConfig()
    path = Path(path)
    record = InstanceRecord(
        name=path.stem, family=family, path=str(path),
        seed=instance_seed(cfg.seed, family, path.stem),
        config_hash=cfg.config_hash(),
        timestamp=datetime.now(timezone.utc).isoformat(),
        hardware=f"{platform.platform()} / {platform.processor() or 'unknown'}")
    stages = record.stage_seconds

    t = time.perf_counter()
    try:
        text = path.read_text()
    except OSError as exc:
        record.status = "error"
        record.error = f"unreadable file: {exc}"
        return record
    try:
        lp = parse_mps(text)
        record.warnings.extend(lp.warnings)
        stages["parse"] = time.perf_counter() - t

        t = time.perf_counter()
        std = standardize(lp, skip_presolve=cfg.skip_presolve)
        record.m, record.n = std.m, std.n
        record.presolve_log_size = len(std.transform_log)
        stages["standardize"] = time.perf_counter() - t

        t = time.perf_counter()
        basis = select_basis(std.A)
        stages["basis"] = time.perf_counter() - t
    except Exception as exc:
        record.status = "error"
        record.error = f"{type(exc).__name__}: {exc}"
        return record

    it = canonical_iterate(std.m, std.n)
    beta_mu = it.default_beta_mu(cfg.beta)
    for formulation in FORMULATIONS:
        t = time.perf_counter()
        record.formulations[formulation] = _analyze_formulation(
            formulation, std, basis, it, beta_mu, cfg, record.seed)
        stages[formulation] = time.perf_counter() - t

    t = time.perf_counter()
    if cfg.classical_cmd:
        kwargs = {}
        if cfg.objective_pattern:
            kwargs["objective_pattern"] = cfg.objective_pattern
        if cfg.status_patterns:
            kwargs["status_patterns"] = cfg.status_patterns
        record.classical = solve_external(
            std, cfg.classical_cmd, timeout=cfg.classical_timeout, **kwargs)
    else:
        record.classical = solve_internal_ipm(std, cfg.ipm)
        record.warnings.append(
            "classical baseline is the internal IPM (no external solver "
            "configured); its slower time only weakens exclusion verdicts")
    if record.classical.status in ("optimal", "iteration_limit"):
        # report in the original LP's scale (sense and objective constant)
        record.classical.objective = std.original_objective(
            record.classical.objective)
    stages["classical"] = time.perf_counter() - t

    durations = cfg.durations()
    for formulation in FORMULATIONS:
        flags = [record.quantum_lb_below_classical(formulation, t_)
                 for t_ in durations]
        if all(fl is not None for fl in flags):
            record.exclusion[formulation] = [bool(fl) for fl in flags]
    return record


def _analyze_for_suite(args) -> InstanceRecord:
    path, family, cfg = args
    try:
        return analyze_instance(path, cfg, family=family)
    except Exception as exc:  # crash isolation: a failure loses one record only
        rec = InstanceRecord(name=Path(path).stem, family=family,
                             path=str(path), status="error",
                             error=f"{type(exc).__name__}: {exc}")
        return rec


def discover_instances(directory: str | Path) -> list[tuple[Path, str]]:
    """MPS files directly in `directory` (family "misc") and one level of
    per-family subdirectories (family = subdirectory name), sorted."""
    directory = Path(directory)
    found: list[tuple[Path, str]] = []
    for p in sorted(directory.glob("*.mps")):
        found.append((p, "misc"))
    for sub in sorted(d for d in directory.iterdir() if d.is_dir()):
        for p in sorted(sub.glob("*.mps")):
            found.append((p, sub.name))
    return found


def run_suite(directory: str | Path,
              config: AnalysisConfig | None = None) -> SuiteReport:
    """Analyze every MPS instance under `directory` and aggregate curves."""
    cfg = config or AnalysisConfig()
    t0 = time.perf_counter()
    instances = discover_instances(directory)
    warnings: list[str] = []
    if not instances:
        warnings.append(f"no MPS instances found under {directory}")

    jobs = [(str(p), fam, cfg) for p, fam in instances]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_analyze_for_suite, jobs))
    else:
        records = [_analyze_for_suite(j) for j in jobs]

    durations = cfg.durations()
    curves, counts, excluded = exclusion_curve(records, durations)
    errored = sum(1 for r in records if r.status == "error")
    if errored:
        warnings.append(f"{errored} instance(s) errored and were excluded "
                        "from curve denominators")
    metadata = {
        "created": datetime.now(timezone.utc).isoformat(),
        "hardware": f"{platform.platform()} / "
                    f"{platform.processor() or 'unknown'}",
        "python": platform.python_version(),
        "suite_seconds": time.perf_counter() - t0,
        "instances": len(records),
        "errored": errored,
    }
    return SuiteReport(
        records=records, duration_grid=durations,
        reference_marker=cfg.reference_duration, curves=curves,
        curve_counts=counts, excluded=excluded,
        config=dataclasses.asdict(cfg), metadata=metadata, warnings=warnings)


def exclusion_curve(records: list[InstanceRecord],
                    duration_grid: list[float]):
    """Per family and formulation: fraction of instances whose quantum cycle
    lower bound times the duration still undercuts the classical time.

    Returns (curves, counts, excluded): curves map family -> formulation ->
    fractions per grid point; counts carry [below, total] pairs; excluded
    counts records left out per family (errors or failed formulations).
    """
    families = sorted({r.family for r in records})
    curves: dict[str, dict[str, list[float]]] = {}
    counts: dict[str, dict[str, list[list[int]]]] = {}
    excluded: dict[str, int] = {}
    for fam in families:
        fam_records = [r for r in records if r.family == fam]
        curves[fam] = {}
        counts[fam] = {}
        dropped = set()
        for formulation in FORMULATIONS:
            fractions: list[float] = []
            pair_counts: list[list[int]] = []
            for t_ in duration_grid:
                below = total = 0
                for r in fam_records:
                    flag = r.quantum_lb_below_classical(formulation, t_)
                    if flag is None:
                        dropped.add(r.name)
                        continue
                    total += 1
                    below += bool(flag)
                fractions.append(below / total if total else 0.0)
                pair_counts.append([below, total])
            curves[fam][formulation] = fractions
            counts[fam][formulation] = pair_counts
        excluded[fam] = len(dropped)
    return curves, counts, excluded
