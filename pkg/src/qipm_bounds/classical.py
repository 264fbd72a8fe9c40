"""Classical comparison runtimes.

A built-in infeasible-start primal-dual path-following IPM (exact NES solves
by dense Cholesky, conjugate gradient above a size cutoff) provides a
dependency-free baseline; an adapter shells out to any external LP solver
executable through a command template and regex-configurable output parsing.
Wall time is measured around the solve only.
"""

from __future__ import annotations

import re
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg as dense_linalg
from scipy.sparse import linalg as splinalg

from .lp_model import ColumnDef, GeneralLP, RowDef, StandardLP, emit_mps
from .newton import Iterate, build_nes, canonical_iterate, recover_updates_nes

DENSE_CHOLESKY_MAX_M = 2000

DEFAULT_OBJECTIVE_PATTERN = (
    r"(?:[Oo]bjective(?:\s+value)?|[Oo]ptimal(?:\s+objective)?)\s*[:=]?\s*"
    r"([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)")
DEFAULT_STATUS_PATTERNS = {
    "optimal": r"[Oo]ptimal",
    "infeasible": r"[Ii]nfeasible",
    "unbounded": r"[Uu]nbounded",
}


@dataclass
class IpmConfig:
    mu_target: float = 1e-8
    beta: float = 0.1
    max_iterations: int = 200
    step_fraction: float = 0.99995
    residual_tol: float = 1e-8
    check_interior: bool = False

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if not 0.0 < self.step_fraction < 1.0:
            raise ValueError("step_fraction must lie in (0, 1)")


@dataclass
class SolveOutcome:
    status: str  # optimal | infeasible | unbounded | iteration_limit | error
    objective: float = float("nan")
    iterations: int = 0
    wall_time: float = 0.0
    solver: str = "internal_ipm"
    message: str = ""
    serialize_time: float | None = None
    captured_output: str = ""


def solve_internal_ipm(std: StandardLP,
                       cfg: IpmConfig | None = None) -> SolveOutcome:
    """Primal-dual path-following IPM from the all-ones start.

    Each iteration solves the normal equation system exactly, recovers the
    full Newton step, and advances by the fraction-to-boundary rule capped at
    a full step. Terminates when the duality gap and both feasibility
    residuals are below tolerance.
    """
    cfg = cfg or IpmConfig()
    m, n = std.m, std.n
    if n == 0:
        return SolveOutcome(status="optimal", objective=0.0, iterations=0,
                            wall_time=0.0)
    if m == 0:
        # no constraints: each coordinate sits at 0 or runs off to infinity
        if np.any(std.c < 0.0):
            return SolveOutcome(status="unbounded", iterations=0, wall_time=0.0)
        return SolveOutcome(status="optimal", objective=0.0, iterations=0,
                            wall_time=0.0)
    A = std.A.tocsr()
    b, c = std.b, std.c
    norm_b, norm_c = np.linalg.norm(b), np.linalg.norm(c)
    it = canonical_iterate(m, n)
    x, y, s = it.x, it.y, it.s

    use_dense = m <= DENSE_CHOLESKY_MAX_M
    t0 = time.perf_counter()
    status = "iteration_limit"
    message = ""
    gap_growth = 0
    prev_gap = float("inf")
    k = 0
    for k in range(1, cfg.max_iterations + 1):
        gap = float(x @ s)
        rp = b - A @ x
        rd = c - A.T @ y - s
        if gap <= n * cfg.mu_target and \
                np.linalg.norm(rp) <= cfg.residual_tol * (1.0 + norm_b) and \
                np.linalg.norm(rd) <= cfg.residual_tol * (1.0 + norm_c):
            status = "optimal"
            k -= 1
            break
        if gap > prev_gap * (1.0 + 1e-12):
            gap_growth += 1
            if gap_growth >= 10:
                status = "error"
                message = "duality gap grew for 10 consecutive iterations"
                break
        else:
            gap_growth = 0
        prev_gap = gap

        mu = gap / n
        beta_mu = cfg.beta * mu
        trial = Iterate(x, y, s)
        nes = build_nes(std, trial, beta_mu)
        try:
            dy = _solve_nes(A, trial.d2, nes.rhs, use_dense)
        except (dense_linalg.LinAlgError, np.linalg.LinAlgError,
                FloatingPointError) as exc:
            status = "error"
            message = f"NES solve breakdown: {exc}"
            break
        if not np.all(np.isfinite(dy)):
            status = "error"
            message = "NES solve produced non-finite step"
            break
        step = recover_updates_nes(std, trial, beta_mu, dy)
        alpha = cfg.step_fraction * _max_step(x, step.dx, s, step.ds)
        alpha = min(1.0, alpha)
        x = x + alpha * step.dx
        y = y + alpha * step.dy
        s = s + alpha * step.ds
        if cfg.check_interior:
            assert np.all(x > 0.0) and np.all(s > 0.0)
    wall = time.perf_counter() - t0
    return SolveOutcome(status=status, objective=float(c @ x), iterations=k,
                        wall_time=wall, solver="internal_ipm", message=message)


def _solve_nes(A, d2: np.ndarray, rhs: np.ndarray, use_dense: bool) -> np.ndarray:
    if use_dense:
        M = (A.multiply(d2) @ A.T).toarray()
        cho = dense_linalg.cho_factor(M, check_finite=False)
        return dense_linalg.cho_solve(cho, rhs, check_finite=False)
    scale = np.asarray((A.multiply(d2) @ A.T).diagonal())
    scale[scale <= 0.0] = 1.0
    op = splinalg.LinearOperator(
        (A.shape[0], A.shape[0]), matvec=lambda v: A @ (d2 * (A.T @ v)))
    pre = splinalg.LinearOperator(
        (A.shape[0], A.shape[0]), matvec=lambda v: v / scale)
    dy, info = splinalg.cg(op, rhs, rtol=1e-12, atol=0.0, maxiter=10 * A.shape[0],
                           M=pre)
    if info != 0:
        raise dense_linalg.LinAlgError(f"conjugate gradient failed (info={info})")
    return dy


def _max_step(x, dx, s, ds) -> float:
    """Largest alpha keeping x + alpha dx > 0 and s + alpha ds > 0."""
    alpha = np.inf
    neg = dx < 0.0
    if np.any(neg):
        alpha = min(alpha, float(np.min(-x[neg] / dx[neg])))
    neg = ds < 0.0
    if np.any(neg):
        alpha = min(alpha, float(np.min(-s[neg] / ds[neg])))
    return alpha


def standard_to_general(std: StandardLP) -> GeneralLP:
    """View a StandardLP as a GeneralLP of equality rows (for MPS export)."""
    rows = [RowDef(f"R{i}", "=", float(std.b[i])) for i in range(std.m)]
    cols = [ColumnDef(name) for name in std.column_names]
    return GeneralLP(
        name=std.name or "STANDARD", objective_sense="min",
        objective_name="COST", rows=rows, columns=cols,
        coefficients=std.A, objective=np.asarray(std.c, dtype=float))


def solve_external(std: StandardLP, command_template: str,
                   workdir: str | Path | None = None,
                   timeout: float = 600.0,
                   objective_pattern: str = DEFAULT_OBJECTIVE_PATTERN,
                   status_patterns: dict[str, str] | None = None
                   ) -> SolveOutcome:
    """Run an external LP solver on the standard-form instance.

    The instance is written as MPS, `{mps}` in the command template is
    replaced by its path, and objective/status are scraped from the solver's
    combined output with the given regular expressions. Wall time covers the
    subprocess only; MPS serialization is timed separately.
    """
    if "{mps}" not in command_template:
        raise ValueError("command template must contain the {mps} placeholder")
    status_patterns = status_patterns or DEFAULT_STATUS_PATTERNS
    solver_name = f"external({shlex.split(command_template)[0]})"

    def run(dirpath: Path) -> SolveOutcome:
        t_ser = time.perf_counter()
        mps_path = dirpath / "instance.mps"
        mps_path.write_text(emit_mps(standard_to_general(std)))
        serialize_time = time.perf_counter() - t_ser

        cmd = [arg.replace("{mps}", str(mps_path))
               for arg in shlex.split(command_template)]
        t0 = time.perf_counter()
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True,
                                  timeout=timeout, cwd=dirpath)
        except subprocess.TimeoutExpired:
            return SolveOutcome(
                status="error", wall_time=time.perf_counter() - t0,
                solver=solver_name, serialize_time=serialize_time,
                message=f"solver timed out after {timeout} s")
        except OSError as exc:
            return SolveOutcome(
                status="error", wall_time=time.perf_counter() - t0,
                solver=solver_name, serialize_time=serialize_time,
                message=f"failed to launch solver: {exc}")
        wall = time.perf_counter() - t0
        output = proc.stdout + ("\n" + proc.stderr if proc.stderr else "")
        if proc.returncode != 0:
            return SolveOutcome(
                status="error", wall_time=wall, solver=solver_name,
                serialize_time=serialize_time, captured_output=output,
                message=f"solver exited with code {proc.returncode}")
        status = "error"
        for name in ("infeasible", "unbounded", "optimal"):
            pat = status_patterns.get(name)
            if pat and re.search(pat, output):
                status = name
        obj_match = re.search(objective_pattern, output)
        objective = float("nan")
        if obj_match:
            objective = float(obj_match.group(1))
            if status == "error":
                status = "optimal"
        elif status == "optimal":
            return SolveOutcome(
                status="error", wall_time=wall, solver=solver_name,
                serialize_time=serialize_time, captured_output=output,
                message="could not parse objective value from solver output")
        return SolveOutcome(
            status=status, objective=objective, wall_time=wall,
            solver=solver_name, serialize_time=serialize_time,
            captured_output=output)

    if workdir is not None:
        path = Path(workdir)
        path.mkdir(parents=True, exist_ok=True)
        return run(path)
    with tempfile.TemporaryDirectory(prefix="qipm_bounds_") as tmp:
        return run(Path(tmp))
