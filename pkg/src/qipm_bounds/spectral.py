"""Structural sparsities and certified condition-number lower bounds.

Sparsity of the solved systems follows structural counting rules (the
basis-inverse blocks are treated as fully dense). Extreme singular values
are estimated one-sidedly: sigma_max from below via Krylov iteration on the
Gram operator (any Rayleigh quotient underestimates the top eigenvalue),
sigma_min from above via converged smallest Ritz values or, past a wall-clock
timeout, via the minimum of ||op w|| over seeded random unit vectors. Both
directions combine into a condition-number estimate that never exceeds the
true kappa, so the derived difficulty gamma = s * kappa is itself a lower
bound.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .lp_model import SparseMatrix
from .newton import BasisSelection, NewtonOperator

DEFAULT_MAX_ITERS = 300
DEFAULT_RITZ_TOL = 1e-8
DEFAULT_TIMEOUT = 60.0
DEFAULT_SAMPLES = 10000
# acceptance gate for the iterative sigma_min stage (relative to sigma_max)
RITZ_RESIDUAL_GATE = 1e-6
_SAMPLE_CHUNK = 256
# floating-point safety: matvec cancellation perturbs computed Rayleigh
# values by O(eps * dim * sigma_max) in absolute terms, so sigma_min upper
# bounds are padded by a dominating multiple of that scale and sigma_max
# enters condition numbers with a relative shave
_FP_PAD = 1000.0 * float(np.finfo(float).eps)
_FP_SHAVE = 1e-12


class NumericalError(RuntimeError):
    """A matvec produced non-finite values during estimation."""


class _Timeout(Exception):
    pass


@dataclass
class KappaBound:
    """One-sided condition number estimate with its ingredients."""
    kappa_lower: float
    sigma_max_lb: float
    sigma_min_ub: float
    sigma_min_method: str  # iterative | random_sampling | rank_deficiency_exact
    elapsed: float
    clamped: bool = False
    singular: bool = False


@dataclass
class DifficultyEstimate:
    """Difficulty gamma = sparsity * kappa_lower of one Newton system."""
    sparsity: int
    kappa_lower: float
    gamma: float
    sigma_max_lb: float
    sigma_min_ub: float
    sigma_min_method: str
    elapsed: float
    clamped: bool = False
    singular: bool = False


def difficulty_estimate(sparsity: int, kb: KappaBound) -> DifficultyEstimate:
    return DifficultyEstimate(
        sparsity=sparsity, kappa_lower=kb.kappa_lower,
        gamma=sparsity * kb.kappa_lower, sigma_max_lb=kb.sigma_max_lb,
        sigma_min_ub=kb.sigma_min_ub, sigma_min_method=kb.sigma_min_method,
        elapsed=kb.elapsed, clamped=kb.clamped, singular=kb.singular)


# ---------------------------------------------------------------------------
# sparsity rules

def sparsity_mnes(m: int) -> int:
    """The modified NES matrix carries sparsity m: the dense basis inverse
    appears as a factor, so rows and columns are structurally full."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return m


def sparsity_oss(A: SparseMatrix, m: int, n: int,
                 basis: BasisSelection | None = None) -> int:
    """Structural max row/column sparsity of O = [-X A'  S V].

    Counts: (a) columns of -X A' carry the row sparsities of A; (b) columns
    of S V carry m + 1 entries (dense top block plus one from -I); (c) rows
    at basic positions carry nnz(column of A) + (n - m) with the basis-inverse
    block taken as dense; (d) rows at nonbasic positions carry
    nnz(column of A) + 1, always dominated by (b). Without a basis, (c) is
    maximized over all columns, giving a basis-independent upper bound.
    """
    if A.shape != (m, n):
        raise ValueError(f"A has shape {A.shape}, expected {(m, n)}")
    col_nnz = A.col_nnz()
    best = int(A.row_nnz().max()) if m else 0  # (a)
    if n > m:
        best = max(best, m + 1)  # (b)
    if basis is not None:
        if len(basis.basic):
            best = max(best, int(col_nnz[basis.basic].max()) + (n - m))  # (c)
        if len(basis.nonbasic):
            bump = 1 if n > m else 0
            best = max(best, int(col_nnz[basis.nonbasic].max()) + bump)  # (d)
    elif n:
        best = max(best, int(col_nnz.max()) + (n - m if n > m else 0))
    return best


def oss_pattern_dense(A: SparseMatrix, basis: BasisSelection) -> np.ndarray:
    """Boolean structural pattern of O with the dense-block convention.

    First m columns: pattern of A'; last n - m columns: all-ones rows at
    basic positions, identity at nonbasic positions.
    """
    m, n = A.shape
    pat = np.zeros((n, n), dtype=bool)
    pat[:, :m] = A.to_dense().T != 0.0
    if n > m:
        pat[basis.basic, m:] = True
        pat[basis.nonbasic, m:] = np.eye(n - m, dtype=bool)
    return pat


# ---------------------------------------------------------------------------
# extreme singular value estimation

def _gram_side(op: NewtonOperator):
    """Gram operator of the smaller side; its eigenvalues are sigma_i^2."""
    rows, cols = op.shape

    if cols <= rows:
        def image(v):
            return op.apply(v)

        def gram(v):
            return op.apply_transpose(op.apply(v))

        return cols, gram, image

    def image(v):
        return op.apply_transpose(v)

    def gram(v):
        return op.apply(op.apply_transpose(v))

    return rows, gram, image


def _check_finite(v: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(v)):
        raise NumericalError(f"non-finite values in {what}")
    return v


def _rayleigh_sigma(image, v: np.ndarray) -> float:
    """sqrt(v' G v / v'v) = ||op v|| / ||v||, a certified Rayleigh value."""
    y = _check_finite(image(v), "operator image")
    num = float(y @ y)
    den = float(v @ v)
    if den == 0.0:
        return 0.0
    return float(np.sqrt(num / den))


def _lanczos_extreme(gram, image, dim: int, which: str, max_iters: int,
                     tol: float, rng: np.random.Generator,
                     deadline: float | None):
    """Krylov iteration on the Gram operator with full reorthogonalization.

    Returns (sigma_value, ritz_residual, sigma_max_ritz) where sigma_value is
    the certified Rayleigh-quotient bound at the extreme Ritz vector.
    """
    q = rng.standard_normal(dim)
    q /= np.linalg.norm(q)
    Q = np.zeros((min(max_iters, dim), dim))
    alphas: list[float] = []
    betas: list[float] = []
    prev = None
    theta_prev = None
    k = 0
    while k < min(max_iters, dim):
        if deadline is not None and time.monotonic() > deadline:
            raise _Timeout
        Q[k] = q
        u = _check_finite(gram(q), "gram matvec")
        alpha = float(q @ u)
        u = u - alpha * q - (betas[-1] * prev if prev is not None else 0.0)
        # full reorthogonalization against all kept vectors
        u -= Q[:k + 1].T @ (Q[:k + 1] @ u)
        u -= Q[:k + 1].T @ (Q[:k + 1] @ u)
        alphas.append(alpha)
        beta = float(np.linalg.norm(u))
        k += 1
        theta, yvec = _extreme_ritz(alphas, betas, which)
        converged = (theta_prev is not None
                     and abs(theta - theta_prev) <= tol * max(abs(theta), 1e-300))
        theta_prev = theta
        if beta <= 1e-14 * max(abs(alpha), 1.0) or converged or \
                k >= min(max_iters, dim):
            ritz_vec = Q[:k].T @ yvec
            nrm = np.linalg.norm(ritz_vec)
            if nrm > 0.0:
                ritz_vec /= nrm
            resid = float(np.linalg.norm(gram(ritz_vec) - theta * ritz_vec))
            smax_ritz, _ = _extreme_ritz(alphas, betas, "max")
            return _rayleigh_sigma(image, ritz_vec), resid, \
                float(np.sqrt(max(smax_ritz, 0.0)))
        betas.append(beta)
        prev = q
        q = u / beta
    raise AssertionError("unreachable")


def _extreme_ritz(alphas, betas, which: str):
    if len(alphas) == 1:
        return alphas[0], np.ones(1)
    vals, vecs = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas))
    idx = -1 if which == "max" else 0
    return float(vals[idx]), vecs[:, idx]


def sigma_max_lower(op: NewtonOperator, max_iters: int = DEFAULT_MAX_ITERS,
                    tol: float = DEFAULT_RITZ_TOL, seed: int = 0) -> float:
    """Certified lower bound on the largest singular value of op.

    The value returned is the Rayleigh quotient ||op v|| / ||v|| at the top
    Ritz vector of a seeded Krylov iteration, which never exceeds sigma_max.
    """
    dim, gram, image = _gram_side(op)
    if dim == 0 or op.shape[0] == 0:
        return 0.0
    rng = np.random.Generator(np.random.Philox(key=seed))
    value, _, _ = _lanczos_extreme(gram, image, dim, "max", max_iters, tol,
                                   rng, deadline=None)
    return value


def sigma_min_upper(op: NewtonOperator, timeout: float = DEFAULT_TIMEOUT,
                    n_samples: int = DEFAULT_SAMPLES, seed: int = 0,
                    max_iters: int = DEFAULT_MAX_ITERS,
                    tol: float = DEFAULT_RITZ_TOL,
                    sigma_max_hint: float | None = None) -> tuple[float, str]:
    """Certified upper bound on the smallest singular value of op.

    First runs a Krylov iteration targeting the smallest Ritz value, accepted
    only if it converges within the wall-clock timeout and its Ritz residual
    passes the acceptance gate; a timeout discards the partial result
    entirely. The fallback takes the minimum of ||op w|| over seeded random
    unit vectors, an upper bound by the min-max principle.
    """
    dim, gram, image = _gram_side(op)
    if dim == 0 or op.shape[0] == 0:
        return 0.0, "rank_deficiency_exact"
    rng = np.random.Generator(np.random.Philox(key=seed))
    deadline = time.monotonic() + timeout if timeout > 0 else time.monotonic()
    scale_ref = sigma_max_hint or 0.0
    iterative_value = None
    if timeout > 0:
        try:
            value, resid, smax_ritz = _lanczos_extreme(
                gram, image, dim, "min", max_iters, tol, rng, deadline)
            scale_ref = max(scale_ref, smax_ritz)
            gate = sigma_max_hint if sigma_max_hint is not None else smax_ritz
            if resid <= RITZ_RESIDUAL_GATE * max(gate, 1e-300):
                iterative_value = value
        except _Timeout:
            iterative_value = None
    if iterative_value is not None:
        pad = _FP_PAD * (dim + 10) * scale_ref
        return iterative_value + pad, "iterative"

    if n_samples < 1:
        raise NumericalError(
            "sigma_min estimation produced no certified value: iterative "
            "stage unavailable and random sampling disabled")
    sample_rng = np.random.Generator(
        np.random.Philox(key=(seed + 0x9E3779B97F4A7C15) % (1 << 64)))
    best = np.inf
    remaining = n_samples
    while remaining > 0:
        k = min(_SAMPLE_CHUNK, remaining)
        W = sample_rng.standard_normal((dim, k))
        norms = np.linalg.norm(W, axis=0)
        norms[norms == 0.0] = 1.0
        W /= norms
        Y = _check_finite(image(W), "operator image")
        vals = np.linalg.norm(Y, axis=0)
        best = min(best, float(vals.min()))
        scale_ref = max(scale_ref, float(vals.max()))
        remaining -= k
    pad = _FP_PAD * (dim + 10) * scale_ref
    return best + pad, "random_sampling"


# ---------------------------------------------------------------------------
# condition number lower bounds

def kappa_lower_mnes(fbar: NewtonOperator, m: int, n: int,
                     timeout: float = DEFAULT_TIMEOUT,
                     seed: int = 0, n_samples: int = DEFAULT_SAMPLES,
                     max_iters: int = DEFAULT_MAX_ITERS) -> KappaBound:
    """kappa(M_hat) >= (1 + sigma_max(F)^2) / (1 + sigma_min(F)^2) from below.

    When n - m < m the Gram matrix F F' is rank deficient, so sigma_min = 0
    exactly and the smallest eigenvalue of M_hat is 1.
    """
    t0 = time.monotonic()
    if fbar.shape != (m, n - m):
        raise ValueError(f"fbar has shape {fbar.shape}, expected {(m, n - m)}")
    smax = sigma_max_lower(fbar, max_iters=max_iters, seed=seed) \
        if n > m else 0.0
    if n - m < m:
        smin, method = 0.0, "rank_deficiency_exact"
    else:
        smin, method = sigma_min_upper(
            fbar, timeout=timeout, n_samples=n_samples, seed=seed,
            max_iters=max_iters, sigma_max_hint=smax)
    smax_eff = smax * (1.0 - _FP_SHAVE)
    kappa = (1.0 + smax_eff * smax_eff) / (1.0 + smin * smin)
    clamped = False
    if kappa < 1.0:
        kappa, clamped = 1.0, True
    return KappaBound(kappa, smax, smin, method,
                      elapsed=time.monotonic() - t0, clamped=clamped)


def kappa_lower_oss(oss: NewtonOperator, timeout: float = DEFAULT_TIMEOUT,
                    seed: int = 0, n_samples: int = DEFAULT_SAMPLES,
                    max_iters: int = DEFAULT_MAX_ITERS) -> KappaBound:
    """kappa(O) = sigma_max / sigma_min estimated directly from below."""
    t0 = time.monotonic()
    smax = sigma_max_lower(oss, max_iters=max_iters, seed=seed)
    smin, method = sigma_min_upper(
        oss, timeout=timeout, n_samples=n_samples, seed=seed,
        max_iters=max_iters, sigma_max_hint=smax)
    clamped = singular = False
    if smin == 0.0:
        # O is invertible at a strictly positive iterate; a zero estimate
        # signals numerical breakdown
        kappa = np.inf
        singular = True
    else:
        kappa = smax * (1.0 - _FP_SHAVE) / smin
        if kappa < 1.0:
            kappa, clamped = 1.0, True
    return KappaBound(kappa, smax, smin, method,
                      elapsed=time.monotonic() - t0,
                      clamped=clamped, singular=singular)
