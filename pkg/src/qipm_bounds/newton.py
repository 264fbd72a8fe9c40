"""Matrix-free Newton system operators at a primal-dual iterate.

Given standard-form data (A, b, c) and a strictly positive iterate (x, y, s),
this module selects a basis B of A, builds the normal equation system (NES),
its basis-preconditioned modification (MNES), the null-space operator V, the
nonbasic coupling operator F = D_B^-1 A_B^-1 A_N D_N, and the orthogonal
subspace system (OSS), all as linear operators that never materialize the
underlying matrices. Step-recovery routines map (possibly inexact) solutions
of each system back to full Newton updates (dx, dy, ds).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import linalg as dense_linalg
from scipy.sparse import linalg as splinalg

from .lp_model import SparseMatrix, StandardLP

# relative solve-residual contract of the basis factorization
BASIS_SOLVE_TOL = 1e-10
# pivot threshold for declaring rank deficiency during basis selection
BASIS_RANK_TOL = 1e-10


class RankDeficiencyError(ValueError):
    """A should have full row rank here; carries the deficient row count."""

    def __init__(self, deficient_rows: int):
        super().__init__(
            f"constraint matrix is rank deficient by {deficient_rows} row(s); "
            "run rank repair first")
        self.deficient_rows = deficient_rows


@dataclass
class Iterate:
    """Primal-dual triple (x, y, s) with x > 0 and s > 0 component-wise."""
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.s = np.asarray(self.s, dtype=float)
        if self.x.size and not np.all(self.x > 0.0):
            raise ValueError("iterate requires x > 0 componentwise")
        if self.s.size and not np.all(self.s > 0.0):
            raise ValueError("iterate requires s > 0 componentwise")

    @property
    def d2(self) -> np.ndarray:
        """Diagonal of D^2 = X S^-1."""
        return self.x / self.s

    def default_beta_mu(self, beta: float = 0.5) -> float:
        """beta * mu with mu = x's/n; 0.5 at the all-ones iterate."""
        n = self.x.size
        return beta * float(self.x @ self.s) / n if n else 0.0


def canonical_iterate(m: int, n: int) -> Iterate:
    """The all-ones strictly positive (not necessarily feasible) start."""
    return Iterate(np.ones(n), np.zeros(m), np.ones(n))


@dataclass
class BasisSelection:
    """m linearly independent columns of A plus a reusable factorization.

    `basic` holds the column indices in factorization pivot order; `nonbasic`
    the complement in ascending order. solve/solve_t apply A_B^-1 and
    A_B^-T through the retained factorization (A_B is never inverted).
    """
    basic: np.ndarray
    nonbasic: np.ndarray
    _solve: Callable[[np.ndarray], np.ndarray]
    _solve_t: Callable[[np.ndarray], np.ndarray]

    def solve(self, v: np.ndarray) -> np.ndarray:
        return self._solve(v)

    def solve_t(self, v: np.ndarray) -> np.ndarray:
        return self._solve_t(v)

    @property
    def m(self) -> int:
        return len(self.basic)


def select_basis(A: SparseMatrix, rank_tol: float = BASIS_RANK_TOL) -> BasisSelection:
    """Pick m independent columns of A via rank-revealing QR with pivoting.

    Deterministic for fixed input; the pivot order of the factorization is
    kept as the order of `basic`. Raises RankDeficiencyError when fewer than
    m sufficiently independent columns exist.
    """
    m, n = A.n_rows, A.n_cols
    if m > n:
        raise RankDeficiencyError(m - n)
    if m == 0:
        return BasisSelection(
            basic=np.zeros(0, dtype=int), nonbasic=np.arange(n),
            _solve=lambda v: v.copy(), _solve_t=lambda v: v.copy())
    dense = A.to_dense()
    _, r, piv = dense_linalg.qr(dense, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    scale = diag[0] if diag.size and diag[0] > 0.0 else 0.0
    rank = int(np.sum(diag > rank_tol * scale)) if scale > 0.0 else 0
    if rank < m:
        raise RankDeficiencyError(m - rank)
    basic = np.asarray(piv[:m], dtype=int)
    mask = np.ones(n, dtype=bool)
    mask[basic] = False
    nonbasic = np.flatnonzero(mask)

    a_b = A.columns(basic).tocsc()
    lu = splinalg.splu(a_b)
    return BasisSelection(
        basic=basic, nonbasic=nonbasic,
        _solve=lambda v: lu.solve(np.asarray(v, dtype=float)),
        _solve_t=lambda v: lu.solve(np.asarray(v, dtype=float), trans="T"))


@dataclass
class NewtonOperator:
    """A linear operator with its transpose and (optional) right-hand side.

    apply/apply_transpose accept a vector of matching dimension or a 2-D
    array of stacked column vectors. kind is one of "nes", "mnes", "oss",
    "fbar", "nullspace".
    """
    shape: tuple[int, int]
    kind: str
    _matvec: Callable[[np.ndarray], np.ndarray]
    _rmatvec: Callable[[np.ndarray], np.ndarray]
    rhs: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        if self.shape[0] != self.shape[1]:
            raise ValueError(f"{self.kind} operator is not square: {self.shape}")
        return self.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.shape[1]:
            raise ValueError(
                f"apply expects leading dimension {self.shape[1]}, got {v.shape}")
        return self._matvec(v)

    def apply_transpose(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.shape[0]:
            raise ValueError(
                f"apply_transpose expects leading dimension {self.shape[0]}, "
                f"got {v.shape}")
        return self._rmatvec(v)

    def to_dense(self) -> np.ndarray:
        return self.apply(np.eye(self.shape[1]))

    def aslinearoperator(self) -> splinalg.LinearOperator:
        return splinalg.LinearOperator(
            self.shape, matvec=self._matvec, rmatvec=self._rmatvec)


def _dmul(d: np.ndarray, v: np.ndarray) -> np.ndarray:
    """diag(d) @ v for vector or stacked-columns v."""
    return d * v if v.ndim == 1 else d[:, None] * v


@dataclass
class NewtonStep:
    """Full-space Newton update with the row where inexactness lands."""
    dx: np.ndarray
    dy: np.ndarray
    ds: np.ndarray
    residual_location: str  # "primal_row" | "complementarity_row" | "none"


def _check_iterate(std: StandardLP, it: Iterate) -> None:
    if it.x.shape != (std.n,) or it.s.shape != (std.n,) or it.y.shape != (std.m,):
        raise ValueError("iterate dimensions do not match the LP")


def build_nes(std: StandardLP, it: Iterate, beta_mu: float) -> NewtonOperator:
    """Normal equation system: M = A D^2 A', rhs sigma; dim m.

    sigma = A D^2 c - M y - beta_mu * A S^-1 1 + b - A x.
    """
    _check_iterate(std, it)
    A = std.A.tocsr()
    d2 = it.d2
    s_inv = 1.0 / it.s

    def matvec(v):
        return A @ _dmul(d2, A.T @ v)

    rhs = (A @ (d2 * (std.c - A.T @ it.y)) - beta_mu * (A @ s_inv)
           + std.b - A @ it.x)
    return NewtonOperator((std.m, std.m), "nes", matvec, matvec, rhs=rhs,
                          meta={"beta_mu": beta_mu})


def build_mnes(std: StandardLP, it: Iterate, basis: BasisSelection,
               beta_mu: float) -> NewtonOperator:
    """Modified NES: M_hat = D_B^-1 A_B^-1 M A_B^-T D_B^-1, rhs sigma_hat.

    Applied as the chain v -> D_B^-1 A_B^-1 A D^2 A' A_B^-T D_B^-1 v using
    the basis factorization for both solves; dim m.
    """
    _check_iterate(std, it)
    A = std.A.tocsr()
    d2 = it.d2
    db = np.sqrt(it.x[basis.basic] / it.s[basis.basic])
    db_inv = 1.0 / db

    def matvec(v):
        u = basis.solve_t(_dmul(db_inv, v))
        u = A @ _dmul(d2, A.T @ u)
        return _dmul(db_inv, basis.solve(u))

    resid = std.c - A.T @ it.y - it.s
    sigma_hat = (db_inv * basis.solve(std.b)
                 - beta_mu * (db_inv * basis.solve(A @ (1.0 / it.s)))
                 + db_inv * basis.solve(A @ (d2 * resid)))
    return NewtonOperator((std.m, std.m), "mnes", matvec, matvec,
                          rhs=sigma_hat, meta={"beta_mu": beta_mu})


def build_fbar(basis: BasisSelection, A: SparseMatrix,
               it: Iterate) -> NewtonOperator:
    """Nonbasic coupling operator F = D_B^-1 A_B^-1 A_N D_N, shape m x (n-m).

    At the all-ones iterate this is A_B^-1 A_N; M_hat = I + F F'.
    """
    m = basis.m
    k = len(basis.nonbasic)
    a_n = A.columns(basis.nonbasic).tocsr()
    db_inv = 1.0 / np.sqrt(it.x[basis.basic] / it.s[basis.basic])
    dn = np.sqrt(it.x[basis.nonbasic] / it.s[basis.nonbasic])

    def matvec(v):
        return _dmul(db_inv, basis.solve(a_n @ _dmul(dn, v)))

    def rmatvec(u):
        return _dmul(dn, a_n.T @ basis.solve_t(_dmul(db_inv, u)))

    return NewtonOperator((m, k), "fbar", matvec, rmatvec)


def null_space_matrix(basis: BasisSelection, A: SparseMatrix) -> NewtonOperator:
    """Null-space operator V, shape n x (n-m): A @ (V v) = 0 for all v.

    Rows at basic positions carry A_B^-1 A_N, rows at nonbasic positions -I,
    both in original column order of A.
    """
    n = A.n_cols
    k = len(basis.nonbasic)
    a_n = A.columns(basis.nonbasic).tocsr()

    def matvec(v):
        v = np.asarray(v, dtype=float)
        out_shape = (n,) if v.ndim == 1 else (n, v.shape[1])
        out = np.zeros(out_shape)
        out[basis.basic] = basis.solve(a_n @ v)
        out[basis.nonbasic] = -v
        return out

    def rmatvec(w):
        return a_n.T @ basis.solve_t(w[basis.basic]) - w[basis.nonbasic]

    return NewtonOperator((n, k), "nullspace", matvec, rmatvec)


def build_oss(std: StandardLP, it: Iterate, basis: BasisSelection,
              beta_mu: float) -> NewtonOperator:
    """Orthogonal subspace system: O = [-X A'  S V], rhs tau; dim n.

    The input vector stacks the dy block (m) over the null-space coefficient
    block (n - m); tau_i = beta_mu - x_i s_i.
    """
    _check_iterate(std, it)
    A = std.A.tocsr()
    m, n = std.m, std.n
    V = null_space_matrix(basis, std.A)

    def matvec(w):
        vy, vl = w[:m], w[m:]
        return -_dmul(it.x, A.T @ vy) + _dmul(it.s, V.apply(vl))

    def rmatvec(u):
        top = -(A @ _dmul(it.x, u))
        bot = V.apply_transpose(_dmul(it.s, u))
        return np.concatenate([top, bot], axis=0)

    tau = beta_mu - it.x * it.s
    return NewtonOperator((n, n), "oss", matvec, rmatvec, rhs=tau,
                          meta={"beta_mu": beta_mu})


# ---------------------------------------------------------------------------
# update recovery

def recover_updates_nes(std: StandardLP, it: Iterate, beta_mu: float,
                        dy_tilde: np.ndarray) -> NewtonStep:
    """Recover (dx, dy, ds) from a (possibly inexact) NES solution.

    ds = c - A'y - s - A'dy and dx = beta_mu S^-1 1 - x - D^2 ds; any solve
    error lands in the primal feasibility row only.
    """
    dy = np.asarray(dy_tilde, dtype=float)
    if dy.shape != (std.m,):
        raise ValueError(f"dy_tilde must have length {std.m}")
    A = std.A.tocsr()
    ds = std.c - A.T @ it.y - it.s - A.T @ dy
    dx = beta_mu / it.s - it.x - it.d2 * ds
    return NewtonStep(dx, dy, ds, "primal_row")


def recover_updates_mnes(std: StandardLP, it: Iterate, basis: BasisSelection,
                         beta_mu: float, z_tilde: np.ndarray,
                         r_hat: np.ndarray) -> NewtonStep:
    """Recover (dx, dy, ds) from an inexact MNES solution z_tilde.

    r_hat is the solve residual sigma_hat - M_hat z_tilde, computed by the
    caller to high precision. The residual is transferred into the
    complementarity row: primal and dual feasibility rows hold exactly
    (up to roundoff) for any z_tilde.
    """
    z = np.asarray(z_tilde, dtype=float)
    r = np.asarray(r_hat, dtype=float)
    if z.shape != (std.m,) or r.shape != (std.m,):
        raise ValueError(f"z_tilde and r_hat must have length {std.m}")
    A = std.A.tocsr()
    db = np.sqrt(it.x[basis.basic] / it.s[basis.basic])
    dy = basis.solve_t(z / db)
    ds = std.c - A.T @ it.y - it.s - A.T @ dy
    # v carries D_B r_hat scattered to the basic positions, signed so that
    # A dx = b - A x holds identically (transfer identity)
    v = np.zeros(std.n)
    v[basis.basic] = -db * r
    dx = beta_mu / it.s - it.x - it.d2 * ds - v
    return NewtonStep(dx, dy, ds, "complementarity_row")


def recover_updates_oss(std: StandardLP, it: Iterate, basis: BasisSelection,
                        w_tilde: np.ndarray) -> NewtonStep:
    """Recover (dx, dy, ds) from an OSS solution w = (dy, lambda).

    dx = V lambda lies in A's null space and ds = -A'dy in A's row space by
    construction, for arbitrary w; inexactness lands in the complementarity
    row only.
    """
    w = np.asarray(w_tilde, dtype=float)
    if w.shape != (std.n,):
        raise ValueError(f"w_tilde must have length {std.n}")
    m = std.m
    A = std.A.tocsr()
    V = null_space_matrix(basis, std.A)
    dy = w[:m].copy()
    ds = -(A.T @ dy)
    dx = V.apply(w[m:])
    return NewtonStep(dx, dy, ds, "complementarity_row")
