"""Matrix-free Newton systems at the all-ones iterate, and why inexact
solves stay feasible.

The MNES transfers any solve residual into the complementarity row: the
recovered step satisfies the primal and dual feasibility rows for an
arbitrarily bad solution of the reduced system. The OSS parameterizes the
step so that A dx = 0 and ds lies in A's row space by construction.
"""

import numpy as np

from qipm_bounds import parse_mps, standardize
from qipm_bounds.corpus import corpus_dir
from qipm_bounds.newton import (build_fbar, build_mnes, build_oss,
                                canonical_iterate, recover_updates_mnes,
                                recover_updates_oss, select_basis)

std = standardize(parse_mps((corpus_dir() / "tiny" / "bounds_mix.mps").read_text()))
m, n = std.m, std.n
print(f"instance: m = {m}, n = {n}")

it = canonical_iterate(m, n)
basis = select_basis(std.A)
beta_mu = it.default_beta_mu()
print("basic columns (pivot order):", basis.basic)

mnes = build_mnes(std, it, basis, beta_mu)
fbar = build_fbar(basis, std.A, it)
f = np.column_stack([fbar.apply(np.eye(n - m)[:, j]) for j in range(n - m)])
mhat = np.column_stack([mnes.apply(np.eye(m)[:, j]) for j in range(m)])
print("max |M_hat - (I + F F')| =",
      np.abs(mhat - np.eye(m) - f @ f.T).max())

rng = np.random.default_rng(0)
a = std.A.to_dense()

# deliberately terrible MNES solution: zero, full residual
z = np.zeros(m)
step = recover_updates_mnes(std, it, basis, beta_mu, z, r_hat=mnes.rhs)
print("MNES with z = 0:")
print("  primal row residual:", np.linalg.norm(a @ step.dx - (std.b - a @ it.x)))
print("  dual row residual:  ",
      np.linalg.norm(a.T @ step.dy + step.ds - (std.c - a.T @ it.y - it.s)))
print("  residual lives in:  ", step.residual_location)

# arbitrary OSS vector: feasibility of the step is structural
w = rng.normal(size=n)
step = recover_updates_oss(std, it, basis, w)
print("OSS with random w:")
print("  ||A dx|| =", np.linalg.norm(a @ step.dx))
print("  ds + A'dy identically zero:",
      bool(np.all(step.ds == -(a.T @ step.dy))))

oss = build_oss(std, it, basis, beta_mu)
print("OSS right-hand side tau:", oss.rhs[:4], "...")
