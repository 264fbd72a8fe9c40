"""Presolve, standard-form conversion and rank repair."""

import numpy as np
import pytest
from scipy import sparse
from scipy.optimize import linprog

from conftest import rng_for
from qipm_bounds.lp_model import (INF, ColumnDef, GeneralLP, RowDef,
                                  SparseMatrix, parse_mps)
from qipm_bounds.standardize import (InfeasibleProblem, UnboundedProblem,
                                     ensure_full_row_rank, presolve,
                                     standardize, to_standard_form)


def make_lp(rows, cols, coeffs, objective, sense="min", constant=0.0):
    """rows: (name, sense, rhs[, range]); cols: (name, lo, up);
    coeffs: (row_idx, col_idx, value)."""
    rowdefs = [RowDef(*r) for r in rows]
    coldefs = [ColumnDef(*c) for c in cols]
    return GeneralLP(
        name="test", objective_sense=sense, objective_name="obj",
        rows=rowdefs, columns=coldefs,
        coefficients=SparseMatrix.from_entries(len(rows), len(cols), coeffs),
        objective=np.asarray(objective, dtype=float),
        objective_constant=constant)


def solve_general_oracle(lp):
    """Reference optimum of a GeneralLP via scipy's HiGHS front end."""
    sign = 1.0 if lp.objective_sense == "min" else -1.0
    a = lp.coefficients.to_dense()
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for i, row in enumerate(lp.rows):
        lo, hi = row.interval()
        if lo == hi:
            a_eq.append(a[i])
            b_eq.append(lo)
            continue
        if hi < INF:
            a_ub.append(a[i])
            b_ub.append(hi)
        if lo > -INF:
            a_ub.append(-a[i])
            b_ub.append(-lo)
    bounds = [(c.lower if c.lower > -INF else None,
               c.upper if c.upper < INF else None) for c in lp.columns]
    res = linprog(sign * lp.objective,
                  A_ub=np.array(a_ub) if a_ub else None,
                  b_ub=np.array(b_ub) if b_ub else None,
                  A_eq=np.array(a_eq) if a_eq else None,
                  b_eq=np.array(b_eq) if b_eq else None,
                  bounds=bounds, method="highs")
    if not res.success:
        return res.status, None
    return 0, sign * res.fun + lp.objective_constant


def solve_standard_oracle(std):
    res = linprog(std.c, A_eq=std.A.to_dense(), b_eq=std.b,
                  bounds=[(0, None)] * std.n, method="highs")
    if not res.success:
        return res.status, None
    return 0, std.original_objective(res.fun)


class TestPresolve:
    def test_vacuous_row_removed(self):
        lp = make_lp([("r0", "<=", 1.0), ("r1", "<=", 5.0)],
                     [("x", 0.0, INF)], [(1, 0, 1.0)], [1.0])
        out = presolve(lp)
        assert [r.name for r in out.rows] == ["r1"]
        assert any("empty row" in e for e in out.transform_log)

    def test_vacuous_row_infeasible(self):
        lp = make_lp([("r0", ">=", 1.0)], [("x", 0.0, INF)], [], [1.0])
        with pytest.raises(InfeasibleProblem):
            presolve(lp)

    def test_positive_scaling_duplicates_merge(self):
        lp = make_lp([("r0", "<=", 3.0), ("r1", "<=", 6.0)],
                     [("x", 0.0, INF), ("y", 0.0, INF)],
                     [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 2.0)],
                     [-1.0, -1.0])
        out = presolve(lp)
        assert out.n_rows == 1
        assert any("merge duplicate" in e for e in out.transform_log)
        # tightest interval wins: both describe x + y <= 3
        assert out.rows[0].interval() == (-INF, 3.0)

    def test_fixed_variable_substituted(self):
        lp = make_lp([("r0", "<=", 5.0)],
                     [("x", 2.0, 2.0), ("y", 0.0, INF)],
                     [(0, 0, 1.0), (0, 1, 1.0)], [1.0, 1.0])
        out = presolve(lp)
        assert [c.name for c in out.columns] == ["y"]
        assert out.rows[0].interval() == (-INF, 3.0)
        assert out.objective_constant == 2.0
        # feasible-set equivalence through the reference solver
        _, val_orig = solve_general_oracle(lp)
        _, val_new = solve_general_oracle(out)
        assert val_orig == pytest.approx(val_new, rel=1e-9)

    def test_empty_column_unbounded(self):
        lp = make_lp([("r0", "<=", 1.0)], [("x", 0.0, INF), ("z", 0.0, INF)],
                     [(0, 0, 1.0)], [1.0, -1.0])
        with pytest.raises(UnboundedProblem):
            presolve(lp)

    def test_empty_column_fixed_at_best_bound(self):
        lp = make_lp([("r0", "<=", 1.0)], [("x", 0.0, INF), ("z", 0.0, 4.0)],
                     [(0, 0, 1.0)], [1.0, -2.0])
        out = presolve(lp)
        assert [c.name for c in out.columns] == ["x"]
        assert out.objective_constant == -8.0


class TestToStandardForm:
    def test_single_surplus(self):
        lp = make_lp([("c1", ">=", 1.0)], [("x", 0.0, INF)],
                     [(0, 0, 1.0)], [1.0])
        std = to_standard_form(lp)
        assert std.A.to_dense().tolist() == [[1.0, -1.0]]
        assert std.b.tolist() == [1.0]
        assert std.c.tolist() == [1.0, 0.0]
        assert std.column_provenance == ["original", "surplus"]

    def test_free_variable_split(self):
        lp = make_lp([("c1", "=", 2.0)], [("y", -INF, INF)],
                     [(0, 0, 1.0)], [0.0])
        std = to_standard_form(lp)
        assert std.A.to_dense().tolist() == [[1.0, -1.0]]
        assert std.column_provenance == ["free_pos", "free_neg"]

    def test_two_sided_bound_becomes_row(self):
        lp = make_lp([("c1", "<=", 3.0)], [("x", 0.0, 5.0)],
                     [(0, 0, 1.0)], [-1.0])
        std = to_standard_form(lp)
        assert (std.m, std.n) == (2, 3)
        dense = std.A.to_dense()
        np.testing.assert_allclose(dense, [[1.0, 1.0, 0.0], [1.0, 0.0, 1.0]])
        np.testing.assert_allclose(std.b, [3.0, 5.0])
        # equal optima on both polytopes for c = (-1)
        _, val_orig = solve_general_oracle(lp)
        _, val_std = solve_standard_oracle(std)
        assert val_std == pytest.approx(val_orig, rel=1e-9)

    def test_max_objective_negated(self):
        lp = make_lp([("c1", "<=", 4.0)], [("x", 0.0, INF)],
                     [(0, 0, 1.0)], [1.0], sense="max")
        std = to_standard_form(lp)
        assert std.c.tolist() == [-1.0, 0.0]
        assert std.objective_sign == -1.0
        _, val = solve_standard_oracle(std)
        assert val == pytest.approx(4.0)

    def test_mirrored_upper_bounded_variable(self):
        # x <= 2 with no lower bound: minimize x has optimum at -inf unless
        # constrained; use a >= row to pin it
        lp = make_lp([("c1", ">=", -5.0)], [("x", -INF, 2.0)],
                     [(0, 0, 1.0)], [1.0])
        std = to_standard_form(lp)
        _, val = solve_standard_oracle(std)
        assert val == pytest.approx(-5.0)


class TestEnsureFullRowRank:
    def _std(self, a, b):
        a = np.asarray(a, dtype=float)
        from qipm_bounds.lp_model import StandardLP
        return StandardLP(
            A=SparseMatrix(sparse.csr_matrix(a)), b=np.asarray(b, dtype=float),
            c=np.zeros(a.shape[1]), column_provenance=["original"] * a.shape[1],
            column_names=[f"x{j}" for j in range(a.shape[1])])

    def test_scaled_duplicate_dropped(self):
        std = self._std([[1.0, 1.0], [2.0, 2.0]], [2.0, 4.0])
        out = ensure_full_row_rank(std)
        assert out.m == 1
        np.testing.assert_allclose(out.A.to_dense(), [[1.0, 1.0]])

    def test_contradictory_dependence_infeasible(self):
        std = self._std([[1.0, 1.0], [2.0, 2.0]], [2.0, 5.0])
        with pytest.raises(InfeasibleProblem):
            ensure_full_row_rank(std)

    def test_random_stacked_combinations(self):
        rng = rng_for(7)
        for trial in range(10):
            a = rng.normal(size=(10, 20))
            w = rng.normal(size=(3, 10))
            stacked = np.vstack([a, w @ a])
            x0 = rng.uniform(0.5, 1.5, size=20)
            b = stacked @ x0
            out = ensure_full_row_rank(self._std(stacked, b))
            assert out.m == np.linalg.matrix_rank(stacked) == 10


class TestPipelineProperties:
    @pytest.mark.parametrize("seed", range(25))
    def test_equivalence_and_rank(self, seed):
        lp = random_general_lp(seed)
        status, val_orig = solve_general_oracle(lp)
        std = standardize(lp)
        assert std.m <= std.n
        dense = std.A.to_dense()
        if std.m:
            assert np.linalg.matrix_rank(dense) == std.m
        status_std, val_std = solve_standard_oracle(std)
        assert status == status_std == 0
        assert val_std == pytest.approx(val_orig, rel=1e-6)

    def test_overdetermined_equalities_reduce_below_n(self):
        # more equality rows than columns: rank repair must bring m <= n
        rng = rng_for(99)
        a = rng.normal(size=(3, 6))
        stacked = np.vstack([a, rng.normal(size=(5, 3)) @ a])  # 8 rows, rank 3
        x0 = rng.uniform(0.5, 1.5, size=6)
        b = stacked @ x0
        rows = [(f"e{i}", "=", float(b[i])) for i in range(8)]
        cols = [(f"x{j}", 0.0, INF) for j in range(6)]
        coeffs = [(i, j, float(stacked[i, j])) for i in range(8)
                  for j in range(6) if stacked[i, j] != 0.0]
        lp = make_lp(rows, cols, coeffs, np.ones(6))
        std = standardize(lp)
        assert std.m <= std.n
        assert np.linalg.matrix_rank(std.A.to_dense()) == std.m == 3

    def test_rankdef_corpus_file(self):
        from qipm_bounds.corpus import corpus_dir
        lp = parse_mps((corpus_dir() / "raw" / "rankdef_dup.mps").read_text())
        std = standardize(lp)
        assert np.linalg.matrix_rank(std.A.to_dense()) == std.m
        _, val_orig = solve_general_oracle(lp)
        _, val_std = solve_standard_oracle(std)
        assert val_std == pytest.approx(val_orig, rel=1e-9)


def random_general_lp(seed: int) -> GeneralLP:
    """Feasible bounded LP with mixed senses, ranges and bound types."""
    rng = rng_for(1000 + seed)
    n = int(rng.integers(3, 8))
    m = int(rng.integers(2, 6))
    x0 = rng.uniform(-1.0, 2.0, size=n)
    cols = []
    for j in range(n):
        lo = x0[j] - rng.uniform(0.5, 2.0)
        hi = x0[j] + rng.uniform(0.5, 2.0)
        cols.append((f"x{j}", lo, hi))
    a = rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.7)
    act = a @ x0
    rows = []
    for i in range(m):
        kind = rng.integers(4)
        if kind == 0:
            rows.append((f"r{i}", "<=", act[i] + rng.uniform(0.1, 1.0)))
        elif kind == 1:
            rows.append((f"r{i}", ">=", act[i] - rng.uniform(0.1, 1.0)))
        elif kind == 2:
            rows.append((f"r{i}", "=", act[i]))
        else:  # ranged row whose interval contains the activity
            slack = rng.uniform(0.1, 1.0)
            hi = act[i] + slack
            rows.append((f"r{i}", "<=", hi, slack + rng.uniform(0.1, 1.0)))
    coeffs = [(i, j, a[i, j]) for i in range(m) for j in range(n)
              if a[i, j] != 0.0]
    return make_lp(rows, cols, coeffs, rng.normal(size=n),
                   sense="max" if rng.random() < 0.3 else "min",
                   constant=float(rng.normal()))
