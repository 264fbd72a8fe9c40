"""Pipeline orchestration, curves, reports and the CLI."""

import json
from fractions import Fraction

import pytest

from qipm_bounds.classical import SolveOutcome
from qipm_bounds.corpus import corpus_dir
from qipm_bounds.harness import (AnalysisConfig, FormulationResult,
                                 InstanceRecord, analyze_instance,
                                 exclusion_curve, instance_seed, run_suite)
from qipm_bounds.report import (RECORD_COLUMNS, difficulty_svg, emit_report,
                                exclusion_svg, records_csv, report_from_json,
                                report_json)

FAST = AnalysisConfig(sigma_min_timeout=10.0, sigma_min_samples=500)


@pytest.fixture(scope="module")
def tiny_record():
    path = corpus_dir() / "tiny" / "tiny_min.mps"
    return analyze_instance(path, FAST, family="tiny")


class TestAnalyzeInstance:
    def test_tiny_min_fields(self, tiny_record):
        rec = tiny_record
        assert rec.status == "ok"
        assert (rec.m, rec.n) == (1, 2)
        mnes = rec.formulations["mnes"]
        assert mnes.ok and mnes.d == 1 and mnes.degenerate
        assert mnes.total_cycles == 0
        oss = rec.formulations["oss"]
        assert oss.ok and oss.d == 2 and oss.dilated_dim == 4
        assert oss.gamma >= 2.0
        assert oss.total_cycles > 0
        assert rec.classical is not None and rec.classical.status == "optimal"
        assert set(rec.exclusion) == {"mnes", "oss"}
        assert "parse" in rec.stage_seconds

    def test_unreadable_file(self, tmp_path):
        rec = analyze_instance(tmp_path / "missing.mps", FAST)
        assert rec.status == "error"
        assert "unreadable" in rec.error

    def test_fault_injection_isolates_formulations(self):
        # bounds_mix has n - m < m, so the MNES sigma_min path is exact and
        # needs no sampling; the OSS path fails with sampling disabled
        cfg = AnalysisConfig(sigma_min_timeout=0.0, sigma_min_samples=0)
        path = corpus_dir() / "tiny" / "bounds_mix.mps"
        rec = analyze_instance(path, cfg, family="tiny")
        assert rec.status == "ok"
        assert rec.formulations["mnes"].ok
        assert rec.formulations["mnes"].sigma_min_method == \
            "rank_deficiency_exact"
        assert not rec.formulations["oss"].ok
        assert "NumericalError" in rec.formulations["oss"].failure

    def test_fixed_format_file_end_to_end(self, tmp_path):
        # classic fixed-column dialect with spaced names, driven through the
        # whole pipeline, not just the parser
        def fx(*fields, lead="    "):
            widths = (10, 10, 15, 10, 12)
            return lead + "".join(f.ljust(w) for f, w in zip(fields, widths))

        text = "\n".join([
            "NAME          FIXED CASE",
            "ROWS",
            " N  TOTAL COST",
            " L  CAP ONE",
            " G  DEMAND A",
            "COLUMNS",
            fx("VAR X", "TOTAL COST", "1.5", "CAP ONE", "1.0"),
            fx("VAR X", "DEMAND A", "1.0"),
            fx("VAR Y", "TOTAL COST", "2.0", "CAP ONE", "2.0"),
            "RHS",
            fx("RHS", "CAP ONE", "8.0", "DEMAND A", "2.0"),
            "BOUNDS",
            " UP BND       VAR Y          5.0",
            "ENDATA",
        ]) + "\n"
        path = tmp_path / "fixedcase.mps"
        path.write_text(text)
        rec = analyze_instance(path, FAST, family="misc")
        assert rec.status == "ok", rec.error
        assert rec.classical.status == "optimal"
        assert rec.classical.objective == pytest.approx(3.0, abs=1e-6)
        assert all(f.ok for f in rec.formulations.values())

    def test_determinism_modulo_timing(self):
        path = corpus_dir() / "tiny" / "bounds_mix.mps"
        a = analyze_instance(path, FAST, family="tiny")
        b = analyze_instance(path, FAST, family="tiny")
        for f in ("mnes", "oss"):
            fa, fb = a.formulations[f], b.formulations[f]
            assert (fa.sparsity, fa.kappa_lower, fa.gamma, fa.sigma_max_lb,
                    fa.sigma_min_ub, fa.query_count, fa.total_cycles) == \
                   (fb.sparsity, fb.kappa_lower, fb.gamma, fb.sigma_max_lb,
                    fb.sigma_min_ub, fb.query_count, fb.total_cycles)
        assert a.seed == b.seed == instance_seed(FAST.seed, "tiny",
                                                 "bounds_mix")
        assert a.classical.objective == pytest.approx(b.classical.objective,
                                                      rel=1e-12)


def synthetic_record(name, family, cycles_mnes, cycles_oss, wall):
    rec = InstanceRecord(name=name, family=family, m=3, n=6)
    for formulation, cycles in (("mnes", cycles_mnes), ("oss", cycles_oss)):
        rec.formulations[formulation] = FormulationResult(
            formulation=formulation, d=3, sparsity=3, kappa_lower=1.0,
            gamma=3.0, query_count=1, total_cycles=cycles)
    rec.classical = SolveOutcome(status="optimal", objective=0.0,
                                 wall_time=wall)
    return rec


class TestExclusionCurve:
    def test_single_threshold(self):
        rec = synthetic_record("a", "fam", 4800, 4800, 1.0)
        grid = [1e-6, 1.0 / 4800 - 1e-9, 1.0 / 4800 + 1e-9, 1.0]
        curves, counts, excluded = exclusion_curve([rec], grid)
        assert curves["fam"]["mnes"] == [1.0, 1.0, 0.0, 0.0]
        assert counts["fam"]["mnes"][0] == [1, 1]
        assert excluded["fam"] == 0

    def test_flag_equals_recomputation(self):
        rec = synthetic_record("a", "fam", 4800, 10 ** 9, 0.5)
        for t in (1e-9, 1e-5, 1e-3):
            flag = rec.quantum_lb_below_classical("mnes", t)
            assert flag == (Fraction(4800) * Fraction(str(t))
                            < Fraction(0.5))

    def test_unconverged_classical_gives_no_flag(self):
        rec = synthetic_record("a", "fam", 4800, 4800, 1.0)
        rec.classical.status = "iteration_limit"
        assert rec.quantum_lb_below_classical("mnes", 1e-9) is None
        _, counts, excluded = exclusion_curve([rec], [1e-9])
        assert counts["fam"]["mnes"][0] == [0, 0]
        assert excluded["fam"] == 1

    def test_dominant_cycles_give_zero_curve(self):
        rec = synthetic_record("a", "fam", 10 ** 30, 10 ** 30, 1e-3)
        curves, _, _ = exclusion_curve([rec], [1e-15, 1e-9, 1e-3])
        assert curves["fam"]["mnes"] == [0.0, 0.0, 0.0]

    def test_two_records_step_structure(self):
        r1 = synthetic_record("a", "fam", 1000, 1000, 1.0)   # threshold 1e-3
        r2 = synthetic_record("b", "fam", 10 ** 6, 10 ** 6, 1.0)  # 1e-6
        curves, _, _ = exclusion_curve([r1, r2], [1e-9, 1e-4, 1e-2])
        assert curves["fam"]["mnes"] == [1.0, 0.5, 0.0]

    def test_curves_nonincreasing(self):
        recs = [synthetic_record(f"r{k}", "fam", 10 ** (3 + k), 10 ** (4 + k),
                                 10.0 ** -k) for k in range(4)]
        grid = [10.0 ** -e for e in range(12, 0, -1)]
        curves, _, _ = exclusion_curve(recs, grid)
        for series in curves["fam"].values():
            assert all(a >= b for a, b in zip(series, series[1:]))


class TestRunSuite:
    def test_family_denominators(self, tmp_path):
        src = (corpus_dir() / "tiny" / "tiny_min.mps").read_text()
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        (tmp_path / "a" / "one.mps").write_text(src)
        (tmp_path / "a" / "two.mps").write_text(src)
        (tmp_path / "b" / "three.mps").write_text(src)
        report = run_suite(tmp_path, FAST)
        assert sorted(report.curves) == ["a", "b"]
        assert report.curve_counts["a"]["oss"][0][1] == 2
        assert report.curve_counts["b"]["oss"][0][1] == 1

    def test_errored_instance_excluded(self, tmp_path):
        (tmp_path / "good.mps").write_text(
            (corpus_dir() / "tiny" / "tiny_min.mps").read_text())
        (tmp_path / "bad.mps").write_text("THIS IS NOT MPS\n")
        report = run_suite(tmp_path, FAST)
        assert report.metadata["errored"] == 1
        assert any("excluded" in w for w in report.warnings)
        assert report.curve_counts["misc"]["oss"][0][1] == 1

    def test_empty_directory_warns(self, tmp_path):
        report = run_suite(tmp_path, FAST)
        assert report.records == []
        assert any("no MPS instances" in w for w in report.warnings)

    def test_worker_count_does_not_change_results(self, tmp_path):
        src = (corpus_dir() / "tiny" / "bounds_mix.mps").read_text()
        (tmp_path / "one.mps").write_text(src)
        (tmp_path / "two.mps").write_text(src)
        seq = run_suite(tmp_path, FAST)
        par_cfg = AnalysisConfig(sigma_min_timeout=10.0,
                                 sigma_min_samples=500, workers=2)
        par = run_suite(tmp_path, par_cfg)
        for a, b in zip(seq.records, par.records):
            assert a.name == b.name
            for f in ("mnes", "oss"):
                assert a.formulations[f].total_cycles == \
                    b.formulations[f].total_cycles


@pytest.fixture(scope="module")
def suite(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("suite")
    src = corpus_dir()
    for rel in ("tiny/tiny_min.mps", "tiny/bounds_mix.mps",
                "cover/cover_pairs.mps"):
        dest = tmp / rel
        dest.parent.mkdir(exist_ok=True)
        dest.write_text((src / rel).read_text())
    return run_suite(tmp, FAST)


class TestReports:
    def test_empty_report_is_header_only(self, tmp_path):
        report = run_suite(tmp_path, FAST)
        text = records_csv(report)
        assert text.splitlines() == [",".join(RECORD_COLUMNS)]

    def test_row_count(self, suite):
        lines = records_csv(suite).splitlines()
        assert len(lines) == 1 + 2 * len(suite.records)

    def test_csv_recomputability(self, suite):
        import csv as csvmod
        import io
        rows = list(csvmod.DictReader(io.StringIO(records_csv(suite))))
        recomputed = {}
        for row in rows:
            if row["status"] != "ok" or not row["total_cycles"]:
                continue
            key = (row["family"], row["formulation"])
            cycles = int(row["total_cycles"])
            wall = float(row["classical_wall_time"])
            for t in suite.duration_grid:
                flag = Fraction(cycles) * Fraction(str(t)) < Fraction(wall)
                recomputed.setdefault(key, {}).setdefault(t, [0, 0])
                recomputed[key][t][0] += bool(flag)
                recomputed[key][t][1] += 1
        for (family, formulation), per_t in recomputed.items():
            for i, t in enumerate(suite.duration_grid):
                below, total = per_t[t]
                assert suite.curve_counts[family][formulation][i] == \
                    [below, total]

    def test_failed_formulation_row_shape(self):
        from qipm_bounds.report import record_rows
        cfg = AnalysisConfig(sigma_min_timeout=0.0, sigma_min_samples=0)
        rec = analyze_instance(corpus_dir() / "tiny" / "bounds_mix.mps", cfg,
                               "tiny")
        rows = {r["formulation"]: r for r in record_rows(rec)}
        assert rows["mnes"]["status"] == "ok"
        assert rows["oss"]["status"] == "failed"
        assert "NumericalError" in rows["oss"]["failure"]
        assert rows["oss"]["total_cycles"] == "0"

    def test_emit_report_files(self, suite, tmp_path):
        written = emit_report(suite, tmp_path, {"csv", "json", "svg"})
        names = {p.name for p in written}
        assert names == {"records.csv", "curves.csv", "report.json",
                         "difficulty.svg", "exclusion_curves.svg"}
        payload = json.loads((tmp_path / "report.json").read_text())
        assert payload["config"]["epsilon"] == FAST.epsilon
        assert payload["reference_marker"] == 8e-10

    def test_svg_deterministic(self, suite):
        assert difficulty_svg(suite) == difficulty_svg(suite)
        assert exclusion_svg(suite) == exclusion_svg(suite)
        assert exclusion_svg(suite).startswith("<svg")
        assert "8e-10" in exclusion_svg(suite)

    def test_svg_from_reloaded_json_byte_identical(self, suite):
        reloaded = report_from_json(report_json(suite))
        assert difficulty_svg(reloaded) == difficulty_svg(suite)
        assert exclusion_svg(reloaded) == exclusion_svg(suite)

    def test_unknown_format_rejected(self, suite, tmp_path):
        with pytest.raises(ValueError):
            emit_report(suite, tmp_path, {"pdf"})


class TestCli:
    def test_analyze_json_stdout(self, capsys):
        from qipm_bounds.cli import main
        path = corpus_dir() / "tiny" / "tiny_min.mps"
        code = main(["analyze", str(path), "--sigma-min-timeout", "5",
                     "--sigma-min-samples", "200"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["name"] == "tiny_min"
        assert payload["formulations"]["oss"]["total_cycles"] > 0

    def test_suite_writes_reports_and_exit_code(self, tmp_path, capsys):
        from qipm_bounds.cli import main
        data = tmp_path / "data"
        data.mkdir()
        (data / "t.mps").write_text(
            (corpus_dir() / "tiny" / "tiny_min.mps").read_text())
        out = tmp_path / "out"
        code = main(["suite", str(data), "--out", str(out),
                     "--formats", "csv,json",
                     "--sigma-min-timeout", "5",
                     "--sigma-min-samples", "200"])
        assert code == 0
        assert (out / "records.csv").exists()
        assert (out / "report.json").exists()
        assert not (out / "difficulty.svg").exists()

    def test_suite_exit_code_two_on_error(self, tmp_path):
        from qipm_bounds.cli import main
        data = tmp_path / "data"
        data.mkdir()
        (data / "bad.mps").write_text("garbage\n")
        code = main(["suite", str(data), "--out", str(tmp_path / "o"),
                     "--formats", "csv"])
        assert code == 2

    def test_config_file_and_env(self, tmp_path, monkeypatch, capsys):
        from qipm_bounds import cli
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(
            {"sigma_min_timeout": 5.0, "sigma_min_samples": 100}))
        monkeypatch.setenv(cli.CONFIG_ENV_VAR, str(cfg_path))
        path = corpus_dir() / "tiny" / "tiny_min.mps"
        assert cli.main(["analyze", str(path)]) == 0
