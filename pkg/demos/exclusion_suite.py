"""Run the bundled corpus end to end and print per-instance verdicts.

For each instance and both Newton-system formulations: quantum cycle lower
bound times the 800 ps reference cycle duration, against the measured
classical solve time. "excluded" means even this deliberately optimistic
quantum bound cannot undercut the classical solver on that instance.
"""

from pathlib import Path

from qipm_bounds.corpus import corpus_dir
from qipm_bounds.harness import AnalysisConfig, run_suite
from qipm_bounds.report import emit_report

cfg = AnalysisConfig(seed=11, sigma_min_timeout=15.0, sigma_min_samples=2000)
report = run_suite(corpus_dir(), cfg)

marker = report.reference_marker
print(f"{'instance':<14} {'form':<5} {'s':>4} {'kappa_lb':>10} {'cycles':>14} "
      f"{'q-bound@800ps':>14} {'classical':>11}  verdict")
for rec in report.records:
    for name, f in rec.formulations.items():
        if not f.ok:
            print(f"{rec.name:<14} {name:<5} analysis failed: {f.failure}")
            continue
        quantum = f.total_cycles * marker
        classical = rec.classical.wall_time
        verdict = "excluded" if quantum > classical else "undecided"
        if f.degenerate:
            verdict = "degenerate (d < 2)"
        print(f"{rec.name:<14} {name:<5} {f.sparsity:>4} {f.kappa_lower:>10.3f} "
              f"{f.total_cycles:>14} {quantum:>13.3g}s {classical:>10.3g}s"
              f"  {verdict}")

out = Path("qipm_bounds_report")
written = emit_report(report, out)
print()
print("reports written:")
for p in written:
    print(" ", p)
