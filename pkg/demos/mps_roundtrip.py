"""Read an MPS file, inspect the model, write it back, and check round-trip."""

from qipm_bounds import emit_mps, parse_mps
from qipm_bounds.corpus import corpus_dir

path = corpus_dir() / "tiny" / "bounds_mix.mps"
lp = parse_mps(path.read_text())

print(f"{lp.name}: {lp.n_rows} constraint rows, {lp.n_cols} columns")
for row in lp.rows:
    lo, hi = row.interval()
    print(f"  row {row.name:<4} sense {row.sense:<2} interval [{lo}, {hi}]")
for col in lp.columns:
    print(f"  col {col.name:<4} bounds [{col.lower}, {col.upper}]")
for w in lp.warnings:
    print(f"  warning: {w}")

text = emit_mps(lp)
again = parse_mps(text)
same = (
    [r.interval() for r in again.rows] == [r.interval() for r in lp.rows]
    and [(c.lower, c.upper) for c in again.columns]
    == [(c.lower, c.upper) for c in lp.columns]
)
print("round-trip preserves rows and bounds:", same)
print()
print(text)
