#!/usr/bin/env python3
"""Generate the bundled mini-corpus of MPS instances (run once, outputs are
committed). Sizes are chosen so the two larger instances have m >= 10 after
standardization while everything stays desk-scale."""

from __future__ import annotations

from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "qipm_bounds" / "corpus"


def _lcg(seed: int):
    state = seed & 0xFFFFFFFF
    while True:
        state = (1103515245 * state + 12345) & 0x7FFFFFFF
        yield state


def tiny_min() -> str:
    return """NAME          TINYMIN
ROWS
 N  COST
 G  C1
COLUMNS
    X         COST          1   C1            1
RHS
    RHS       C1            1
ENDATA
"""


def square_band(m: int = 6) -> str:
    """Equality system with square lower-triangular band; n = m after
    standardization (no slacks, default bounds)."""
    lines = ["NAME          SQUAREBAND", "ROWS", " N  COST"]
    for i in range(m):
        lines.append(f" E  R{i}")
    lines.append("COLUMNS")
    rng = _lcg(7)
    rhs = [0.0] * m
    sol = [(next(rng) % 5) + 1 for _ in range(m)]
    cols: dict[int, list[tuple[str, float]]] = {j: [] for j in range(m)}
    for i in range(m):
        coeffs = {i: 2.0 + (next(rng) % 3)}
        if i > 0:
            coeffs[i - 1] = 1.0
        for j, v in coeffs.items():
            cols[j].append((f"R{i}", v))
            rhs[i] += v * sol[j]
    for j in range(m):
        entries = [("COST", 1.0)] + cols[j]
        for k in range(0, len(entries), 2):
            chunk = entries[k:k + 2]
            body = "".join(f"  {r:<8}{v:>12g}" for r, v in chunk)
            lines.append(f"    X{j:<7}{body}")
    lines.append("RHS")
    for i in range(m):
        lines.append(f"    RHS       R{i:<8}{rhs[i]:>12g}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def bounds_mix() -> str:
    """Small LP with a ranged row, a free variable, a two-sided bound, a
    fixed variable and a negative lower bound."""
    return """NAME          BOUNDSMIX
ROWS
 N  OBJ
 L  CAP
 G  DEM
 E  BAL
COLUMNS
    XA        OBJ           2   CAP           1
    XA        DEM           1
    XB        OBJ           3   CAP           2
    XB        BAL           1
    XC        OBJ          -1   DEM           1
    XC        BAL           1
    XF        OBJ           1   CAP           1
    XF        BAL          -1
RHS
    RHS       CAP          10   DEM           2
    RHS       BAL           3
RANGES
    RNG       CAP           4
BOUNDS
 UP BND       XA            6
 LO BND       XB           -2
 UP BND       XB            5
 FR BND       XF
 FX BND       XC            1
ENDATA
"""


def cover_pairs(pairs: int = 8) -> str:
    """Vertex-cover relaxation on disjoint edges: x_u + x_v >= 1. The
    standardized coupling operator satisfies F F' = 2 I, so kappa = 1."""
    lines = ["NAME          COVERPAIRS", "ROWS", " N  COST"]
    for e in range(pairs):
        lines.append(f" G  E{e}")
    lines.append("COLUMNS")
    for e in range(pairs):
        lines.append(f"    U{e:<7}  COST          1  E{e:<10}       1")
        lines.append(f"    V{e:<7}  COST          1  E{e:<10}       1")
    lines.append("RHS")
    for e in range(pairs):
        lines.append(f"    RHS       E{e:<8}           1")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def slack_ladder(m: int = 80, n: int = 100) -> str:
    """Pure-slack instance: banded <= rows, negative costs push against the
    constraints so the optimum is interior work for the IPM."""
    rng = _lcg(1234)
    lines = ["NAME          SLACKLADDER", "ROWS", " N  COST"]
    for i in range(m):
        lines.append(f" L  R{i}")
    lines.append("COLUMNS")
    cols: dict[int, list[tuple[str, float]]] = {j: [] for j in range(n)}
    for i in range(m):
        js = sorted({i, (i + 1) % n, (i + 17) % n, (i + 2 * m // 3) % n})
        for j in js:
            v = 1.0 + (next(rng) % 8)
            cols[j].append((f"R{i}", v))
    for j in range(n):
        cost = -(1.0 + (next(rng) % 5))
        entries = [("COST", cost)] + cols[j]
        for k in range(0, len(entries), 2):
            chunk = entries[k:k + 2]
            body = "".join(f"  {r:<8}{v:>10g}" for r, v in chunk)
            lines.append(f"    X{j:<7}{body}")
    lines.append("RHS")
    for i in range(m):
        rhs = 20.0 + (next(rng) % 30)
        lines.append(f"    RHS       R{i:<8}{rhs:>10g}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def flow_grid(width: int = 4, layers: int = 4) -> str:
    """Max-flow relaxation on a layered DAG; conservation equalities plus
    capacity upper bounds (which standardize into bound-slack rows)."""
    rng = _lcg(99)
    arcs: list[tuple[str, str, str, float]] = []  # (name, tail, head, cap)

    def node(l, w):
        return f"N{l}_{w}"

    k = 0
    for w in range(width):
        arcs.append((f"A{k}", "SRC", node(0, w), 3.0 + (next(rng) % 4)))
        k += 1
    for l in range(layers - 1):
        for w in range(width):
            for dw in (0, 1):
                arcs.append((f"A{k}", node(l, w), node(l + 1, (w + dw) % width),
                             1.0 + (next(rng) % 4)))
                k += 1
    for w in range(width):
        arcs.append((f"A{k}", node(layers - 1, w), "SNK",
                     3.0 + (next(rng) % 4)))
        k += 1

    internal = [node(l, w) for l in range(layers) for w in range(width)]
    lines = ["NAME          FLOWGRID", "OBJSENSE", "    MAX", "ROWS",
             " N  FLOW"]
    for nd in internal:
        lines.append(f" E  C{nd}")
    lines.append("COLUMNS")
    for name, tail, head, cap in arcs:
        entries: list[tuple[str, float]] = []
        if tail == "SRC":
            entries.append(("FLOW", 1.0))
        if tail in internal:
            entries.append((f"C{tail}", -1.0))
        if head in internal:
            entries.append((f"C{head}", 1.0))
        for kk in range(0, len(entries), 2):
            chunk = entries[kk:kk + 2]
            body = "".join(f"  {r:<10}{v:>8g}" for r, v in chunk)
            lines.append(f"    {name:<8}{body}")
    lines.append("RHS")
    lines.append("BOUNDS")
    for name, tail, head, cap in arcs:
        lines.append(f" UP BND       {name:<10}{cap:>8g}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def rankdef_dup() -> str:
    """Raw file with a positively scaled duplicate row and an equality row
    that is the sum of two others: presolve merges the former, rank repair
    drops the latter."""
    return """NAME          RANKDEF
ROWS
 N  COST
 L  R1
 L  R1DUP
 E  E1
 E  E2
 E  ESUM
COLUMNS
    X         COST          1   R1            1
    X         R1DUP         2   E1            1
    X         ESUM          1
    Y         COST          2   R1            1
    Y         R1DUP         2   E2            1
    Y         ESUM          1
    Z         COST         -1   E1            1
    Z         ESUM          1
    W         COST          1   E2            1
    W         ESUM          1
RHS
    RHS       R1            3   R1DUP         6
    RHS       E1            2   E2            3
    RHS       ESUM          5
ENDATA
"""


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    files = {
        "tiny/tiny_min.mps": tiny_min(),
        "tiny/square_band.mps": square_band(),
        "tiny/bounds_mix.mps": bounds_mix(),
        "cover/cover_pairs.mps": cover_pairs(),
        "slack/slack_ladder.mps": slack_ladder(),
        "flow/flow_grid.mps": flow_grid(),
        "raw/rankdef_dup.mps": rankdef_dup(),
    }
    for rel, text in files.items():
        path = OUT / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        print(path)


if __name__ == "__main__":
    main()
