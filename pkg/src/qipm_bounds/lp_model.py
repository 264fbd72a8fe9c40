"""LP data model and a round-trip safe MPS reader/writer.

Supports both fixed-column and whitespace-delimited MPS with the sections
NAME, OBJSENSE (extension), ROWS, COLUMNS, RHS, RANGES, BOUNDS, ENDATA.
Integrality markers are read and dropped with a recorded warning; the model
keeps LP relaxations only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

INF = math.inf

# sense codes used throughout: "<=", ">=", "=" for constraints, "min"/"max"
# for the objective direction
_ROW_SENSES = {"L": "<=", "G": ">=", "E": "="}
_SENSE_CODES = {"<=": "L", ">=": "G", "=": "E"}


class MpsParseError(ValueError):
    """Malformed MPS input; message carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class SparseMatrix:
    """Immutable real sparse matrix.

    Construction canonicalizes the entry list: duplicate coordinates are
    summed, explicit zeros are dropped, and indices are bounds-checked.
    Backed by CSR storage; a CSC copy is built lazily for column access.
    """

    def __init__(self, csr: sparse.csr_matrix):
        csr = sparse.csr_matrix(csr)
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        self._csr = csr
        self._csc: sparse.csc_matrix | None = None

    @classmethod
    def from_entries(cls, n_rows: int, n_cols: int,
                     entries) -> "SparseMatrix":
        """Build from an iterable of (row, col, value) triples."""
        rows, cols, vals = [], [], []
        for i, j, v in entries:
            if not (0 <= i < n_rows and 0 <= j < n_cols):
                raise IndexError(f"entry ({i}, {j}) outside {n_rows}x{n_cols}")
            rows.append(i)
            cols.append(j)
            vals.append(float(v))
        coo = sparse.coo_matrix(
            (vals, (rows, cols)), shape=(n_rows, n_cols), dtype=float)
        return cls(coo.tocsr())

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        return cls(sparse.csr_matrix(np.asarray(a, dtype=float)))

    @property
    def n_rows(self) -> int:
        return self._csr.shape[0]

    @property
    def n_cols(self) -> int:
        return self._csr.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._csr.shape

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    def tocsr(self) -> sparse.csr_matrix:
        return self._csr

    def tocsc(self) -> sparse.csc_matrix:
        if self._csc is None:
            self._csc = self._csr.tocsc()
        return self._csc

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self._csr @ v

    def rmatvec(self, v: np.ndarray) -> np.ndarray:
        return self._csr.T @ v

    def row_nnz(self) -> np.ndarray:
        return np.diff(self._csr.indptr)

    def col_nnz(self) -> np.ndarray:
        return np.diff(self.tocsc().indptr)

    def row_entries(self, i: int) -> list[tuple[int, float]]:
        """(col, value) pairs of row i, ascending column index."""
        lo, hi = self._csr.indptr[i], self._csr.indptr[i + 1]
        return [(int(j), float(v)) for j, v in
                zip(self._csr.indices[lo:hi], self._csr.data[lo:hi])]

    def col_entries(self, j: int) -> list[tuple[int, float]]:
        """(row, value) pairs of column j, ascending row index."""
        csc = self.tocsc()
        lo, hi = csc.indptr[j], csc.indptr[j + 1]
        return [(int(i), float(v)) for i, v in
                zip(csc.indices[lo:hi], csc.data[lo:hi])]

    def entries(self):
        """Iterate all (row, col, value) triples in CSR order."""
        csr = self._csr
        for i in range(csr.shape[0]):
            for k in range(csr.indptr[i], csr.indptr[i + 1]):
                yield i, int(csr.indices[k]), float(csr.data[k])

    def columns(self, idx) -> "SparseMatrix":
        """Submatrix of the given columns, in the given order."""
        return SparseMatrix(self.tocsc()[:, np.asarray(idx, dtype=int)].tocsr())

    def __repr__(self) -> str:
        return f"SparseMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"


@dataclass
class RowDef:
    """One constraint row: sense is '<=', '>=' or '='; range follows the
    MPS RANGES convention and widens the row to a two-sided interval."""
    name: str
    sense: str
    rhs: float = 0.0
    range: float | None = None

    def interval(self) -> tuple[float, float]:
        """Effective (lower, upper) interval of the row activity."""
        r = self.range
        if self.sense == "<=":
            lo, hi = -INF, self.rhs
            if r is not None:
                lo = self.rhs - abs(r)
        elif self.sense == ">=":
            lo, hi = self.rhs, INF
            if r is not None:
                hi = self.rhs + abs(r)
        else:
            lo = hi = self.rhs
            if r is not None:
                if r >= 0:
                    hi = self.rhs + r
                else:
                    lo = self.rhs + r
        return lo, hi


@dataclass
class ColumnDef:
    """One structural variable with bounds; defaults to [0, +inf)."""
    name: str
    lower: float = 0.0
    upper: float = INF


@dataclass
class GeneralLP:
    """An LP as read from MPS: named rows/columns, mixed senses, ranges,
    two-sided bounds and an objective with optional constant."""
    name: str
    objective_sense: str  # "min" | "max"
    objective_name: str
    rows: list[RowDef]
    columns: list[ColumnDef]
    coefficients: SparseMatrix  # constraint rows x columns
    objective: np.ndarray
    objective_constant: float = 0.0
    warnings: list[str] = field(default_factory=list)
    transform_log: list[str] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    def validate(self) -> None:
        if self.coefficients.shape != (len(self.rows), len(self.columns)):
            raise ValueError("coefficient matrix shape does not match rows/columns")
        if len(self.objective) != len(self.columns):
            raise ValueError("objective length does not match columns")
        names = [r.name for r in self.rows]
        if len(set(names)) != len(names):
            raise ValueError("duplicate row names")
        cnames = [c.name for c in self.columns]
        if len(set(cnames)) != len(cnames):
            raise ValueError("duplicate column names")


@dataclass
class StandardLP:
    """min c'x  s.t.  Ax = b, x >= 0, with A of full row rank.

    The original optimum is objective_sign * (c'x*) + objective_constant;
    column_provenance tags each column as original / slack / surplus /
    bound_slack / free_pos / free_neg.
    """
    A: SparseMatrix
    b: np.ndarray
    c: np.ndarray
    column_provenance: list[str]
    column_names: list[str]
    name: str = ""
    objective_sign: float = 1.0
    objective_constant: float = 0.0
    transform_log: list[str] = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.A.n_rows

    @property
    def n(self) -> int:
        return self.A.n_cols

    def original_objective(self, standard_value: float) -> float:
        """Map a min-form objective value back to the original LP's scale."""
        return self.objective_sign * standard_value + self.objective_constant


# ---------------------------------------------------------------------------
# MPS reading

_SECTIONS = ["NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "RANGES",
             "BOUNDS", "ENDATA"]
_SECTION_RANK = {s: i for i, s in enumerate(_SECTIONS)}

# fixed-format field positions (0-based, end-exclusive), per the classic
# 2-3 / 5-12 / 15-22 / 25-36 / 40-47 / 50-61 layout
_FIXED_FIELDS = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)]


def _fixed_tokens(line: str) -> list[str]:
    toks = []
    for a, b in _FIXED_FIELDS:
        t = line[a:b].strip()
        if t:
            toks.append(t)
    return toks


def _detect_fixed_format(lines: list[str]) -> bool:
    """Heuristic dialect detection from the ROWS section.

    Free-format ROWS data lines split into exactly two tokens; anything else
    (names with embedded blanks) forces fixed-column slicing.
    """
    in_rows = False
    for raw in lines:
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        if raw[:1] not in (" ", "\t"):
            head = raw.split()[0].upper()
            in_rows = head == "ROWS"
            if _SECTION_RANK.get(head, -1) > _SECTION_RANK["ROWS"]:
                break
            continue
        if in_rows and len(raw.split()) != 2:
            return True
    return False


def _num(tok: str, line_no: int) -> float:
    try:
        return float(tok.replace("D", "E").replace("d", "e"))
    except ValueError:
        raise MpsParseError(f"cannot parse number {tok!r}", line_no) from None


def parse_mps(text: str) -> GeneralLP:
    """Parse fixed- or free-format MPS text into a GeneralLP.

    Default variable bounds are [0, +inf); unspecified RHS entries are 0.
    RANGES turn a row into a two-sided constraint per the MPS convention.
    Bound codes UP, LO, FX, FR, MI, PL, BV are handled (BV gives bounds
    [0, 1]); integrality is dropped with a recorded warning.
    """
    lines = text.splitlines()
    fixed = _detect_fixed_format(lines)

    problem_name = ""
    objective_sense = "min"
    objective_name: str | None = None
    rows: list[RowDef] = []
    row_index: dict[str, int] = {}
    free_rows: set[str] = set()
    columns: list[ColumnDef] = []
    col_index: dict[str, int] = {}
    closed_cols: set[str] = set()
    last_col: str | None = None
    coeff_entries: list[tuple[int, int, float]] = []
    obj_coeffs: dict[int, float] = {}
    objective_constant = 0.0
    warnings: list[str] = []
    rhs_seen: set[str] = set()

    section: str | None = None
    saw_endata = False
    pending_objsense = False
    int_mode = False

    for line_no, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("*"):
            continue

        if line[:1] not in (" ", "\t"):
            toks = line.split()
            head = toks[0].upper()
            if head not in _SECTION_RANK:
                raise MpsParseError(f"unknown section {toks[0]!r}", line_no)
            if section is not None and \
                    _SECTION_RANK[head] <= _SECTION_RANK[section]:
                raise MpsParseError(
                    f"section {head} out of order after {section}", line_no)
            required_before = {"COLUMNS": "ROWS", "RHS": "COLUMNS"}
            if head in required_before and \
                    (section is None or _SECTION_RANK[section] <
                     _SECTION_RANK[required_before[head]]):
                raise MpsParseError(
                    f"section {head} before {required_before[head]}", line_no)
            section = head
            if head == "NAME":
                problem_name = line[4:].strip() if not fixed else \
                    line[14:22].strip() or line[4:].strip()
            elif head == "OBJSENSE":
                if len(toks) > 1:
                    objective_sense = toks[1].lower()[:3]
                else:
                    pending_objsense = True
            elif head == "ENDATA":
                saw_endata = True
                break
            continue

        toks = _fixed_tokens(line) if fixed else line.split()
        if not toks:
            continue

        if section == "OBJSENSE" and pending_objsense:
            objective_sense = toks[0].lower()[:3]
            pending_objsense = False
            continue

        if section == "ROWS":
            if len(toks) != 2:
                raise MpsParseError("ROWS entry needs sense and name", line_no)
            sense_code, name = toks[0].upper(), toks[1]
            if name in row_index or name == objective_name or name in free_rows:
                raise MpsParseError(f"duplicate row {name!r}", line_no)
            if sense_code == "N":
                if objective_name is None:
                    objective_name = name
                else:
                    free_rows.add(name)
                    warnings.append(
                        f"extra free row {name!r} ignored (first N row "
                        f"{objective_name!r} is the objective)")
            elif sense_code in _ROW_SENSES:
                row_index[name] = len(rows)
                rows.append(RowDef(name, _ROW_SENSES[sense_code]))
            else:
                raise MpsParseError(f"unknown row sense {sense_code!r}", line_no)

        elif section == "COLUMNS":
            if len(toks) >= 3 and toks[1].upper() in ("'MARKER'", "MARKER"):
                kind = toks[2].strip("'\"").upper()
            elif len(toks) >= 2 and "'MARKER'" in (t.upper() for t in toks):
                kind = toks[-1].strip("'\"").upper()
            else:
                kind = None
            if kind in ("INTORG", "INTEND"):
                int_mode = kind == "INTORG"
                if int_mode and not any("integrality" in w for w in warnings):
                    warnings.append(
                        "integrality markers present; integer restrictions "
                        "dropped (LP relaxation kept)")
                continue
            cname = toks[0]
            if cname in col_index:
                if cname in closed_cols:
                    raise MpsParseError(f"duplicate column {cname!r}", line_no)
            else:
                col_index[cname] = len(columns)
                columns.append(ColumnDef(cname))
                if last_col is not None:
                    closed_cols.add(last_col)
            last_col = cname
            j = col_index[cname]
            pairs = toks[1:]
            if len(pairs) % 2 != 0:
                raise MpsParseError("COLUMNS entry has unpaired row/value",
                                    line_no)
            for k in range(0, len(pairs), 2):
                rname, v = pairs[k], _num(pairs[k + 1], line_no)
                if rname == objective_name:
                    obj_coeffs[j] = obj_coeffs.get(j, 0.0) + v
                elif rname in row_index:
                    coeff_entries.append((row_index[rname], j, v))
                elif rname in free_rows:
                    pass  # coefficients of ignored free rows are dropped
                else:
                    raise MpsParseError(
                        f"coefficient references undeclared row {rname!r}",
                        line_no)

        elif section in ("RHS", "RANGES"):
            pairs = _strip_set_name(toks, row_index, objective_name, line_no)
            for k in range(0, len(pairs), 2):
                rname, v = pairs[k], _num(pairs[k + 1], line_no)
                if rname == objective_name:
                    if section == "RHS":
                        # MPS convention: RHS on the objective row is the
                        # negated objective constant
                        objective_constant = -v
                        warnings.append(
                            "RHS entry on objective row interpreted as "
                            "negated objective constant")
                    else:
                        raise MpsParseError("RANGES entry on objective row",
                                            line_no)
                    continue
                if rname not in row_index:
                    raise MpsParseError(
                        f"{section} references undeclared row {rname!r}",
                        line_no)
                row = rows[row_index[rname]]
                if section == "RHS":
                    if rname in rhs_seen:
                        warnings.append(f"duplicate RHS for row {rname!r}; "
                                        "last value kept")
                    rhs_seen.add(rname)
                    row.rhs = v
                else:
                    row.range = v
                    if row.sense == "=" and v < 0:
                        warnings.append(
                            f"negative range on equality row {rname!r}: "
                            "interval [rhs+range, rhs] convention applied")

        elif section == "BOUNDS":
            _apply_bound(toks, columns, col_index, warnings, line_no)

        else:
            raise MpsParseError("data before any section header", line_no)

    if not saw_endata:
        raise MpsParseError(
            f"missing ENDATA; file ends inside section {section or 'HEADER'}")
    if objective_name is None:
        raise MpsParseError("no objective (N) row declared")
    if objective_sense not in ("min", "max"):
        raise MpsParseError(f"unsupported OBJSENSE {objective_sense!r}")

    coefficients = SparseMatrix.from_entries(
        len(rows), len(columns), coeff_entries)
    objective = np.zeros(len(columns))
    for j, v in obj_coeffs.items():
        objective[j] = v
    lp = GeneralLP(
        name=problem_name, objective_sense=objective_sense,
        objective_name=objective_name, rows=rows, columns=columns,
        coefficients=coefficients, objective=objective,
        objective_constant=objective_constant, warnings=warnings)
    lp.validate()
    return lp


def _strip_set_name(toks: list[str], row_index: dict[str, int],
                    objective_name: str | None, line_no: int) -> list[str]:
    """Drop the leading RHS/RANGES set name, tolerating files that omit it."""
    def is_row(t):
        return t in row_index or t == objective_name

    if len(toks) % 2 == 1:
        return toks[1:]
    if is_row(toks[0]):
        return toks  # nonstandard: set name omitted
    raise MpsParseError("entry has unpaired row/value fields", line_no)


_VALUE_BOUNDS = {"UP", "LO", "FX", "UI", "LI"}
_FLAG_BOUNDS = {"FR", "MI", "PL", "BV"}


def _apply_bound(toks: list[str], columns: list[ColumnDef],
                 col_index: dict[str, int], warnings: list[str],
                 line_no: int) -> None:
    code = toks[0].upper()
    if code in _VALUE_BOUNDS:
        if len(toks) == 4:
            cname, val = toks[2], _num(toks[3], line_no)
        elif len(toks) == 3 and toks[1] in col_index:
            cname, val = toks[1], _num(toks[2], line_no)  # set name omitted
        else:
            raise MpsParseError(f"malformed {code} bound", line_no)
    elif code in _FLAG_BOUNDS:
        if len(toks) >= 3 and toks[2] in col_index:
            cname = toks[2]
        elif len(toks) >= 2 and toks[1] in col_index:
            cname = toks[1]
        else:
            raise MpsParseError(f"{code} bound references unknown column",
                                line_no)
        val = None
    else:
        raise MpsParseError(f"unknown bound code {code!r}", line_no)

    if cname not in col_index:
        raise MpsParseError(f"bound references undeclared column {cname!r}",
                            line_no)
    col = columns[col_index[cname]]
    if code == "UP":
        col.upper = val
        if val < 0 and col.lower == 0.0:
            # common dialect: a negative upper bound on a default-lower
            # column implies a free lower bound
            col.lower = -INF
            warnings.append(
                f"negative UP bound on {cname!r} with default lower bound: "
                "lower bound set to -inf (dialect convention)")
    elif code == "LO":
        col.lower = val
    elif code == "FX":
        col.lower = col.upper = val
    elif code == "FR":
        col.lower, col.upper = -INF, INF
    elif code == "MI":
        col.lower = -INF
    elif code == "PL":
        col.upper = INF
    elif code == "BV":
        col.lower, col.upper = 0.0, 1.0
        if not any("integrality" in w for w in warnings):
            warnings.append("integrality markers present; integer "
                            "restrictions dropped (LP relaxation kept)")
    elif code in ("UI", "LI"):
        if code == "UI":
            col.upper = val
        else:
            col.lower = val
        if not any("integrality" in w for w in warnings):
            warnings.append("integrality markers present; integer "
                            "restrictions dropped (LP relaxation kept)")


# ---------------------------------------------------------------------------
# MPS writing

def _fmt(v: float) -> str:
    """Shortest exact decimal form of a float (round-trips via float())."""
    if math.isfinite(v) and v == math.floor(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def emit_mps(lp: GeneralLP) -> str:
    """Serialize a GeneralLP to free-format MPS.

    The output re-parses to an LP with the same rows, columns, bounds and
    coefficient values; numbers are written in shortest exact decimal form.
    """
    lp.validate()
    names = [lp.objective_name] + [r.name for r in lp.rows] + \
        [c.name for c in lp.columns]
    blank = [n for n in names if not n or any(ch.isspace() for ch in n)]
    if blank:
        # free format has no quoting; such names only arise from
        # fixed-format inputs
        raise ValueError(
            f"cannot serialize names with embedded blanks: {blank[:3]}")
    out: list[str] = [f"NAME          {lp.name}".rstrip()]
    if lp.objective_sense == "max":
        out.append("OBJSENSE")
        out.append("    MAX")
    out.append("ROWS")
    out.append(f" N  {lp.objective_name}")
    for row in lp.rows:
        out.append(f" {_SENSE_CODES[row.sense]}  {row.name}")

    out.append("COLUMNS")
    for j, col in enumerate(lp.columns):
        pairs: list[tuple[str, float]] = []
        if lp.objective[j] != 0.0:
            pairs.append((lp.objective_name, float(lp.objective[j])))
        for i, v in lp.coefficients.col_entries(j):
            pairs.append((lp.rows[i].name, v))
        if not pairs:
            # a column with no entries must still be declared
            pairs.append((lp.objective_name, 0.0))
        for k in range(0, len(pairs), 2):
            chunk = pairs[k:k + 2]
            fieldstr = "".join(f"  {r:<10}{_fmt(v):>14}" for r, v in chunk)
            out.append(f"    {col.name:<10}{fieldstr}")

    out.append("RHS")
    rhs_pairs = [(r.name, r.rhs) for r in lp.rows if r.rhs != 0.0]
    if lp.objective_constant != 0.0:
        rhs_pairs.append((lp.objective_name, -lp.objective_constant))
    for rname, v in rhs_pairs:
        out.append(f"    RHS         {rname:<10}{_fmt(v):>14}")

    range_pairs = [(r.name, r.range) for r in lp.rows if r.range is not None]
    if range_pairs:
        out.append("RANGES")
        for rname, v in range_pairs:
            out.append(f"    RNG         {rname:<10}{_fmt(v):>14}")

    bound_lines: list[str] = []
    for col in lp.columns:
        lo, up = col.lower, col.upper
        if lo == 0.0 and up == INF:
            continue
        if lo == -INF and up == INF:
            bound_lines.append(f" FR BND       {col.name}")
            continue
        if lo == up:
            bound_lines.append(f" FX BND       {col.name:<10}{_fmt(lo):>14}")
            continue
        if lo == -INF:
            bound_lines.append(f" MI BND       {col.name}")
        elif lo != 0.0:
            bound_lines.append(f" LO BND       {col.name:<10}{_fmt(lo):>14}")
        if up != INF:
            bound_lines.append(f" UP BND       {col.name:<10}{_fmt(up):>14}")
    if bound_lines:
        out.append("BOUNDS")
        out.extend(bound_lines)

    out.append("ENDATA")
    return "\n".join(out) + "\n"
