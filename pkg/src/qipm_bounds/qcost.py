"""Chebyshev-QLSA query counts and total quantum cycle lower bounds.

All ceilings are evaluated exactly: inputs are canonicalized to rationals
(floats through their shortest decimal form), powers of two are resolved in
closed form, and everything else goes through escalating-precision decimal
arithmetic that refuses to round across an integer boundary. Results are
exact big integers, never floats.

The query count for an s-sparse system with condition number kappa at target
precision eps is

    Q = 8 * ceil(sqrt(ceil(g^2 lb(g/eps)) * lb((4/eps) ceil(g^2 lb(g/eps)))))
        * n_qaa,        g = s * kappa,  lb = log base 2,

and the total cycle count for reading out a d-dimensional solution in the
copy-access tomography model multiplies the bracket by 8 (d - 1) / eps^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction

_START_PREC = 60
_MAX_PREC = 4000

Rational = int | float | str | Fraction


def to_fraction(x: Rational) -> Fraction:
    """Exact rational form of x; floats are read via their shortest decimal
    representation (so 0.1 means 1/10, as intended by callers)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):  # includes numpy floats, normalized first
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x}")
        return Fraction(Decimal(repr(x)))
    return Fraction(x)


def _pow2_exponent(r: Fraction) -> int | None:
    """k if r == 2**k exactly, else None."""
    if r <= 0:
        return None
    num, den = r.numerator, r.denominator
    if den == 1:
        if num & (num - 1) == 0:
            return num.bit_length() - 1
        return None
    if num == 1 and den & (den - 1) == 0:
        return -(den.bit_length() - 1)
    return None


def _dec_log2(fr: Fraction) -> Decimal:
    """log2 of a positive rational at the ambient decimal precision."""
    num = Decimal(fr.numerator).ln()
    den = Decimal(fr.denominator).ln()
    return (num - den) / Decimal(2).ln()


def _ceil_decided(z: Decimal, prec: int) -> int | None:
    """ceil(z_true) when z provably lies strictly between two integers."""
    floor = int(z.to_integral_value(rounding="ROUND_FLOOR"))
    frac = z - floor
    err = (abs(z) + 1) * Decimal(10) ** (-prec)
    if frac > err and (1 - frac) > err:
        return floor + 1
    return None


def ceil_log_term(coeff: Fraction, arg: Fraction) -> int:
    """Exact ceil(coeff * log2(arg)) for rational coeff > 0, arg > 1."""
    if arg <= 1:
        raise ValueError(f"log2 argument must exceed 1, got {arg}")
    k = _pow2_exponent(arg)
    if k is not None:
        return math.ceil(coeff * k)
    prec = _START_PREC
    while prec <= _MAX_PREC:
        with localcontext() as ctx:
            ctx.prec = prec + 20
            z = (Decimal(coeff.numerator) / Decimal(coeff.denominator)) \
                * _dec_log2(arg)
        decided = _ceil_decided(z, prec)
        if decided is not None:
            return decided
        prec *= 2
    raise ArithmeticError("ceiling not decidable at maximum precision")


def ceil_sqrt_log_term(inner: int, arg: Fraction) -> int:
    """Exact ceil(sqrt(inner * log2(arg))) for integer inner >= 1, arg > 1."""
    if inner < 1:
        raise ValueError(f"inner factor must be >= 1, got {inner}")
    if arg <= 1:
        raise ValueError(f"log2 argument must exceed 1, got {arg}")
    j = _pow2_exponent(arg)
    if j is not None:
        prod = inner * j
        if prod <= 0:
            return 0
        return math.isqrt(prod - 1) + 1  # exact ceil(sqrt(int))
    prec = _START_PREC
    while prec <= _MAX_PREC:
        with localcontext() as ctx:
            ctx.prec = prec + 20
            z = (Decimal(inner) * _dec_log2(arg)).sqrt()
        decided = _ceil_decided(z, prec)
        if decided is not None:
            return decided
        prec *= 2
    raise ArithmeticError("ceiling not decidable at maximum precision")


def chebyshev_bracket(gamma: Rational, epsilon: Rational) -> int:
    """The shared ceil(sqrt(...)) factor of the query and cycle formulas."""
    g = to_fraction(gamma)
    eps = to_fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
    if g <= eps:
        raise ValueError(
            f"difficulty {g} must exceed epsilon {eps} (log argument <= 1)")
    inner = ceil_log_term(g * g, g / eps)
    return ceil_sqrt_log_term(inner, Fraction(4) / eps * inner)


def qlsa_query_count(s: int, kappa: Rational, epsilon: Rational,
                     n_qaa: int = 1) -> int:
    """Oracle queries of the Chebyshev-based quantum linear solver.

    Exact integer evaluation of
    8 * ceil(sqrt(ceil(s^2 k^2 lb(sk/e)) * lb((4/e) ceil(s^2 k^2 lb(sk/e)))))
    times the amplitude-amplification repetition count.
    """
    if s < 1:
        raise ValueError(f"sparsity must be >= 1, got {s}")
    if n_qaa < 1:
        raise ValueError(f"n_qaa must be >= 1, got {n_qaa}")
    k = to_fraction(kappa)
    if k <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return 8 * chebyshev_bracket(s * k, epsilon) * n_qaa


def total_quantum_cycles(d: int, gamma: Rational, epsilon: Rational) -> int:
    """Quantum cycle lower bound including copy-access tomography readout.

    Exact evaluation of (8 (d-1) / eps^2) * bracket(gamma, eps), rounded up
    to the next integer cycle. d = 1 is degenerate (nothing to read out)
    and yields 0.
    """
    if d < 1:
        raise ValueError(f"solution dimension must be >= 1, got {d}")
    eps = to_fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
    if d == 1:
        return 0
    bracket = chebyshev_bracket(gamma, eps)
    return math.ceil(Fraction(8 * (d - 1)) / (eps * eps) * bracket)


def hermitian_dilation_params(d: int, s: int, kappa: float,
                              is_hermitian: bool) -> tuple[int, int, float]:
    """Solver-side system parameters after Hermitian dilation.

    A non-Hermitian system is embedded into a 2d x 2d Hermitian one with the
    same sparsity and condition number; Hermitian systems pass through.
    """
    if is_hermitian:
        return d, s, kappa
    return 2 * d, s, kappa


def runtime_lower_bound(cycles: int, cycle_duration: Rational) -> float:
    """cycles * cycle_duration in seconds, exact product before rounding."""
    dur = to_fraction(cycle_duration)
    if dur <= 0:
        raise ValueError(f"cycle duration must be positive, got {cycle_duration}")
    return float(Fraction(cycles) * dur)


DEFAULT_DURATION_MIN = 1e-15
DEFAULT_DURATION_MAX = 1e-3
DEFAULT_DURATION_POINTS = 121
REFERENCE_CYCLE_DURATION = 8e-10  # current two-qubit gate speed record


def duration_grid(d_min: float = DEFAULT_DURATION_MIN,
                  d_max: float = DEFAULT_DURATION_MAX,
                  points: int = DEFAULT_DURATION_POINTS,
                  reference: float | None = REFERENCE_CYCLE_DURATION
                  ) -> list[float]:
    """Logarithmic cycle-duration grid with the reference point injected."""
    if points < 2 or d_min <= 0 or d_max <= d_min:
        raise ValueError("need points >= 2 and 0 < d_min < d_max")
    lo, hi = math.log10(d_min), math.log10(d_max)
    grid = [10.0 ** (lo + (hi - lo) * k / (points - 1)) for k in range(points)]
    if reference is not None and reference not in grid:
        grid.append(reference)
    return sorted(grid)


@dataclass
class QuantumCostInputs:
    """Inputs of the cycle bound; defaults encode the quantum-favourable
    assumptions: single QAA round, one refinement step, one IPM iteration,
    eps = 0.1."""
    d: int
    s: int
    kappa: float
    epsilon: Rational = Fraction(1, 10)
    n_qaa: int = 1
    ir_steps: int = 1
    ipm_iterations: int = 1


@dataclass
class QuantumCostResult:
    query_count: int
    total_cycles: int
    gamma: float
    runtime_at: dict[float, float] = field(default_factory=dict)


def evaluate_cost(inputs: QuantumCostInputs,
                  durations: list[float] | None = None) -> QuantumCostResult:
    """Evaluate query count and cycle bound; no hidden multipliers.

    Multi-step refinement and multi-iteration IPMs are out of scope; the
    quantum-favourable single-step values are required.
    """
    if inputs.ir_steps != 1 or inputs.ipm_iterations != 1:
        raise ValueError("only the single-step lower-bound model is supported "
                         "(ir_steps = ipm_iterations = 1)")
    gamma = inputs.s * to_fraction(inputs.kappa)
    q = qlsa_query_count(inputs.s, inputs.kappa, inputs.epsilon, inputs.n_qaa)
    cycles = total_quantum_cycles(inputs.d, gamma, inputs.epsilon)
    runtime = {t: runtime_lower_bound(cycles, t) for t in (durations or [])}
    return QuantumCostResult(query_count=q, total_cycles=cycles,
                             gamma=float(gamma), runtime_at=runtime)
