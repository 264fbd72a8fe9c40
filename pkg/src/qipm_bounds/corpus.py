"""Locator for the bundled mini-corpus of MPS instances.

Seven tiny instances in per-family subdirectories (tiny/, cover/, slack/,
flow/, raw/) cover the pipeline's corner cases offline: a one-constraint LP,
a square equality system, a bounds/ranges zoo, a kappa = 1 covering
relaxation, a pure-slack band, a layered max-flow relaxation, and a raw file
with redundant rows for presolve and rank repair to clean up.
"""

from __future__ import annotations

from pathlib import Path


def corpus_dir() -> Path:
    """Directory of the bundled instances, laid out for run_suite."""
    return Path(__file__).resolve().parent / "corpus"


def corpus_files() -> list[Path]:
    """All bundled MPS files, sorted by path."""
    return sorted(corpus_dir().glob("*/*.mps"))
