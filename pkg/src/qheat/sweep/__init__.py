"""
Sweep orchestration and result persistence.
"""

from .io import atomic_write_text, read_json, write_csv, write_json
from .runner import (
    ClassicalComparison,
    apply_value,
    evaluate_point,
    point_key,
    run_classical_comparison,
    run_sweep,
    with_gap,
)

__all__ = [
    "run_sweep",
    "run_classical_comparison",
    "ClassicalComparison",
    "evaluate_point",
    "apply_value",
    "with_gap",
    "point_key",
    "atomic_write_text",
    "write_json",
    "read_json",
    "write_csv",
]
