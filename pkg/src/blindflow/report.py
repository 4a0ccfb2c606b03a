"""Comparison runs and parameter sweeps.

``run_comparison`` runs a set of named algorithms on one instance and
pairs every objective with the certified dual lower bound (and, on
request, the per-port bound).  ``sweep`` repeats that over an axis of
synthetic-workload sizes and aggregates means per (axis value,
algorithm), emitting a fixed-header CSV; the certified bound itself
appears as the pseudo-algorithm row "dual-bound" so the table is
self-contained for plotting.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass, replace

import numpy as np

from .bounds import (
    DualCertificate,
    build_dual_certificate,
    check_dual_feasibility,
    dual_objective_lower_bound,
    smith_port_lower_bound,
)
from .engine import simulate
from .errors import InvariantError, ValidationError
from .model import Instance, compute_p, validate_instance
from .schedulers import (
    ALGORITHM_NAMES,
    AaloConfig,
    capacity_multiplier_for,
    make_policy,
    mode_for,
)
from .workloads import SyntheticParams, generate_synthetic

BOUND_NAMES = ("dual", "smith")
DUAL_BOUND_ROW = "dual-bound"
SWEEP_AXES = ("p", "n")
CSV_HEADER = "axis_value,algorithm,mean_J,mean_ratio_vs_dual"


@dataclass(frozen=True)
class ComparisonRow:
    instance_id: str
    p: int
    n: int
    algorithm: str
    weighted_total: float
    lower_bound_dual: float
    lower_bound_smith: float | None
    ratio_vs_dual: float
    runtime_seconds: float


def certified_dual_bound(instance: Instance, tolerance: float = 1e-9) -> tuple[float, DualCertificate]:
    """Run the sped-up allocator, build its certificate, and check it.

    Returns the certified bound and the checked certificate.  A failed
    check is an InvariantError: the construction is supposed to be
    feasible always.
    """
    instance = validate_instance(instance)
    if not instance.coflows:
        cert = build_dual_certificate(
            simulate(instance, make_policy("augmented"), mode_for("augmented"), 1.0),
            instance,
            0,
        )
        check_dual_feasibility(cert, instance, tolerance)
        return 0.0, cert
    p = compute_p(instance)
    result = simulate(
        instance,
        make_policy("augmented"),
        mode_for("augmented"),
        capacity_multiplier_for("augmented", p),
        record_timeline=True,
    )
    cert = build_dual_certificate(result, instance, p)
    report = check_dual_feasibility(cert, instance, tolerance)
    if not report.feasible:
        raise InvariantError(
            f"dual certificate failed its feasibility check "
            f"(worst slacks {report.worst_slack_14}, {report.worst_slack_15})"
        )
    return dual_objective_lower_bound(cert), cert


def run_comparison(
    instance: Instance,
    algorithms=("blindflow", "blindflow-max", "aalo-like"),
    bounds=("dual",),
    instance_id: str = "",
    aalo_config: AaloConfig | None = None,
    tolerance: float = 1e-9,
) -> list[ComparisonRow]:
    """One row per algorithm on one instance; empty instances give no rows."""
    instance = validate_instance(instance)
    for name in algorithms:
        if name not in ALGORITHM_NAMES:
            raise ValidationError(f"unknown algorithm {name!r}; expected one of {ALGORITHM_NAMES}")
    for name in bounds:
        if name not in BOUND_NAMES:
            raise ValidationError(f"unknown bound {name!r}; expected one of {BOUND_NAMES}")
    if not instance.coflows:
        return []

    p = compute_p(instance)
    n = len(instance.coflows)
    dual_bound, _ = certified_dual_bound(instance, tolerance)
    if not dual_bound > 0.0:
        raise InvariantError(f"certified bound is {dual_bound}, expected positive for a nonempty instance")
    smith = smith_port_lower_bound(instance) if "smith" in bounds else None

    rows = []
    for name in algorithms:
        policy = make_policy(name, aalo_config)
        started = time.perf_counter()
        result = simulate(
            instance,
            policy,
            mode_for(name),
            capacity_multiplier_for(name, p),
            record_timeline=False,
        )
        elapsed = time.perf_counter() - started
        rows.append(
            ComparisonRow(
                instance_id=instance_id,
                p=p,
                n=n,
                algorithm=name,
                weighted_total=result.weighted_total,
                lower_bound_dual=dual_bound,
                lower_bound_smith=smith,
                ratio_vs_dual=result.weighted_total / dual_bound,
                runtime_seconds=elapsed,
            )
        )
    return rows


def comparison_rows_to_dicts(rows) -> list[dict]:
    return [
        {
            "instance_id": r.instance_id,
            "p": r.p,
            "n": r.n,
            "algorithm": r.algorithm,
            "weighted_total": r.weighted_total,
            "lower_bound_dual": r.lower_bound_dual,
            "lower_bound_smith": r.lower_bound_smith,
            "ratio_vs_dual": r.ratio_vs_dual,
            "runtime_seconds": r.runtime_seconds,
        }
        for r in rows
    ]


@dataclass(frozen=True)
class SweepPoint:
    axis_value: int
    algorithm: str
    mean_j: float
    mean_ratio_vs_dual: float


def _derived_seed(seed: int, value_index: int, repetition: int) -> int:
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(value_index, repetition))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def sweep(
    axis: str,
    values,
    base: SyntheticParams,
    repetitions: int,
    seed: int,
    algorithms=("blindflow", "blindflow-max", "aalo-like"),
    aalo_config: AaloConfig | None = None,
) -> list[SweepPoint]:
    """Mean objective and mean certified ratio per (axis value, algorithm).

    Every cell's workload seed is derived deterministically from the
    sweep seed and the cell coordinates, so equal arguments give equal
    tables.  Results are sorted by (axis_value, algorithm); the row
    "dual-bound" carries the mean certified bound with ratio one.
    """
    if axis not in SWEEP_AXES:
        raise ValidationError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    values = list(values)
    if not values:
        raise ValidationError("sweep needs at least one axis value")
    for v in values:
        if not isinstance(v, int) or v < 1:
            raise ValidationError(f"axis values must be positive integers, got {v!r}")
    if not isinstance(repetitions, int) or repetitions < 1:
        raise ValidationError(f"repetitions must be a positive integer, got {repetitions!r}")
    algorithms = tuple(algorithms)
    if not algorithms:
        raise ValidationError("sweep needs at least one algorithm")

    totals: dict[tuple[int, str], list[float]] = {}
    ratios: dict[tuple[int, str], list[float]] = {}
    bound_totals: dict[int, list[float]] = {}
    for value_index, value in enumerate(values):
        for repetition in range(repetitions):
            params = replace(
                base,
                seed=_derived_seed(seed, value_index, repetition),
                **({"p_max": value} if axis == "p" else {"num_coflows": value}),
            )
            instance = generate_synthetic(params)
            rows = run_comparison(
                instance,
                algorithms,
                bounds=("dual",),
                instance_id=f"{axis}={value} rep={repetition}",
                aalo_config=aalo_config,
            )
            for row in rows:
                totals.setdefault((value, row.algorithm), []).append(row.weighted_total)
                ratios.setdefault((value, row.algorithm), []).append(row.ratio_vs_dual)
            bound_totals.setdefault(value, []).append(rows[0].lower_bound_dual)

    points = []
    for value in values:
        for name in algorithms:
            js = totals[(value, name)]
            rs = ratios[(value, name)]
            points.append(SweepPoint(value, name, sum(js) / len(js), sum(rs) / len(rs)))
        bounds_here = bound_totals[value]
        points.append(SweepPoint(value, DUAL_BOUND_ROW, sum(bounds_here) / len(bounds_here), 1.0))
    points.sort(key=lambda pt: (pt.axis_value, pt.algorithm))
    return points


def sweep_points_to_csv(points) -> str:
    """Fixed-header CSV; floats use shortest round-trip formatting."""
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for pt in points:
        out.write(f"{pt.axis_value},{pt.algorithm},{pt.mean_j!r},{pt.mean_ratio_vs_dual!r}\n")
    return out.getvalue()


def parse_sweep_csv(text: str) -> list[SweepPoint]:
    """Inverse of ``sweep_points_to_csv``."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValidationError(f"sweep CSV must start with the header {CSV_HEADER!r}")
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 4:
            raise ValidationError(f"line {lineno}: expected 4 comma-separated fields")
        try:
            points.append(SweepPoint(int(parts[0]), parts[1], float(parts[2]), float(parts[3])))
        except ValueError:
            raise ValidationError(f"line {lineno}: malformed numeric field") from None
    return points
