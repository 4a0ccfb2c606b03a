"""Lower bounds on the weighted coflow completion-time objective.

The workhorse is a dual certificate extracted from a run of the sped-up
analysis allocator on the 4p-augmented switch.  From that run's timeline
we read off, for every segment, per-flow credits gamma (coflow weight
split evenly over its unfinished flows), per-port prices theta and phi
(the credits touching the port, scaled by 1/(4 capacity)), and per-coflow
payoffs alpha (weight times the run's completion time).  These variables
are feasible for the dual of a time-indexed relaxation of the scheduling
problem, so

    objective = sum alpha - sum_ports capacity * integral(price)

is a true lower bound on any schedule's weighted completion time; by
construction it equals exactly half the sped-up run's objective.  The
feasibility checker verifies the two dual constraint families at every
segment endpoint, which suffices because both sides are piecewise linear
between events.

Also here: a dense time-slotted LP relaxation solved with the bundled
simplex (a second, independent route to a lower bound on small
instances), a per-port weighted-shortest-processing-time bound, and an
exact permutation brute force for concurrent open shop.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .engine import FlowKey, SimulationResult
from .errors import InvariantError, ValidationError
from .model import KIND_COS, Instance, compute_p, validate_instance
from .simplex import (
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    solve_lp,
)

_BRUTE_FORCE_MAX = 9          # largest coflow count the permutation search accepts
_FLP_MAX_VARIABLES = 20_000   # guard for the dense LP builder
_GRID_REL = 1e-9              # release times must sit on the slot grid within this


# --- dual certificate --------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    constraint: str           # "14" (coflow payoff) or "15" (flow pricing)
    coflow: int
    flow: tuple[int, int] | None
    t: float
    slack: float              # normalized; negative means violated


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    worst_slack_14: float | None   # smallest normalized slack, None if nothing checked
    worst_slack_15: float | None
    violations: tuple[Violation, ...]


@dataclass(frozen=True)
class CertSegment:
    """Prices and credits on one constant stretch [t_start, t_end)."""

    t_start: float
    t_end: float
    theta: tuple[float, ...]          # per input port
    phi: tuple[float, ...]            # per output port
    n_unfinished: Mapping[int, int]   # unfinished flow count per coflow
    active: frozenset[FlowKey]


@dataclass
class DualCertificate:
    alpha: dict[int, float]
    segments: tuple[CertSegment, ...]
    objective: float
    j_aug: float                      # the sped-up run's weighted objective
    weights: dict[int, float]
    feasibility: FeasibilityReport | None = field(default=None, compare=False)

    def segment_gamma(self, index: int) -> dict[FlowKey, float]:
        """Per-flow credits on one segment, derived from the stored counts."""
        seg = self.segments[index]
        return {key: self.weights[key[0]] / seg.n_unfinished[key[0]] for key in sorted(seg.active)}


def build_dual_certificate(aug_result: SimulationResult, instance: Instance, p: int) -> DualCertificate:
    """Read the dual variables off a sped-up run's timeline.

    The run must have been recorded with its timeline and simulated with
    capacity multiplier 4p.  Price integrals use the instance's original
    capacities, so the certificate's objective refers to the original
    switch.
    """
    instance = validate_instance(instance)
    if not instance.coflows:
        return DualCertificate({}, (), 0.0, 0.0, {})
    if p != compute_p(instance):
        raise ValidationError(f"p={p} does not match the instance (expected {compute_p(instance)})")
    if aug_result.capacity_multiplier != 4.0 * p:
        raise ValidationError(
            f"certificate needs a run at capacity multiplier {4.0 * p}, got {aug_result.capacity_multiplier}"
        )
    if not aug_result.timeline:
        raise ValidationError("certificate needs the run's timeline; simulate with record_timeline=True")

    sw = instance.switch
    weights = {cf.id: cf.weight for cf in instance.coflows}
    segments = []
    for seg in aug_result.timeline:
        counts: dict[int, int] = {}
        for key in seg.active_indicator:
            counts[key[0]] = counts.get(key[0], 0) + 1
        theta = [0.0] * sw.num_input_ports
        phi = [0.0] * sw.num_output_ports
        for key in seg.active_indicator:
            credit = weights[key[0]] / counts[key[0]]
            theta[key[1]] += credit
            phi[key[2]] += credit
        for i in range(sw.num_input_ports):
            theta[i] /= 4.0 * sw.input_capacities[i]
        for j in range(sw.num_output_ports):
            phi[j] /= 4.0 * sw.output_capacities[j]
        segments.append(
            CertSegment(seg.t_start, seg.t_end, tuple(theta), tuple(phi), counts, seg.active_indicator)
        )

    alpha = {cf.id: cf.weight * aug_result.coflow_completion[cf.id] for cf in instance.coflows}
    price_total = 0.0
    for seg in segments:
        dt = seg.t_end - seg.t_start
        price = sum(c * th for c, th in zip(sw.input_capacities, seg.theta))
        price += sum(c * ph for c, ph in zip(sw.output_capacities, seg.phi))
        price_total += dt * price
    objective = sum(alpha[k] for k in sorted(alpha)) - price_total
    return DualCertificate(
        alpha=alpha,
        segments=tuple(segments),
        objective=objective,
        j_aug=aug_result.weighted_total,
        weights=weights,
    )


def _slack(lhs: float, rhs: float) -> float:
    return (rhs - lhs) / max(1.0, abs(lhs), abs(rhs))


def check_dual_feasibility(
    cert: DualCertificate,
    instance: Instance,
    tolerance: float = 1e-9,
) -> FeasibilityReport:
    """Verify both dual constraint families at every segment endpoint.

    Family "14": each coflow's payoff alpha is covered by t * weight plus
    the credits remaining after t, for every t at or past the release.
    Family "15": each flow's remaining credit, divided by its demand,
    never exceeds the sum of its two port prices.  Slacks are normalized
    by the magnitude of the compared quantities; the report is attached
    to the certificate.
    """
    instance = validate_instance(instance)
    worst_14: float | None = None
    worst_15: float | None = None
    violations: list[Violation] = []

    def record(constraint: str, coflow: int, flow, t: float, lhs: float, rhs: float):
        nonlocal worst_14, worst_15
        s = _slack(lhs, rhs)
        if constraint == "14":
            worst_14 = s if worst_14 is None else min(worst_14, s)
        else:
            worst_15 = s if worst_15 is None else min(worst_15, s)
        if s < -tolerance:
            violations.append(Violation(constraint, coflow, flow, t, s))

    segs = cert.segments
    for cf in instance.coflows:
        release = cf.release_time
        w = cf.weight
        a = cert.alpha.get(cf.id)
        if a is None:
            raise ValidationError(f"certificate is missing coflow {cf.id}")

        # family 14: alpha <= t*w + credits remaining after t
        suffix = 0.0
        for seg in reversed(segs):
            active = seg.n_unfinished.get(cf.id, 0) > 0
            if seg.t_end >= release:
                record("14", cf.id, None, seg.t_end, a, seg.t_end * w + suffix)
            length = seg.t_end - seg.t_start
            contribution = w * length if active else 0.0
            if seg.t_start >= release:
                record("14", cf.id, None, seg.t_start, a, seg.t_start * w + suffix + contribution)
            elif seg.t_end > release:
                part = w * (seg.t_end - release) if active else 0.0
                record("14", cf.id, None, release, a, release * w + suffix + part)
            suffix += contribution

        # family 15: remaining credit / demand <= theta + phi
        for fl in cf.flows:
            key = (cf.id, fl.input_port, fl.output_port)
            demand = fl.demand
            suffix = 0.0
            for seg in reversed(segs):
                credit = (
                    cert.weights[cf.id] / seg.n_unfinished[cf.id]
                    if key in seg.active
                    else 0.0
                )
                prices = seg.theta[fl.input_port] + seg.phi[fl.output_port]
                if seg.t_end >= release:
                    record("15", cf.id, (fl.input_port, fl.output_port), seg.t_end, suffix / demand, prices)
                length = seg.t_end - seg.t_start
                if seg.t_start >= release:
                    record(
                        "15", cf.id, (fl.input_port, fl.output_port),
                        seg.t_start, (suffix + credit * length) / demand, prices,
                    )
                elif seg.t_end > release:
                    record(
                        "15", cf.id, (fl.input_port, fl.output_port),
                        release, (suffix + credit * (seg.t_end - release)) / demand, prices,
                    )
                suffix += credit * length

    report = FeasibilityReport(
        feasible=not violations,
        worst_slack_14=worst_14,
        worst_slack_15=worst_15,
        violations=tuple(violations),
    )
    cert.feasibility = report
    return report


def dual_objective_lower_bound(cert: DualCertificate) -> float:
    """The certificate's objective, usable only after a passed feasibility check."""
    if cert.feasibility is None:
        raise InvariantError("certificate has not been checked; run check_dual_feasibility first")
    if not cert.feasibility.feasible:
        raise InvariantError("certificate failed its feasibility check; it certifies nothing")
    return cert.objective


def certificate_report_to_dict(cert: DualCertificate) -> dict:
    """The JSON report: objective, the run objective, and check results."""
    if cert.feasibility is None:
        raise InvariantError("certificate has not been checked; run check_dual_feasibility first")
    rep = cert.feasibility
    return {
        "objective": cert.objective,
        "j_aug": cert.j_aug,
        "feasible": rep.feasible,
        "worst_slack_14": rep.worst_slack_14,
        "worst_slack_15": rep.worst_slack_15,
        "violations": [
            {
                "constraint": v.constraint,
                "coflow": v.coflow,
                "flow": list(v.flow) if v.flow is not None else None,
                "t": v.t,
                "slack": v.slack,
            }
            for v in rep.violations
        ],
    }


# --- time-slotted LP relaxation ---------------------------------------------


@dataclass(frozen=True)
class FlpProblem:
    """Dense LP data for the slotted relaxation.

    Slot s covers [s*slot, (s+1)*slot); the completion variables are
    weighted by the slot end time.  Columns are labeled ("f", k, s) or
    ("x", k, i, j, s).
    """

    slot_length: float
    horizon_slots: int
    columns: tuple[tuple, ...]
    c: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray


@dataclass(frozen=True)
class FlpSolution:
    f: dict[tuple[int, int], float]             # (coflow, slot) -> fraction completed
    x: dict[tuple[int, int, int, int], float]   # (coflow, in, out, slot) -> volume


def build_flp(instance: Instance, slot_length: float, horizon_slots: int) -> FlpProblem:
    """Assemble the slotted relaxation as a dense inequality system."""
    instance = validate_instance(instance)
    if not (isinstance(slot_length, (int, float)) and math.isfinite(slot_length) and slot_length > 0):
        raise ValidationError(f"slot length must be positive and finite, got {slot_length!r}")
    if not isinstance(horizon_slots, int) or isinstance(horizon_slots, bool) or horizon_slots < 1:
        raise ValidationError(f"horizon must be a positive integer slot count, got {horizon_slots!r}")
    if not instance.coflows:
        raise ValidationError("cannot build the relaxation for an instance with no coflows")
    slot = float(slot_length)
    horizon = horizon_slots

    start_slot: dict[int, int] = {}
    for cf in instance.coflows:
        ratio = cf.release_time / slot
        nearest = round(ratio)
        if abs(ratio - nearest) > _GRID_REL * max(1.0, abs(ratio)):
            raise ValidationError(
                f"release time {cf.release_time} of coflow {cf.id} is not a multiple of the slot length {slot}"
            )
        if nearest >= horizon:
            raise ValidationError(
                f"coflow {cf.id} is released at slot {int(nearest)}, beyond the horizon of {horizon} slots"
            )
        start_slot[cf.id] = int(nearest)

    columns: list[tuple] = []
    for cf in instance.coflows:
        for s in range(start_slot[cf.id], horizon):
            columns.append(("f", cf.id, s))
    for cf in instance.coflows:
        for fl in cf.flows:
            for s in range(start_slot[cf.id], horizon):
                columns.append(("x", cf.id, fl.input_port, fl.output_port, s))
    if len(columns) > _FLP_MAX_VARIABLES:
        raise ValidationError(
            f"relaxation would need {len(columns)} variables, above the {_FLP_MAX_VARIABLES} guard; "
            "shrink the instance or coarsen the slots"
        )
    col_index = {label: idx for idx, label in enumerate(columns)}
    n_cols = len(columns)

    c = np.zeros(n_cols)
    for cf in instance.coflows:
        for s in range(start_slot[cf.id], horizon):
            c[col_index[("f", cf.id, s)]] = cf.weight * (s + 1) * slot

    rows: list[np.ndarray] = []
    rhs: list[float] = []

    # completed fraction can never outrun any flow's delivered fraction
    for cf in instance.coflows:
        for fl in cf.flows:
            base = start_slot[cf.id]
            row = np.zeros(n_cols)
            for s in range(base, horizon):
                row = row.copy()
                row[col_index[("f", cf.id, s)]] += 1.0
                row[col_index[("x", cf.id, fl.input_port, fl.output_port, s)]] -= 1.0 / fl.demand
                rows.append(row)
                rhs.append(0.0)

    # every coflow completes
    for cf in instance.coflows:
        row = np.zeros(n_cols)
        for s in range(start_slot[cf.id], horizon):
            row[col_index[("f", cf.id, s)]] = -1.0
        rows.append(row)
        rhs.append(-1.0)

    # per-slot port capacity
    sw = instance.switch
    for s in range(horizon):
        in_rows = [np.zeros(n_cols) for _ in range(sw.num_input_ports)]
        out_rows = [np.zeros(n_cols) for _ in range(sw.num_output_ports)]
        for cf in instance.coflows:
            if s < start_slot[cf.id]:
                continue
            for fl in cf.flows:
                idx = col_index[("x", cf.id, fl.input_port, fl.output_port, s)]
                in_rows[fl.input_port][idx] = 1.0
                out_rows[fl.output_port][idx] = 1.0
        for i, row in enumerate(in_rows):
            if row.any():
                rows.append(row)
                rhs.append(sw.input_capacities[i] * slot)
        for j, row in enumerate(out_rows):
            if row.any():
                rows.append(row)
                rhs.append(sw.output_capacities[j] * slot)

    return FlpProblem(
        slot_length=slot,
        horizon_slots=horizon,
        columns=tuple(columns),
        c=c,
        a_ub=np.vstack(rows),
        b_ub=np.asarray(rhs),
    )


def solve_flp(instance: Instance, slot_length: float, horizon_slots: int) -> tuple[float, FlpSolution]:
    """Optimum of the slotted relaxation, solved with the bundled simplex.

    Returns the optimal value and the primal solution.  An infeasible
    system means the horizon is too short for full service.
    """
    if not instance.coflows:
        return 0.0, FlpSolution({}, {})
    problem = build_flp(instance, slot_length, horizon_slots)
    result = solve_lp(problem.c, a_ub=problem.a_ub, b_ub=problem.b_ub)
    if result.status == STATUS_INFEASIBLE:
        raise ValidationError(
            f"no full-service schedule fits in {problem.horizon_slots} slots; increase the horizon"
        )
    if result.status != STATUS_OPTIMAL:
        raise InvariantError(f"the relaxation solve ended with status {result.status!r}")
    f: dict[tuple[int, int], float] = {}
    x: dict[tuple[int, int, int, int], float] = {}
    for label, value in zip(problem.columns, result.x):
        if abs(value) <= 1e-12:
            continue
        if label[0] == "f":
            f[(label[1], label[2])] = float(value)
        else:
            x[(label[1], label[2], label[3], label[4])] = float(value)
    return result.objective, FlpSolution(f, x)


# --- closed-form and exhaustive bounds --------------------------------------


def smith_port_lower_bound(instance: Instance) -> float:
    """Best single-port relaxation bound, valid only without releases.

    Each port is viewed as one machine processing every coflow's total
    load there; ordering by weight over load is optimal for one machine,
    and no coflow can finish before its own last bit on any port, so the
    per-port optimum bounds the true objective from below.  The largest
    port wins.
    """
    instance = validate_instance(instance)
    for cf in instance.coflows:
        if cf.release_time != 0.0:
            raise ValidationError(
                f"the per-port bound requires all release times zero (coflow {cf.id} is released at "
                f"{cf.release_time}); use the dual certificate bound instead"
            )
    sw = instance.switch
    best = 0.0
    sides = (
        (sw.input_capacities, lambda fl: fl.input_port),
        (sw.output_capacities, lambda fl: fl.output_port),
    )
    for capacities, port_of in sides:
        for port, capacity in enumerate(capacities):
            jobs = []
            for cf in instance.coflows:
                load = sum(fl.demand for fl in cf.flows if port_of(fl) == port)
                if load > 0.0:
                    jobs.append((load / capacity, cf.weight, cf.id))
            if not jobs:
                continue
            jobs.sort(key=lambda job: (job[0] / job[1], job[2]))
            elapsed = 0.0
            value = 0.0
            for duration, weight, _ in jobs:
                elapsed += duration
                value += weight * elapsed
            best = max(best, value)
    return best


def cos_brute_force_opt(instance: Instance) -> tuple[float, tuple[int, ...]]:
    """Exact optimum over all coflow orders for concurrent open shop.

    Requires the concurrent-open-shop kind, zero releases, and at most
    nine coflows.  Evaluates every permutation as an order-preserving
    schedule on each port; that family contains an optimal schedule for
    this problem class, which is a documented external assumption.
    """
    instance = validate_instance(instance)
    if instance.kind != KIND_COS:
        raise ValidationError(f"brute force requires kind {KIND_COS!r}, got {instance.kind!r}")
    for cf in instance.coflows:
        if cf.release_time != 0.0:
            raise ValidationError(f"brute force requires zero releases; coflow {cf.id} is released at {cf.release_time}")
    if len(instance.coflows) > _BRUTE_FORCE_MAX:
        raise ValidationError(
            f"brute force accepts at most {_BRUTE_FORCE_MAX} coflows, got {len(instance.coflows)}"
        )
    if not instance.coflows:
        return 0.0, ()

    loads = {
        cf.id: [(fl.input_port, fl.demand) for fl in cf.flows]
        for cf in instance.coflows
    }
    weights = {cf.id: cf.weight for cf in instance.coflows}
    ids = sorted(loads)
    best_value = math.inf
    best_order: tuple[int, ...] = ()
    for order in itertools.permutations(ids):
        clock: dict[int, float] = {}
        total = 0.0
        for k in order:
            finish = 0.0
            for port, load in loads[k]:
                t = clock.get(port, 0.0) + load
                clock[port] = t
                if t > finish:
                    finish = t
            total += weights[k] * finish
            if total >= best_value:
                break
        if total < best_value:
            best_value = total
            best_order = order
    return best_value, best_order
