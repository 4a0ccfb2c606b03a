"""Event-driven simulator for rate-based scheduling on a switch.

Time is continuous and rates are piecewise constant: a scheduling policy
is re-invoked only at events (coflow releases, flow completions, and any
extra instants the policy itself requests, such as delayed activations or
priority-queue demotions).  Between events every flow drains at its
allocated rate, so completion instants are exact up to float arithmetic.

The simulator never shows demand data to a policy.  A causal policy sees
only the released, unfinished flows; a non-causal analysis policy is
additionally shown the unfinished flows of coflows that have not been
released yet.  Simultaneous events closer than 1e-12 (relative) are
coalesced into one.

A flow is counted as unfinished from time zero until its demand is
exhausted, independent of its release; timeline segments record that
indicator set, which is what the lower-bound machinery integrates over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple

from .errors import InvariantError, ValidationError
from .model import Instance, SwitchConfig, compute_p, validate_instance

# (coflow id, input port, output port) identifies a flow
FlowKey = tuple[int, int, int]

MODE_CAUSAL = "causal"
MODE_NON_CAUSAL = "non-causal"

_COALESCE_REL = 1e-12    # events closer than this (relative) are one event
_CAPACITY_REL = 1e-9     # tolerated relative port-capacity overshoot
_CONSERVATION_REL = 1e-9 # tolerated relative served-vs-demand mismatch
_MAX_EVENTS = 1_000_000  # hard stop against runaway event loops


class FlowInfo(NamedTuple):
    """What a policy is allowed to know about one flow."""

    coflow: int
    weight: float
    input_port: int
    output_port: int


@dataclass(frozen=True)
class SchedulerView:
    """Censored snapshot handed to a policy at an event.

    ``active_flows`` are the released, unfinished flows.  For non-causal
    analysis policies ``all_flows_unfinished`` additionally lists
    unfinished flows of unreleased coflows (a superset of active_flows);
    causal policies receive None there.  Demands are never included.
    """

    now: float
    active_flows: tuple[FlowInfo, ...]
    all_flows_unfinished: tuple[FlowInfo, ...] | None
    p: int


@dataclass(frozen=True)
class RateAllocation:
    """Rates chosen by a policy, keyed by flow; missing keys mean zero."""

    rates: Mapping[FlowKey, float]


@dataclass(frozen=True)
class TimelineSegment:
    """Constant-rate stretch [t_start, t_end) of a run.

    ``active_indicator`` is the set of flows whose demand was not yet
    exhausted anywhere on the segment, regardless of release status.
    """

    t_start: float
    t_end: float
    rates: RateAllocation
    active_indicator: frozenset[FlowKey]


@dataclass(frozen=True)
class SimulationResult:
    flow_completion: dict[FlowKey, float]
    coflow_completion: dict[int, float]
    weighted_total: float
    timeline: tuple[TimelineSegment, ...]
    feasibility_margin: float    # min over segments and ports of capacity - load
    mode: str
    capacity_multiplier: float
    scheduler: str


class RatePolicy:
    """Base class for scheduling policies driven by the simulator.

    Subclasses must implement ``rates``.  ``start`` is called once per run
    before the clock starts; ``next_change`` may name a future instant at
    which the policy wants to be re-invoked even though no release or
    completion happens; ``observe`` is called after every segment so
    stateful policies can integrate what was served.
    """

    name = "policy"
    causal = True

    def start(self, instance: Instance, p: int) -> None:
        pass

    def rates(self, view: SchedulerView, switch: SwitchConfig) -> RateAllocation:
        raise NotImplementedError

    def next_change(self, view: SchedulerView, alloc: RateAllocation) -> float | None:
        return None

    def observe(self, t_start: float, t_end: float, alloc: RateAllocation) -> None:
        pass


def _eps_at(t: float) -> float:
    return _COALESCE_REL * max(1.0, abs(t))


def simulate(
    instance: Instance,
    policy: RatePolicy,
    mode: str = MODE_CAUSAL,
    capacity_multiplier: float = 1.0,
    record_timeline: bool = True,
) -> SimulationResult:
    """Run ``policy`` on ``instance`` until every flow's demand is exhausted.

    ``capacity_multiplier`` scales every port capacity; feasibility is
    checked against the scaled capacities.  In causal mode a port-capacity
    violation beyond tolerance is an InvariantError; in non-causal mode it
    is only recorded in ``feasibility_margin``.  Runs are deterministic:
    identical inputs give bit-identical results.
    """
    instance = validate_instance(instance)
    if mode not in (MODE_CAUSAL, MODE_NON_CAUSAL):
        raise ValidationError(f"unknown mode {mode!r}")
    if not (isinstance(capacity_multiplier, (int, float)) and math.isfinite(capacity_multiplier)
            and capacity_multiplier > 0):
        raise ValidationError(f"capacity multiplier must be a positive finite number, got {capacity_multiplier!r}")
    capacity_multiplier = float(capacity_multiplier)
    causal = mode == MODE_CAUSAL

    if not instance.coflows:
        return SimulationResult({}, {}, 0.0, (), math.inf, mode, capacity_multiplier, policy.name)

    sw = instance.switch
    p = compute_p(instance)
    info: dict[FlowKey, FlowInfo] = {}
    demand: dict[FlowKey, float] = {}
    releases: dict[int, float] = {}
    weights: dict[int, float] = {}
    for cf in instance.coflows:
        releases[cf.id] = cf.release_time
        weights[cf.id] = cf.weight
        for fl in cf.flows:
            key = (cf.id, fl.input_port, fl.output_port)
            info[key] = FlowInfo(cf.id, cf.weight, fl.input_port, fl.output_port)
            demand[key] = float(fl.demand)

    all_keys = sorted(info)
    remaining = {key: demand[key] for key in all_keys}
    served = {key: 0.0 for key in all_keys}
    unfinished = set(all_keys)
    release_times = sorted(set(releases.values()))
    eff_in = [c * capacity_multiplier for c in sw.input_capacities]
    eff_out = [c * capacity_multiplier for c in sw.output_capacities]

    policy.start(instance, p)
    now = 0.0
    completion: dict[FlowKey, float] = {}
    segments: list[TimelineSegment] = []
    margin = math.inf
    events = 0

    while unfinished:
        events += 1
        if events > _MAX_EVENTS:
            raise InvariantError(f"event budget exhausted after {_MAX_EVENTS} events; policy {policy.name} is not making progress")
        eps = _eps_at(now)
        released = {k for k, r in releases.items() if r <= now + eps}
        active = [key for key in all_keys if key in unfinished and key[0] in released]
        view = SchedulerView(
            now=now,
            active_flows=tuple(info[key] for key in active),
            all_flows_unfinished=None if causal else tuple(info[key] for key in all_keys if key in unfinished),
            p=p,
        )
        alloc = policy.rates(view, sw)
        rates = alloc.rates
        allowed = set(active) if causal else unfinished
        for key, rate in rates.items():
            if key not in allowed:
                raise InvariantError(f"policy {policy.name} allocated a rate to flow {key} it was not shown")
            if not (isinstance(rate, (int, float)) and math.isfinite(rate)) or rate < 0:
                raise InvariantError(f"policy {policy.name} allocated invalid rate {rate!r} to flow {key}")

        load_in = [0.0] * sw.num_input_ports
        load_out = [0.0] * sw.num_output_ports
        for key, rate in rates.items():
            load_in[key[1]] += rate
            load_out[key[2]] += rate
        for port, cap in enumerate(eff_in):
            margin = min(margin, cap - load_in[port])
            if causal and load_in[port] > cap + _CAPACITY_REL * max(1.0, cap):
                raise InvariantError(
                    f"policy {policy.name} overloads input port {port}: {load_in[port]} > {cap}"
                )
        for port, cap in enumerate(eff_out):
            margin = min(margin, cap - load_out[port])
            if causal and load_out[port] > cap + _CAPACITY_REL * max(1.0, cap):
                raise InvariantError(
                    f"policy {policy.name} overloads output port {port}: {load_out[port]} > {cap}"
                )

        t_next = math.inf
        exhaust: dict[FlowKey, float] = {}
        for key, rate in rates.items():
            if rate > 0.0:
                t = now + remaining[key] / rate
                exhaust[key] = t
                if t < t_next:
                    t_next = t
        for r in release_times:
            if r > now + eps:
                t_next = min(t_next, r)
                break
        change = policy.next_change(view, alloc)
        if change is not None:
            if not math.isfinite(change) or change <= now + eps:
                raise InvariantError(
                    f"policy {policy.name} requested a re-invocation at {change!r} which is not past {now}"
                )
            t_next = min(t_next, change)
        if not math.isfinite(t_next):
            raise InvariantError(
                f"starvation: no future event exists but {len(unfinished)} flows are unfinished under policy {policy.name}"
            )

        seg_active = frozenset(unfinished)
        dt = t_next - now
        eps_next = _eps_at(t_next)
        completing = []
        for key, rate in rates.items():
            if rate > 0.0:
                remaining[key] -= rate * dt
                served[key] += rate * dt
                if exhaust[key] <= t_next + eps_next or remaining[key] <= 0.0:
                    completing.append(key)
        for key in sorted(completing):
            remaining[key] = 0.0
            completion[key] = t_next
            unfinished.discard(key)
            if abs(served[key] - demand[key]) > _CONSERVATION_REL * demand[key]:
                raise InvariantError(
                    f"conservation violated for flow {key}: served {served[key]} of demand {demand[key]}"
                )
        if record_timeline:
            segments.append(TimelineSegment(now, t_next, alloc, seg_active))
        policy.observe(now, t_next, alloc)
        now = t_next

    coflow_completion: dict[int, float] = {}
    for cf in instance.coflows:
        t_done = max(completion[(cf.id, fl.input_port, fl.output_port)] for fl in cf.flows)
        if t_done < cf.release_time - _eps_at(cf.release_time):
            raise InvariantError(f"coflow {cf.id} finished at {t_done} before its release {cf.release_time}")
        coflow_completion[cf.id] = t_done
    weighted_total = sum(weights[k] * coflow_completion[k] for k in sorted(coflow_completion))

    return SimulationResult(
        flow_completion=completion,
        coflow_completion=coflow_completion,
        weighted_total=weighted_total,
        timeline=tuple(segments),
        feasibility_margin=margin,
        mode=mode,
        capacity_multiplier=capacity_multiplier,
        scheduler=policy.name,
    )


def weighted_completion_time(result: SimulationResult, instance: Instance) -> float:
    """Recompute the weighted completion-time objective from a result.

    Uses the same summation order as the simulator, so the value equals
    ``result.weighted_total`` exactly.  Errors if the result does not
    cover precisely the instance's coflows.
    """
    ids = {cf.id for cf in instance.coflows}
    if ids != set(result.coflow_completion):
        raise ValidationError("result does not match instance: coflow id sets differ")
    weights = {cf.id: cf.weight for cf in instance.coflows}
    return sum(weights[k] * result.coflow_completion[k] for k in sorted(result.coflow_completion))


def _key_str(key: FlowKey) -> str:
    return f"{key[0]}:{key[1]}:{key[2]}"


def result_to_dict(result: SimulationResult, include_timeline: bool = False) -> dict:
    """JSON-ready form of a result; the timeline is included only on request."""
    margin = result.feasibility_margin
    data = {
        "scheduler": result.scheduler,
        "mode": result.mode,
        "capacity_multiplier": result.capacity_multiplier,
        "weighted_total": result.weighted_total,
        "feasibility_margin": None if math.isinf(margin) else margin,
        "coflow_completion": {str(k): result.coflow_completion[k] for k in sorted(result.coflow_completion)},
        "flow_completion": {_key_str(k): result.flow_completion[k] for k in sorted(result.flow_completion)},
    }
    if include_timeline:
        data["timeline"] = [
            {
                "t_start": seg.t_start,
                "t_end": seg.t_end,
                "rates": {_key_str(k): seg.rates.rates[k] for k in sorted(seg.rates.rates)},
                "active": [_key_str(k) for k in sorted(seg.active_indicator)],
            }
            for seg in result.timeline
        ]
    return data
