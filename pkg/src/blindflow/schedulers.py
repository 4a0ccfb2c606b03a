"""Rate allocators: the blind family, its analysis variants, and comparators.

The flagship allocator gives each released, unfinished flow its coflow's
weight divided by a congestion denominator: the weight-over-capacity sum
of released unfinished flows sharing its output port plus the same sum
over its input port.  A flow using both ports is counted twice.  The
"max" variant replaces the sum of the two port terms by their maximum.

Two non-causal variants exist purely for analysis.  The delayed baseline
uses the same formula but sums the denominator over all unfinished flows,
released or not, and keeps a coflow's rates at zero until 4p times its
release time (p being the largest initial flow count of any coflow).  The
sped-up variant multiplies the baseline formula by 4p and starts each
coflow at its release; it is meant to run on a switch whose capacities
are scaled by 4p, where its rates are feasible and per-flow non-decreasing.

For concurrent open shop (diagonal demands, unit capacities) the
concentrated allocator divides a coflow's weight by the total active
weight on its port, which is exactly twice the flagship rate.

The attained-service comparator is a multi-level-queue heuristic in the
spirit of demand-oblivious coflow systems: coflows are binned by how much
volume they have received, the queue boundaries grow geometrically, and
ports serve queues in strict priority, first-come-first-served within a
queue, handing leftover capacity down.  Its constants are arbitrary
defaults, not tuned values.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping

from .engine import (
    MODE_CAUSAL,
    MODE_NON_CAUSAL,
    FlowKey,
    RateAllocation,
    RatePolicy,
    SchedulerView,
)
from .errors import InvariantError, ValidationError
from .model import KIND_COS, Instance, SwitchConfig

_TIME_EPS_REL = 1e-12   # matches the simulator's event-coalescing tolerance
_CROSS_REL = 1e-9       # attained-service counts as past a boundary within this


def _port_weight_sums(flows) -> tuple[dict[int, float], dict[int, float]]:
    win: dict[int, float] = defaultdict(float)
    wout: dict[int, float] = defaultdict(float)
    for fl in flows:
        win[fl.input_port] += fl.weight
        wout[fl.output_port] += fl.weight
    return win, wout


def blindflow_rates(view: SchedulerView, switch: SwitchConfig) -> RateAllocation:
    """Weight over the summed input-side and output-side congestion terms."""
    win, wout = _port_weight_sums(view.active_flows)
    rates: dict[FlowKey, float] = {}
    for fl in view.active_flows:
        denom = (
            wout[fl.output_port] / switch.output_capacities[fl.output_port]
            + win[fl.input_port] / switch.input_capacities[fl.input_port]
        )
        rates[(fl.coflow, fl.input_port, fl.output_port)] = fl.weight / denom
    return RateAllocation(rates)


def blindflow_max_rates(view: SchedulerView, switch: SwitchConfig) -> RateAllocation:
    """Weight over the larger of the two per-port congestion terms."""
    win, wout = _port_weight_sums(view.active_flows)
    rates: dict[FlowKey, float] = {}
    for fl in view.active_flows:
        denom = max(
            wout[fl.output_port] / switch.output_capacities[fl.output_port],
            win[fl.input_port] / switch.input_capacities[fl.input_port],
        )
        rates[(fl.coflow, fl.input_port, fl.output_port)] = fl.weight / denom
    return RateAllocation(rates)


def baseline_rates(
    view: SchedulerView,
    switch: SwitchConfig,
    p: int,
    releases: Mapping[int, float],
) -> RateAllocation:
    """Delayed analysis variant; requires the non-causal view.

    The denominator sums over every unfinished flow, released or not, and
    a coflow's flows stay at rate zero until time 4*p*release.  Keys are
    the activated flows only.
    """
    flows = view.all_flows_unfinished
    if flows is None:
        raise InvariantError("the delayed baseline needs the non-causal view")
    win, wout = _port_weight_sums(flows)
    eps = _TIME_EPS_REL * max(1.0, abs(view.now))
    rates: dict[FlowKey, float] = {}
    for fl in flows:
        if 4.0 * p * releases[fl.coflow] > view.now + eps:
            continue
        denom = (
            wout[fl.output_port] / switch.output_capacities[fl.output_port]
            + win[fl.input_port] / switch.input_capacities[fl.input_port]
        )
        rates[(fl.coflow, fl.input_port, fl.output_port)] = fl.weight / denom
    return RateAllocation(rates)


def augmented_rates(view: SchedulerView, switch: SwitchConfig, p: int) -> RateAllocation:
    """Sped-up analysis variant: 4p times the baseline formula, active from release.

    Same all-unfinished denominator as the baseline, no delayed start.
    Feasible only on a switch whose capacities are scaled by 4p.
    """
    flows = view.all_flows_unfinished
    if flows is None:
        raise InvariantError("the sped-up variant needs the non-causal view")
    win, wout = _port_weight_sums(flows)
    scale = 4.0 * p
    rates: dict[FlowKey, float] = {}
    for fl in view.active_flows:
        denom = (
            wout[fl.output_port] / switch.output_capacities[fl.output_port]
            + win[fl.input_port] / switch.input_capacities[fl.input_port]
        )
        rates[(fl.coflow, fl.input_port, fl.output_port)] = scale * fl.weight / denom
    return RateAllocation(rates)


def cos_rates(view: SchedulerView, switch: SwitchConfig) -> RateAllocation:
    """Concentrated allocator for concurrent open shop.

    Each diagonal flow gets its coflow's weight over the total active
    weight on its port; elementwise this is exactly twice the flagship
    allocation.  Errors when flows are off-diagonal or capacities differ
    from one.
    """
    if any(c != 1.0 for c in switch.input_capacities + switch.output_capacities):
        raise ValidationError("the concentrated allocator requires unit capacities")
    port_weight: dict[int, float] = defaultdict(float)
    for fl in view.active_flows:
        if fl.input_port != fl.output_port:
            raise ValidationError(
                f"the concentrated allocator requires diagonal flows, got ({fl.input_port}, {fl.output_port})"
            )
        port_weight[fl.input_port] += fl.weight
    rates: dict[FlowKey, float] = {}
    for fl in view.active_flows:
        rates[(fl.coflow, fl.input_port, fl.output_port)] = fl.weight / port_weight[fl.input_port]
    return RateAllocation(rates)


@dataclass(frozen=True)
class AaloConfig:
    """Knobs of the attained-service comparator (arbitrary defaults)."""

    num_queues: int = 10
    first_threshold: float = 10.0      # volume boundary between queues 0 and 1
    threshold_multiplier: float = 10.0 # geometric growth of later boundaries

    def __post_init__(self):
        if self.num_queues < 1:
            raise ValidationError("num_queues must be >= 1")
        if not self.first_threshold > 0:
            raise ValidationError("first_threshold must be > 0")
        if not self.threshold_multiplier > 1:
            raise ValidationError("threshold_multiplier must be > 1")

    def boundaries(self) -> tuple[float, ...]:
        return tuple(
            self.first_threshold * self.threshold_multiplier**q
            for q in range(self.num_queues - 1)
        )


def _past(attained: float, boundary: float) -> bool:
    return attained >= boundary * (1.0 - _CROSS_REL)


def _queue_of(attained: float, boundaries: tuple[float, ...]) -> int:
    return sum(1 for b in boundaries if _past(attained, b))


def aalo_like_rates(
    view: SchedulerView,
    switch: SwitchConfig,
    config: AaloConfig,
    attained: Mapping[int, float],
    releases: Mapping[int, float],
) -> RateAllocation:
    """Strict-priority waterfilling over attained-service queues.

    Coflows are ordered by (queue, release time, id); each coflow's flows
    then grab the minimum of the residual capacities of their two ports,
    so the result is port-feasible by construction and lower-priority
    coflows receive whatever is left.
    """
    boundaries = config.boundaries()
    flows_of: dict[int, list] = defaultdict(list)
    for fl in view.active_flows:
        flows_of[fl.coflow].append(fl)
    order = sorted(
        flows_of,
        key=lambda k: (_queue_of(attained.get(k, 0.0), boundaries), releases[k], k),
    )
    res_in = list(switch.input_capacities)
    res_out = list(switch.output_capacities)
    rates: dict[FlowKey, float] = {}
    for k in order:
        for fl in flows_of[k]:
            grabbed = min(res_in[fl.input_port], res_out[fl.output_port])
            rates[(fl.coflow, fl.input_port, fl.output_port)] = grabbed
            res_in[fl.input_port] -= grabbed
            res_out[fl.output_port] -= grabbed
    return RateAllocation(rates)


# --- policy adapters driven by the simulator --------------------------------


class BlindflowPolicy(RatePolicy):
    name = "blindflow"
    causal = True

    def rates(self, view, switch):
        return blindflow_rates(view, switch)


class BlindflowMaxPolicy(RatePolicy):
    name = "blindflow-max"
    causal = True

    def rates(self, view, switch):
        return blindflow_max_rates(view, switch)


class CosPolicy(RatePolicy):
    name = "cos"
    causal = True

    def start(self, instance, p):
        if instance.kind != KIND_COS:
            raise ValidationError(f"the concentrated allocator requires kind {KIND_COS!r}, got {instance.kind!r}")

    def rates(self, view, switch):
        return cos_rates(view, switch)


class BaselinePolicy(RatePolicy):
    name = "baseline"
    causal = False

    def __init__(self):
        self._releases: dict[int, float] = {}

    def start(self, instance, p):
        self._releases = {cf.id: cf.release_time for cf in instance.coflows}

    def rates(self, view, switch):
        return baseline_rates(view, switch, view.p, self._releases)

    def next_change(self, view, alloc):
        # the only extra events are the delayed activations
        eps = _TIME_EPS_REL * max(1.0, abs(view.now))
        pending = [
            4.0 * view.p * self._releases[fl.coflow]
            for fl in (view.all_flows_unfinished or ())
            if 4.0 * view.p * self._releases[fl.coflow] > view.now + eps
        ]
        return min(pending) if pending else None


class AugmentedPolicy(RatePolicy):
    name = "augmented"
    causal = False

    def rates(self, view, switch):
        return augmented_rates(view, switch, view.p)


class AaloLikePolicy(RatePolicy):
    name = "aalo-like"
    causal = True

    def __init__(self, config: AaloConfig | None = None):
        self.config = config or AaloConfig()
        self.attained: dict[int, float] = {}
        self._releases: dict[int, float] = {}

    def start(self, instance, p):
        self.attained = {}
        self._releases = {cf.id: cf.release_time for cf in instance.coflows}

    def rates(self, view, switch):
        return aalo_like_rates(view, switch, self.config, self.attained, self._releases)

    def observe(self, t_start, t_end, alloc):
        dt = t_end - t_start
        for key, rate in alloc.rates.items():
            if rate > 0.0:
                self.attained[key[0]] = self.attained.get(key[0], 0.0) + rate * dt

    def next_change(self, view, alloc):
        # re-invoke when some coflow's attained service crosses a queue boundary
        boundaries = self.config.boundaries()
        coflow_rate: dict[int, float] = defaultdict(float)
        for key, rate in alloc.rates.items():
            coflow_rate[key[0]] += rate
        best = None
        for k, rate in coflow_rate.items():
            if rate <= 0.0:
                continue
            a = self.attained.get(k, 0.0)
            upcoming = [b for b in boundaries if not _past(a, b)]
            if not upcoming:
                continue
            t = view.now + (upcoming[0] - a) / rate
            if best is None or t < best:
                best = t
        if best is None:
            return None
        # never schedule at or before now, even after float truncation
        return max(best, view.now + 4.0 * _TIME_EPS_REL * max(1.0, abs(view.now)))


ALGORITHM_NAMES = ("blindflow", "blindflow-max", "baseline", "augmented", "cos", "aalo-like")


def make_policy(name: str, aalo_config: AaloConfig | None = None) -> RatePolicy:
    """Instantiate a fresh policy by its registry name."""
    if name == "blindflow":
        return BlindflowPolicy()
    if name == "blindflow-max":
        return BlindflowMaxPolicy()
    if name == "baseline":
        return BaselinePolicy()
    if name == "augmented":
        return AugmentedPolicy()
    if name == "cos":
        return CosPolicy()
    if name == "aalo-like":
        return AaloLikePolicy(aalo_config)
    raise ValidationError(f"unknown algorithm {name!r}; expected one of {ALGORITHM_NAMES}")


def mode_for(name: str) -> str:
    if name not in ALGORITHM_NAMES:
        raise ValidationError(f"unknown algorithm {name!r}; expected one of {ALGORITHM_NAMES}")
    return MODE_NON_CAUSAL if name in ("baseline", "augmented") else MODE_CAUSAL


def capacity_multiplier_for(name: str, p: int) -> float:
    """Capacity scaling a named algorithm is meant to run with."""
    if name not in ALGORITHM_NAMES:
        raise ValidationError(f"unknown algorithm {name!r}; expected one of {ALGORITHM_NAMES}")
    if name == "augmented":
        return 4.0 * p if p > 0 else 1.0
    return 1.0
