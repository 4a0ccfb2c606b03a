"""Problem model: switch configuration, coflows, and instance validation.

An instance describes an m_i x m_o switch (per-port capacities on both
sides) plus a set of coflows.  Each coflow carries a weight, a release
time, and a set of flows; a flow moves a fixed demand volume from one
input port to one output port.  Port indices are 0-based everywhere,
including the JSON file format.

Instances are plain frozen dataclasses and are treated as immutable once
validated.  ``validate_instance`` checks every structural invariant and is
idempotent; ``compute_p`` returns the largest per-coflow flow count, the
quantity that parametrizes the approximation guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

from .errors import ValidationError

KIND_GENERAL = "general"
KIND_COS = "concurrent-open-shop"
KINDS = (KIND_GENERAL, KIND_COS)


def _as_tuple(value):
    return value if isinstance(value, tuple) else tuple(value)


@dataclass(frozen=True)
class SwitchConfig:
    """Per-port capacities of the switch, one entry per port."""

    input_capacities: tuple[float, ...]
    output_capacities: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "input_capacities", _as_tuple(self.input_capacities))
        object.__setattr__(self, "output_capacities", _as_tuple(self.output_capacities))
        for side, caps in (("input", self.input_capacities), ("output", self.output_capacities)):
            if not caps:
                raise ValidationError(f"switch needs at least one {side} port")
            for port, cap in enumerate(caps):
                _check_finite_positive(cap, f"{side} capacity of port {port}")

    @property
    def num_input_ports(self) -> int:
        return len(self.input_capacities)

    @property
    def num_output_ports(self) -> int:
        return len(self.output_capacities)

    @classmethod
    def uniform(cls, num_inputs: int, num_outputs: int | None = None, capacity: float = 1.0) -> "SwitchConfig":
        """Switch with identical capacity on every port; square when num_outputs is omitted."""
        if num_outputs is None:
            num_outputs = num_inputs
        return cls((float(capacity),) * num_inputs, (float(capacity),) * num_outputs)


@dataclass(frozen=True)
class FlowSpec:
    """One flow of a coflow: a demand volume from an input port to an output port."""

    input_port: int
    output_port: int
    demand: float


@dataclass(frozen=True)
class CoflowSpec:
    id: int                       # unique within the instance
    weight: float                 # strictly positive
    release_time: float           # absolute time the coflow becomes visible
    flows: tuple[FlowSpec, ...]   # nonempty, distinct (input, output) pairs

    def __post_init__(self):
        object.__setattr__(self, "flows", _as_tuple(self.flows))


@dataclass(frozen=True)
class Instance:
    switch: SwitchConfig
    coflows: tuple[CoflowSpec, ...]
    kind: str = KIND_GENERAL

    def __post_init__(self):
        object.__setattr__(self, "coflows", _as_tuple(self.coflows))


def _check_finite_positive(value, what: str, allow_zero: bool = False):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{what} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ValidationError(f"{what} must be finite, got {value!r}")
    if allow_zero:
        if value < 0:
            raise ValidationError(f"{what} must be >= 0, got {value!r}")
    elif value <= 0:
        raise ValidationError(f"{what} must be > 0, got {value!r}")


def validate_instance(instance: Instance) -> Instance:
    """Check all structural invariants; return the instance unchanged.

    Raises ValidationError naming the offending coflow id and flow index.
    Validating an already-validated instance succeeds and changes nothing.
    """
    sw = instance.switch
    if sw.num_input_ports < 1 or sw.num_output_ports < 1:
        raise ValidationError("switch must have at least one port on each side")
    for side, caps in (("input", sw.input_capacities), ("output", sw.output_capacities)):
        for port, cap in enumerate(caps):
            _check_finite_positive(cap, f"{side} capacity of port {port}")
    if instance.kind not in KINDS:
        raise ValidationError(f"unknown instance kind {instance.kind!r}; expected one of {KINDS}")

    seen_ids: set[int] = set()
    for cf in instance.coflows:
        if not isinstance(cf.id, int) or isinstance(cf.id, bool):
            raise ValidationError(f"coflow id must be an integer, got {cf.id!r}")
        if cf.id in seen_ids:
            raise ValidationError(f"duplicate coflow id {cf.id}")
        seen_ids.add(cf.id)
        _check_finite_positive(cf.weight, f"weight of coflow {cf.id}")
        _check_finite_positive(cf.release_time, f"release time of coflow {cf.id}", allow_zero=True)
        if not cf.flows:
            raise ValidationError(f"coflow {cf.id} has no flows")
        seen_pairs: set[tuple[int, int]] = set()
        for idx, fl in enumerate(cf.flows):
            where = f"flow {idx} of coflow {cf.id}"
            for name, port, limit in (
                ("input", fl.input_port, sw.num_input_ports),
                ("output", fl.output_port, sw.num_output_ports),
            ):
                if not isinstance(port, int) or isinstance(port, bool):
                    raise ValidationError(f"{where}: {name} port must be an integer, got {port!r}")
                if not 0 <= port < limit:
                    raise ValidationError(f"{where}: {name} port {port} out of range [0, {limit})")
            pair = (fl.input_port, fl.output_port)
            if pair in seen_pairs:
                raise ValidationError(f"{where}: duplicate port pair {pair} within the coflow")
            seen_pairs.add(pair)
            _check_finite_positive(fl.demand, f"{where}: demand")
            if instance.kind == KIND_COS and fl.input_port != fl.output_port:
                raise ValidationError(
                    f"{where}: kind {KIND_COS!r} requires diagonal flows, got pair {pair}"
                )
    if instance.kind == KIND_COS:
        for side, caps in (("input", sw.input_capacities), ("output", sw.output_capacities)):
            for port, cap in enumerate(caps):
                if cap != 1.0:
                    raise ValidationError(
                        f"kind {KIND_COS!r} requires unit capacities; {side} port {port} has {cap}"
                    )
    return instance


def compute_p(instance: Instance) -> int:
    """Largest number of flows any single coflow starts with.

    This is the quantity the guarantee scales with; it never exceeds
    the number of port pairs.  Errors on an instance with no coflows.
    """
    if not instance.coflows:
        raise ValidationError("p is undefined for an instance with no coflows")
    return max(len(cf.flows) for cf in instance.coflows)


# --- canonical JSON form -----------------------------------------------------
#
# {"kind": "general",
#  "switch": {"input_capacities": [...], "output_capacities": [...]},
#  "coflows": [{"id": 1, "weight": 1.0, "release_time": 0.0,
#               "flows": [{"in": 0, "out": 1, "demand": 2.0}, ...]}, ...]}
#
# The loader rejects unknown fields at every level so that typos fail loudly.

def instance_to_dict(instance: Instance) -> dict:
    """Represent a validated instance in its canonical JSON-ready form."""
    return {
        "kind": instance.kind,
        "switch": {
            "input_capacities": [float(c) for c in instance.switch.input_capacities],
            "output_capacities": [float(c) for c in instance.switch.output_capacities],
        },
        "coflows": [
            {
                "id": cf.id,
                "weight": float(cf.weight),
                "release_time": float(cf.release_time),
                "flows": [
                    {"in": fl.input_port, "out": fl.output_port, "demand": float(fl.demand)}
                    for fl in cf.flows
                ],
            }
            for cf in instance.coflows
        ],
    }


def _require_mapping(value, where: str) -> Mapping[str, Any]:
    if not isinstance(value, dict):
        raise ValidationError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(data: Mapping[str, Any], allowed: tuple[str, ...], where: str):
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ValidationError(f"{where}: unknown field {unknown[0]!r}")


def _number(data: Mapping[str, Any], field: str, where: str) -> float:
    if field not in data:
        raise ValidationError(f"{where}: missing field {field!r}")
    value = data[field]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{where}.{field}: expected a number, got {value!r}")
    return float(value)

def _integer(data: Mapping[str, Any], field: str, where: str) -> int:
    if field not in data:
        raise ValidationError(f"{where}: missing field {field!r}")
    value = data[field]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(f"{where}.{field}: expected an integer, got {value!r}")
    return value


def instance_from_dict(data: Any) -> Instance:
    """Parse and validate the canonical form; errors name the offending path."""
    root = _require_mapping(data, "instance")
    _reject_unknown(root, ("kind", "switch", "coflows"), "instance")
    kind = root.get("kind", KIND_GENERAL)
    if not isinstance(kind, str):
        raise ValidationError(f"instance.kind: expected a string, got {kind!r}")

    if "switch" not in root:
        raise ValidationError("instance: missing field 'switch'")
    sw_data = _require_mapping(root["switch"], "switch")
    _reject_unknown(sw_data, ("input_capacities", "output_capacities"), "switch")
    caps = {}
    for field in ("input_capacities", "output_capacities"):
        if field not in sw_data:
            raise ValidationError(f"switch: missing field {field!r}")
        raw = sw_data[field]
        if not isinstance(raw, list):
            raise ValidationError(f"switch.{field}: expected a list")
        values = []
        for pos, item in enumerate(raw):
            if not isinstance(item, (int, float)) or isinstance(item, bool):
                raise ValidationError(f"switch.{field}[{pos}]: expected a number, got {item!r}")
            values.append(float(item))
        caps[field] = tuple(values)
    switch = SwitchConfig(caps["input_capacities"], caps["output_capacities"])

    if "coflows" not in root:
        raise ValidationError("instance: missing field 'coflows'")
    raw_coflows = root["coflows"]
    if not isinstance(raw_coflows, list):
        raise ValidationError("instance.coflows: expected a list")
    coflows = []
    for pos, raw_cf in enumerate(raw_coflows):
        where = f"coflows[{pos}]"
        cf_data = _require_mapping(raw_cf, where)
        _reject_unknown(cf_data, ("id", "weight", "release_time", "flows"), where)
        cf_id = _integer(cf_data, "id", where)
        weight = _number(cf_data, "weight", where)
        release = _number(cf_data, "release_time", where)
        if "flows" not in cf_data:
            raise ValidationError(f"{where}: missing field 'flows'")
        raw_flows = cf_data["flows"]
        if not isinstance(raw_flows, list):
            raise ValidationError(f"{where}.flows: expected a list")
        flows = []
        for fpos, raw_fl in enumerate(raw_flows):
            fwhere = f"{where}.flows[{fpos}]"
            fl_data = _require_mapping(raw_fl, fwhere)
            _reject_unknown(fl_data, ("in", "out", "demand"), fwhere)
            flows.append(
                FlowSpec(
                    input_port=_integer(fl_data, "in", fwhere),
                    output_port=_integer(fl_data, "out", fwhere),
                    demand=_number(fl_data, "demand", fwhere),
                )
            )
        coflows.append(CoflowSpec(id=cf_id, weight=weight, release_time=release, flows=tuple(flows)))

    return validate_instance(Instance(switch=switch, coflows=tuple(coflows), kind=kind))
