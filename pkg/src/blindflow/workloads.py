"""Workload sources: a seeded synthetic generator, a shuffle-trace
importer, and canonical JSON instance files.

The generator draws, per coflow, a flow count uniform on {1..p_max},
that many distinct port pairs uniform without replacement, integer
demands uniform on {1..max_demand}, and a release time uniform on
[0, last_release]; weights are one and capacities are one.  Randomness
comes from numpy's Philox counter-based generator (4x64, 10 rounds),
keyed by the seed alone, so equal parameters give equal instances.

The trace format is the plain-text shuffle benchmark layout: a header
``<num_ports> <num_coflows>`` followed by one line per coflow,

    <id> <arrival_ms> <num_mappers> <mapper ports...> <num_reducers> <reducer:MB ...>

Each reducer's shuffle volume is split evenly over the mappers, one flow
per (mapper, reducer) pair.  Port indices are 0-based; arrival times are
milliseconds and become seconds; every port gets the same capacity in
MB per second.  The parser is strict and reports 1-based line numbers.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .model import (
    CoflowSpec,
    FlowSpec,
    Instance,
    SwitchConfig,
    instance_from_dict,
    instance_to_dict,
    validate_instance,
)

GENERATOR_ALGORITHM = "philox4x64-10"


@dataclass(frozen=True)
class SyntheticParams:
    num_coflows: int        # n >= 1
    ports_per_side: int     # square switch, unit capacities
    p_max: int              # largest flow count a coflow may draw, <= ports^2
    max_demand: int         # demands are integers in 1..max_demand
    last_release: float     # releases are uniform on [0, last_release]
    seed: int


def generate_synthetic(params: SyntheticParams) -> Instance:
    """Deterministically generate a validated instance from the parameters."""
    n = params.num_coflows
    m = params.ports_per_side
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"num_coflows must be a positive integer, got {n!r}")
    if not isinstance(m, int) or m < 1:
        raise ValidationError(f"ports_per_side must be a positive integer, got {m!r}")
    if not isinstance(params.p_max, int) or not 1 <= params.p_max <= m * m:
        raise ValidationError(
            f"p_max must be an integer in [1, {m * m}] for {m} ports per side, got {params.p_max!r}"
        )
    if not isinstance(params.max_demand, int) or params.max_demand < 1:
        raise ValidationError(f"max_demand must be a positive integer, got {params.max_demand!r}")
    if not (isinstance(params.last_release, (int, float)) and math.isfinite(params.last_release)
            and params.last_release >= 0):
        raise ValidationError(f"last_release must be finite and >= 0, got {params.last_release!r}")
    if not isinstance(params.seed, int) or params.seed < 0:
        raise ValidationError(f"seed must be a nonnegative integer, got {params.seed!r}")

    rng = np.random.Generator(np.random.Philox(params.seed))
    coflows = []
    for k in range(1, n + 1):
        count = int(rng.integers(1, params.p_max + 1))
        pairs = rng.choice(m * m, size=count, replace=False)
        demands = rng.integers(1, params.max_demand + 1, size=count)
        release = float(rng.uniform(0.0, params.last_release))
        flows = sorted(
            (int(pair) // m, int(pair) % m, float(demand))
            for pair, demand in zip(pairs, demands)
        )
        coflows.append(
            CoflowSpec(
                id=k,
                weight=1.0,
                release_time=release,
                flows=tuple(FlowSpec(i, j, d) for i, j, d in flows),
            )
        )
    instance = Instance(
        switch=SwitchConfig.uniform(m, m, 1.0),
        coflows=tuple(coflows),
        kind="general",
    )
    return validate_instance(instance)


def draw_uniform_weights(instance: Instance, low: int, high: int, seed: int) -> Instance:
    """Replace all weights with integers uniform on {low..high}, deterministically.

    Uses a weight-specific Philox stream derived from the seed so the
    draw neither disturbs nor depends on the flow-structure stream.
    """
    if not isinstance(low, int) or not isinstance(high, int) or not 1 <= low <= high:
        raise ValidationError(f"weight range must satisfy 1 <= low <= high, got {low!r}..{high!r}")
    if not isinstance(seed, int) or seed < 0:
        raise ValidationError(f"seed must be a nonnegative integer, got {seed!r}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(1,))))
    weights = rng.integers(low, high + 1, size=len(instance.coflows))
    coflows = tuple(
        dataclasses.replace(cf, weight=float(w))
        for cf, w in zip(instance.coflows, weights)
    )
    return validate_instance(dataclasses.replace(instance, coflows=coflows))


def import_trace(path, capacity_mbps: float, first: int | None = None) -> Instance:
    """Parse a shuffle trace file into a validated instance.

    ``first`` keeps only the first so-many coflows.  Every malformed
    entry is rejected with its line number.
    """
    if not (isinstance(capacity_mbps, (int, float)) and math.isfinite(capacity_mbps) and capacity_mbps > 0):
        raise ValidationError(f"capacity must be positive and finite, got {capacity_mbps!r}")
    if first is not None and (not isinstance(first, int) or first < 1):
        raise ValidationError(f"first must be a positive integer, got {first!r}")

    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ValidationError("line 1: expected header '<num_ports> <num_coflows>'")
    header = lines[0].split()
    if len(header) != 2:
        raise ValidationError("line 1: expected header '<num_ports> <num_coflows>'")
    try:
        num_ports, num_coflows = int(header[0]), int(header[1])
    except ValueError:
        raise ValidationError("line 1: header fields must be integers") from None
    if num_ports < 1 or num_coflows < 0:
        raise ValidationError("line 1: port and coflow counts must be positive")

    data_lines = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if raw.strip():
            data_lines.append((lineno, raw))
    if len(data_lines) < num_coflows:
        raise ValidationError(
            f"expected {num_coflows} coflow lines after the header, found {len(data_lines)}"
        )
    if len(data_lines) > num_coflows:
        lineno = data_lines[num_coflows][0]
        raise ValidationError(f"line {lineno}: unexpected content after {num_coflows} coflow lines")
    if first is not None:
        data_lines = data_lines[:first]

    def parse_int(token: str, lineno: int, what: str) -> int:
        try:
            return int(token)
        except ValueError:
            raise ValidationError(f"line {lineno}: {what} must be an integer, got {token!r}") from None

    def parse_port(token: str, lineno: int, what: str) -> int:
        port = parse_int(token, lineno, what)
        if not 0 <= port < num_ports:
            raise ValidationError(f"line {lineno}: {what} {port} out of range [0, {num_ports})")
        return port

    coflows = []
    seen_ids: set[int] = set()
    for lineno, raw in data_lines:
        tokens = raw.split()
        if len(tokens) < 5:
            raise ValidationError(f"line {lineno}: truncated coflow line")
        cf_id = parse_int(tokens[0], lineno, "coflow id")
        if cf_id in seen_ids:
            raise ValidationError(f"line {lineno}: duplicate coflow id {cf_id}")
        seen_ids.add(cf_id)
        arrival_ms = parse_int(tokens[1], lineno, "arrival time")
        if arrival_ms < 0:
            raise ValidationError(f"line {lineno}: arrival time must be >= 0, got {arrival_ms}")
        num_mappers = parse_int(tokens[2], lineno, "mapper count")
        if num_mappers < 1:
            raise ValidationError(f"line {lineno}: mapper count must be >= 1, got {num_mappers}")
        if len(tokens) < 3 + num_mappers + 1:
            raise ValidationError(f"line {lineno}: fewer mapper ports than the declared {num_mappers}")
        mappers = [parse_port(t, lineno, "mapper port") for t in tokens[3:3 + num_mappers]]
        if len(set(mappers)) != len(mappers):
            raise ValidationError(f"line {lineno}: duplicate mapper port")
        num_reducers = parse_int(tokens[3 + num_mappers], lineno, "reducer count")
        if num_reducers < 1:
            raise ValidationError(f"line {lineno}: reducer count must be >= 1, got {num_reducers}")
        reducer_tokens = tokens[4 + num_mappers:]
        if len(reducer_tokens) != num_reducers:
            raise ValidationError(
                f"line {lineno}: expected {num_reducers} reducer entries, found {len(reducer_tokens)}"
            )
        flows = []
        seen_reducers: set[int] = set()
        for token in reducer_tokens:
            part = token.split(":")
            if len(part) != 2:
                raise ValidationError(f"line {lineno}: reducer entry {token!r} is not '<port>:<MB>'")
            reducer = parse_port(part[0], lineno, "reducer port")
            if reducer in seen_reducers:
                raise ValidationError(f"line {lineno}: duplicate reducer port {reducer}")
            seen_reducers.add(reducer)
            try:
                size_mb = float(part[1])
            except ValueError:
                raise ValidationError(f"line {lineno}: shuffle size {part[1]!r} is not a number") from None
            if not math.isfinite(size_mb) or size_mb <= 0:
                raise ValidationError(f"line {lineno}: nonpositive shuffle size {part[1]} for reducer {reducer}")
            for mapper in mappers:
                flows.append(FlowSpec(mapper, reducer, size_mb / num_mappers))
        flows.sort(key=lambda fl: (fl.input_port, fl.output_port))
        coflows.append(
            CoflowSpec(id=cf_id, weight=1.0, release_time=arrival_ms / 1000.0, flows=tuple(flows))
        )

    instance = Instance(
        switch=SwitchConfig.uniform(num_ports, num_ports, float(capacity_mbps)),
        coflows=tuple(coflows),
        kind="general",
    )
    return validate_instance(instance)


def read_instance(path) -> Instance:
    """Load and validate a canonical JSON instance file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return instance_from_dict(data)


def write_instance(instance: Instance, path) -> None:
    """Write the canonical JSON form; reading it back gives an equal instance."""
    validate_instance(instance)
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=2) + "\n")
