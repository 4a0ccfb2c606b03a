import numpy as np
import pytest

from blindflow.model import CoflowSpec, FlowSpec, Instance, SwitchConfig


@pytest.fixture
def worked_example():
    """Two coflows on a 2x2 switch whose first-segment rates are known exactly."""
    return two_coflow_example()


def two_coflow_example() -> Instance:
    sw = SwitchConfig.uniform(2)
    c1 = CoflowSpec(
        id=1, weight=1.0, release_time=0.0,
        flows=(FlowSpec(0, 0, 1.0), FlowSpec(1, 0, 1.0)),
    )
    c2 = CoflowSpec(
        id=2, weight=2.0, release_time=0.0,
        flows=(FlowSpec(0, 0, 2.0), FlowSpec(0, 1, 2.0), FlowSpec(1, 1, 2.0)),
    )
    return Instance(switch=sw, coflows=(c1, c2))


def single_flow_example() -> Instance:
    sw = SwitchConfig.uniform(1)
    return Instance(
        switch=sw,
        coflows=(CoflowSpec(id=1, weight=1.0, release_time=0.0, flows=(FlowSpec(0, 0, 1.0),)),),
    )


def random_instance(seed, n_max=8, m_max=5, p_cap=6, d_max=8, t_max=6.0,
                    unit_weights=True, zero_release=False) -> Instance:
    """Small random instance, structured independently of the shipped generator."""
    rng = np.random.Generator(np.random.PCG64(seed))
    m_in = int(rng.integers(1, m_max + 1))
    m_out = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(1, n_max + 1))
    coflows = []
    for k in range(1, n + 1):
        count = int(rng.integers(1, min(p_cap, m_in * m_out) + 1))
        pairs = rng.choice(m_in * m_out, size=count, replace=False)
        flows = tuple(
            FlowSpec(int(pr) // m_out, int(pr) % m_out, float(rng.integers(1, d_max + 1)))
            for pr in sorted(pairs)
        )
        release = 0.0 if zero_release else float(rng.uniform(0.0, t_max))
        weight = 1.0 if unit_weights else float(rng.integers(1, 5))
        coflows.append(CoflowSpec(id=k, weight=weight, release_time=release, flows=flows))
    caps_in = tuple(float(rng.choice([0.5, 1.0, 2.0])) for _ in range(m_in))
    caps_out = tuple(float(rng.choice([0.5, 1.0, 2.0])) for _ in range(m_out))
    sw = SwitchConfig(input_capacities=caps_in, output_capacities=caps_out)
    return Instance(switch=sw, coflows=tuple(coflows))


def random_cos_instance(seed, n_max=6, m_max=4, d_max=6) -> Instance:
    """Unit-capacity diagonal instance with zero releases for sequencing tests."""
    from blindflow.model import KIND_COS

    rng = np.random.Generator(np.random.PCG64(seed + 10_000))
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(1, n_max + 1))
    coflows = []
    for k in range(1, n + 1):
        ports = rng.choice(m, size=int(rng.integers(1, m + 1)), replace=False)
        flows = tuple(
            FlowSpec(int(q), int(q), float(rng.integers(1, d_max + 1))) for q in sorted(ports)
        )
        weight = float(rng.integers(1, 4))
        coflows.append(CoflowSpec(id=k, weight=weight, release_time=0.0, flows=flows))
    return Instance(switch=SwitchConfig.uniform(m), coflows=tuple(coflows), kind=KIND_COS)
