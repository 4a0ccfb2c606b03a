import math

import pytest

from blindflow.errors import ValidationError
from blindflow.model import (
    KIND_COS,
    CoflowSpec,
    FlowSpec,
    Instance,
    SwitchConfig,
    compute_p,
    instance_from_dict,
    instance_to_dict,
    validate_instance,
)

from conftest import single_flow_example, two_coflow_example


def test_uniform_switch():
    sw = SwitchConfig.uniform(3)
    assert sw.num_input_ports == 3
    assert sw.num_output_ports == 3
    assert sw.input_capacities == (1.0, 1.0, 1.0)
    sw = SwitchConfig.uniform(2, 4, 0.5)
    assert sw.num_input_ports == 2
    assert sw.num_output_ports == 4
    assert sw.output_capacities == (0.5, 0.5, 0.5, 0.5)


def test_switch_rejects_bad_capacities():
    with pytest.raises(ValidationError):
        SwitchConfig(input_capacities=(), output_capacities=(1.0,))
    with pytest.raises(ValidationError):
        SwitchConfig(input_capacities=(1.0,), output_capacities=(0.0,))
    with pytest.raises(ValidationError):
        SwitchConfig(input_capacities=(-1.0,), output_capacities=(1.0,))
    with pytest.raises(ValidationError):
        SwitchConfig(input_capacities=(math.inf,), output_capacities=(1.0,))


def test_validate_accepts_examples():
    validate_instance(two_coflow_example())
    validate_instance(single_flow_example())


def test_validate_rejects_bad_ports():
    sw = SwitchConfig.uniform(2)
    cf = CoflowSpec(id=1, weight=1.0, release_time=0.0, flows=(FlowSpec(2, 0, 1.0),))
    with pytest.raises(ValidationError, match="coflow 1"):
        validate_instance(Instance(switch=sw, coflows=(cf,)))
    cf = CoflowSpec(id=1, weight=1.0, release_time=0.0, flows=(FlowSpec(0, -1, 1.0),))
    with pytest.raises(ValidationError, match="coflow 1"):
        validate_instance(Instance(switch=sw, coflows=(cf,)))


def test_validate_rejects_duplicate_ids():
    sw = SwitchConfig.uniform(2)
    cf = CoflowSpec(id=3, weight=1.0, release_time=0.0, flows=(FlowSpec(0, 0, 1.0),))
    with pytest.raises(ValidationError, match="duplicate"):
        validate_instance(Instance(switch=sw, coflows=(cf, cf)))


def test_validate_rejects_duplicate_pairs():
    sw = SwitchConfig.uniform(2)
    cf = CoflowSpec(
        id=1, weight=1.0, release_time=0.0,
        flows=(FlowSpec(0, 1, 1.0), FlowSpec(0, 1, 2.0)),
    )
    with pytest.raises(ValidationError, match="coflow 1"):
        validate_instance(Instance(switch=sw, coflows=(cf,)))


def test_validate_rejects_bad_numbers():
    sw = SwitchConfig.uniform(2)
    bad_demand = CoflowSpec(id=1, weight=1.0, release_time=0.0, flows=(FlowSpec(0, 0, 0.0),))
    with pytest.raises(ValidationError):
        validate_instance(Instance(switch=sw, coflows=(bad_demand,)))
    bad_weight = CoflowSpec(id=1, weight=-2.0, release_time=0.0, flows=(FlowSpec(0, 0, 1.0),))
    with pytest.raises(ValidationError):
        validate_instance(Instance(switch=sw, coflows=(bad_weight,)))
    bad_release = CoflowSpec(id=1, weight=1.0, release_time=-0.5, flows=(FlowSpec(0, 0, 1.0),))
    with pytest.raises(ValidationError):
        validate_instance(Instance(switch=sw, coflows=(bad_release,)))
    nan_demand = CoflowSpec(id=1, weight=1.0, release_time=0.0, flows=(FlowSpec(0, 0, math.nan),))
    with pytest.raises(ValidationError):
        validate_instance(Instance(switch=sw, coflows=(nan_demand,)))


def test_validate_rejects_empty_coflow():
    sw = SwitchConfig.uniform(2)
    cf = CoflowSpec(id=1, weight=1.0, release_time=0.0, flows=())
    with pytest.raises(ValidationError, match="coflow 1"):
        validate_instance(Instance(switch=sw, coflows=(cf,)))


def test_cos_kind_requires_diagonal_and_unit_capacities():
    sw = SwitchConfig.uniform(2)
    off_diag = CoflowSpec(id=1, weight=1.0, release_time=0.0, flows=(FlowSpec(0, 1, 1.0),))
    with pytest.raises(ValidationError):
        validate_instance(Instance(switch=sw, coflows=(off_diag,), kind=KIND_COS))
    diag = CoflowSpec(id=1, weight=1.0, release_time=0.0, flows=(FlowSpec(1, 1, 1.0),))
    validate_instance(Instance(switch=sw, coflows=(diag,), kind=KIND_COS))
    sw_half = SwitchConfig.uniform(2, 2, 0.5)
    with pytest.raises(ValidationError):
        validate_instance(Instance(switch=sw_half, coflows=(diag,), kind=KIND_COS))


def test_validate_rejects_unknown_kind():
    sw = SwitchConfig.uniform(1)
    cf = CoflowSpec(id=1, weight=1.0, release_time=0.0, flows=(FlowSpec(0, 0, 1.0),))
    with pytest.raises(ValidationError):
        validate_instance(Instance(switch=sw, coflows=(cf,), kind="mystery"))


def test_compute_p():
    assert compute_p(two_coflow_example()) == 3
    assert compute_p(single_flow_example()) == 1
    with pytest.raises(ValidationError):
        compute_p(Instance(switch=SwitchConfig.uniform(1), coflows=()))


def test_dict_round_trip():
    for inst in (two_coflow_example(), single_flow_example()):
        data = instance_to_dict(inst)
        back = instance_from_dict(data)
        assert back == inst
        assert instance_to_dict(back) == data


def test_dict_round_trip_cos():
    sw = SwitchConfig.uniform(2)
    cf = CoflowSpec(id=1, weight=1.0, release_time=0.0, flows=(FlowSpec(0, 0, 3.0),))
    inst = Instance(switch=sw, coflows=(cf,), kind=KIND_COS)
    assert instance_from_dict(instance_to_dict(inst)) == inst


def test_from_dict_rejects_unknown_fields():
    data = instance_to_dict(single_flow_example())
    data["mystery"] = 1
    with pytest.raises(ValidationError, match="mystery"):
        instance_from_dict(data)


def test_from_dict_rejects_unknown_nested_fields():
    data = instance_to_dict(single_flow_example())
    data["coflows"][0]["extra"] = True
    with pytest.raises(ValidationError, match="extra"):
        instance_from_dict(data)
    data = instance_to_dict(single_flow_example())
    data["coflows"][0]["flows"][0]["note"] = "x"
    with pytest.raises(ValidationError, match="note"):
        instance_from_dict(data)
    data = instance_to_dict(single_flow_example())
    data["switch"]["spare"] = []
    with pytest.raises(ValidationError, match="spare"):
        instance_from_dict(data)


def test_from_dict_rejects_missing_fields():
    data = instance_to_dict(single_flow_example())
    del data["coflows"][0]["weight"]
    with pytest.raises(ValidationError):
        instance_from_dict(data)


def test_from_dict_type_strictness():
    data = instance_to_dict(single_flow_example())
    data["coflows"][0]["id"] = 1.5
    with pytest.raises(ValidationError):
        instance_from_dict(data)
    data = instance_to_dict(single_flow_example())
    data["coflows"][0]["id"] = True
    with pytest.raises(ValidationError):
        instance_from_dict(data)
    data = instance_to_dict(single_flow_example())
    data["coflows"][0]["weight"] = "heavy"
    with pytest.raises(ValidationError):
        instance_from_dict(data)


def test_from_dict_kind_defaults_to_general():
    data = instance_to_dict(single_flow_example())
    data.pop("kind", None)
    inst = instance_from_dict(data)
    assert inst.kind == "general"


def test_from_dict_rejects_non_mapping():
    with pytest.raises(ValidationError):
        instance_from_dict([1, 2, 3])
    with pytest.raises(ValidationError):
        instance_from_dict(None)
