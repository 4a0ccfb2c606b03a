"""Non-clairvoyant coflow scheduling on a switch fabric.

Simulates weight-proportional rate allocators against comparison
policies, and certifies lower bounds on the optimal total weighted
completion time via dual certificates, a time-slotted LP relaxation,
and per-port scheduling bounds.
"""

from .bounds import (
    DualCertificate,
    FeasibilityReport,
    build_dual_certificate,
    certificate_report_to_dict,
    check_dual_feasibility,
    cos_brute_force_opt,
    dual_objective_lower_bound,
    smith_port_lower_bound,
    solve_flp,
)
from .engine import (
    MODE_CAUSAL,
    MODE_NON_CAUSAL,
    RateAllocation,
    SchedulerView,
    SimulationResult,
    simulate,
    weighted_completion_time,
)
from .errors import InvariantError, ValidationError
from .model import (
    CoflowSpec,
    FlowSpec,
    Instance,
    SwitchConfig,
    compute_p,
    instance_from_dict,
    instance_to_dict,
    validate_instance,
)
from .report import certified_dual_bound, run_comparison, sweep
from .schedulers import (
    ALGORITHM_NAMES,
    AaloConfig,
    augmented_rates,
    baseline_rates,
    blindflow_max_rates,
    blindflow_rates,
    cos_rates,
    make_policy,
)
from .workloads import (
    SyntheticParams,
    generate_synthetic,
    import_trace,
    read_instance,
    write_instance,
)

__all__ = [
    "ALGORITHM_NAMES",
    "AaloConfig",
    "CoflowSpec",
    "DualCertificate",
    "FeasibilityReport",
    "FlowSpec",
    "Instance",
    "InvariantError",
    "MODE_CAUSAL",
    "MODE_NON_CAUSAL",
    "RateAllocation",
    "SchedulerView",
    "SimulationResult",
    "SwitchConfig",
    "SyntheticParams",
    "ValidationError",
    "augmented_rates",
    "baseline_rates",
    "blindflow_max_rates",
    "blindflow_rates",
    "build_dual_certificate",
    "certificate_report_to_dict",
    "certified_dual_bound",
    "check_dual_feasibility",
    "compute_p",
    "cos_brute_force_opt",
    "cos_rates",
    "dual_objective_lower_bound",
    "generate_synthetic",
    "import_trace",
    "instance_from_dict",
    "instance_to_dict",
    "make_policy",
    "read_instance",
    "run_comparison",
    "simulate",
    "smith_port_lower_bound",
    "solve_flp",
    "sweep",
    "validate_instance",
    "weighted_completion_time",
    "write_instance",
]

__version__ = "0.1.0"
