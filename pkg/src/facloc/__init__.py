"""Facility location mechanism workbench.

Mechanisms place facilities from reported agent locations; the rest of the
package measures them: welfare and exact optima, axiom checkers that emit
replayable certificates, named scenario fixtures, seeded ratio benchmarks,
and a CLI over versioned instance files.
"""

from .axioms import (
    Certificate,
    CertificateKind,
    SearchBudget,
    certificate_from_dict,
    certificate_to_dict,
    check_anonymity,
    check_pareto,
    check_strategy_proofness,
    verify_certificate,
)
from .bench import BenchConfig, BenchResult, run_bench
from .geometry import Metric, geometric_median, smallest_enclosing_circle
from .instances import Instance, instance_from_dict, instance_to_dict, load_instance
from .mechanisms import (
    AgentProfile,
    FacilitySpec,
    MechanismDescriptor,
    MechanismKind,
    Solution,
    run_mechanism,
)
from .scenarios import get_scenario, list_scenarios, run_all, run_scenario
from .welfare import (
    OracleCapError,
    RatioReport,
    WelfareObjective,
    approximation_ratio,
    evaluate,
    optimal_capacitated_assignment,
    optimal_welfare,
)

__all__ = [
    "AgentProfile",
    "BenchConfig",
    "BenchResult",
    "Certificate",
    "CertificateKind",
    "FacilitySpec",
    "Instance",
    "MechanismDescriptor",
    "MechanismKind",
    "Metric",
    "OracleCapError",
    "RatioReport",
    "SearchBudget",
    "Solution",
    "WelfareObjective",
    "approximation_ratio",
    "certificate_from_dict",
    "certificate_to_dict",
    "check_anonymity",
    "check_pareto",
    "check_strategy_proofness",
    "evaluate",
    "geometric_median",
    "get_scenario",
    "instance_from_dict",
    "instance_to_dict",
    "list_scenarios",
    "load_instance",
    "optimal_capacitated_assignment",
    "optimal_welfare",
    "run_all",
    "run_bench",
    "run_mechanism",
    "run_scenario",
    "smallest_enclosing_circle",
    "verify_certificate",
]
