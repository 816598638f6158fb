"""Robust power allocation and pinching-antenna placement under location uncertainty."""
from .allocation import AllocationResult, UserAllocation, min_power_user, total_power
from .channel import AntennaPosition, ScenarioConfig, UserSpec, achievable_rate
from .montecarlo import OutageReport, estimate_coverage, estimate_outage
from .placement import PlacementOutcome, PsoConfig, place
from .specfun import CoverageProblem, coverage_probability, marcum_q1, solve_r_min

__all__ = [
    "AllocationResult", "AntennaPosition", "CoverageProblem", "OutageReport", "PlacementOutcome",
    "PsoConfig", "ScenarioConfig", "UserAllocation", "UserSpec", "achievable_rate",
    "coverage_probability", "estimate_coverage", "estimate_outage", "marcum_q1",
    "min_power_user", "place", "solve_r_min", "total_power",
]
