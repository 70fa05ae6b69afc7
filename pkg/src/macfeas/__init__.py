"""Delay feasibility and power allocation for Gaussian multiple-access systems."""

__version__ = "0.1.0"

from .capacity import (
    ChannelConfig,
    FeasibilityVerdict,
    check_feasibility,
    check_feasibility_bruteforce,
    check_feasibility_equal_power,
    check_feasibility_sfm,
)
from .power import allocate_fixed_sum, allocate_optimal, min_sum_power, verify_power_feasibility
from .queueing import UserDemand, required_rate, required_rate_vector
from .scenario import Scenario, load_scenario, parse_scenario
from .sfm import SfmOptions, SubmodularOracle, minimize
