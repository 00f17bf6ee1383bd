"""Coalitional analysis of cooperative vehicle-to-roadside relaying.

Exact closed-form payoffs for any coalition structure, core stability
analysis, and two independent Monte Carlo validators (geometric placement
for encounter probabilities, slot-level protocol simulation).
"""

__version__ = "0.1.0"

from .analysis import (CheckResult, CoreConditions, CoreMembership, StabilityVerdict,
                       core_membership, core_sufficient_conditions,
                       pricing_cancellation_check, proper_coalitions,
                       run_identity_checks, stability_verdict, structure_payoffs,
                       structure_reports, vehicle_coalition_profitability)
from .analytic import (ABS_TOL, PayoffReport, avg_payment, cost, fee_per_transmission,
                       oracle_relay_mean, player_payoffs, rate_gain, relay_usage_prob,
                       relay_weighted_mean, revenue, throughput, transmission_share)
from .configio import (ConfigError, LoadedConfig, default_game_config, default_geometry,
                       load_config, resolve_encounter)
from .geometry import (EncounterEstimate, GeometryConfig, analytic_pair_encounter,
                       estimate_encounter_matrix)
from .model import (Coalition, CoalitionStructure, GameConfig, bell_number,
                    canonical_structure, check_structure, enumerate_partitions,
                    format_structure, make_config, normalize_structure,
                    parse_structure, split_members, validate_config)
from .slotsim import EmpiricalReport, simulate_slots

__all__ = [
    "__version__",
    "ABS_TOL",
    "Coalition",
    "CoalitionStructure",
    "GameConfig",
    "PayoffReport",
    "EmpiricalReport",
    "EncounterEstimate",
    "GeometryConfig",
    "CheckResult",
    "CoreConditions",
    "CoreMembership",
    "StabilityVerdict",
    "ConfigError",
    "LoadedConfig",
    "analytic_pair_encounter",
    "avg_payment",
    "bell_number",
    "canonical_structure",
    "check_structure",
    "core_membership",
    "core_sufficient_conditions",
    "cost",
    "default_game_config",
    "default_geometry",
    "enumerate_partitions",
    "estimate_encounter_matrix",
    "fee_per_transmission",
    "format_structure",
    "load_config",
    "make_config",
    "normalize_structure",
    "oracle_relay_mean",
    "parse_structure",
    "player_payoffs",
    "pricing_cancellation_check",
    "proper_coalitions",
    "rate_gain",
    "relay_usage_prob",
    "relay_weighted_mean",
    "resolve_encounter",
    "revenue",
    "run_identity_checks",
    "simulate_slots",
    "split_members",
    "stability_verdict",
    "structure_payoffs",
    "structure_reports",
    "throughput",
    "transmission_share",
    "validate_config",
    "vehicle_coalition_profitability",
]
