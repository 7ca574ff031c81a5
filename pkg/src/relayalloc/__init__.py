"""Joint relay selection and power allocation for a cooperative downlink.

Convex relaxations give certified upper bounds on the sum-rate and max-min
objectives; a power-based rounding heuristic gives feasible lower bounds
that are tight in practice.  A statistical cellular channel model and Monte
Carlo harness reproduce the decode-assumption, bound-tightness and
SISO/MISO/relay comparison experiments.
"""

from .baselines import miso_rates, relay_system_rates, siso_rates
from .channel import (
    LargeScaleGains,
    Placement,
    ScenarioConfig,
    SmallScaleFades,
    draw_instance,
    draw_large_scale,
    draw_small_scale,
    draw_synthetic_rayleigh,
    draw_user_positions,
    instance_from_draws,
    miso_small_scale,
    path_loss_dB,
    place_relays,
)
from .errors import (
    ConfigError,
    Infeasible,
    InfeasibleLowerBounds,
    InvalidInstance,
    MissingSourceRelayData,
    RelayAllocError,
    TooLarge,
)
from .model import (
    Assignment,
    ChannelInstance,
    PowerAllocation,
    RateReport,
    SolverOptions,
    assumption_holds,
    rate_compound,
    rate_user_independent,
    rate_user_repetition,
    rates_independent,
    rates_repetition,
)
from .oracle import exhaustive_optimum
from .selection import BoundPair, bound_pair, refine_selection, round_to_selection
from .solver import (
    Duals,
    MinRateTargets,
    RelaxedSolution,
    kkt_residual,
    solve_max_min,
    solve_sum_rate,
    solve_sum_rate_min,
    waterfill_relay,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BoundPair",
    "ChannelInstance",
    "ConfigError",
    "Duals",
    "Infeasible",
    "InfeasibleLowerBounds",
    "InvalidInstance",
    "LargeScaleGains",
    "MinRateTargets",
    "MissingSourceRelayData",
    "Placement",
    "PowerAllocation",
    "RateReport",
    "RelayAllocError",
    "RelaxedSolution",
    "ScenarioConfig",
    "SmallScaleFades",
    "SolverOptions",
    "TooLarge",
    "assumption_holds",
    "bound_pair",
    "draw_instance",
    "draw_large_scale",
    "draw_small_scale",
    "draw_synthetic_rayleigh",
    "draw_user_positions",
    "exhaustive_optimum",
    "instance_from_draws",
    "kkt_residual",
    "miso_rates",
    "miso_small_scale",
    "path_loss_dB",
    "place_relays",
    "rate_compound",
    "rate_user_independent",
    "rate_user_repetition",
    "rates_independent",
    "rates_repetition",
    "refine_selection",
    "relay_system_rates",
    "round_to_selection",
    "siso_rates",
    "solve_max_min",
    "solve_sum_rate",
    "solve_sum_rate_min",
    "waterfill_relay",
]
