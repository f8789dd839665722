"""Generalized dynamic network codes for cooperative multi-user uplinks."""

from .block_code import (
    SystematicCode,
    design_network_code,
    is_mds,
    min_distance,
    puncture,
    rs_generator,
    singleton_bound,
)
from .fault_model import (
    CompositeDistance,
    FaultEvent,
    FaultPattern,
    GdncParams,
    all_events,
    apply_faults,
    composite_distance,
    guaranteed_diversity,
)
from .finite_field import FiniteField, field_new, parse_field_spec
from .gf_matrix import Matrix, parse_matrix, rank, read_matrix, rref, solve, write_matrix
from .monte_carlo import SimConfig, estimate_diversity, run_baseline_2user, run_sim
from .outage_analysis import ChannelParams, baseline_outage, gdnc_overall_outage, single_link_outage

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
