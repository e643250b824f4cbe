"""Exact stochastic-stability analysis of logit-response dynamics on
finite games, with a finite-noise Markov chain cross-check."""

from . import errors
from .dynamics import (
    DynamicsConfig,
    RevisionProcess,
    logit_choice,
    numeric_stable_estimate,
    parse_revision,
    simulate,
    stationary_distribution,
    transition_matrix,
)
from .estimators import LogitDynamics, StabilityAnalyzer
from .games import (
    Game,
    GameTable,
    PotentialSpec,
    best_responses,
    check_weighted_potential,
    enumerate_states,
    nash_set,
    optimum_cost,
    social_cost,
)
from .metrics import classify_states, metric_report, table1_check
from .stability import (
    Arborescence,
    BasinReport,
    INFINITE,
    StochasticPotentialTable,
    WasteGraph,
    attracting_basin,
    basin_report,
    brute_force_arborescence,
    coradius,
    limit_set,
    min_in_arborescence,
    radius,
    radius_coradius_check,
    stochastic_potentials,
    waste,
    waste_for_subset,
    waste_graph,
    zero_waste_closure,
)
from .zoo import (
    game_from_dict,
    game_to_json,
    load_game_from_file,
    make_lb_pos_instance,
    make_lb_unit_instance,
    make_load_balancing,
    make_network_design,
    make_normal_form,
    make_parallel_links,
    make_triangle,
)

__version__ = "0.1.0"
