"""Randomness stewards: answer k adaptive estimation queries with ~n + O(k log d) bits.

The protocol stack, bottom to top: exact rational grids (`numeric`), audited
bit sources (`randomness`), constant-degree expander walks (`expander`),
walk-based extractors (`extract`), block decision trees (`bdt`) and the
recursive generator fooling them (`prg`), the steward protocol itself
(`steward`), pairwise-independent and averaging samplers (`sampler`), and
two applications: heavy Fourier coefficient search (`fourier`) and adaptive
circuit acceptance estimation (`circuits`).  `adversary` holds owners that
break naive baselines.
"""

from .numeric import Grid, Rat, contained_in_one_interval, interval_index, round_to_midpoint
from .randomness import (
    BitSource,
    BudgetReport,
    CounterSource,
    SystemSource,
    TapeExhausted,
    TapeSource,
    draw_bits,
)
from .expander import GabberGalilGraph, neighbor, walk
# the extract *function* stays in its submodule: exporting it here would
# shadow randsteward.extract itself
from .extract import ExtractorParams, FreshExtractorParams, fresh_extractor, plan_extractor
from .bdt import BlockDecisionTree, exact_node_distribution, table_tree, tv_distance
from .prg import PrgSchedule, build_schedule, expand
from .steward import (
    ConcentratedFn,
    Session,
    StewardConfig,
    Transcript,
    certification_check,
    choose_shift,
    open_session,
    run_main_steward,
    run_naive,
    run_saks_zhou_steward,
    run_steward,
    run_union_bound_steward,
    s0_generalized_round,
    s0_round,
)
from .sampler import (
    AveragingSamplerPlan,
    SamplerPlan,
    app_amplify,
    averaging_sample,
    median_amplify,
    plan_averaging,
    plan_sampler,
    sample_mean,
)
from .fourier import (
    FourierSpectrum,
    estimate_W,
    gl_randomness_audit,
    goldreich_levin,
    wht,
)
from .circuits import (
    acceptance_session,
    parse_circuit,
    print_circuit,
    run_app_oracle_algorithm,
    run_promise_bpp_oracle_algorithm,
)
from .adversary import boundary_owner, constant_owner, extracting_owner

__version__ = "0.1.0"

__all__ = [
    "Grid", "Rat", "interval_index", "round_to_midpoint", "contained_in_one_interval",
    "BitSource", "BudgetReport", "TapeSource", "SystemSource", "CounterSource",
    "TapeExhausted", "draw_bits",
    "GabberGalilGraph", "neighbor", "walk",
    "ExtractorParams", "FreshExtractorParams", "plan_extractor", "fresh_extractor",
    "BlockDecisionTree", "table_tree", "exact_node_distribution", "tv_distance",
    "PrgSchedule", "build_schedule", "expand",
    "StewardConfig", "ConcentratedFn", "Session", "Transcript", "open_session",
    "choose_shift", "s0_round", "s0_generalized_round", "run_steward",
    "run_main_steward", "run_union_bound_steward", "run_saks_zhou_steward",
    "run_naive", "certification_check",
    "SamplerPlan", "AveragingSamplerPlan", "plan_sampler", "plan_averaging",
    "sample_mean", "averaging_sample", "median_amplify", "app_amplify",
    "FourierSpectrum", "wht", "estimate_W", "goldreich_levin", "gl_randomness_audit",
    "parse_circuit", "print_circuit", "acceptance_session",
    "run_promise_bpp_oracle_algorithm", "run_app_oracle_algorithm",
    "constant_owner", "boundary_owner", "extracting_owner",
]
