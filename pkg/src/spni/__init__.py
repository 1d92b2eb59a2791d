"""Shortest path network interdiction by decomposition and refinement."""
from .errors import CapacityError, InputError, ParseError, SpniError, UnreachableError
from .graph import (
    UNREACHABLE,
    InterdictionSet,
    Network,
    ProblemInstance,
    all_labels,
    calc_length,
    calc_path,
    is_weakly_connected,
    pi_upper_bound,
)
from .instance import generate_grid, read_instance, validate, write_instance
from .partition import Partitioning, find_block, partition
from .qubo import (
    Qubo,
    build_full_qubo,
    build_sub_qubo,
    decode,
    default_penalty,
    encode_bounded,
    export_qubo,
    read_qubo,
)
from .subsolve import (
    BBExact,
    QuboAnneal,
    QuboExhaustive,
    SubproblemSpec,
    bb_exact,
    local_distance,
    make_spec,
    qubo_anneal,
    solve_sub,
)
from .refine import RefineConfig, RefineTrace, initial_solution, refine, solve_spni, sweep
from .bench import brute_force_optimum, full_bb, quality, run_benchmark

__version__ = "0.1.0"
