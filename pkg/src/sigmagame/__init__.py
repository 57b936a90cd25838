"""Sigma-game and lit-only sigma-game toolkit.

Exact minimum light numbers over GF(2), lit-only reachability, certified
bounded solvers for decorated trees, and exhaustive verification scans.
"""

from .model import (
    BoundViolationError,
    CapExceededError,
    FormatError,
    Graph,
    InvalidMoveError,
    LIT,
    REGULAR,
    ShapeError,
    SigmaGameError,
    apply_move_set,
    build_family,
    chi,
    config_from_string,
    config_to_string,
    light_number,
    lit_only_move,
    parse_instance,
    regular_move,
    replay,
    replay_lit,
    serialize_instance,
)
from .search import (
    GapProfile,
    MlResult,
    MlStarResult,
    NeighborhoodBasis,
    gap_profile,
    litonly_reachable,
    ml_litonly,
    ml_regular,
    ml_table,
    mlstar_table,
    neighborhood_basis,
    regular_reach_decompose,
)
from .constructive import (
    PendantPathsSolver,
    PlantedSetup,
    PlantedTreeSolver,
    RakeView,
    SolveCertificate,
    TreeAnatomy,
    TreeSolver,
    make_states_differ,
    nylen_path,
    path_normalize,
    pendant_rake_view,
    rake_normalize,
    rake_view,
    realize_up_to_outside,
    solve_pendant_paths,
    solve_planted_tree,
    solve_tree,
    tree_anatomy,
)
from .survey import (
    ScanReport,
    decorate_loops,
    enumerate_all_graphs,
    enumerate_family,
    enumerate_trees,
    enumerate_unicyclic,
    reproduce_example,
    scan,
)

__version__ = "0.1.0"
