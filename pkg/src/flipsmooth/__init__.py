"""FLIP local search for local Max-Cut on sparse graphs under smoothed weights."""

from .analysis import (ActivityState, Analyzer, BoundReport, GoodPair, PairTracker,
                       good_move_gaps, init_activity, pair_gain, potential, record_flip,
                       scan_good_pairs, theoretical_bound)
from .flip_engine import (CutState, FlipStep, FlipTrace, PivotRule, Status, gain,
                          improving_moves, is_local_optimum, run, step)
from .generators import gen_complete, gen_forest_union, gen_grid, gen_preferential_attachment
from .graph_core import (GraphError, GraphTopology, WeightAssignment, cut_weight, degeneracy,
                         from_edge_list, read_graph, write_graph)
from .leveling import Leveling, PartitionError, peel_partition, validate_leveling
from .oracle import brute_force
from .smoothing import SmoothedModel, good_pair_epsilon, sample_weights, union_bound

__version__ = "0.1.0"
