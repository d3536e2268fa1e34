"""Block local elimination for sparse binary integer linear programs."""

from .elimination import backward, forward, solve_lea, table_width_report
from .generator import GeneratorParams, generate, splitmix64_next, staircase_partition
from .graph import (OrderedPartition, block_neighborhood, build_interaction_graph, eliminate_block,
                    find_indistinguishable_blocks, quotient_graph, validate_partition)
from .model import Constraint, IlpInstance, Solution, evaluate, parse_instance, serialize_instance
from .subsolver import (LocalSolver, solve_block_package, solve_local_bnb, solve_local_exhaustive,
                        solve_monolithic)

__version__ = "0.1.0"
