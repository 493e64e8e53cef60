"""
## stabsim
Simulation and verification workbench for four silent self-stabilizing BFS
spanning-tree algorithms (U, B(D), HC(D), FHC(D)) in the composite atomicity model.

### Run an algorithm
>>> from stabsim import AlgorithmSpec, Synchronous, build_line, random_configuration, run
>>> g = build_line(5)
>>> spec = AlgorithmSpec('B', 5)
>>> trace = run(spec, g, random_configuration(spec, g, seed=1), Synchronous())
>>> trace.round_count <= g.diameter
True

### Worst-case scenarios
>>> from stabsim import scenario_hc_slow
>>> trace = scenario_hc_slow(3).run()
>>> trace.round_count, trace.step_count
(4, 6)

### Command line
`stabsim run|replay|table|explore|scenario-dump`, plus `help`, `usage <command>` and `license`.
"""

from .algorithms import AlgorithmSpec, Configuration, PriorityPolicy, RuleId, TiePolicy, Variant, random_configuration
from .console import Console, main
from .engine import ExecutionTrace, Outcome, replay, run, step
from .explorer import build_transition_graph, check_sinks, check_termination, explore, state_space_bound
from .scenarios import (scenario_exponential, scenario_hc_slow, scenario_sync_b_lollipop,
                        scenario_sync_fhc_lollipop, scenario_sync_u_line, scenario_unbounded_line)
from .scheduler import CentralRandom, DistributedRandom, Move, Priority, Scripted, Synchronous
from .topology import Graph, build_gk, build_line, build_lollipop, parse_graph
from .verifier import attractor_report, is_legitimate, verify_bfs_tree
from .version import __version__ as v

__title__ = 'stabsim'
__license__ = 'MIT'
__version__ = v
