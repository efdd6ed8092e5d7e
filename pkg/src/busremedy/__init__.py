"""Bus-network remediation toolkit for rail-line disruptions.

Models a multimodal transit network over a tessellated study area, scores
gravity accessibility, simulates the loss of a rail line, and builds recovery
plans that extend and refleet the existing bus network, compared against the
conventional replacement shuttle.
"""

from .accessibility import AccessibilityField, acc_centroid, acc_overall, compute_field
from .disruption import DisruptionScenario, build_replacement, disrupt, gen_demand
from .errors import BusRemedyError
from .network import Line, Mode, Node, NodeKind, TransitNetwork, headway, line_length_km
from .pipeline import RemediationResult, remediate
from .report import delta_field, ecdf, mean_ratio, operating_distance_kmh
from .router import shortest_times
from .scenario import Scenario, load_scenario
from .stage1 import assign_consolidation, cluster_nodes, route_extension
from .stage2 import AllocationProblem, RemediationPlan, solve_allocation, validate_plan
from .tessellation import TileGrid, count_opportunities, tessellate

__version__ = "0.1.0"

__all__ = [
    "AccessibilityField",
    "AllocationProblem",
    "BusRemedyError",
    "DisruptionScenario",
    "Line",
    "Mode",
    "Node",
    "NodeKind",
    "RemediationPlan",
    "RemediationResult",
    "Scenario",
    "TileGrid",
    "TransitNetwork",
    "acc_centroid",
    "acc_overall",
    "assign_consolidation",
    "build_replacement",
    "cluster_nodes",
    "compute_field",
    "count_opportunities",
    "delta_field",
    "disrupt",
    "ecdf",
    "gen_demand",
    "headway",
    "line_length_km",
    "load_scenario",
    "mean_ratio",
    "operating_distance_kmh",
    "remediate",
    "route_extension",
    "shortest_times",
    "solve_allocation",
    "tessellate",
    "validate_plan",
    "__version__",
]
