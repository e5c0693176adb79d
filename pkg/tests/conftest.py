import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# Label ids used throughout the tests: A=0, B=1, C=2, ...
A, B, C, D = 0, 1, 2, 3


def g_of(nodes, edges=()):
    """Build a DataGraph from [(id, label-or-labels)] plus edge pairs."""
    from teamsim.graphs import DataGraph

    norm = []
    for nid, labs in nodes:
        if isinstance(labs, int):
            labs = [labs]
        norm.append((nid, labs))
    return DataGraph.build(norm, edges)


def p_of(nodes, edges=()):
    """Build a PatternGraph from [(id, label, (lo, hi))] plus edge pairs."""
    from teamsim.pattern import Interval, PatternGraph

    norm = [(nid, lab, Interval(lo, hi)) for nid, lab, (lo, hi) in nodes]
    return PatternGraph.build(norm, edges)
