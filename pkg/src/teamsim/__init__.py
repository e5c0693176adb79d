"""Incremental top-k team formation over labeled graphs.

Matching semantics: a capacity-bounded pattern matches inside radius-
bounded balls via graph simulation on undirected graphs; teams are the
induced match graphs ranked by edge/node density.  The engine maintains
per-fragment match relations incrementally across pattern and data
update sets and always reproduces what a batch rerun would return.
"""

from .batch import TopKResult, batch_topk
from .engine import ApplyStats, QueryResult, Session
from .fragmentation import Fragmentation, fragment_pattern
from .generate import GenConfig, gen_pattern, gen_planted
from .graphs import Ball, DataGraph, Density, Subgraph, ball_extract
from .pattern import Interval, PatternGraph
from .quality import QualityReport, team_quality
from .simulation import (
    MatchRelation,
    PerfectSubgraph,
    match_ball,
    max_simulation,
    pattern_satisfiable,
)
from .topk import Team, TopKList

__all__ = [
    "ApplyStats",
    "Ball",
    "DataGraph",
    "Density",
    "Fragmentation",
    "GenConfig",
    "Interval",
    "MatchRelation",
    "PatternGraph",
    "PerfectSubgraph",
    "QualityReport",
    "QueryResult",
    "Session",
    "Subgraph",
    "Team",
    "TopKList",
    "TopKResult",
    "ball_extract",
    "batch_topk",
    "fragment_pattern",
    "gen_pattern",
    "gen_planted",
    "match_ball",
    "max_simulation",
    "pattern_satisfiable",
    "team_quality",
]
