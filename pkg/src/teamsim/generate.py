"""Seeded planted-partition graph generator with community-skewed labels.

Nodes split into contiguous communities; a fixed edge budget (average
degree times n/2) is sampled with community-biased endpoint choice, so
intra/inter probabilities act as mixing weights.  Labels concentrate on
a small per-community window with a uniform spill-over, which gives
balls realistic label diversity without a heavy-tailed benchmark model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig
from .graphs import DataGraph
from .pattern import Interval, PatternGraph


@dataclass(frozen=True)
class GenConfig:
    n: int
    d: float
    l: int
    communities: int = 1
    intra_prob: float = 0.9
    inter_prob: float = 0.1
    seed: int = 0
    home_window: int = 3
    home_bias: float = 0.8
    second_label_prob: float = 0.2

    def validate(self) -> None:
        if self.n < 1 or self.l < 1 or self.d < 0:
            raise InvalidConfig("n, l must be >= 1 and d >= 0")
        if self.communities < 1 or self.communities > self.n:
            raise InvalidConfig("communities must be in [1, n]")
        for p in (self.intra_prob, self.inter_prob):
            if not 0.0 <= p <= 1.0:
                raise InvalidConfig("probabilities must be in [0, 1]")
        if self.intra_prob + self.inter_prob == 0:
            raise InvalidConfig("at least one edge weight must be positive")


def community_of(cfg: GenConfig, v: int) -> int:
    size = -(-cfg.n // cfg.communities)
    return v // size


def community_span(cfg: GenConfig, c: int) -> tuple[int, int]:
    size = -(-cfg.n // cfg.communities)
    return c * size, min((c + 1) * size, cfg.n)


def gen_planted(cfg: GenConfig) -> DataGraph:
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n, l = cfg.n, cfg.l
    size = -(-n // cfg.communities)

    # labels: home window per community plus uniform spill
    base = (np.arange(n) // size) * max(1, l // max(1, cfg.communities))
    home = (base + rng.integers(0, max(1, cfg.home_window), n)) % l
    uniform = rng.integers(0, l, n)
    lab1 = np.where(rng.random(n) < cfg.home_bias, home, uniform)
    lab2 = rng.integers(0, l, n)
    has2 = rng.random(n) < cfg.second_label_prob

    g = DataGraph()
    for v in range(n):
        labs = {int(lab1[v])}
        if has2[v]:
            labs.add(int(lab2[v]))
        g.adj[v] = set()
        g.labels[v] = frozenset(labs)

    target = int(round(n * cfg.d / 2))
    p_intra = cfg.intra_prob / (cfg.intra_prob + cfg.inter_prob)
    made = 0
    guard = 0
    while made < target and guard < 40:
        guard += 1
        want = target - made
        batch = max(1024, int(want * 1.3))
        u = rng.integers(0, n, batch)
        intra = rng.random(batch) < p_intra
        # intra partner: same community; inter partner: anywhere
        span = np.minimum((u // size) * size + rng.integers(0, size, batch), n - 1)
        anywhere = rng.integers(0, n, batch)
        v = np.where(intra, span, anywhere)
        for a, b in zip(u.tolist(), v.tolist()):
            if a == b or b in g.adj[a]:
                continue
            g.adj[a].add(b)
            g.adj[b].add(a)
            made += 1
            if made >= target:
                break
    return g


def gen_pattern(
    cfg: GenConfig,
    n_nodes: int = 10,
    n_edges: int = 12,
    cap: tuple[int, int | None] = (1, 10),
    seed: int = 0,
    community: int = 0,
) -> PatternGraph:
    """Random connected pattern whose labels come from one community's
    home window (so the pattern has somewhere to match)."""
    rng = np.random.default_rng(seed)
    size = -(-cfg.n // max(1, cfg.communities))
    base = community * max(1, cfg.l // max(1, cfg.communities))
    window = max(1, cfg.home_window)
    names = [f"u{i}" for i in range(n_nodes)]
    nodes = []
    for i, name in enumerate(names):
        lab = (base + int(rng.integers(0, window))) % cfg.l
        nodes.append((name, lab, Interval(cap[0], cap[1])))
    edges = []
    have = set()
    for i in range(1, n_nodes):
        j = int(rng.integers(0, i))
        edges.append((names[j], names[i]))
        have.add((min(i, j), max(i, j)))
    tries = 0
    while len(edges) < n_edges and tries < 50 * n_edges:
        tries += 1
        i, j = int(rng.integers(0, n_nodes)), int(rng.integers(0, n_nodes))
        key = (min(i, j), max(i, j))
        if i != j and key not in have:
            have.add(key)
            edges.append((names[key[0]], names[key[1]]))
    return PatternGraph.build(nodes, edges)
