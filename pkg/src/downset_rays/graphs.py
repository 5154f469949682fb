"""Graph models: entropies from boundary min-cuts of weighted graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import networkx as nx

from .errors import InputError
from .linalg import to_fraction
from .sac import PartySystem


@dataclass
class GraphModel:
    """Undirected weighted graph whose labeled vertices carry party names.

    ``labels`` maps a vertex id to a party in {0..N}; unlabeled vertices are
    bulk vertices.  Several vertices may share a label, and a party with no
    vertex simply contributes nothing to any cut.
    """

    n_parties: int
    labels: dict[str, int | None]
    edges: list[tuple[str, str, Fraction]] = field(default_factory=list)

    def __post_init__(self):
        self.edges = [(str(u), str(v), to_fraction(w)) for u, v, w in self.edges]
        self.labels = {str(k): v for k, v in self.labels.items()}

    @property
    def party_system(self) -> PartySystem:
        return PartySystem(self.n_parties)

    def validate(self) -> None:
        if self.n_parties < 2:
            raise InputError("a graph model needs at least two parties")
        for v, lab in self.labels.items():
            if lab is not None and not 0 <= lab <= self.n_parties:
                raise InputError(f"vertex {v} has label {lab} outside 0..{self.n_parties}")
        if not any(lab is not None for lab in self.labels.values()):
            raise InputError("graph has no labeled vertices")
        for u, v, w in self.edges:
            if u not in self.labels or v not in self.labels:
                raise InputError(f"edge {u}-{v} uses an undeclared vertex")
            if u == v:
                raise InputError(f"self-loop at {u}")
            if w <= 0:
                raise InputError(f"edge {u}-{v} has non-positive weight {w}")
        g = self.to_networkx()
        if len(g) and not nx.is_connected(g):
            raise InputError("graph is not connected")

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.labels)
        for u, v, w in self.edges:
            # parallel edges add up
            if g.has_edge(u, v):
                g[u][v]["capacity"] += w
            else:
                g.add_edge(u, v, capacity=w)
        return g

    def bulk_vertices(self) -> list[str]:
        return sorted(v for v, lab in self.labels.items() if lab is None)

    def scaled(self, factor) -> "GraphModel":
        f = to_fraction(factor)
        return GraphModel(self.n_parties, dict(self.labels), [(u, v, w * f) for u, v, w in self.edges])


def _cut_value(g: nx.Graph, sources: set, sinks: set) -> Fraction:
    if not sources or not sinks:
        return Fraction(0)
    d = nx.DiGraph()
    for u, v, data in g.edges(data=True):
        d.add_edge(u, v, capacity=data["capacity"])
        d.add_edge(v, u, capacity=data["capacity"])
    # edges without a capacity attribute are treated as infinite
    for s in sources:
        d.add_edge("__source__", s)
    for t in sinks:
        d.add_edge(t, "__sink__")
    value, _ = nx.minimum_cut(d, "__source__", "__sink__")
    return to_fraction(value)


def graph_entropy(gm: GraphModel) -> tuple[Fraction, ...]:
    """S_J for every coordinate J: the min cut separating J from the other labels."""
    gm.validate()
    ps = gm.party_system
    g = gm.to_networkx()
    out = []
    for idx in range(ps.ambient_dim):
        j = ps.subset(idx)
        src = {v for v, lab in gm.labels.items() if lab is not None and lab in j}
        snk = {v for v, lab in gm.labels.items() if lab is not None and lab not in j}
        out.append(_cut_value(g, src, snk))
    return tuple(out)


def even_degree_check(gm: GraphModel) -> bool:
    """True iff every vertex has even total incident weight (integer weights only)."""
    deg: dict[str, int] = {v: 0 for v in gm.labels}
    for u, v, w in gm.edges:
        w = to_fraction(w)
        if w.denominator != 1:
            raise InputError("even-degree check needs integer weights")
        deg[u] += int(w)
        deg[v] += int(w)
    return all(d % 2 == 0 for d in deg.values())


def star_graph(n_parties: int, weights: Mapping[int, object] | None = None) -> GraphModel:
    """One bulk vertex joined to a leaf per party 0..N."""
    weights = weights or {}
    labels: dict[str, int | None] = {"c": None}
    edges = []
    for p in range(n_parties + 1):
        labels[f"p{p}"] = p
        edges.append(("c", f"p{p}", weights.get(p, 1)))
    return GraphModel(n_parties, labels, edges)


def bell_pair(a: int = 1, b: int = 2, n_parties: int = 2) -> GraphModel:
    """A single unit edge between parties a and b."""
    return GraphModel(n_parties, {f"p{a}": a, f"p{b}": b}, [(f"p{a}", f"p{b}", 1)])


def parse_graph(text: str) -> GraphModel:
    """Graph file: optional "parties N", vertex lines "id [label]", edge lines "u v weight"."""
    n = None
    labels: dict[str, int | None] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "parties":
            if len(tok) != 2:
                raise InputError(f"line {lineno}: expected 'parties N'")
            n = int(tok[1])
        elif len(tok) in (1, 2):
            if tok[0] in labels:
                raise InputError(f"line {lineno}: vertex {tok[0]} declared twice")
            try:
                labels[tok[0]] = int(tok[1]) if len(tok) == 2 else None
            except ValueError:
                raise InputError(f"line {lineno}: label must be an integer party") from None
        elif len(tok) == 3:
            try:
                edges.append((tok[0], tok[1], Fraction(tok[2])))
            except (ValueError, ZeroDivisionError):
                raise InputError(f"line {lineno}: bad weight {tok[2]!r}") from None
        else:
            raise InputError(f"line {lineno}: cannot parse {raw!r}")
    if n is None:
        used = [lab for lab in labels.values() if lab is not None]
        if not used:
            raise InputError("graph has no labeled vertices")
        n = max(used)
    gm = GraphModel(n, labels, edges)
    gm.validate()
    return gm


def format_graph(gm: GraphModel) -> str:
    lines = [f"parties {gm.n_parties}"]
    for v in sorted(gm.labels):
        lab = gm.labels[v]
        lines.append(v if lab is None else f"{v} {lab}")
    for u, v, w in gm.edges:
        lines.append(f"{u} {v} {w}")
    return "\n".join(lines) + "\n"
