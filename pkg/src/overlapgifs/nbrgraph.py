"""Neighbor graph construction and overlap-graph extraction.

Vertices are neighbor maps h = f^-1 g.  An edge h -> f_i^-1 h f_j carries the
label (i, j).  Vertex 0 is always the identity map.
"""
from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass, field as dc_field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .algebra import NumberField
from .errors import ConfigError, FiniteTypeBudgetExceeded, InvalidQuotient
from .similitude import IfsSpec, Similitude, compose

logger = logging.getLogger(__name__)

__all__ = [
    "BuildOptions", "LabeledDigraph", "build_neighbor_graph", "extract_overlap_graph",
    "reachability_closure", "quotient_vertices",
]

IDENTITY_NAME = "0"


@dataclass
class BuildOptions:
    max_vertices: int = 10_000
    prune_slack: float | None = None  # default 1e-6 * R

    def __post_init__(self):
        if self.max_vertices < 1:
            raise ValueError("max_vertices must be >= 1")
        if self.prune_slack is not None and self.prune_slack < 0:
            raise ValueError("prune_slack must be nonnegative")


@dataclass
class LabeledDigraph:
    """Digraph whose vertex 0 is the identity and whose edges are (src, dst, i, j).

    ``vertices`` holds :class:`Similitude` objects when the graph was computed
    from an IFS, or plain names for graphs given by hand.
    """

    m: int
    vertices: list
    edges: list
    field: NumberField | None = None
    names: list | None = None
    _by_label: dict | None = dc_field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.names is None:
            self.names = [_default_name(v, k) for k, v in enumerate(self.vertices)]

    @property
    def n(self) -> int:
        return len(self.vertices)

    def successors(self, v: int, i: int) -> frozenset:
        """Targets of edges out of ``v`` whose first label is ``i``."""
        if self._by_label is None:
            table: dict = {}
            for s, t, li, _ in self.edges:
                table.setdefault((s, li), set()).add(t)
            self._by_label = {key: frozenset(val) for key, val in table.items()}
        return self._by_label.get((v, i), frozenset())

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=bool)
        for s, t, _, _ in self.edges:
            adj[s, t] = True
        return adj

    def index_of(self, key) -> int:
        """Vertex index for a similitude, a vertex name, or an int index."""
        if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
            if not 0 <= key < self.n:
                raise KeyError(key)
            return int(key)
        if isinstance(key, str):
            if key in self.names:
                return self.names.index(key)
            raise KeyError(key)
        return self.vertices.index(key)

    def induced(self, keep: Sequence[int]) -> "LabeledDigraph":
        keep = list(keep)
        pos = {v: k for k, v in enumerate(keep)}
        edges = [(pos[s], pos[t], i, j) for s, t, i, j in self.edges if s in pos and t in pos]
        return LabeledDigraph(self.m, [self.vertices[v] for v in keep], edges, self.field,
                              [self.names[v] for v in keep])

    def check_edges(self, ifs: IfsSpec) -> list:
        """Edges whose target differs from f_i^-1 o source o f_j (should be none)."""
        bad = []
        for e in self.edges:
            s, t, i, j = e
            if compose(compose(ifs.inverse(i), self.vertices[s]), ifs.maps[j - 1]) != self.vertices[t]:
                bad.append(e)
        return bad

    def to_json(self) -> dict:
        verts = []
        for v, name in zip(self.vertices, self.names):
            if isinstance(v, Similitude):
                verts.append({**v.to_json(), "name": name})
            else:
                verts.append({"name": name})
        return {
            "m": self.m,
            "field": self.field.to_json() if self.field is not None else None,
            "vertices": verts,
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict, field: NumberField | None = None) -> "LabeledDigraph":
        if field is None and data.get("field"):
            field = NumberField.from_json(data["field"])
        m = int(data["m"])
        vertices, names = [], []
        for k, v in enumerate(data["vertices"]):
            if isinstance(v, str):
                v = {"name": v}
            if "a" in v:
                if field is None:
                    raise ConfigError("graph vertices carry coefficients but no field is given")
                sim = Similitude.from_json(field, v)
                vertices.append(sim)
                names.append(v.get("name") or _default_name(sim, k))
            else:
                vertices.append(v["name"])
                names.append(v["name"])
        if isinstance(vertices[0], Similitude) and not vertices[0].is_identity():
            raise ConfigError("vertex 0 of a graph must be the identity")

        def resolve(x):
            if isinstance(x, str):
                if x not in names:
                    raise ConfigError(f"edge refers to unknown vertex {x!r}")
                return names.index(x)
            return int(x)

        edges = []
        for e in data["edges"]:
            s, t, i, j = e
            i, j = int(i), int(j)
            if not (1 <= i <= m and 1 <= j <= m):
                raise ConfigError(f"edge label ({i},{j}) outside 1..{m}")
            edges.append((resolve(s), resolve(t), i, j))
        return cls(m, vertices, list(dict.fromkeys(edges)), field, names)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    def to_dot(self, title: str = "G") -> str:
        lines = [f'digraph "{title}" {{', "  rankdir=LR;"]
        for k, name in enumerate(self.names):
            shape = "doublecircle" if k == 0 else "ellipse"
            lines.append(f'  v{k} [label="{_dot_escape(name)}", shape={shape}];')
        for s, t, i, j in self.edges:
            lines.append(f'  v{s} -> v{t} [label="{i}{j}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _default_name(v, k) -> str:
    if k == 0:
        return IDENTITY_NAME
    return str(v)


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def build_neighbor_graph(ifs: IfsSpec, opts: BuildOptions | None = None) -> LabeledDigraph:
    """Neighbor graph of ``ifs`` by breadth-first expansion from the identity.

    Candidates h with |h(0)| > 2R + slack are discarded; the rest is pruned to
    the largest subgraph in which every vertex other than the identity keeps an
    outgoing edge.
    """
    opts = opts or BuildOptions()
    field = ifs.field
    R = ifs.bounding_radius()
    slack = 1e-6 * R if opts.prune_slack is None else opts.prune_slack
    bound = 2 * R + slack
    m = ifs.m
    ident = Similitude.identity(field)
    index = {ident: 0}
    verts = [ident]
    raw_edges = []
    queue = deque([0])
    while queue:
        v = queue.popleft()
        h = verts[v]
        for i in range(1, m + 1):
            left = compose(ifs.inverse(i), h)
            for j in range(1, m + 1):
                if v == 0 and i == j:
                    continue
                cand = compose(left, ifs.maps[j - 1])
                if abs(cand.b.embed()) > bound:
                    continue
                idx = index.get(cand)
                if idx is None:
                    if len(verts) >= opts.max_vertices:
                        raise FiniteTypeBudgetExceeded(
                            f"neighbor candidates exceed max_vertices={opts.max_vertices}; "
                            "the IFS may not be of finite type")
                    idx = len(verts)
                    index[cand] = idx
                    verts.append(cand)
                    queue.append(idx)
                raw_edges.append((v, idx, i, j))
    logger.info("neighbor candidates: %d, raw edges: %d", len(verts), len(raw_edges))

    alive = _survivors(len(verts), raw_edges)
    keep = [v for v in range(len(verts)) if alive[v]]
    g = LabeledDigraph(m, verts, raw_edges, field)
    return g.induced(keep)


def _survivors(n: int, edges: Iterable) -> list:
    """Iteratively delete sinks (vertex 0 is never deleted)."""
    outdeg = [0] * n
    preds = [[] for _ in range(n)]
    for s, t, _, _ in edges:
        outdeg[s] += 1
        preds[t].append(s)
    alive = [True] * n
    stack = [v for v in range(1, n) if outdeg[v] == 0]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for p in preds[v]:
            outdeg[p] -= 1
            if outdeg[p] == 0 and p != 0 and alive[p]:
                stack.append(p)
    return alive


def reachability_closure(adj) -> np.ndarray:
    """Boolean matrix of paths of length >= 1, by repeated squaring.

    Starting from B = N = M, ceil(log2 n) rounds of N = min(B N + N, 1) and
    B = min(B B, 1) cover all path lengths 1 .. 2^rounds >= n.
    """
    M = np.asarray(adj, dtype=bool)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n:
        raise ValueError("adjacency matrix must be square")
    if n == 0:
        return M.copy()
    Mi = M.astype(np.int64)
    B = Mi.copy()
    N = Mi.copy()
    rounds = int(np.ceil(np.log2(n))) if n > 1 else 1
    for _ in range(rounds):
        N = np.minimum(B @ N + N, 1)
        B = np.minimum(B @ B, 1)
    return N.astype(bool)


def extract_overlap_graph(nbr: LabeledDigraph) -> LabeledDigraph:
    """Subgraph on the vertices with a path to the identity, plus the identity."""
    closure = reachability_closure(nbr.adjacency())
    keep = [0] + [v for v in range(1, nbr.n) if closure[v, 0]]
    return nbr.induced(keep)


def quotient_vertices(g: LabeledDigraph, identify: Iterable[tuple]) -> LabeledDigraph:
    """Merge identified vertex classes; each class keeps its smallest index."""
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in identify:
        ru, rv = find(g.index_of(u)), find(g.index_of(v))
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    reps = [find(v) for v in range(g.n)]
    for v in range(1, g.n):
        if reps[v] == 0:
            raise InvalidQuotient(f"vertex {g.names[v]!r} would be merged with the identity")
    keep = sorted(set(reps))
    pos = {r: k for k, r in enumerate(keep)}
    edges = []
    seen = set()
    for s, t, i, j in g.edges:
        e = (pos[reps[s]], pos[reps[t]], i, j)
        if e not in seen:
            seen.add(e)
            edges.append(e)
    names = []
    for r in keep:
        members = [g.names[v] for v in range(g.n) if reps[v] == r]
        names.append("=".join(members))
    return LabeledDigraph(g.m, [g.vertices[r] for r in keep], edges, g.field, names)
