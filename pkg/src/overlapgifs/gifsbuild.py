"""Turn an overlap graph into a system of GIFS equations.

Each attractor B_k is named by a set S_k of overlap-graph vertices; B_k is A
with the overlaps h(A), h in S_k, cut away.  Map labels are 1-based as on the
graph edges, attractor indices are 0-based internally (B_1 is index 0).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

from .errors import BudgetExceeded
from .nbrgraph import LabeledDigraph

__all__ = ["GifsSystem", "init_overlap_sets", "expand_equation", "build_gifs",
           "validate_gifs", "format_system"]

IDENTITY = 0
DEFAULT_BUDGET = 1 << 20

Canon = Optional[Callable[[frozenset], frozenset]]


@dataclass
class GifsSystem:
    """Equations B_k = U f_i(B_target), one list of (i, target) terms per k.

    ``aliases`` maps every overlap set met during construction to the index
    of the attractor that now represents it; it stays meaningful after
    merging and restriction, which lets :func:`validate_gifs` audit reduced
    systems too.
    """

    m: int
    equations: list
    sets: list
    graph: LabeledDigraph | None = None
    base_sets: list | None = None
    ratio: float | None = None
    aliases: dict = dc_field(default_factory=dict)
    canon: Canon = dc_field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.equations)

    def copy_with(self, equations, sets, aliases) -> "GifsSystem":
        return GifsSystem(self.m, equations, sets, self.graph, self.base_sets, self.ratio,
                          aliases, self.canon)

    def to_json(self) -> dict:
        names = self.graph.names if self.graph is not None else None

        def setrepr(s):
            return [names[v] if names else v for v in sorted(s)]

        return {
            "m": self.m,
            "n": self.n,
            "ratio": self.ratio,
            "equations": [[[i, t + 1] for i, t in eq] for eq in self.equations],
            "sets": [sorted(s) for s in self.sets],
            "set_names": [setrepr(s) for s in self.sets],
            "text": format_system(self).splitlines(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, data: dict, graph: LabeledDigraph | None = None) -> "GifsSystem":
        equations = [[(int(i), int(t) - 1) for i, t in eq] for eq in data["equations"]]
        sets = [frozenset(s) for s in data.get("sets", [[] for _ in equations])]
        aliases = {s: k for k, s in enumerate(sets)}
        return cls(int(data["m"]), equations, sets, graph, None, data.get("ratio"), aliases)


def format_system(system: GifsSystem) -> str:
    lines = []
    for k, eq in enumerate(system.equations):
        rhs = " ∪ ".join(f"f_{i}(B_{t + 1})" for i, t in eq) or "∅"
        lines.append(f"B_{k + 1} = {rhs}")
    return "\n".join(lines)


def _apply(canon: Canon, s: frozenset) -> frozenset:
    return canon(s) if canon is not None else s


def init_overlap_sets(og: LabeledDigraph, m: int, canon: Canon = None):
    """Initial step: S_1 = {}, S_i = ends of identity edges (i, j) with j < i.

    Returns ``(first_equation, base_sets, sets, aliases)`` where ``base_sets``
    holds the per-map S_i (index i-1) and ``sets`` the deduplicated names.
    Maps whose S_i contains the identity coincide with an earlier piece and
    are left out of every equation.
    """
    base = [set() for _ in range(m)]
    for s, t, i, j in og.edges:
        if s == IDENTITY and j < i:
            base[i - 1].add(t)
    base_sets = [frozenset(b) for b in base]
    sets = [frozenset()]
    aliases = {frozenset(): 0}
    first = []
    for i in range(1, m + 1):
        s_i = base_sets[i - 1]
        if IDENTITY in s_i:
            continue
        s_i = _apply(canon, s_i)
        idx = aliases.get(s_i)
        if idx is None:
            idx = len(sets)
            sets.append(s_i)
            aliases[s_i] = idx
        first.append((i, idx))
    return first, base_sets, sets, aliases


def compute_sik(og: LabeledDigraph, base_sets: list, s_k: frozenset, i: int) -> frozenset:
    """S_ik = S_i  U  {s : t -i-> s for some t in S_k}."""
    out = set(base_sets[i - 1])
    for t in s_k:
        out.update(og.successors(t, i))
    return frozenset(out)


def expand_equation(system: GifsSystem, k: int, budget: int = DEFAULT_BUDGET) -> GifsSystem:
    """Build the equation of attractor ``k`` (0-based), naming new sets as needed.

    Mutates and returns ``system``.
    """
    og = system.graph
    s_k = system.sets[k]
    eq = []
    for i in range(1, system.m + 1):
        s_ik = compute_sik(og, system.base_sets, s_k, i)
        if IDENTITY in s_ik:
            continue
        s_ik = _apply(system.canon, s_ik)
        idx = system.aliases.get(s_ik)
        if idx is None:
            if len(system.sets) >= budget:
                raise BudgetExceeded(f"GIFS construction exceeded {budget} attractors")
            idx = len(system.sets)
            system.sets.append(s_ik)
            system.aliases[s_ik] = idx
            system.equations.append(None)
        eq.append((i, idx))
    system.equations[k] = eq
    return system


def build_gifs(og: LabeledDigraph, m: int | None = None, budget: int = DEFAULT_BUDGET,
               ratio: float | None = None, canon: Canon = None) -> GifsSystem:
    """Run initialization and recursion until every named set has an equation.

    ``canon`` optionally rewrites every overlap set before it is named (used
    by language-based pruning); by default sets are used verbatim.
    """
    m = og.m if m is None else m
    first, base_sets, sets, aliases = init_overlap_sets(og, m, canon)
    if len(sets) > budget:
        raise BudgetExceeded(f"GIFS construction exceeded {budget} attractors")
    equations = [first] + [None] * (len(sets) - 1)
    system = GifsSystem(m, equations, sets, og, base_sets, ratio, aliases, canon)
    k = 1
    while k < len(system.sets):
        expand_equation(system, k, budget)
        k += 1
    return system


def validate_gifs(system: GifsSystem) -> list:
    """Audit a system against its overlap graph; returns violation strings."""
    problems = []
    if system.graph is None or system.base_sets is None:
        return ["system has no source overlap graph"]
    og = system.graph
    if system.sets and system.sets[0] != frozenset():
        problems.append("S_1 is not empty")
    n = system.n
    for k, eq in enumerate(system.equations):
        labels = [i for i, _ in eq]
        if labels != sorted(set(labels)):
            problems.append(f"B_{k + 1}: labels not strictly increasing")
        expected = {}
        for i in range(1, system.m + 1):
            if k == 0:
                s_ik = system.base_sets[i - 1]
            else:
                s_ik = compute_sik(og, system.base_sets, system.sets[k], i)
            if IDENTITY in s_ik:
                continue
            s_ik = _apply(system.canon, s_ik)
            expected[i] = system.aliases.get(s_ik)
        got = dict(eq)
        for i in sorted(set(expected) | set(got)):
            if i not in got:
                problems.append(f"B_{k + 1}: term f_{i} missing")
            elif i not in expected:
                problems.append(f"B_{k + 1}: term f_{i} should be empty")
            elif not 0 <= got[i] < n:
                problems.append(f"B_{k + 1}: term f_{i} targets unknown attractor {got[i] + 1}")
            elif expected[i] != got[i]:
                exp = "unnamed set" if expected[i] is None else f"B_{expected[i] + 1}"
                problems.append(f"B_{k + 1}: term f_{i} targets B_{got[i] + 1}, expected {exp}")
    seen = {}
    for k, s in enumerate(system.sets):
        if s in seen and system.aliases.get(s) != seen[s]:
            problems.append(f"B_{k + 1}: duplicate of B_{seen[s] + 1}")
        seen.setdefault(s, k)
    return problems
