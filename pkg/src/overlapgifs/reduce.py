"""Post-processing of a raw GIFS: restriction, merging, pruning, degeneracy.

The language L_s of an overlap vertex s is the set of label words along edge
paths from s to the identity.  The identity carries a loop for every label,
so L_s is closed under appending letters: a word in L_s names a whole piece
f_w(A) lying inside the overlap A ∩ s(A).
"""
from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import asdict, dataclass, field as dc_field
from typing import Iterable

import numpy as np

from .dimension import component_roots, incidence_matrix, strong_components
from .errors import StateBudgetExceeded
from .gifsbuild import IDENTITY, GifsSystem, build_gifs
from .nbrgraph import LabeledDigraph

logger = logging.getLogger(__name__)

__all__ = [
    "VertexAutomaton", "ReductionReport", "restrict_reachable", "merge_identical",
    "language_included", "prune_redundant_vertices", "flag_degenerate", "drop_attractors",
    "reduce_system", "SetPruner", "component_is_dominant",
    "languages_equal", "verify_identifications", "language_counterexample",
]

DEFAULT_STATE_BUDGET = 1 << 18


@dataclass
class ReductionReport:
    before: int = 0
    after: int = 0
    merged_classes: list = dc_field(default_factory=list)
    removed: list = dc_field(default_factory=list)
    degenerate: list = dc_field(default_factory=list)
    pruned_vertices: int = 0
    skipped_sets: list = dc_field(default_factory=list)
    steps: list = dc_field(default_factory=list)
    fixpoint: bool = False

    def log(self, stage: str, n_before: int, n_after: int) -> None:
        self.steps.append({"stage": stage, "before": n_before, "after": n_after})

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


class VertexAutomaton:
    """Nondeterministic automaton over labels 1..m read off an overlap graph.

    Every vertex is a state; the identity is the only final state and is
    absorbing (loops on all labels).  Edges out of the identity are ignored.
    """

    def __init__(self, og: LabeledDigraph):
        self.graph = og
        self.m = og.m
        self.final = IDENTITY
        trans: dict = {}
        for s, t, i, _ in og.edges:
            if s == IDENTITY:
                continue
            trans.setdefault((s, i), set()).add(t)
        self._trans = {k: frozenset(v) for k, v in trans.items()}

    def step(self, states: frozenset, i: int) -> frozenset:
        if IDENTITY in states:
            return frozenset([IDENTITY])
        out = set()
        for s in states:
            out |= self._trans.get((s, i), frozenset())
        return frozenset(out)

    def accepts(self, start: Iterable[int], word: Iterable[int]) -> bool:
        states = frozenset(start)
        for i in word:
            if IDENTITY in states:
                return True
            states = self.step(states, i)
        return IDENTITY in states

    def to_dot(self, title: str = "L") -> str:
        names = self.graph.names
        lines = [f'digraph "{title}" {{', "  rankdir=LR;"]
        for k, nm in enumerate(names):
            shape = "doublecircle" if k == IDENTITY else "circle"
            lines.append(f'  q{k} [label="{nm}", shape={shape}];')
        lines.append(f'  q{IDENTITY} -> q{IDENTITY} [label="*"];')
        for (s, i), targets in sorted(self._trans.items()):
            for t in sorted(targets):
                lines.append(f'  q{s} -> q{t} [label="{i}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def language_counterexample(og, s: int, T: Iterable[int], budget: int = DEFAULT_STATE_BUDGET,
                            automaton: VertexAutomaton | None = None):
    """Shortest word in L_s outside every L_t (t in T), or None if L_s is covered.

    Breadth-first search over pairs (subset reached from s, subset reached
    from T), i.e. the product of the two subset constructions.
    """
    aut = automaton or VertexAutomaton(og)
    T = frozenset(T)
    if s in T or IDENTITY in T:
        return None
    start = (frozenset([s]), T)
    parent = {start: None}
    queue = deque([start])
    while queue:
        key = queue.popleft()
        P, Q = key
        for i in range(1, aut.m + 1):
            P2 = aut.step(P, i)
            if not P2:
                continue
            Q2 = aut.step(Q, i)
            if IDENTITY in Q2:
                continue
            if IDENTITY in P2:
                word = [i]
                k = key
                while parent[k] is not None:
                    k, letter = parent[k]
                    word.append(letter)
                return word[::-1]
            nxt = (P2, Q2)
            if nxt not in parent:
                if len(parent) >= budget:
                    raise StateBudgetExceeded(
                        f"language inclusion exceeded {budget} subset states")
                parent[nxt] = (key, i)
                queue.append(nxt)
    return None


def language_included(og, s: int, T: Iterable[int], budget: int = DEFAULT_STATE_BUDGET,
                      automaton: VertexAutomaton | None = None) -> bool:
    """Decide L_s ⊆ ⋃_{t in T} L_t exactly."""
    return language_counterexample(og, s, T, budget, automaton) is None


def languages_equal(og: LabeledDigraph, u: int, v: int, budget: int = DEFAULT_STATE_BUDGET,
                    automaton: VertexAutomaton | None = None) -> bool:
    aut = automaton or VertexAutomaton(og)
    return (language_included(og, u, [v], budget, aut)
            and language_included(og, v, [u], budget, aut))


def verify_identifications(og: LabeledDigraph, pairs, budget: int = DEFAULT_STATE_BUDGET):
    """Split requested vertex identifications into (accepted, rejected).

    A pair is accepted only if both vertices have the same language, so the
    quotient graph describes the same overlaps.  Pairs are given as anything
    :meth:`LabeledDigraph.index_of` understands; results are index pairs.
    """
    aut = VertexAutomaton(og)
    accepted, rejected = [], []
    for u, v in pairs:
        try:
            iu, iv = og.index_of(u), og.index_of(v)
        except (KeyError, ValueError):
            rejected.append((u, v, "not an overlap vertex"))
            continue
        if iu == IDENTITY or iv == IDENTITY:
            rejected.append((iu, iv, "identity cannot be identified"))
        elif languages_equal(og, iu, iv, budget, aut):
            accepted.append((iu, iv))
        else:
            rejected.append((iu, iv, "languages differ"))
    for u, v, why in rejected:
        logger.warning("identification %s ~ %s rejected: %s", u, v, why)
    return accepted, rejected


def restrict_reachable(system: GifsSystem, irreducible: bool = False) -> GifsSystem:
    """Keep the attractors reachable from B_1, renumbered in their old order.

    With ``irreducible`` only the strong component of B_1 in the incidence
    graph survives; terms pointing out of it are dropped.  That is only
    harmless when the dropped components are lower-dimensional, which
    :func:`reduce_system` checks before asking for it.
    """
    seen = {0}
    queue = deque([0])
    while queue:
        k = queue.popleft()
        for _, t in system.equations[k]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    if irreducible:
        _, labels = strong_components(incidence_matrix(system))
        seen = {k for k in seen if labels[k] == labels[0]}
    keep = sorted(seen)
    if len(keep) == system.n:
        return system
    if irreducible:
        return _drop_outside(system, keep)
    return _reindex(system, {k: k for k in keep}, keep)


def _drop_outside(system: GifsSystem, keep: list) -> GifsSystem:
    pos = {k: idx for idx, k in enumerate(keep)}
    equations = [[(i, pos[t]) for i, t in system.equations[k] if t in pos] for k in keep]
    sets = [system.sets[k] for k in keep]
    aliases = {s: pos[k] for s, k in system.aliases.items() if k in pos}
    return system.copy_with(equations, sets, aliases)


def component_is_dominant(system: GifsSystem, rel_tol: float = 1e-9) -> bool:
    """True if every strong component other than B_1's has a smaller Perron root."""
    ncomp, labels, roots = component_roots(incidence_matrix(system))
    own = roots[labels[0]]
    return all(r < own * (1 - rel_tol) for c, r in enumerate(roots) if c != labels[0])


def _reindex(system: GifsSystem, rep: dict, keep: list) -> GifsSystem:
    """Rewrite targets through ``rep`` (old -> old representative), keep ``keep``."""
    pos = {k: idx for idx, k in enumerate(keep)}
    equations = [[(i, pos[rep[t]]) for i, t in system.equations[k]] for k in keep]
    sets = [system.sets[k] for k in keep]
    aliases = {}
    for s, k in system.aliases.items():
        r = rep.get(k)
        if r is not None and r in pos:
            aliases[s] = pos[r]
    return system.copy_with(equations, sets, aliases)


def merge_identical(system: GifsSystem):
    """Merge attractors forced equal by their equations (coarsest bisimulation).

    Starts from one class and splits by the signature {(i, class of target)}
    until stable.  GIFS solutions are unique, so merged attractors coincide.
    """
    n = system.n
    cls = [0] * n
    count = 1
    while True:
        table: dict = {}
        new = []
        for k in range(n):
            sig = (cls[k], tuple(sorted((i, cls[t]) for i, t in system.equations[k])))
            new.append(table.setdefault(sig, len(table)))
        if len(table) == count:
            cls = new
            break
        cls, count = new, len(table)
    first: dict = {}
    for k in range(n):
        first.setdefault(cls[k], k)
    rep = {k: first[cls[k]] for k in range(n)}
    keep = sorted(set(rep.values()))
    report = ReductionReport(before=n, after=len(keep))
    groups: dict = {}
    for k in range(n):
        groups.setdefault(rep[k], []).append(k)
    report.merged_classes = [[k + 1 for k in g] for g in groups.values() if len(g) > 1]
    report.removed = [k + 1 for k in range(n) if rep[k] != k]
    report.log("merge_identical", n, len(keep))
    if len(keep) == n:
        return system, report
    return _reindex(system, rep, keep), report


class SetPruner:
    """Drops vertices of an overlap set whose language the rest already covers."""

    def __init__(self, og: LabeledDigraph, budget: int = DEFAULT_STATE_BUDGET):
        self.og = og
        self.budget = budget
        self.automaton = VertexAutomaton(og)
        self._cache: dict = {}
        self._incl: dict = {}
        self.skipped: list = []
        self.removed = 0

    def included(self, s: int, T: frozenset) -> bool:
        key = (s, T)
        if key not in self._incl:
            self._incl[key] = language_included(self.og, s, T, self.budget, self.automaton)
        return self._incl[key]

    def __call__(self, S: frozenset) -> frozenset:
        hit = self._cache.get(S)
        if hit is not None:
            return hit
        cur = set(S)
        for s in sorted(S):
            if len(cur) == 1:
                break
            try:
                if self.included(s, frozenset(cur - {s})):
                    cur.discard(s)
                    self.removed += 1
            except StateBudgetExceeded:
                self.skipped.append(sorted(S))
        out = frozenset(cur)
        self._cache[S] = out
        self._cache.setdefault(out, out)
        return out


def prune_redundant_vertices(system: GifsSystem, og: LabeledDigraph | None = None,
                             budget: int = DEFAULT_STATE_BUDGET):
    """Rebuild the system with language-redundant vertices removed from each set.

    Every overlap set is pruned before it is named, so equations stay
    consistent with their sets; identical attractors are merged afterwards.
    """
    og = og if og is not None else system.graph
    pruner = SetPruner(og, budget)
    rebuilt = build_gifs(og, system.m, ratio=system.ratio, canon=pruner)
    rebuilt = restrict_reachable(rebuilt)
    merged, report = merge_identical(rebuilt)
    report.before = system.n
    report.pruned_vertices = pruner.removed
    report.skipped_sets = pruner.skipped
    report.steps.insert(0, {"stage": "prune_rebuild", "before": system.n, "after": rebuilt.n})
    return merged, report


def flag_degenerate(system: GifsSystem, rel_tol: float = 1e-9) -> ReductionReport:
    """Flag attractors that can only reach strong components of sub-maximal Perron root."""
    M = incidence_matrix(system)
    ncomp, labels, roots = component_roots(M)
    top = max(roots) if roots else 0.0
    # component DAG reachability
    succ = [set() for _ in range(ncomp)]
    for k, eq in enumerate(system.equations):
        for _, t in eq:
            if labels[k] != labels[t]:
                succ[labels[k]].add(labels[t])
    best = [None] * ncomp

    def reach_max(c):
        if best[c] is None:
            best[c] = max([roots[c]] + [reach_max(d) for d in succ[c]])
        return best[c]

    import sys
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10 * ncomp + 100))
    report = ReductionReport(before=system.n)
    for k in range(system.n):
        c = labels[k]
        val = reach_max(c)
        if val < top * (1 - rel_tol):
            report.degenerate.append({
                "attractor": k + 1,
                "reason": f"reachable Perron roots <= {val:.12g} < {top:.12g}",
            })
    report.after = system.n - len(report.degenerate)
    report.log("flag_degenerate", system.n, report.after)
    return report


def drop_attractors(system: GifsSystem, drop: Iterable[int]) -> GifsSystem:
    """Remove attractors (1-based) and every term that targets them."""
    drop0 = {k - 1 for k in drop}
    if 0 in drop0:
        raise ValueError("B_1 cannot be dropped")
    return _drop_outside(system, [k for k in range(system.n) if k not in drop0])


def reduce_system(system: GifsSystem, og: LabeledDigraph | None = None, prune: bool = True,
                  drop_degenerate: bool = False, budget: int = DEFAULT_STATE_BUDGET,
                  irreducible: bool | None = None):
    """restrict -> merge -> prune -> merge, repeated until the count is stable.

    ``irreducible=None`` restricts to the strong component of B_1 whenever
    all other components have a strictly smaller Perron root (so only
    lower-dimensional parts are cut); True forces it, False never does it.
    """
    og = og if og is not None else system.graph
    report = ReductionReport(before=system.n)

    def restrict(s):
        before = s.n
        out = restrict_reachable(s)
        use = irreducible if irreducible is not None else component_is_dominant(out)
        stage = "restrict_reachable"
        if use:
            out = restrict_reachable(out, irreducible=True)
            stage = "restrict_irreducible"
        report.log(stage, before, out.n)
        out, rep = merge_identical(out)
        report.merged_classes += rep.merged_classes
        report.log("merge_identical", rep.before, rep.after)
        return out

    cur = system
    while True:
        start = cur.n
        nxt = restrict(cur)
        if prune and og is not None:
            pruned, rep = prune_redundant_vertices(nxt, og, budget)
            report.pruned_vertices = rep.pruned_vertices
            report.skipped_sets = rep.skipped_sets
            report.steps.append(rep.steps[0])
            pruned = restrict(pruned)
            if pruned.n < nxt.n:
                nxt = pruned
        cur = nxt
        if cur.n == start:
            break
    if drop_degenerate:
        flags = flag_degenerate(cur)
        report.degenerate = flags.degenerate
        if flags.degenerate:
            before = cur.n
            cur = drop_attractors(cur, [d["attractor"] for d in flags.degenerate])
            cur = restrict_reachable(cur)
            report.log("drop_degenerate", before, cur.n)
    report.after = cur.n
    report.fixpoint = True
    return cur, report
