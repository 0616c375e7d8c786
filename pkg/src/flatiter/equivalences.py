"""Deciding the five bisimulation equivalences and their rooted congruences.

The largest bisimulation of each kind is computed as a greatest fixpoint:
start from the full relation on the joint state space and delete pairs whose
transfer condition fails until nothing changes.  The branching clause is the
semi-branching one, which keeps each deletion test local.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable

import networkx as nx

from .semantics import (Lts, build_lts, derivatives, is_var_label,
                        proper_derivatives, tau_closure, transitions)
from .terms import TAU, Process


class RelKind(str, Enum):
    STRONG = "strong"
    BRANCHING = "branching"
    ETA = "eta"
    DELAY = "delay"
    WEAK = "weak"

    def __str__(self):
        return self.value


def as_kind(k) -> RelKind:
    return k if isinstance(k, RelKind) else RelKind(str(k))


class _Graph:
    """Successor tables plus the tau-derived move sets, independent of R."""

    def __init__(self, lts: Lts):
        self.lts = lts
        self.n = len(lts.states)
        self.succ = lts.successors()
        self.reach = tau_closure(lts)
        self.moves = [[(lab, j) for lab, js in sorted(d.items()) for j in sorted(js)]
                      for d in self.succ]
        self._delay: dict = {}
        self._weak: dict = {}

    def opt(self, i: int, lab: str) -> set[int]:
        """Zero-or-one tau step for tau, exactly one step otherwise."""
        out = set(self.succ[i].get(lab, ()))
        if lab == TAU:
            out.add(i)
        return out

    def delay_targets(self, i: int, lab: str, optional=True) -> frozenset[int]:
        key = (i, lab, optional)
        if key not in self._delay:
            out = set()
            for i1 in self.reach[i]:
                out |= self.opt(i1, lab) if optional else self.succ[i1].get(lab, set())
            self._delay[key] = frozenset(out)
        return self._delay[key]

    def weak_targets(self, i: int, lab: str, optional=True) -> frozenset[int]:
        key = (i, lab, optional)
        if key not in self._weak:
            out = set()
            for j in self.delay_targets(i, lab, optional):
                out |= self.reach[j]
            self._weak[key] = frozenset(out)
        return self._weak[key]


def _transfer(g: _Graph, kind: RelKind, s: int, t: int, rel: set) -> bool:
    """Every move of ``s`` is answered by ``t`` per the kind's clause."""
    for lab, s1 in g.moves[s]:
        if kind is RelKind.STRONG:
            ok = any((s1, t1) in rel for t1 in g.succ[t].get(lab, ()))
        elif kind is RelKind.WEAK:
            ok = any((s1, t1) in rel for t1 in g.weak_targets(t, lab))
        elif kind is RelKind.DELAY:
            ok = any((s1, t1) in rel for t1 in g.delay_targets(t, lab))
        elif kind is RelKind.ETA:
            ok = any((s1, t3) in rel
                     for t1 in g.reach[t] if (s, t1) in rel
                     for t2 in g.opt(t1, lab)
                     for t3 in g.reach[t2])
        else:
            ok = any((s1, t2) in rel
                     for t1 in g.reach[t] if (s, t1) in rel
                     for t2 in g.opt(t1, lab))
        if not ok:
            return False
    return True


def largest_bisimulation(lts: Lts, kind) -> frozenset[tuple[int, int]]:
    """Index pairs of the largest bisimulation of ``kind`` on ``lts``."""
    kind = as_kind(kind)
    g = _Graph(lts)
    if kind is RelKind.STRONG:
        # strong transfer is label-exact, so differing label sets never relate
        sig = [frozenset(g.succ[i]) for i in range(g.n)]
    else:
        sig = [None] * g.n
    rel = {(i, j) for i in range(g.n) for j in range(g.n) if sig[i] == sig[j]}
    changed = True
    while changed:
        changed = False
        for s, t in sorted(rel):
            if s > t or (s, t) not in rel:
                continue
            if not (_transfer(g, kind, s, t, rel) and _transfer(g, kind, t, s, rel)):
                rel.discard((s, t))
                rel.discard((t, s))
                changed = True
    return frozenset(rel)


class Equivalence:
    """Largest bisimulation over the joint state space of some terms.

    ``related`` answers queries between any states reachable from the roots;
    asking about a term outside the state space rebuilds with it as a root.
    """

    def __init__(self, roots: Iterable, kind, step=transitions):
        self.kind = as_kind(kind)
        self.step = step
        self._build(list(dict.fromkeys(roots)))

    def _build(self, roots):
        self.roots = roots
        self.lts = build_lts(roots, self.step)
        self.rel = largest_bisimulation(self.lts, self.kind)

    def related(self, p, q) -> bool:
        idx = self.lts.index
        if p not in idx or q not in idx:
            self._build(self.roots + [t for t in (p, q) if t not in idx])
            idx = self.lts.index
        return (idx[p], idx[q]) in self.rel


def bisimilar(p: Process, q: Process, kind, step=transitions) -> bool:
    return Equivalence([p, q], kind, step).related(p, q)


def bisimulation_witness(p: Process, q: Process, kind, step=transitions):
    """The largest bisimulation as a set of term pairs, if it relates p and q."""
    eq = Equivalence([p, q], kind, step)
    if not eq.related(p, q):
        return None
    st = eq.lts.states
    return frozenset((st[i], st[j]) for i, j in eq.rel)


def bisimilar_lts(l1: Lts, root1: int, l2: Lts, root2: int, kind) -> bool:
    """Equivalence of two states in two separately built LTSs."""
    off = len(l1.states)
    edges = list(l1.edges) + [(i + off, lab, j + off) for i, lab, j in l2.edges]
    states = tuple(("L", s) for s in l1.states) + tuple(("R", s) for s in l2.states)
    joint = Lts(states, tuple(sorted(edges)), {s: i for i, s in enumerate(states)})
    return (root1, root2 + off) in largest_bisimulation(joint, kind)


# -- rooted congruences ------------------------------------------------------

def _root_answers(g: _Graph, kind: RelKind, t: int, lab: str) -> frozenset[int]:
    if kind in (RelKind.STRONG, RelKind.BRANCHING):
        return frozenset(g.succ[t].get(lab, ()))
    if kind is RelKind.ETA:
        out = set()
        for t1 in g.succ[t].get(lab, ()):
            out |= g.reach[t1]
        return frozenset(out)
    if kind is RelKind.DELAY:
        return g.delay_targets(t, lab, optional=False)
    return g.weak_targets(t, lab, optional=False)


def root_failure(p: Process, q: Process, kind, step=transitions):
    """``None`` when p and q are congruent, else a description of the failure.

    The description is ``(side, label, target)``: the move of ``side``
    ('left' or 'right') that the other term cannot answer.
    """
    kind = as_kind(kind)
    lts = build_lts([p, q], step)
    rel = largest_bisimulation(lts, kind)
    g = _Graph(lts)
    ip, iq = lts.index[p], lts.index[q]
    if kind is RelKind.STRONG:
        return None if (ip, iq) in rel else ("left", None, None)
    for side, a, b in (("left", ip, iq), ("right", iq, ip)):
        for lab, a1 in g.moves[a]:
            if not any((a1, b1) in rel for b1 in _root_answers(g, kind, b, lab)):
                return (side, lab, lts.states[a1])
    return None


def congruent(p: Process, q: Process, kind, step=transitions) -> bool:
    return root_failure(p, q, kind, step) is None


# -- saturation --------------------------------------------------------------

def _eta_ok(q, trans) -> bool:
    for lab, r in trans:
        for lab2, s in transitions(r):
            if lab2 == TAU and (lab, s) not in trans:
                return False
    return True


def _delay_ok(q, trans) -> bool:
    for lab, r in trans:
        if lab != TAU:
            continue
        for lab2, s in transitions(r):
            if (lab2, s) not in trans:
                return False
    return True


def is_saturated(p: Process, kind) -> bool:
    kind = as_kind(kind)
    if kind not in (RelKind.ETA, RelKind.DELAY, RelKind.WEAK):
        raise ValueError("saturation is defined for eta, delay and weak")
    for q in derivatives(p):
        trans = transitions(q)
        if kind in (RelKind.ETA, RelKind.WEAK) and not _eta_ok(q, trans):
            return False
        if kind in (RelKind.DELAY, RelKind.WEAK) and not _delay_ok(q, trans):
            return False
    return True


def is_strongly_saturated(p: Process, kind) -> bool:
    if not is_saturated(p, kind):
        return False
    return all((TAU, q) in transitions(q) for q in proper_derivatives(p))


# -- potential prefix-iteration expressions ----------------------------------

def weak_action_graph(lts: Lts) -> nx.MultiDiGraph:
    """Edges ``u -a-> v`` whenever ``u ==> u' -a-> v`` for a visible action a."""
    reach = tau_closure(lts)
    succ = lts.successors()
    g = nx.MultiDiGraph()
    g.add_nodes_from(range(len(lts.states)))
    for u in range(len(lts.states)):
        for u1 in reach[u]:
            for lab, vs in succ[u1].items():
                if lab == TAU or is_var_label(lab):
                    continue
                for v in vs:
                    g.add_edge(u, v, label=lab)
    return g


def is_potential_prefix(lts: Lts) -> bool:
    """No strongly connected component carries two different action labels."""
    g = weak_action_graph(lts)
    comp = {}
    for k, scc in enumerate(nx.strongly_connected_components(g)):
        for v in scc:
            comp[v] = k
    labels: dict[int, set[str]] = {}
    for u, v, lab in g.edges(data="label"):
        if comp[u] == comp[v]:
            labels.setdefault(comp[u], set()).add(lab)
    return all(len(ls) <= 1 for ls in labels.values())
