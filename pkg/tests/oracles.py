"""Slow reference implementations used only to validate the real ones.

None of these share code with the package beyond the LTS data type.
"""

from __future__ import annotations

from itertools import combinations

TAU = "tau"


def _succ(lts):
    succ = [dict() for _ in lts.states]
    for i, lab, j in lts.edges:
        succ[i].setdefault(lab, set()).add(j)
    return succ


def _tau_star(succ):
    out = []
    for i in range(len(succ)):
        seen, stack = {i}, [i]
        while stack:
            for j in succ[stack.pop()].get(TAU, ()):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        out.append(seen)
    return out


class _Moves:
    def __init__(self, lts):
        self.succ = _succ(lts)
        self.ts = _tau_star(self.succ)
        self.n = len(lts.states)

    def step(self, t, a):
        return self.succ[t].get(a, set())

    def answers(self, kind, s, s1, a, t, rel):
        """Textbook transfer clauses, written out per relation."""
        ts, step = self.ts, self.step
        if kind == "strong":
            return any((s1, t1) in rel for t1 in step(t, a))
        if kind == "weak":
            if a == TAU:
                return any((s1, t1) in rel for t1 in ts[t])
            return any((s1, t3) in rel for t1 in ts[t] for t2 in step(t1, a) for t3 in ts[t2])
        if kind == "delay":
            if a == TAU:
                return any((s1, t1) in rel for t1 in ts[t])
            return any((s1, t2) in rel for t1 in ts[t] for t2 in step(t1, a))
        if kind == "eta":
            if a == TAU and any((s1, t1) in rel for t1 in ts[t]):
                return True
            return any((s, t1) in rel and (s1, t3) in rel
                       for t1 in ts[t] for t2 in step(t1, a) for t3 in ts[t2])
        if kind == "branching":
            # classic branching clause; its largest relation is branching bisimilarity
            if a == TAU and (s1, t) in rel:
                return True
            return any((s, t1) in rel and (s1, t2) in rel for t1 in ts[t] for t2 in step(t1, a))
        raise ValueError(kind)

    def is_bisimulation(self, kind, rel) -> bool:
        for s, t in rel:
            for a, targets in self.succ[s].items():
                for s1 in targets:
                    if not self.answers(kind, s, s1, a, t, rel):
                        return False
        return True


def brute_force_bisimilarity(lts, kind) -> set[tuple[int, int]]:
    """Union of all symmetric bisimulations, found by enumerating every
    symmetric relation on the state set."""
    m = _Moves(lts)
    pairs = [(i, i) for i in range(m.n)] + list(combinations(range(m.n), 2))
    union: set = set()
    for mask in range(1 << len(pairs)):
        rel = set()
        for k, (i, j) in enumerate(pairs):
            if mask >> k & 1:
                rel.add((i, j))
                rel.add((j, i))
        if rel <= union:
            continue
        if m.is_bisimulation(kind, rel):
            union |= rel
    return union


def potential_prefix_by_walks(lts) -> bool:
    """No closed walk of the weak action graph (length <= 2n) uses two
    different visible labels."""
    succ = _succ(lts)
    ts = _tau_star(succ)
    n = len(succ)
    weak = [set() for _ in range(n)]
    for u in range(n):
        for u1 in ts[u]:
            for lab, vs in succ[u1].items():
                if lab != TAU and not lab[0].isupper():
                    weak[u].update((lab, v) for v in vs)
    for start in range(n):
        # states reachable from start with the set of labels seen so far
        frontier = {(start, frozenset())}
        for _ in range(2 * n):
            nxt = set()
            for u, labs in frontier:
                for lab, v in weak[u]:
                    seen = labs | {lab}
                    if v == start and len(seen) > 1:
                        return False
                    if len(seen) <= 2:
                        nxt.add((v, seen))
            frontier = nxt
    return True


def closure_states(p, step) -> set:
    """All terms reachable from p, by naive iteration to a fixpoint."""
    seen = {p}
    while True:
        new = {t for q in seen for _, t in step(q)} - seen
        if not new:
            return seen
        seen |= new
