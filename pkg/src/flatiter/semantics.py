"""Structural operational semantics and finite LTS construction."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Iterable

from .terms import TAU, Nil, Plus, Prefix, Process, Star, Var, init_actions


def is_var_label(label: str) -> bool:
    return label[0].isupper()


@lru_cache(maxsize=1 << 16)
def transitions(p: Process) -> frozenset[tuple[str, Process]]:
    """All ``(label, target)`` pairs derivable for ``p``.

    Labels are action names, ``tau``, or a variable name (uppercase).
    """
    if isinstance(p, Var):
        return frozenset([(p.name, p)])
    if isinstance(p, Nil):
        return frozenset()
    if isinstance(p, Prefix):
        return frozenset((a, p.body) for a in init_actions(p.sf))
    if isinstance(p, Plus):
        return transitions(p.left) | transitions(p.right)
    if isinstance(p, Star):
        return frozenset((a, p) for a in init_actions(p.sf)) | transitions(p.body)
    raise TypeError(f"no transition rules for {type(p).__name__}")


def _action_closure(seeds, step) -> set:
    seen = set()
    todo = list(seeds)
    while todo:
        q = todo.pop()
        if q in seen:
            continue
        seen.add(q)
        todo.extend(t for lab, t in step(q) if not is_var_label(lab))
    return seen


def derivatives(p: Process, step=transitions) -> frozenset:
    """``p`` together with everything reachable by action transitions."""
    return frozenset(_action_closure([p], step))


def proper_derivatives(p: Process, step=transitions) -> frozenset:
    first = [t for lab, t in step(p) if not is_var_label(lab)]
    return frozenset(_action_closure(first, step))


@dataclass(frozen=True)
class Lts:
    """Finite LTS; ``states[0]`` is the root of the first term."""

    states: tuple
    edges: tuple[tuple[int, str, int], ...]
    index: dict = field(compare=False, repr=False)

    def __len__(self):
        return len(self.states)

    def successors(self) -> list[dict[str, set[int]]]:
        succ: list[dict[str, set[int]]] = [dict() for _ in self.states]
        for i, lab, j in self.edges:
            succ[i].setdefault(lab, set()).add(j)
        return succ

    def to_aut(self) -> str:
        lines = [f"des (0,{len(self.edges)},{len(self.states)})"]
        for i, lab, j in self.edges:
            shown = f"var:{lab}" if is_var_label(lab) else lab
            lines.append(f'({i},"{shown}",{j})')
        return "\n".join(lines) + "\n"


def build_lts(roots: Hashable | Iterable[Hashable],
              step: Callable = transitions) -> Lts:
    """Breadth-first state space of one term, or of several terms jointly.

    Structurally equal terms share a state; variable targets are states too.
    """
    if isinstance(roots, (list, tuple)):
        roots = list(roots)
    else:
        roots = [roots]
    index: dict = {}
    states: list = []
    queue: deque = deque()
    for r in roots:
        if r not in index:
            index[r] = len(states)
            states.append(r)
            queue.append(r)
    edges = set()
    while queue:
        q = queue.popleft()
        i = index[q]
        for lab, t in sorted(step(q), key=lambda e: (e[0], str(e[1]))):
            if t not in index:
                index[t] = len(states)
                states.append(t)
                queue.append(t)
            edges.add((i, lab, index[t]))
    return Lts(tuple(states), tuple(sorted(edges)), index)


def tau_closure(lts: Lts) -> tuple[frozenset[int], ...]:
    """``reach[i]``: states reachable from ``i`` by zero or more tau steps."""
    tau_succ: list[list[int]] = [[] for _ in lts.states]
    for i, lab, j in lts.edges:
        if lab == TAU:
            tau_succ[i].append(j)
    reach = []
    for i in range(len(lts.states)):
        seen = {i}
        todo = [i]
        while todo:
            for j in tau_succ[todo.pop()]:
                if j not in seen:
                    seen.add(j)
                    todo.append(j)
        reach.append(frozenset(seen))
    return tuple(reach)
