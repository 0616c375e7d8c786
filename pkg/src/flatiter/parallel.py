"""Parallel composition of closed terms, with CCS-style synchronization.

A net is either a closed process or ``Par(left, right)``.  Complementary
visible actions (``a`` and ``'a``) synchronize into ``tau``.  Parallel
composition is eliminated by repeated use of the expansion identity for
two flat-iteration normal forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .normalize import _leaves, is_normal_form, to_normal_form
from .semantics import transitions
from .terms import (TAU, ParseError, Plus, Prefix, Process, SAct, Star, Var, free_vars,
                    init_actions, parse_process, plus_all, sum_of_actions, ZERO)


@dataclass(frozen=True, eq=False, repr=False)
class Par(Process):
    left: Process
    right: Process
    _h: int = field(init=False, compare=False)

    def format(self):
        right = format_net(self.right)
        if isinstance(self.right, Par):
            right = f"({right})"
        return f"{format_net(self.left)}|{right}"


def format_net(n: Process) -> str:
    return n.format() if isinstance(n, Par) else str(n)


def complement(a: str) -> str:
    if a == TAU:
        raise ValueError("tau has no complement")
    return a[1:] if a.startswith("'") else "'" + a


def net_transitions(n: Process) -> frozenset:
    if not isinstance(n, Par):
        return transitions(n)
    left = net_transitions(n.left)
    right = net_transitions(n.right)
    out = {(a, Par(l1, n.right)) for a, l1 in left}
    out |= {(b, Par(n.left, r1)) for b, r1 in right}
    by_label: dict[str, list] = {}
    for b, r1 in right:
        by_label.setdefault(b, []).append(r1)
    for a, l1 in left:
        if a == TAU or a[0].isupper():
            continue
        for r1 in by_label.get(complement(a), ()):
            out.add((TAU, Par(l1, r1)))
    return frozenset(out)


def _split_bars(text: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "|" and depth == 0:
            parts.append(text[start:k])
            start = k + 1
    parts.append(text[start:])
    return parts


def parse_net(text: str) -> Process:
    """``P | Q | ...`` over closed processes, left-associated; parentheses
    may group sub-nets."""
    parts = _split_bars(text)
    nets = []
    for part in parts:
        s = part.strip()
        if s.startswith("(") and s.endswith(")") and len(_split_bars(s[1:-1])) > 1 \
                and _balanced(s[1:-1]):
            nets.append(parse_net(s[1:-1]))
        else:
            p = parse_process(s)
            if free_vars(p):
                raise ParseError("parallel components must be closed", 0)
            nets.append(p)
    out = nets[0]
    for n in nets[1:]:
        out = Par(out, n)
    return out


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        depth += (ch == "(") - (ch == ")")
        if depth < 0:
            return False
    return depth == 0


def _check_shape(p: Process):
    if not is_normal_form(p) or any(isinstance(l, Var) for l in _leaves(p.body)):
        raise ValueError(f"expected a closed normal form, got {p}")


def gamma(s, t) -> bool:
    """The loops of the two components can synchronize."""
    ts = init_actions(t)
    return any(a != TAU and complement(a) in ts for a in init_actions(s))


def expand_pair(p: Star, q: Star) -> Process:
    """One application of the expansion identity to ``p | q``."""
    _check_shape(p)
    _check_shape(q)
    ps = [(l.sf.name, l.body) for l in _leaves(p.body)]
    qs = [(l.sf.name, l.body) for l in _leaves(q.body)]
    sacts, tacts = init_actions(p.sf), init_actions(q.sf)
    loop = set(sacts) | set(tacts)
    if gamma(p.sf, q.sf):
        loop.add(TAU)
    leaves = [Prefix(SAct(a), Par(pi, q)) for a, pi in ps]
    leaves += [Prefix(SAct(b), Par(p, qj)) for b, qj in qs]
    for a, pi in ps:
        for b, qj in qs:
            if a != TAU and b == complement(a):
                leaves.append(Prefix(SAct(TAU), Par(pi, qj)))
    for a, pi in ps:
        if a != TAU and complement(a) in tacts:
            leaves.append(Prefix(SAct(TAU), Par(pi, q)))
    for b, qj in qs:
        if b != TAU and complement(b) in sacts:
            leaves.append(Prefix(SAct(TAU), Par(p, qj)))
    leaves = list(dict.fromkeys(leaves))
    return Star(sum_of_actions(loop) if loop else ZERO, plus_all(leaves))


def eliminate_parallel(n: Process) -> Process:
    """A term without ``|`` strongly bisimilar to the net ``n``."""
    memo: dict = {}

    def pair(p, q):
        key = (p, q)
        if key not in memo:
            e = expand_pair(p, q)
            leaves = [Prefix(l.sf, pair(l.body.left, l.body.right)) for l in _leaves(e.body)]
            memo[key] = Star(e.sf, plus_all(leaves))
        return memo[key]

    def elim(m):
        if isinstance(m, Par):
            return pair(elim(m.left), elim(m.right))
        if free_vars(m):
            raise ValueError("parallel elimination needs closed terms")
        return to_normal_form(m, "strong")[0]

    return elim(n)
