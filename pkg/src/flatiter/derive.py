"""Proof-producing building blocks shared by the normalizer and the prover.

Every function takes a ProofBuilder and returns an ``Eq`` handle whose
equation it has derived; nothing here is trusted by the checker.
"""

from __future__ import annotations

from typing import Iterator

from .axioms import Chain, Eq, ProofBuilder
from .terms import (NIL, TAU, TAU_ACT, ZERO, Nil, Plus, Prefix, Process, SAct,
                    SPlus, Star, SumForm, SZero, Term, action_key)


class _Sort:
    def __init__(self, plus, zero, keys, metas, key):
        self.plus = plus
        self.zero = zero
        self.a1, self.a2, self.a3, self.a4 = keys
        self.m = metas
        self.key = key

    def asg(self, *terms):
        return dict(zip(self.m, terms))


PROC = _Sort(Plus, NIL, ("A1", "A2", "A3", "A4"), ("x", "y", "z"), str)
SUM = _Sort(SPlus, ZERO, ("A1s", "A2s", "A3s", "A4s"), ("s", "t", "u"),
            lambda t: action_key(t.name) if isinstance(t, SAct) else (2, str(t), False))


def _sort_of(t: Term) -> _Sort:
    return PROC if isinstance(t, Process) else SUM


def _split(srt: _Sort, t: Term):
    if isinstance(t, srt.plus):
        return t.left, t.right
    return t, None


def _merge(pb: ProofBuilder, srt: _Sort, x: Term, y: Term) -> Eq:
    """``x + y = c`` for canonical x, y; c is their canonical union."""
    c = Chain(pb, srt.plus(x, y))
    if x == srt.zero:
        c.rw(srt.a1, "l2r", srt.asg(x, y))
        return c.rw(srt.a4, "l2r", srt.asg(y)).done()
    if y == srt.zero:
        return c.rw(srt.a4, "l2r", srt.asg(x)).done()
    hx, rx = _split(srt, x)
    hy, ry = _split(srt, y)
    if hx == hy:
        if rx is None and ry is None:
            return c.rw(srt.a3, "l2r", srt.asg(hx)).done()
        if rx is None:
            c.rw(srt.a2, "r2l", srt.asg(hx, hx, ry))
            return c.rw(srt.a3, "l2r", srt.asg(hx), (0,)).done()
        if ry is None:
            c.rw(srt.a1, "l2r", srt.asg(x, hx))
            c.rw(srt.a2, "r2l", srt.asg(hx, hx, rx))
            return c.rw(srt.a3, "l2r", srt.asg(hx), (0,)).done()
        c.rw(srt.a2, "l2r", srt.asg(hx, rx, y))
        c.apply(_pull_front(pb, srt, rx, hy, ry), (1,))
        c.rw(srt.a2, "r2l", srt.asg(hx, hx, srt.plus(rx, ry)))
        c.rw(srt.a3, "l2r", srt.asg(hx), (0,))
        return c.apply(_merge(pb, srt, rx, ry), (1,)).done()
    if srt.key(hx) < srt.key(hy):
        if rx is None:
            return c.done()
        c.rw(srt.a2, "l2r", srt.asg(hx, rx, y))
        return c.apply(_merge(pb, srt, rx, y), (1,)).done()
    if ry is None:
        return c.rw(srt.a1, "l2r", srt.asg(x, hy)).done()
    c.apply(_pull_front(pb, srt, x, hy, ry))
    return c.apply(_merge(pb, srt, x, ry), (1,)).done()


def _pull_front(pb, srt, x, h, rest) -> Eq:
    """``x + (h + rest) = h + (x + rest)``."""
    c = Chain(pb, srt.plus(x, srt.plus(h, rest)))
    c.rw(srt.a2, "r2l", srt.asg(x, h, rest))
    c.rw(srt.a1, "l2r", srt.asg(x, h), (0,))
    return c.rw(srt.a2, "l2r", srt.asg(h, x, rest)).done()


def canon(pb: ProofBuilder, t: Term) -> Eq:
    """``t = c`` where c is t's sum flattened, sorted, deduplicated, and
    without zero summands (right-nested; 0 when nothing remains)."""
    srt = _sort_of(t)
    if not isinstance(t, srt.plus):
        return pb.refl(t)
    c = Chain(pb, t)
    c.apply(canon(pb, t.left), (0,))
    c.apply(canon(pb, t.right), (1,))
    return c.apply(_merge(pb, srt, c.cur.left, c.cur.right)).done()


def sum_equation(pb: ProofBuilder, a: Term, b: Term) -> Eq | None:
    """A1-A4 proof of ``a = b`` if their canonical sums coincide."""
    ea, eb = canon(pb, a), canon(pb, b)
    if ea.rhs != eb.rhs:
        return None
    return pb.trans(ea, pb.symm(eb))


def leaf_paths(t: Process, path=()) -> Iterator[tuple[tuple[int, ...], Process]]:
    if isinstance(t, Plus):
        yield from leaf_paths(t.left, path + (0,))
        yield from leaf_paths(t.right, path + (1,))
    else:
        yield path, t


def expand_prefix(pb: ProofBuilder, s: SumForm, body: Process) -> Eq:
    """``s.body = a1.body + (a2.body + ...)`` over the sorted actions of s,
    or ``= 0`` when s offers none."""
    c = Chain(pb, Prefix(s, body))
    c.apply(canon(pb, s), (0,))
    if c.cur.sf == ZERO:
        return c.rw("A6", "l2r", {"x": body}).done()
    path: tuple[int, ...] = ()
    while True:
        here = c.cur
        for i in path:
            here = here.right
        if not isinstance(here.sf, SPlus):
            return c.done()
        c.rw("A5", "l2r", {"s": here.sf.left, "t": here.sf.right, "x": body}, path)
        path += (1,)


def flatten(pb: ProofBuilder, t: Process) -> Eq:
    """Expand every summand ``s.P`` with s not a single action, then canon."""
    c = Chain(pb, t)
    for path, leaf in list(leaf_paths(t)):
        if isinstance(leaf, Prefix) and not isinstance(leaf.sf, SAct):
            c.apply(expand_prefix(pb, leaf.sf, leaf.body), path)
    return c.apply(canon(pb, c.cur)).done()


def body_equation(pb: ProofBuilder, a: Process, b: Process) -> Eq | None:
    """``a = b`` when both flatten to the same canonical sum."""
    ea, eb = flatten(pb, a), flatten(pb, b)
    if ea.rhs != eb.rhs:
        return None
    return pb.trans(ea, pb.symm(eb))


def require(e: Eq | None, what: str) -> Eq:
    if e is None:
        raise AssertionError(f"derivation failed: {what}")
    return e


# -- derived laws ------------------------------------------------------------

def zero_plus(pb: ProofBuilder, s: SumForm) -> Eq:
    """``0 + s = s`` on sumforms."""
    c = Chain(pb, SPlus(ZERO, s))
    c.rw("A1s", "l2r", {"s": ZERO, "t": s})
    return c.rw("A4s", "l2r", {"s": s}).done()


def unfold(pb: ProofBuilder, t: SumForm, x: Process) -> Eq:
    """``t*x = t.(t*x) + x``: FA2 with its first sumform set to 0."""
    e0 = zero_plus(pb, t)
    c = Chain(pb, Star(t, x))
    c.apply(pb.symm(e0), (0,))
    c.rw("FA2", "r2l", {"s": ZERO, "t": t, "x": x})
    c.rw("FA1", "l2r", {"x": c.cur.body})
    return c.apply(e0, (0, 1, 0)).done()


def fold(pb: ProofBuilder, t: SumForm, x: Process) -> Eq:
    """``t.(t*x) + x = t*x``."""
    return pb.symm(unfold(pb, t, x))


def tau_star(pb: ProofBuilder, x: Process) -> Eq:
    """``tau*x = tau.x`` (needs FFIR)."""
    c = Chain(pb, Star(TAU_ACT, x))
    c.apply(pb.symm(zero_plus(pb, TAU_ACT)), (0,))
    c.rw("FFIR", "l2r", {"s": ZERO, "x": x})
    return c.rw("FA1", "l2r", {"x": x}, (1,)).done()


def t2(pb: ProofBuilder, x: Process) -> Eq:
    """``tau.x = tau.x + x``: FFIR with s = 0, then unfolding and T1."""
    ts = tau_star(pb, x)
    c = Chain(pb, Prefix(TAU_ACT, x))
    c.apply(pb.symm(ts))
    c.apply(unfold(pb, TAU_ACT, x))
    c.apply(ts, (0, 1))
    return c.rw("T1", "l2r", {"alpha": TAU_ACT, "x": x}, (0,)).done()


def branching_law(pb: ProofBuilder, a: SAct, x: Process, y: Process) -> Eq:
    """``a.(tau.(x+y) + x) = a.(x+y)``: FT2 with s = 0."""
    lhs_inst = Prefix(a, Star(ZERO, Plus(Prefix(TAU_ACT, Star(ZERO, Plus(x, y))), x)))
    c = Chain(pb, lhs_inst)
    c.rw("FA1", "l2r", {"x": lhs_inst.body.body}, (1,))
    c.rw("FA1", "l2r", {"x": Plus(x, y)}, (1, 0, 1))
    to_ours = c.done()
    c2 = Chain(pb, lhs_inst)
    c2.rw("FT2", "l2r", {"alpha": a, "s": ZERO, "x": x, "y": y})
    c2.rw("FA1", "l2r", {"x": Plus(x, y)}, (1,))
    return pb.trans(pb.symm(to_ours), c2.done())


def tau_loop_branching(pb: ProofBuilder, a: SAct, s: SumForm, x: Process) -> Eq:
    """``a.(s+tau)*x = a.s*x`` from FT1 and the branching law."""
    sx = Star(s, x)
    c = Chain(pb, Prefix(a, Star(SPlus(s, TAU_ACT), x)))
    c.rw("FT1", "l2r", {"s": s, "x": x}, (1,))
    c.rw("A4", "r2l", {"x": sx}, (1, 0, 1))
    c.apply(branching_law(pb, a, sx, NIL))
    return c.rw("A4", "l2r", {"x": sx}, (1,)).done()


def tau_loop_delay(pb: ProofBuilder, a: SAct, s: SumForm, x: Process) -> Eq:
    """``a.(s+tau)*x = a.s*x`` from FFIR and T1."""
    c = Chain(pb, Prefix(a, Star(SPlus(s, TAU_ACT), x)))
    c.rw("FFIR", "l2r", {"s": s, "x": x}, (1,))
    return c.rw("T1", "l2r", {"alpha": a, "x": Star(s, x)}).done()


def star_star(pb: ProofBuilder, a: SumForm, x: Process) -> Eq:
    """``a*(a*x) = a*x``: FA2 with both sumforms equal, after unfolding."""
    aa = SPlus(a, a)
    e_aa = canon(pb, aa)  # a + a = a  (A3 on single actions)
    c = Chain(pb, Star(a, Star(a, x)))
    c.apply(unfold(pb, a, x), (1,))
    c.apply(pb.symm(e_aa), (1, 0, 1, 0))
    c.rw("FA2", "l2r", {"s": a, "t": a, "x": x})
    return c.apply(e_aa, (0,)).done()
