"""Normal forms, saturation, the rewrite system R and the translation phi.

The proof-producing procedures come in two flavours: ``*_eq`` functions
extend a caller's ProofBuilder and return an ``Eq``; the public wrappers
return ``(term, Proof)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .axioms import AMeta, Chain, Eq, PMeta, Proof, ProofBuilder, axiom_system, instantiate
from .derive import (canon, expand_prefix, flatten, leaf_paths, require, sum_equation, t2,
                     tau_loop_branching, tau_loop_delay, unfold)
from .equivalences import RelKind, as_kind, is_potential_prefix, is_saturated, is_strongly_saturated
from .semantics import build_lts
from .terms import (NIL, TAU, TAU_ACT, ZERO, Nil, Plus, Prefix, Process, SAct, SPlus, Star,
                    SumForm, SZero, Var, init_actions, is_prefix_fragment, plus_all, sum_of_actions, summands)


def _mode(mode) -> str:
    m = str(mode)
    if m in ("strong", "branching"):
        return m
    raise ValueError(f"normal-form mode must be strong or branching, not {m!r}")


def _memo(pb: ProofBuilder) -> dict:
    return pb.__dict__.setdefault("_memo", {})


# -- normal forms ------------------------------------------------------------

@dataclass(frozen=True)
class NormalFormView:
    """``loop*(sum of prefix.body + sum of vars)``."""

    loop: SumForm
    summands: tuple[tuple[str, "NormalFormView"], ...]
    vars: tuple[str, ...]

    def to_process(self) -> Process:
        leaves = [Prefix(SAct(a), b.to_process()) for a, b in self.summands]
        leaves += [Var(x) for x in self.vars]
        return Star(self.loop, plus_all(leaves))


def is_normal_form(p: Process, mode="strong") -> bool:
    if not isinstance(p, Star):
        return False
    if _mode(mode) == "branching" and TAU in init_actions(p.sf):
        return False
    if p.body == NIL:
        return True
    for leaf in summands(p.body):
        if isinstance(leaf, Var):
            continue
        if not (isinstance(leaf, Prefix) and isinstance(leaf.sf, SAct)
                and is_normal_form(leaf.body, mode)):
            return False
    return True


def view(p: Process) -> NormalFormView:
    if not is_normal_form(p):
        raise ValueError(f"not a normal form: {p}")
    pre, xs = [], []
    for leaf in ([] if p.body == NIL else summands(p.body)):
        if isinstance(leaf, Var):
            xs.append(leaf.name)
        else:
            pre.append((leaf.sf.name, view(leaf.body)))
    return NormalFormView(p.sf, tuple(pre), tuple(xs))


def nf_eq(pb: ProofBuilder, p: Process, mode="strong") -> Eq:
    mode = _mode(mode)
    memo = _memo(pb)
    key = ("nf", p, mode)
    if key not in memo:
        memo[key] = _nf(pb, p, mode)
    return memo[key]


def _nf(pb: ProofBuilder, p: Process, mode: str) -> Eq:
    if is_normal_form(p, mode):
        return pb.refl(p)
    if isinstance(p, (Var, Nil)):
        return pb.axiom("FA1", "r2l", {"x": p})
    c = Chain(pb, p)
    if isinstance(p, Prefix):
        c.apply(nf_eq(pb, p.body, mode), (1,))
        c.apply(expand_prefix(pb, p.sf, c.cur.body))
        return c.rw("FA1", "r2l", {"x": c.cur}).done()
    if isinstance(p, Plus):
        c.apply(nf_eq(pb, p.left, mode), (0,))
        c.apply(nf_eq(pb, p.right, mode), (1,))
        c.apply(unfold(pb, c.cur.left.sf, c.cur.left.body), (0,))
        c.apply(unfold(pb, c.cur.right.sf, c.cur.right.body), (1,))
        c.apply(flatten(pb, c.cur))
        return c.rw("FA1", "r2l", {"x": c.cur}).done()
    if not isinstance(p, Star):
        raise TypeError(f"cannot normalize {type(p).__name__}")
    c.apply(nf_eq(pb, p.body, mode), (1,))
    inner = c.cur.body
    c.apply(unfold(pb, inner.sf, inner.body), (1,))
    c.apply(flatten(pb, c.cur.body), (1,))
    acts = init_actions(p.sf)
    if mode == "branching" and TAU in acts:
        rest = sum_of_actions(acts - {TAU})
        c.apply(require(sum_equation(pb, p.sf, SPlus(rest, TAU_ACT)), "loop split"), (0,))
        body = c.cur.body
        c.rw("FT1", "l2r", {"s": rest, "x": body})
        c.apply(unfold(pb, rest, body), (1,))
        c.apply(flatten(pb, c.cur))
        return c.rw("FA1", "r2l", {"x": c.cur}).done()
    return c.apply(canon(pb, c.cur.sf), (0,)).done()


def to_normal_form(p: Process, mode="strong") -> tuple[Process, Proof]:
    pb = ProofBuilder()
    e = nf_eq(pb, p, mode)
    return e.rhs, pb.proof(e)


# -- head normal forms -------------------------------------------------------

@dataclass(frozen=True)
class HeadNormalForm:
    summands: tuple[tuple[str, Process], ...]
    vars: tuple[str, ...]
    term: Process


def is_head_form(p: Process, mode="strong") -> bool:
    if p == NIL:
        return True
    return all(isinstance(l, Var) or (isinstance(l, Prefix) and isinstance(l.sf, SAct)
                                      and is_normal_form(l.body, mode))
               for l in summands(p))


def hnf_eq(pb: ProofBuilder, p: Process, mode="strong") -> Eq:
    """``p = a1.P1 + ... + X + ...`` with normal-form P_i, canonically ordered."""
    if is_head_form(p, mode):
        return canon(pb, p)
    c = Chain(pb, p)
    c.apply(nf_eq(pb, p, mode))
    c.apply(unfold(pb, c.cur.sf, c.cur.body))
    return c.apply(flatten(pb, c.cur)).done()


def head_view(h: Process) -> HeadNormalForm:
    pre, xs = [], []
    for leaf in ([] if h == NIL else summands(h)):
        if isinstance(leaf, Var):
            xs.append(leaf.name)
        else:
            pre.append((leaf.sf.name, leaf.body))
    return HeadNormalForm(tuple(pre), tuple(xs), h)


def _in_head_shape(p: Process) -> bool:
    return p == NIL or all(isinstance(l, Var) or (isinstance(l, Prefix) and isinstance(l.sf, SAct))
                           for l in summands(p))


def head_normal_form(p: Process, mode="strong") -> tuple[HeadNormalForm, Proof]:
    """Bodies are left alone when ``p`` already has the head shape;
    otherwise they come out as normal forms."""
    pb = ProofBuilder()
    e = canon(pb, p) if _in_head_shape(p) else hnf_eq(pb, p, mode)
    return head_view(e.rhs), pb.proof(e)


# -- saturation --------------------------------------------------------------

def _leaves(body: Process) -> list[Process]:
    return [] if body == NIL else list(summands(body))


def _path_of(body: Process, leaf: Process) -> tuple[int, ...]:
    for path, l in leaf_paths(body):
        if l == leaf:
            return path
    raise KeyError(leaf)


def _find_violation(q: Star, kind: RelKind):
    loop = init_actions(q.sf)
    leaves = _leaves(q.body)
    have = set(leaves)
    if kind in (RelKind.ETA, RelKind.WEAK):
        for l in leaves:
            if isinstance(l, Prefix) and l.sf == TAU_ACT:
                if any(Prefix(SAct(a), l.body) not in have for a in loop):
                    return ("ft3", l)
        for l in leaves:
            if isinstance(l, Prefix):
                for m in _leaves(l.body.body):
                    if isinstance(m, Prefix) and m.sf == TAU_ACT and Prefix(l.sf, m.body) not in have:
                        return ("t3", l, m.body)
    if kind in (RelKind.DELAY, RelKind.WEAK):
        for l in leaves:
            if isinstance(l, Prefix) and l.sf == TAU_ACT:
                m = l.body
                need = [Prefix(SAct(a), m) for a in init_actions(m.sf)] + _leaves(m.body)
                if any(x not in have for x in need):
                    return ("t2", l)
    return None


def _lifted_t3(pb: ProofBuilder, leaf: Prefix, m2: Process) -> Eq:
    """``a.M = a.M + a.M2`` where ``tau.M2`` is a summand of M's body."""
    m = leaf.body
    others = [Prefix(m.sf, m)] + [x for x in _leaves(m.body) if x != Prefix(TAU_ACT, m2)]
    x = plus_all(others)
    split = Plus(x, Prefix(TAU_ACT, m2))
    e_m = pb.trans(unfold(pb, m.sf, m.body),
                   require(sum_equation(pb, Plus(Prefix(m.sf, m), m.body), split), "T3 split"))
    c = Chain(pb, leaf)
    c.apply(e_m, (1,))
    c.rw("T3", "l2r", {"alpha": leaf.sf, "x": x, "y": m2})
    return c.apply(pb.symm(e_m), (0, 1)).done()


def _sat_nf(pb: ProofBuilder, n: Star, kind: RelKind) -> Eq:
    memo = _memo(pb)
    key = ("sat", n, kind)
    if key in memo:
        return memo[key]
    c = Chain(pb, n)
    for path, leaf in list(leaf_paths(n.body)):
        if isinstance(leaf, Prefix):
            c.apply(_sat_nf(pb, leaf.body, kind), (1,) + path + (1,))
    c.apply(canon(pb, c.cur.body), (1,))
    while (v := _find_violation(c.cur, kind)) is not None:
        q = c.cur
        if v[0] == "ft3":
            leaf = v[1]
            x = plus_all([l for l in _leaves(q.body) if l != leaf])
            c.apply(require(sum_equation(pb, q.body, Plus(x, leaf)), "FT3 split"), (1,))
            c.rw("FT3", "l2r", {"s": q.sf, "x": x, "y": leaf.body})
            c.apply(flatten(pb, c.cur.body), (1,))
        elif v[0] == "t3":
            leaf = v[1]
            c.apply(_lifted_t3(pb, leaf, v[2]), (1,) + _path_of(q.body, leaf))
            c.apply(canon(pb, c.cur.body), (1,))
        else:
            leaf = v[1]
            m = leaf.body
            law = Chain(pb, leaf).apply(t2(pb, m)).apply(unfold(pb, m.sf, m.body), (1,)).done()
            c.apply(law, (1,) + _path_of(q.body, leaf))
            c.apply(flatten(pb, c.cur.body), (1,))
    memo[key] = c.done()
    return memo[key]


def _saturate_full(pb: ProofBuilder, p: Process, kind: RelKind) -> Eq:
    c = Chain(pb, p)
    c.apply(nf_eq(pb, p, "strong"))
    c.apply(_sat_nf(pb, c.cur, kind))
    c.apply(unfold(pb, c.cur.sf, c.cur.body))
    return c.apply(flatten(pb, c.cur)).done()


def _sat_kind(kind, allowed) -> RelKind:
    kind = as_kind(kind)
    if kind not in allowed:
        raise ValueError(f"saturation is not defined for {kind}")
    return kind


def saturate_eq(pb: ProofBuilder, p: Process, kind) -> Eq:
    kind = _sat_kind(kind, (RelKind.ETA, RelKind.DELAY, RelKind.WEAK))
    if is_saturated(p, kind):
        return pb.refl(p)
    return _saturate_full(pb, p, kind)


def saturate(p: Process, kind) -> tuple[Process, Proof]:
    pb = ProofBuilder()
    e = saturate_eq(pb, p, kind)
    return e.rhs, pb.proof(e)


def _loop_leaf(pb: ProofBuilder, leaf: Prefix, kind: RelKind) -> Eq:
    """``a.M = a.M'`` where M' carries a tau-loop at every level."""
    memo = _memo(pb)
    key = ("loop", leaf, kind)
    if key in memo:
        return memo[key]
    c = Chain(pb, leaf)
    for path, l in list(leaf_paths(leaf.body.body)):
        if isinstance(l, Prefix):
            c.apply(_loop_leaf(pb, l, kind), (1, 1) + path)
    m = c.cur.body
    if TAU not in init_actions(m.sf):
        law = tau_loop_branching if kind is RelKind.ETA else tau_loop_delay
        c.apply(pb.symm(law(pb, leaf.sf, m.sf, m.body)))
    memo[key] = c.done()
    return memo[key]


def strong_saturate_eq(pb: ProofBuilder, p: Process, kind) -> Eq:
    kind = _sat_kind(kind, (RelKind.ETA, RelKind.DELAY, RelKind.WEAK))
    if is_strongly_saturated(p, kind):
        return pb.refl(p)
    c = Chain(pb, p)
    c.apply(_saturate_full(pb, p, kind))
    for path, leaf in list(leaf_paths(c.cur)):
        if isinstance(leaf, Prefix):
            c.apply(_loop_leaf(pb, leaf, kind), path)
    return c.done()


def strong_saturate(p: Process, kind) -> tuple[Process, Proof]:
    pb = ProofBuilder()
    e = strong_saturate_eq(pb, p, kind)
    return e.rhs, pb.proof(e)


# -- the rewrite system R ----------------------------------------------------

class FuelExhausted(RuntimeError):
    pass


def _weight(s: SumForm) -> int:
    if isinstance(s, SPlus):
        return _weight(s.left) + _weight(s.right) + 1
    return 1


def r_measure(p: Process) -> int:
    """Polynomial interpretation that every R step strictly decreases."""
    if isinstance(p, Prefix):
        return _weight(p.sf) * (r_measure(p.body) + 2)
    if isinstance(p, Star):
        return 2 ** _weight(p.sf) * (r_measure(p.body) + 2)
    if isinstance(p, Plus):
        return r_measure(p.left) + r_measure(p.right) + 1
    return 1


def _r_family(mode) -> str:
    m = str(mode)
    if m == "strong":
        return "strong"
    if m in ("weak", "weak-family", "branching", "eta", "delay"):
        return "weak"
    raise ValueError(f"unknown rewrite mode {m!r}")


def _root_step(p: Process, family: str) -> Process | None:
    if isinstance(p, Prefix):
        if isinstance(p.sf, SZero):
            return NIL
        if isinstance(p.sf, SPlus):
            return Plus(Prefix(p.sf.left, p.body), Prefix(p.sf.right, p.body))
    elif isinstance(p, Star):
        if isinstance(p.sf, SZero):
            return p.body
        if family == "weak" and isinstance(p.sf, SPlus) and p.sf.right == TAU_ACT:
            s = p.sf.left
            return Plus(Prefix(TAU_ACT, Star(s, p.body)), Star(s, p.body))
    return None


def _rebuild(p: Process, f) -> Process:
    if isinstance(p, (Prefix, Star)):
        return type(p)(p.sf, f(p.body))
    if isinstance(p, Plus):
        return Plus(f(p.left), f(p.right))
    return p


def rewrite_R(p: Process, mode="weak", strategy="innermost", fuel: int | None = None) -> Process:
    """R-normal form of ``p`` (A5, A6, FA1, and FT1 outside strong mode)."""
    family = _r_family(mode)
    budget = [r_measure(p) if fuel is None else fuel]

    def spend():
        budget[0] -= 1
        if budget[0] < 0:
            raise FuelExhausted("rewrite budget exhausted")

    def inner(t):
        t = _rebuild(t, inner)
        r = _root_step(t, family)
        if r is None:
            return t
        spend()
        return inner(r)

    def outer(t):
        while (r := _root_step(t, family)) is not None:
            spend()
            t = r
        return _rebuild(t, outer)

    if strategy == "innermost":
        return inner(p)
    if strategy == "outermost":
        return outer(p)
    raise ValueError(f"unknown strategy {strategy!r}")


def is_r_normal(p: Process, mode="weak") -> bool:
    family = _r_family(mode)
    if _root_step(p, family) is not None:
        return False
    return all(is_r_normal(c, mode) for c in
               ([p.body] if isinstance(p, (Prefix, Star)) else
                [p.left, p.right] if isinstance(p, Plus) else []))


# -- sumform classes and phi -------------------------------------------------

@dataclass(frozen=True)
class SumformClass:
    tag: str  # "zero", "single" or "visible+tau"
    action: str | None = None

    def representative(self) -> SumForm:
        if self.tag == "zero":
            return ZERO
        if self.tag == "single":
            return SAct(self.action)
        return SPlus(SAct(self.action), TAU_ACT)


def classify_sumform(s: SumForm) -> SumformClass | None:
    """None when s is not potentially a single action."""
    acts = init_actions(s)
    if not acts:
        return SumformClass("zero")
    if len(acts) == 1:
        return SumformClass("single", next(iter(acts)))
    visible = acts - {TAU}
    if len(acts) == 2 and len(visible) == 1:
        return SumformClass("visible+tau", next(iter(visible)))
    return None


class NotPotential(ValueError):
    pass


def _classify_loops(p: Process, family: str, strict: bool) -> Process:
    # non-strict mode leaves unclassifiable loops alone; on a potential
    # expression they sit under a 0-prefix and R erases them
    if isinstance(p, Star):
        cls = classify_sumform(p.sf)
        sf = p.sf
        if cls is None or (family == "strong" and cls.tag == "visible+tau"):
            if strict:
                raise NotPotential("not a potential prefix-iteration expression")
        else:
            sf = cls.representative()
        return Star(sf, _classify_loops(p.body, family, strict))
    return _rebuild(p, lambda t: _classify_loops(t, family, strict))


def phi(p: Process, mode="weak") -> Process:
    """Translate a potential prefix-iteration expression into the fragment."""
    if not is_potential_prefix(build_lts(p)):
        raise NotPotential("not a potential prefix-iteration expression")
    family = _r_family(mode)
    q = rewrite_R(_classify_loops(p, family, False), family)
    if is_prefix_fragment(q):
        return q
    return rewrite_R(_classify_loops(q, family, True), family)


def phi_axioms(kind, alpha: str = TAU, visible: str = "a") -> list[tuple[str, Process, Process]]:
    """Non-identity images under phi of the process-sort schemes of E_kind.

    Each sumform metavariable ranges over one representative per class:
    0, the single action ``alpha``, and ``visible+tau``.  Action
    metavariables become ``alpha`` and process metavariables distinct
    variables.  Equations are deduplicated up to orientation.
    """
    kind = as_kind(kind)
    family = "strong" if kind is RelKind.STRONG else "weak"
    sum_reps = [ZERO, SAct(alpha)]
    if family == "weak":
        sum_reps.append(SPlus(SAct(visible), TAU_ACT))
    out = []
    seen = set()
    for sch in axiom_system(kind).schemes:
        if sch.sort != "proc":
            continue
        metas = sorted(sch.metavars.items())
        choices = []
        for name, typ in metas:
            if typ is PMeta:
                choices.append([Var(name.upper())])
            elif typ is AMeta:
                choices.append([SAct(alpha)])
            else:
                choices.append(sum_reps)
        for combo in product(*choices):
            asg = {name: v for (name, _), v in zip(metas, combo)}
            try:
                l = phi(instantiate(sch.lhs, asg), family)
                r = phi(instantiate(sch.rhs, asg), family)
            except NotPotential:
                continue
            if l == r:
                continue
            key = (sch.name, frozenset([l, r]))
            if key not in seen:
                seen.add(key)
                out.append((sch.name, l, r))
    return out
