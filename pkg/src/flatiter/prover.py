"""Equational prover: turns congruent pairs into checkable proofs.

Strong and branching congruence go through head normal forms and a
summand-by-summand comparison of normal forms.  Eta congruence first
saturates both sides and reuses the branching route; delay and weak
congruence strongly saturate and reuse the strong route.
"""

from __future__ import annotations

from dataclasses import dataclass

from .axioms import Chain, Eq, Proof, ProofBuilder, axiom_system, check_proof, instantiate, match
from .derive import body_equation, leaf_paths, require, sum_equation
from .equivalences import Equivalence, RelKind, as_kind, root_failure
from .normalize import _leaves, hnf_eq, is_normal_form, saturate_eq, strong_saturate_eq
from .terms import (NIL, TAU, Plus, Prefix, Process, SAct, SPlus, Star, Var, init_actions,
                    plus_all, sum_of_actions, term_size)


class ProverError(AssertionError):
    """The prover failed on an input it should handle; always a bug."""


@dataclass(frozen=True)
class Proved:
    proof: Proof

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotCongruent:
    side: str
    label: str | None
    target: Process | None

    def __bool__(self):
        return False

    def describe(self) -> str:
        if self.label is None:
            return "not strongly bisimilar"
        other = "right" if self.side == "left" else "left"
        return (f"{self.side} side move {self.label} -> {self.target} "
                f"has no matching move on the {other} side")


class _NF:
    """Proofs between bisimilar normal forms, memoized per instance."""

    def __init__(self, pb: ProofBuilder, mode: str, eqv: Equivalence):
        self.pb = pb
        self.mode = mode
        self.eqv = eqv
        self.memo: dict = {}

    def rel(self, p, q) -> bool:
        return self.eqv.related(p, q)

    def wrap(self, t: Process, g: str | None) -> Process:
        return t if g is None else Prefix(SAct(g), t)

    def prefixed(self, a: str, p: Process, q: Process) -> Eq:
        """``a.p = a.q`` for bisimilar normal forms p and q."""
        if self.mode == "branching":
            return self.prove(p, q, a)
        return self.pb.ctx(self.prove(p, q, None), Prefix(SAct(a), p), (1,))

    def prove(self, p: Process, q: Process, g: str | None, bound: int | None = None) -> Eq:
        """``p = q`` (strong) or ``g.p = g.q`` (branching)."""
        size = term_size(p) + term_size(q)
        if bound is not None and size >= bound:
            raise ProverError("size measure did not decrease")
        if p == q:
            return self.pb.refl(self.wrap(p, g))
        key = (p, q, g)
        if key in self.memo:
            return self.memo[key]
        if not (is_normal_form(p, self.mode) and is_normal_form(q, self.mode)):
            raise ProverError(f"not normal forms: {p} / {q}")
        if not self.rel(p, q):
            raise ProverError(f"not {self.mode} bisimilar: {p} / {q}")
        pre_p = [l for l in _leaves(p.body) if isinstance(l, Prefix)]
        pre_q = [l for l in _leaves(q.body) if isinstance(l, Prefix)]
        a_hit = [l for l in pre_p if self.rel(l.body, q)]
        b_hit = [l for l in pre_q if self.rel(l.body, p)]
        pb = self.pb
        if a_hit and b_hit:
            pi, qj = a_hit[0].body, b_hit[0].body
            e = pb.trans(self.prove(p, qj, g, size), self.prove(qj, pi, g, size))
            e = pb.trans(e, self.prove(pi, q, g, size))
        elif b_hit:
            e = pb.symm(self._case2(q, p, g, size))
        else:
            e = self._case2(p, q, g, size)
        self.memo[key] = e
        return e

    def _match_into(self, start: Process, target: Process, size: int) -> Eq:
        """``start = target`` where each summand of start has a bisimilar
        counterpart among target's summands and target's summands are
        among start's after rewriting (the sums then agree up to A1-A4)."""
        pb = self.pb
        tgt = _leaves(target)
        c = Chain(pb, start)
        for path, leaf in list(leaf_paths(start)):
            if isinstance(leaf, Var) or leaf == NIL:
                continue
            if leaf in tgt:
                continue
            for m in tgt:
                if isinstance(m, Prefix) and m.sf == leaf.sf and self.rel(leaf.body, m.body):
                    c.apply(self._prefixed_bounded(leaf.sf.name, leaf.body, m.body, size), path)
                    break
            else:
                raise ProverError(f"no match for summand {leaf}")
        return c.apply(require(sum_equation(pb, c.cur, target), "summand matching")).done()

    def _prefixed_bounded(self, a, p, q, size):
        if self.mode == "branching":
            return self.prove(p, q, a, size)
        return self.pb.ctx(self.prove(p, q, None, size), Prefix(SAct(a), p), (1,))

    def _case2(self, p: Star, q: Star, g: str | None, size: int) -> Eq:
        pb = self.pb
        s, t = p.sf, q.sf
        cq = q.body
        tacts = init_actions(t)
        if not init_actions(s) <= tacts:
            raise ProverError(f"loop of {p} is not contained in loop of {q}")
        branching = self.mode == "branching"

        def in_u(l):
            return (isinstance(l, Prefix) and self.rel(l.body, q)
                    and (l.sf.name in tacts or (branching and l.sf.name == TAU)))

        leaves = _leaves(p.body)
        u_acts = {l.sf.name for l in leaves if in_u(l)}
        v_acts = {l.sf.name for l in leaves if in_u(l) and l.sf.name in tacts}
        u, v = sum_of_actions(u_acts), sum_of_actions(v_acts)
        srest = plus_all([l for l in leaves if not in_u(l)])

        # p = s*(u.q + S)
        c = Chain(pb, p)
        for path, l in list(leaf_paths(p.body)):
            if in_u(l):
                c.apply(self._prefixed_bounded(l.sf.name, l.body, q, size), (1,) + path)
        c.apply(require(body_equation(pb, c.cur.body, Plus(Prefix(u, q), srest)), "u-split"), (1,))
        e_p = c.done()
        # q' + S = q'
        e_qs = self._match_into(Plus(cq, srest), cq, size)

        if not (branching and TAU in u_acts):
            # IIa: S = q', t = s+v, then FA2
            e_sq = self._match_into(Plus(srest, cq), srest, size)
            e_s_eq = pb.trans(pb.symm(e_sq), pb.axiom("A1", "l2r", {"x": srest, "y": cq}))
            e_s_eq = pb.trans(e_s_eq, e_qs)
            e_t = require(sum_equation(pb, t, SPlus(s, v)), "t = s+v")
            cq2 = Chain(pb, q)
            cq2.apply(pb.symm(e_s_eq), (1,))
            cq2.apply(e_t, (0,))
            e_qx = cq2.done()
            c = Chain(pb, p)
            c.apply(e_p)
            c.apply(e_qx, (1, 0, 1))
            c.rw("FA2", "l2r", {"s": s, "t": v, "x": srest})
            c.apply(pb.symm(e_qx))
            e = c.done()
            if g is not None:
                e = pb.ctx(e, Prefix(SAct(g), p), (1,))
            return e

        # IIb: tau is among the absorbed prefixes; FA2 and FT2 under g
        y = Plus(cq, srest)
        x_star = Star(t, y)
        e_qx = Chain(pb, q).apply(pb.symm(e_qs), (1,)).done()
        e_ts = require(sum_equation(pb, t, SPlus(s, t)), "t = s+t")
        x_part = Plus(Prefix(v, x_star), srest)
        y_part = Plus(Prefix(t, x_star), cq)
        ga = SAct(g)

        # X = s*(x_part + y_part)
        cz = Chain(pb, x_star)
        cz.apply(e_ts, (0,))
        cz.rw("FA2", "r2l", {"s": s, "t": t, "x": y})
        cz.apply(pb.symm(e_ts), (1, 0, 1, 0))
        cz.apply(require(body_equation(pb, cz.cur.body, Plus(x_part, y_part)), "x/y split"), (1,))
        e_z = cz.done()

        c = Chain(pb, Prefix(ga, p))
        c.apply(e_p, (1,))
        c.apply(e_qx, (1, 1, 0, 1))
        c.apply(require(body_equation(pb, c.cur.body.body,
                                      Plus(Prefix(SAct(TAU), x_star), x_part)), "tau split"), (1, 1))
        c.apply(e_z, (1, 1, 0, 1))
        c.rw("FT2", "l2r", {"alpha": ga, "s": s, "x": x_part, "y": y_part})
        c.apply(require(body_equation(pb, c.cur.body.body, Plus(Prefix(t, x_star), y)), "rejoin"), (1, 1))
        c.apply(e_ts, (1, 1, 0, 1, 0))
        c.rw("FA2", "l2r", {"s": s, "t": t, "x": y}, (1,))
        c.apply(pb.symm(e_ts), (1, 0))
        c.apply(pb.symm(e_qx), (1,))
        return c.done()


def prove_nf(p: Process, q: Process, kind="strong", gamma: str | None = None) -> Proof:
    """Proof of ``p = q`` (strong) or ``gamma.p = gamma.q`` (branching)."""
    mode = str(as_kind(kind))
    if mode not in ("strong", "branching"):
        raise ValueError("prove_nf works in strong or branching mode")
    if mode == "branching" and gamma is None:
        gamma = TAU
    if mode == "strong":
        gamma = None
    pb = ProofBuilder()
    e = _NF(pb, mode, Equivalence([p, q], mode)).prove(p, q, gamma)
    proof = pb.proof(e)
    check_proof(proof, mode)
    return proof


def _rooted(pb: ProofBuilder, p: Process, q: Process, mode: str) -> Eq:
    """``p = q`` for congruent p, q via head normal forms."""
    hp, hq = hnf_eq(pb, p, mode), hnf_eq(pb, q, mode)
    h1, h2 = hp.rhs, hq.rhs
    if h1 == h2:
        return pb.trans(hp, pb.symm(hq))
    nf = _NF(pb, mode, Equivalence([h1, h2], mode))

    def absorb(big: Process, small: Process) -> Eq:
        # big + small = big
        c = Chain(pb, Plus(big, small))
        have = _leaves(big)
        for path, leaf in list(leaf_paths(small)):
            if leaf == NIL or leaf in have:
                continue
            if isinstance(leaf, Var):
                raise ProverError(f"variable {leaf} missing on the other side")
            for m in have:
                if isinstance(m, Prefix) and m.sf == leaf.sf and nf.rel(leaf.body, m.body):
                    c.apply(nf.prefixed(leaf.sf.name, leaf.body, m.body), (1,) + path)
                    break
            else:
                raise ProverError(f"no match for summand {leaf}")
        return c.apply(require(sum_equation(pb, c.cur, big), "absorption")).done()

    e1 = absorb(h2, h1)  # h2 + h1 = h2
    e2 = absorb(h1, h2)  # h1 + h2 = h1
    e = pb.trans(pb.symm(e2), pb.axiom("A1", "l2r", {"x": h1, "y": h2}))
    e = pb.trans(e, e1)
    return pb.trans(pb.trans(hp, e), pb.symm(hq))


def prove_congruent_eq(pb: ProofBuilder, p: Process, q: Process, kind) -> Eq:
    kind = as_kind(kind)
    if kind in (RelKind.STRONG, RelKind.BRANCHING):
        return _rooted(pb, p, q, kind.value)
    if kind is RelKind.ETA:
        ep, eq = saturate_eq(pb, p, kind), saturate_eq(pb, q, kind)
        mid = _rooted(pb, ep.rhs, eq.rhs, "branching")
    else:
        ep, eq = strong_saturate_eq(pb, p, kind), strong_saturate_eq(pb, q, kind)
        mid = _rooted(pb, ep.rhs, eq.rhs, "strong")
    return pb.trans(pb.trans(ep, mid), pb.symm(eq))


def _direct_axiom(pb: ProofBuilder, p: Process, q: Process, kind: RelKind) -> Eq | None:
    """A single root instance of an axiom of E_kind taking p to q."""
    for sch in axiom_system(kind).schemes:
        if sch.sort != "proc":
            continue
        for direction in ("l2r", "r2l"):
            left, right = sch.sides(direction)
            asg = match(left, p, {})
            if asg is None or set(asg) != set(sch.metavars):
                continue
            if instantiate(right, asg) == q:
                return pb.axiom(sch.key, direction, asg)
    return None


def prove_congruent(p: Process, q: Process, kind) -> Proved | NotCongruent:
    kind = as_kind(kind)
    fail = root_failure(p, q, kind)
    if fail is not None:
        return NotCongruent(*fail)
    pb = ProofBuilder()
    e = _direct_axiom(pb, p, q, kind) if p != q else pb.refl(p)
    if e is None:
        e = prove_congruent_eq(pb, p, q, kind)
    proof = pb.proof(e)
    if (proof.lhs, proof.rhs) != (p, q):
        raise ProverError("proof does not connect the inputs")
    check_proof(proof, kind)
    return Proved(proof)
