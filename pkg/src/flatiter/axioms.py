"""Axiom schemes, the five axiom systems, and equational proof certificates.

A proof is a flat list of steps; each step records the equation it claims
and refers back to earlier steps by number.  ``check_proof`` replays every
step from its premises and compares with the recorded equation, so it never
trusts the producer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .equivalences import RelKind, as_kind
from .terms import (Nil, Parser, ParseError, Plus, Prefix, Process, SAct, SPlus,
                    Star, SumForm, SZero, Term, Var, format_term, parse_process,
                    parse_sumform, replace_at, substitute, subterm)


class ProofError(ValueError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"step {step}: {reason}")
        self.step = step
        self.reason = reason


class CertificateError(ValueError):
    """Malformed certificate text."""


# -- metavariables -----------------------------------------------------------

_meta = dataclass(frozen=True, eq=False, repr=False)


@_meta
class PMeta(Process):
    name: str
    _h: int = field(init=False, compare=False)

    def format(self):
        return self.name


@_meta
class SMeta(SumForm):
    name: str
    _h: int = field(init=False, compare=False)

    def format(self):
        return self.name


@_meta
class AMeta(SumForm):
    """Ranges over single actions, tau included."""

    name: str
    _h: int = field(init=False, compare=False)

    def format(self):
        return self.name


def _to_pattern(t: Term) -> Term:
    if isinstance(t, Var):
        return PMeta(t.name.lower())
    if isinstance(t, SAct):
        if t.name == "al":
            return AMeta("alpha")
        if t.name in ("s", "t", "u"):
            return SMeta(t.name)
        return t
    if isinstance(t, SPlus):
        return SPlus(_to_pattern(t.left), _to_pattern(t.right))
    if isinstance(t, (Prefix, Star)):
        return type(t)(_to_pattern(t.sf), _to_pattern(t.body))
    if isinstance(t, Plus):
        return Plus(_to_pattern(t.left), _to_pattern(t.right))
    return t


def metavars(t: Term) -> dict[str, type]:
    if isinstance(t, (PMeta, SMeta, AMeta)):
        return {t.name: type(t)}
    out: dict[str, type] = {}
    for f in t.__match_args__:
        c = getattr(t, f)
        if isinstance(c, Term):
            out.update(metavars(c))
    return out


def instantiate(pattern: Term, asg: Mapping[str, Term]) -> Term:
    if isinstance(pattern, (PMeta, SMeta, AMeta)):
        try:
            return asg[pattern.name]
        except KeyError:
            raise KeyError(f"metavariable {pattern.name} is unassigned") from None
    if isinstance(pattern, SPlus):
        return SPlus(instantiate(pattern.left, asg), instantiate(pattern.right, asg))
    if isinstance(pattern, (Prefix, Star)):
        return type(pattern)(instantiate(pattern.sf, asg), instantiate(pattern.body, asg))
    if isinstance(pattern, Plus):
        return Plus(instantiate(pattern.left, asg), instantiate(pattern.right, asg))
    return pattern


def match(pattern: Term, term: Term, asg: dict | None = None) -> dict | None:
    """One-way syntactic matching; the returned assignment instantiates
    ``pattern`` to exactly ``term``."""
    asg = {} if asg is None else asg
    if isinstance(pattern, (PMeta, SMeta, AMeta)):
        if isinstance(pattern, PMeta) and not isinstance(term, Process):
            return None
        if isinstance(pattern, SMeta) and not isinstance(term, SumForm):
            return None
        if isinstance(pattern, AMeta) and not isinstance(term, SAct):
            return None
        if pattern.name in asg:
            return asg if asg[pattern.name] == term else None
        asg[pattern.name] = term
        return asg
    if type(pattern) is not type(term):
        return None
    if isinstance(pattern, (SAct, Var)):
        return asg if pattern == term else None
    for f in pattern.__match_args__:
        a, b = getattr(pattern, f), getattr(term, f)
        if isinstance(a, Term):
            if match(a, b, asg) is None:
                return None
        elif a != b:
            return None
    return asg


def _check_assignment(scheme: "Scheme", asg: Mapping[str, Term]):
    need = scheme.metavars
    for name, kind in need.items():
        if name not in asg:
            raise KeyError(f"metavariable {name} is unassigned")
        v = asg[name]
        if kind is PMeta and not isinstance(v, Process):
            raise TypeError(f"{name} must be a process")
        if kind is SMeta and not isinstance(v, SumForm):
            raise TypeError(f"{name} must be a sumform")
        if kind is AMeta and not isinstance(v, SAct):
            raise TypeError(f"{name} must be a single action")
        if _has_meta(v):
            raise TypeError(f"{name} is assigned a pattern")
    extra = set(asg) - set(need)
    if extra:
        raise KeyError(f"unknown metavariables {sorted(extra)}")


def _has_meta(t: Term) -> bool:
    return bool(metavars(t))


# -- schemes and systems -----------------------------------------------------

@dataclass(frozen=True)
class Scheme:
    name: str
    sort: str  # "proc" or "sum"
    lhs: Term
    rhs: Term

    @property
    def key(self) -> str:
        return self.name if self.sort == "proc" else self.name + "s"

    @property
    def metavars(self) -> dict[str, type]:
        out = metavars(self.lhs)
        out.update(metavars(self.rhs))
        return out

    def sides(self, direction: str) -> tuple[Term, Term]:
        if direction == "l2r":
            return self.lhs, self.rhs
        if direction == "r2l":
            return self.rhs, self.lhs
        raise ValueError(f"bad direction {direction!r}")

    def instance(self, asg: Mapping[str, Term], direction: str = "l2r") -> tuple[Term, Term]:
        _check_assignment(self, asg)
        left, right = self.sides(direction)
        return instantiate(left, asg), instantiate(right, asg)

    def __str__(self):
        return f"{self.name}: {format_term(self.lhs)} = {format_term(self.rhs)}"


def _proc(name, lhs, rhs):
    return Scheme(name, "proc", _to_pattern(parse_process(lhs)), _to_pattern(parse_process(rhs)))


def _sum(name, lhs, rhs):
    return Scheme(name, "sum", _to_pattern(parse_sumform(lhs)), _to_pattern(parse_sumform(rhs)))


SCHEMES: dict[str, Scheme] = {s.key: s for s in [
    _proc("A1", "X+Y", "Y+X"),
    _proc("A2", "(X+Y)+Z", "X+(Y+Z)"),
    _proc("A3", "X+X", "X"),
    _proc("A4", "X+0", "X"),
    _sum("A1", "s+t", "t+s"),
    _sum("A2", "(s+t)+u", "s+(t+u)"),
    _sum("A3", "s+s", "s"),
    _sum("A4", "s+0", "s"),
    _proc("A5", "(s+t).X", "s.X+t.X"),
    _proc("A6", "0.X", "0"),
    _proc("FA1", "0*X", "X"),
    _proc("FA2", "s*(t.(s+t)*X+X)", "(s+t)*X"),
    _proc("FT1", "(s+tau)*X", "tau.s*X+s*X"),
    _proc("FT2", "al.s*(tau.s*(X+Y)+X)", "al.s*(X+Y)"),
    _proc("T3", "al.(X+tau.Y)", "al.(X+tau.Y)+al.Y"),
    _proc("FT3", "s*(X+tau.Y)", "s*(X+tau.Y+s.Y)"),
    _proc("T1", "al.tau.X", "al.X"),
    _proc("FFIR", "(s+tau)*X", "tau.s*X"),
]}

_STRONG = ["A1", "A2", "A3", "A4", "A1s", "A2s", "A3s", "A4s", "A5", "A6", "FA1", "FA2"]
_SYSTEM_KEYS = {
    RelKind.STRONG: _STRONG,
    RelKind.BRANCHING: _STRONG + ["FT1", "FT2"],
    RelKind.ETA: _STRONG + ["FT1", "FT2", "T3", "FT3"],
    RelKind.DELAY: _STRONG + ["T1", "FFIR"],
    RelKind.WEAK: _STRONG + ["T1", "FFIR", "T3", "FT3"],
}


@dataclass(frozen=True)
class AxiomSystem:
    kind: RelKind
    schemes: tuple[Scheme, ...]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(s.name for s in self.schemes))

    def __contains__(self, key: str) -> bool:
        return any(s.key == key for s in self.schemes)


def axiom_system(kind) -> AxiomSystem:
    kind = as_kind(kind)
    return AxiomSystem(kind, tuple(SCHEMES[k] for k in _SYSTEM_KEYS[kind]))


def scheme(name: str, sort: str = "proc") -> Scheme:
    return SCHEMES[name if sort == "proc" else name + "s"]


def apply_scheme(p: Term, sch: Scheme, at: Iterable[int], direction: str,
                 asg: Mapping[str, Term] | None = None) -> Term:
    """Rewrite the subterm of ``p`` at ``at`` by one instance of ``sch``.

    Without an assignment one is found by matching the rewritten side.
    """
    at = tuple(at)
    here = subterm(p, at)
    if asg is None:
        asg = match(sch.sides(direction)[0], here, {})
        if asg is None:
            raise ValueError(f"{sch.key} does not match {format_term(here)}")
    left, right = sch.instance(asg, direction)
    if isinstance(here, Process) != (sch.sort == "proc"):
        raise TypeError(f"{sch.key} has the wrong sort for position {at}")
    if here != left:
        raise ValueError(f"{sch.key} does not match {format_term(here)} under the assignment")
    return replace_at(p, at, right)


# -- proofs ------------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    kind: str  # refl | axiom | symm | trans | ctx | subst
    lhs: Term
    rhs: Term
    refs: tuple[int, ...] = ()
    scheme: str = ""
    direction: str = ""
    assignment: tuple[tuple[str, Term], ...] = ()
    path: tuple[int, ...] = ()


@dataclass
class Proof:
    lhs: Process
    rhs: Process
    steps: list[Step]

    def __len__(self):
        return len(self.steps)

    def cited(self) -> set[str]:
        return {s.scheme for s in self.steps if s.kind == "axiom"}


@dataclass(frozen=True)
class Eq:
    """Handle on a step of a ProofBuilder: step number plus its equation."""

    id: int
    lhs: Term
    rhs: Term


class ProofBuilder:
    """Accumulates steps; identical steps are shared."""

    def __init__(self):
        self.steps: list[Step] = []
        self._seen: dict[Step, Eq] = {}

    def _add(self, step: Step) -> Eq:
        if step in self._seen:
            return self._seen[step]
        self.steps.append(step)
        eq = Eq(len(self.steps), step.lhs, step.rhs)
        self._seen[step] = eq
        return eq

    def refl(self, t: Term) -> Eq:
        return self._add(Step("refl", t, t))

    def axiom(self, key: str, direction: str, asg: Mapping[str, Term]) -> Eq:
        sch = SCHEMES[key]
        lhs, rhs = sch.instance(asg, direction)
        return self._add(Step("axiom", lhs, rhs, scheme=key, direction=direction,
                              assignment=tuple(sorted(asg.items()))))

    def symm(self, e: Eq) -> Eq:
        if e.lhs == e.rhs:
            return e
        return self._add(Step("symm", e.rhs, e.lhs, (e.id,)))

    def trans(self, e1: Eq | None, e2: Eq) -> Eq:
        if e1 is None or e1.lhs == e1.rhs:
            return e2
        if e2.lhs == e2.rhs:
            return e1
        if e1.rhs != e2.lhs:
            raise ValueError(f"cannot chain {e1.rhs} with {e2.lhs}")
        return self._add(Step("trans", e1.lhs, e2.rhs, (e1.id, e2.id)))

    def ctx(self, e: Eq, outer: Term, path: tuple[int, ...]) -> Eq:
        if not path:
            return e
        if subterm(outer, path) != e.lhs:
            raise ValueError(f"{e.lhs} is not at {path} in {outer}")
        return self._add(Step("ctx", outer, replace_at(outer, path, e.rhs), (e.id,), path=path))

    def subst(self, e: Eq, sigma: Mapping[str, Process]) -> Eq:
        return self._add(Step("subst", substitute(e.lhs, sigma), substitute(e.rhs, sigma),
                              (e.id,), assignment=tuple(sorted(sigma.items()))))

    def proof(self, e: Eq) -> Proof:
        """Proof of ``e`` keeping only the steps it depends on."""
        need = set()
        todo = [e.id]
        while todo:
            i = todo.pop()
            if i in need:
                continue
            need.add(i)
            todo.extend(self.steps[i - 1].refs)
        order = sorted(need)
        renum = {old: new for new, old in enumerate(order, 1)}
        steps = []
        for old in order:
            st = self.steps[old - 1]
            steps.append(Step(st.kind, st.lhs, st.rhs, tuple(renum[r] for r in st.refs),
                              st.scheme, st.direction, st.assignment, st.path))
        if not steps:
            steps = [Step("refl", e.lhs, e.rhs)]
        return Proof(e.lhs, e.rhs, steps)


class Chain:
    """Forward rewriting of one term, accumulating ``start = current``."""

    def __init__(self, pb: ProofBuilder, start: Term):
        self.pb = pb
        self.start = start
        self.cur = start
        self.eq: Eq | None = None

    def apply(self, e: Eq, path: tuple[int, ...] = ()) -> "Chain":
        step = self.pb.ctx(e, self.cur, tuple(path))
        self.eq = self.pb.trans(self.eq, step)
        self.cur = step.rhs
        return self

    def rw(self, key: str, direction: str, asg: Mapping[str, Term],
           path: tuple[int, ...] = ()) -> "Chain":
        return self.apply(self.pb.axiom(key, direction, asg), path)

    def auto(self, key: str, direction: str = "l2r", path: tuple[int, ...] = (),
             **fixed: Term) -> "Chain":
        """Rewrite at ``path`` with an assignment found by matching."""
        sch = SCHEMES[key]
        left, _ = sch.sides(direction)
        here = subterm(self.cur, path)
        asg = match(left, here, dict(fixed))
        if asg is None:
            raise ValueError(f"{key} ({direction}) does not match {format_term(here)}")
        return self.rw(key, direction, asg, path)

    def done(self) -> Eq:
        return self.eq if self.eq is not None else self.pb.refl(self.start)


def single_axiom_proof(key: str, direction: str, asg: Mapping[str, Term]) -> Proof:
    pb = ProofBuilder()
    return pb.proof(pb.axiom(key, direction, asg))


# -- checking ----------------------------------------------------------------

def _same_sort(a: Term, b: Term) -> bool:
    return isinstance(a, Process) == isinstance(b, Process)


def _check_step(i: int, st: Step, done: list[Step], system: AxiomSystem):
    def ref(k):
        if not 1 <= k < i:
            raise ProofError(i, f"reference to step {k} is not earlier")
        return done[k - 1]

    if _has_meta(st.lhs) or _has_meta(st.rhs):
        raise ProofError(i, "equation contains metavariables")
    if not _same_sort(st.lhs, st.rhs):
        raise ProofError(i, "ill-sorted equation")
    if st.kind == "refl":
        if st.refs or st.lhs != st.rhs:
            raise ProofError(i, "reflexivity needs identical sides")
    elif st.kind == "axiom":
        if st.scheme not in SCHEMES:
            raise ProofError(i, f"unknown axiom {st.scheme}")
        if st.scheme not in system:
            raise ProofError(i, f"axiom {st.scheme} is not in E_{system.kind.value}")
        try:
            left, right = SCHEMES[st.scheme].instance(dict(st.assignment), st.direction)
        except (KeyError, TypeError, ValueError) as exc:
            raise ProofError(i, f"bad instance of {st.scheme}: {exc}") from None
        if (left, right) != (st.lhs, st.rhs):
            raise ProofError(i, f"equation is not the stated instance of {st.scheme}")
    elif st.kind == "symm":
        if len(st.refs) != 1:
            raise ProofError(i, "symmetry takes one premise")
        p = ref(st.refs[0])
        if (p.rhs, p.lhs) != (st.lhs, st.rhs):
            raise ProofError(i, "not the symmetric equation")
    elif st.kind == "trans":
        if len(st.refs) != 2:
            raise ProofError(i, "transitivity takes two premises")
        p, q = ref(st.refs[0]), ref(st.refs[1])
        if p.rhs != q.lhs:
            raise ProofError(i, "premises do not chain")
        if (p.lhs, q.rhs) != (st.lhs, st.rhs):
            raise ProofError(i, "conclusion does not follow by transitivity")
    elif st.kind == "ctx":
        if len(st.refs) != 1:
            raise ProofError(i, "context takes one premise")
        p = ref(st.refs[0])
        try:
            here_l = subterm(st.lhs, st.path)
            here_r = subterm(st.rhs, st.path)
        except IndexError:
            raise ProofError(i, f"invalid position {st.path}") from None
        if here_l != p.lhs or here_r != p.rhs:
            raise ProofError(i, "premise is not at the position")
        if replace_at(st.lhs, st.path, p.rhs) != st.rhs:
            raise ProofError(i, "sides differ outside the position")
    elif st.kind == "subst":
        if len(st.refs) != 1:
            raise ProofError(i, "substitution takes one premise")
        p = ref(st.refs[0])
        sigma = dict(st.assignment)
        if not all(isinstance(v, Process) for v in sigma.values()):
            raise ProofError(i, "substitution maps variables to processes only")
        if (substitute(p.lhs, sigma), substitute(p.rhs, sigma)) != (st.lhs, st.rhs):
            raise ProofError(i, "not the substituted equation")
    else:
        raise ProofError(i, f"unknown step kind {st.kind!r}")


def check_proof(proof: Proof, kind) -> None:
    """Raise ProofError unless every step is valid in E_kind and the last
    step is the claimed equation."""
    system = axiom_system(kind)
    if not proof.steps:
        raise ProofError(0, "empty proof")
    done: list[Step] = []
    for i, st in enumerate(proof.steps, 1):
        _check_step(i, st, done, system)
        done.append(st)
    last = proof.steps[-1]
    if (last.lhs, last.rhs) != (proof.lhs, proof.rhs):
        raise ProofError(len(proof.steps), "conclusion does not match the claim")


def is_valid(proof: Proof, kind) -> bool:
    try:
        check_proof(proof, kind)
    except ProofError:
        return False
    return True


def substitute_proof(proof: Proof, sigma: Mapping[str, Process]) -> Proof:
    """The same derivation with every equation closed under ``sigma``."""
    steps = []
    for st in proof.steps:
        asg = st.assignment
        if st.kind == "axiom":
            asg = tuple((k, substitute(v, sigma) if isinstance(v, Process) else v) for k, v in asg)
        elif st.kind == "subst":
            asg = tuple((k, substitute(v, sigma)) for k, v in asg)
        steps.append(Step(st.kind, substitute(st.lhs, sigma), substitute(st.rhs, sigma),
                          st.refs, st.scheme, st.direction, asg, st.path))
    return Proof(substitute(proof.lhs, sigma), substitute(proof.rhs, sigma), steps)


def provable_sumform_eq(s: SumForm, t: SumForm) -> Proof | None:
    """A1-A4 proof of ``s = t`` when both offer the same actions."""
    from .derive import sum_equation

    pb = ProofBuilder()
    e = sum_equation(pb, s, t)
    return None if e is None else pb.proof(e)


# -- certificate text --------------------------------------------------------

def _fmt_asg(asg) -> str:
    return " ".join(f"{k}:={format_term(v)}" for k, v in asg)


def format_certificate(proof: Proof) -> str:
    lines = []
    for i, st in enumerate(proof.steps, 1):
        sort = "proc" if isinstance(st.lhs, Process) else "sum"
        if st.kind == "refl":
            args = sort
        elif st.kind == "axiom":
            sch = SCHEMES[st.scheme]
            args = f"{sch.name} {sch.sort} {st.direction} {_fmt_asg(st.assignment)}".rstrip()
        elif st.kind == "ctx":
            args = f"{st.refs[0]} @{'.'.join(map(str, st.path))}"
        elif st.kind == "subst":
            args = f"{st.refs[0]} {_fmt_asg(st.assignment)}".rstrip()
        else:
            args = " ".join(map(str, st.refs))
        lines.append(f"{i} {st.kind} {args} |- {format_term(st.lhs)} = {format_term(st.rhs)}")
    lines.append(f"claim |- {format_term(proof.lhs)} = {format_term(proof.rhs)}")
    return "\n".join(lines) + "\n"


def _parse_term(text: str, sort: str | None) -> Term:
    if sort == "sum":
        return parse_sumform(text)
    if sort == "proc":
        return parse_process(text)
    try:
        return parse_process(text)
    except ParseError:
        return parse_sumform(text)


def _parse_asg(items: list[str], metas: dict[str, type] | None) -> tuple:
    out = []
    for item in items:
        name, sep, value = item.partition(":=")
        if not sep:
            raise CertificateError(f"bad assignment {item!r}")
        if metas is None:
            out.append((name, parse_process(value)))
            continue
        kind = metas.get(name)
        if kind is None:
            raise CertificateError(f"unknown metavariable {name!r}")
        out.append((name, parse_process(value) if kind is PMeta else parse_sumform(value)))
    return tuple(sorted(out))


def _split_equation(text: str) -> tuple[str, str]:
    depth = 0
    for k, ch in enumerate(text):
        depth += ch == "("
        depth -= ch == ")"
        if ch == "=" and depth == 0:
            return text[:k].strip(), text[k + 1:].strip()
    raise CertificateError(f"no equation in {text!r}")


def parse_certificate(text: str) -> Proof:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise CertificateError("empty certificate")
    steps: list[Step] = []
    sorts: list[str] = []
    try:
        for n, line in enumerate(lines, 1):
            head, sep, eqn = line.partition("|-")
            if not sep:
                raise CertificateError(f"line {n}: missing '|-'")
            words = head.split()
            if words == ["claim"]:
                if n != len(lines):
                    raise CertificateError("claim must be the last line")
                l, r = _split_equation(eqn)
                sort = sorts[-1] if sorts else None
                return Proof(_parse_term(l, sort), _parse_term(r, sort), steps)
            if len(words) < 2 or words[0] != str(len(steps) + 1):
                raise CertificateError(f"line {n}: expected step number {len(steps) + 1}")
            kind, args = words[1], words[2:]
            refs: tuple[int, ...] = ()
            extra = {}
            if kind == "refl":
                sort = args[0] if args else "proc"
            elif kind == "axiom":
                name, ssort, direction = args[:3]
                key = name if ssort == "proc" else name + "s"
                if key not in SCHEMES:
                    sort = ssort
                    extra = dict(scheme=key, direction=direction,
                                 assignment=_parse_asg(args[3:], None))
                else:
                    sort = ssort
                    extra = dict(scheme=key, direction=direction,
                                 assignment=_parse_asg(args[3:], SCHEMES[key].metavars))
            elif kind in ("symm", "trans"):
                refs = tuple(int(a) for a in args)
                sort = sorts[refs[0] - 1] if refs and 0 < refs[0] <= len(sorts) else "proc"
            elif kind == "ctx":
                refs = (int(args[0]),)
                if not args[1].startswith("@"):
                    raise CertificateError(f"line {n}: bad position {args[1]!r}")
                body = args[1][1:]
                extra = dict(path=tuple(int(x) for x in body.split(".")) if body else ())
                sort = None if extra["path"] else (sorts[refs[0] - 1] if 0 < refs[0] <= len(sorts) else None)
            elif kind == "subst":
                refs = (int(args[0]),)
                extra = dict(assignment=_parse_asg(args[1:], None))
                sort = sorts[refs[0] - 1] if 0 < refs[0] <= len(sorts) else "proc"
            else:
                raise CertificateError(f"line {n}: unknown step kind {kind!r}")
            l, r = _split_equation(eqn)
            lhs, rhs = _parse_term(l, sort), _parse_term(r, sort)
            sorts.append("proc" if isinstance(lhs, Process) else "sum")
            steps.append(Step(kind, lhs, rhs, refs, **extra))
    except (ValueError, IndexError) as exc:
        if isinstance(exc, CertificateError):
            raise
        raise CertificateError(str(exc)) from None
    raise CertificateError("missing final claim line")
