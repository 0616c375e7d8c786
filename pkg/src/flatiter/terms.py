"""Two-sorted abstract syntax of basic CCS with flat iteration.

Sumforms ``S ::= 0 | alpha | S + S`` sit to the left of ``.`` and ``*``;
processes ``P ::= X | 0 | S.P | P + P | S*P`` are everything else.

Concrete syntax: actions are lowercase identifiers (``tau`` is reserved for
the silent action, a leading apostrophe marks a co-name), variables start
with an uppercase letter.  ``+`` binds weaker than ``.`` and ``*``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

TAU = "tau"


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class Term:
    """Immutable syntax node with a cached structural hash."""

    def __post_init__(self):
        key = tuple(getattr(self, f) for f in self.__match_args__)
        object.__setattr__(self, "_h", hash((type(self).__name__,) + key))

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or other._h != self._h:
            return False
        return all(getattr(self, f) == getattr(other, f) for f in self.__match_args__)

    def __ne__(self, other):
        return not self == other

    def __str__(self):
        return format_term(self)

    def __repr__(self):
        return f"{type(self).__name__}({format_term(self)!r})"


class SumForm(Term):
    pass


class Process(Term):
    pass


_node = dataclass(frozen=True, eq=False, repr=False)


@_node
class SZero(SumForm):
    _h: int = field(init=False, compare=False)


@_node
class SAct(SumForm):
    name: str
    _h: int = field(init=False, compare=False)


@_node
class SPlus(SumForm):
    left: SumForm
    right: SumForm
    _h: int = field(init=False, compare=False)


@_node
class Var(Process):
    name: str
    _h: int = field(init=False, compare=False)


@_node
class Nil(Process):
    _h: int = field(init=False, compare=False)


@_node
class Prefix(Process):
    sf: SumForm
    body: Process
    _h: int = field(init=False, compare=False)


@_node
class Plus(Process):
    left: Process
    right: Process
    _h: int = field(init=False, compare=False)


@_node
class Star(Process):
    sf: SumForm
    body: Process
    _h: int = field(init=False, compare=False)


ZERO = SZero()
NIL = Nil()
TAU_ACT = SAct(TAU)


def act(name: str) -> SAct:
    return SAct(name)


# -- structure -------------------------------------------------------------

def children(t: Term) -> tuple:
    return tuple(getattr(t, f) for f in t.__match_args__ if isinstance(getattr(t, f), Term))


def _child_fields(t: Term) -> list[str]:
    return [f for f in t.__match_args__ if isinstance(getattr(t, f), Term)]


def subterm(t: Term, path: Iterable[int]) -> Term:
    for i in path:
        fields = _child_fields(t)
        if not 0 <= i < len(fields):
            raise IndexError(f"no child {i} in {t}")
        t = getattr(t, fields[i])
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    fields = _child_fields(t)
    i = path[0]
    if not 0 <= i < len(fields):
        raise IndexError(f"no child {i} in {t}")
    values = {f: getattr(t, f) for f in t.__match_args__}
    values[fields[i]] = replace_at(values[fields[i]], path[1:], new)
    return type(t)(**values)


def term_size(t: Term) -> int:
    """Number of AST nodes, sumform nodes included."""
    return 1 + sum(term_size(c) for c in children(t))


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    out: frozenset[str] = frozenset()
    for c in children(t):
        out |= free_vars(c)
    return out


def substitute(p: Process, sigma: Mapping[str, Process]) -> Process:
    if not sigma:
        return p
    if isinstance(p, Var):
        return sigma.get(p.name, p)
    if isinstance(p, (Prefix, Star)):
        return type(p)(p.sf, substitute(p.body, sigma))
    if isinstance(p, Plus):
        return Plus(substitute(p.left, sigma), substitute(p.right, sigma))
    return p


# -- sumforms ----------------------------------------------------------------

def init_actions(s: SumForm) -> frozenset[str]:
    if isinstance(s, SAct):
        return frozenset([s.name])
    if isinstance(s, SPlus):
        return init_actions(s.left) | init_actions(s.right)
    if isinstance(s, SZero):
        return frozenset()
    raise TypeError(f"not a sumform: {s!r}")


def sumform_leq(s: SumForm, t: SumForm) -> bool:
    return init_actions(s) <= init_actions(t)


def action_key(name: str):
    # tau sorts first, then plain names, co-names next to their base
    return (name != TAU, name.lstrip("'"), name.startswith("'"))


def sum_of_actions(names: Iterable[str]) -> SumForm:
    """Right-nested sumform over the distinct names, sorted; 0 when empty."""
    items = sorted(set(names), key=action_key)
    if not items:
        return ZERO
    out: SumForm = SAct(items[-1])
    for n in reversed(items[:-1]):
        out = SPlus(SAct(n), out)
    return out


def plus_all(items: Iterable[Process]) -> Process:
    """Right-nested sum; the empty sum is 0."""
    items = list(items)
    if not items:
        return NIL
    out = items[-1]
    for p in reversed(items[:-1]):
        out = Plus(p, out)
    return out


def summands(p: Process) -> Iterator[Process]:
    """Leaves of the top-level ``+`` tree."""
    if isinstance(p, Plus):
        yield from summands(p.left)
        yield from summands(p.right)
    else:
        yield p


def is_prefix_fragment(p: Process) -> bool:
    """Every prefix and loop sumform is a single action."""
    if isinstance(p, (Prefix, Star)):
        return isinstance(p.sf, SAct) and is_prefix_fragment(p.body)
    if isinstance(p, Plus):
        return is_prefix_fragment(p.left) and is_prefix_fragment(p.right)
    return True


# -- printing ----------------------------------------------------------------

def _flatten_left(t, plus_type):
    items = []
    while isinstance(t, plus_type):
        items.append(t.right)
        t = t.left
    items.append(t)
    return items[::-1]


def format_sumform(s: SumForm) -> str:
    if isinstance(s, SZero):
        return "0"
    if isinstance(s, SAct):
        return s.name
    items = _flatten_left(s, SPlus)
    return "(" + "+".join(format_sumform(i) for i in items) + ")"


def _format_prefixed(p: Term) -> str:
    if isinstance(p, (Prefix, Star)):
        op = "." if isinstance(p, Prefix) else "*"
        body = p.body
        inner = f"({format_term(body)})" if isinstance(body, Plus) else _format_prefixed(body)
        return format_sumform(p.sf) + op + inner
    if isinstance(p, Plus) or not isinstance(p, (Var, Nil)):
        return f"({format_term(p)})"
    return format_term(p)


def format_term(t: Term) -> str:
    if isinstance(t, SumForm):
        return format_sumform(t)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Nil):
        return "0"
    if isinstance(t, Plus):
        return "+".join(_format_prefixed(i) for i in _flatten_left(t, Plus))
    if isinstance(t, (Prefix, Star)):
        return _format_prefixed(t)
    custom = getattr(t, "format", None)
    if custom is not None:
        return custom()
    raise TypeError(f"cannot format {type(t).__name__}")


format_process = format_term


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<coname>'[A-Za-z_][A-Za-z0-9_]*)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<zero>0)|(?P<punct>[()+.*|])|(?P<bad>\S))"
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "bad":
            raise ParseError(f"unexpected character {value!r}", start)
        if kind == "coname":
            if value[1:] == TAU:
                raise ParseError("tau has no co-name", start)
            if not value[1].islower():
                raise ParseError(f"co-name {value!r} of a variable", start)
            kind = "act"
        elif kind == "ident":
            kind = "var" if value[0].isupper() else "act"
        out.append((kind, value, start))
    out.append(("eof", "", len(text)))
    return out


class Parser:
    """Backtracking recursive-descent parser over the token list."""

    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def at(self, value: str) -> bool:
        kind, v, _ = self.peek()
        return kind == "punct" and v == value

    def expect(self, value: str):
        if not self.at(value):
            kind, v, pos = self.peek()
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", pos)
        self.i += 1

    def fail(self, what: str):
        _, v, pos = self.peek()
        raise ParseError(f"expected {what}, found {v or 'end of input'!r}", pos)

    def end(self):
        if self.peek()[0] != "eof":
            self.fail("end of input")

    # sumform := '0' | act | '(' sumform ('+' sumform)* ')'
    def sumform(self) -> SumForm:
        kind, v, _ = self.peek()
        if kind == "zero":
            self.i += 1
            return ZERO
        if kind == "act":
            self.i += 1
            return SAct(v)
        if self.at("("):
            self.i += 1
            s = self.sumform()
            while self.at("+"):
                self.i += 1
                s = SPlus(s, self.sumform())
            self.expect(")")
            return s
        self.fail("a sumform")

    def process(self) -> Process:
        p = self.prefixed()
        while self.at("+"):
            self.i += 1
            p = Plus(p, self.prefixed())
        return p

    def prefixed(self) -> Process:
        save = self.i
        try:
            s = self.sumform()
        except ParseError:
            s = None
        if s is not None and (self.at(".") or self.at("*")):
            star = self.at("*")
            self.i += 1
            body = self.prefixed()
            return Star(s, body) if star else Prefix(s, body)
        self.i = save
        return self.atom()

    def atom(self) -> Process:
        kind, v, pos = self.peek()
        if kind == "zero":
            self.i += 1
            return NIL
        if kind == "var":
            self.i += 1
            return Var(v)
        if self.at("("):
            self.i += 1
            p = self.process()
            self.expect(")")
            return p
        if kind == "act":
            raise ParseError(f"action {v!r} must be followed by '.' or '*'", pos)
        self.fail("a process")


def parse_process(text: str) -> Process:
    parser = Parser(text)
    p = parser.process()
    parser.end()
    return p


def parse_sumform(text: str) -> SumForm:
    parser = Parser(text)
    s = parser.sumform()
    while parser.at("+"):
        parser.i += 1
        s = SPlus(s, parser.sumform())
    parser.end()
    return s


P = parse_process
