from __future__ import annotations

import random

import pytest

from gen import rand_process
from flatiter.equivalences import bisimilar, bisimilar_lts, is_potential_prefix
from flatiter.normalize import _leaves, to_normal_form
from flatiter.parallel import (Par, complement, eliminate_parallel, expand_pair, format_net,
                               gamma, net_transitions, parse_net)
from flatiter.semantics import build_lts, transitions
from flatiter.terms import NIL, TAU, ParseError, P, free_vars, parse_sumform as S

COACTS = ("a", "'a", "b", TAU)


def test_complement_is_an_involution():
    assert complement("a") == "'a"
    assert complement(complement("b")) == "b"
    with pytest.raises(ValueError):
        complement(TAU)


def test_net_transitions_examples():
    n = parse_net("a.0 | 'a.0")
    assert (TAU, Par(NIL, NIL)) in net_transitions(n)
    n = parse_net("a*0 | b*0")
    assert net_transitions(n) == {("a", n), ("b", n)}
    assert net_transitions(parse_net("0 | 0")) == frozenset()


def test_parse_and_format_net():
    n = parse_net("a.0 | (b.0 | 'b.0)")
    assert isinstance(n, Par) and isinstance(n.right, Par)
    assert parse_net(format_net(n)) == n
    assert format_net(parse_net("a.0|b.0|c.0")) == "a.0|b.0|c.0"
    with pytest.raises(ParseError):
        parse_net("a.X | b.0")


def test_gamma_complement_reading():
    assert gamma(S("a"), S("'a"))
    assert gamma(S("b+'a"), S("a"))
    assert not gamma(S("a"), S("a"))
    assert not gamma(S("tau"), S("tau"))


def test_expand_pair_without_synchronization():
    e = expand_pair(P("a*0"), P("b*0"))
    assert e.sf == S("a+b") and e.body == NIL


def test_expand_pair_collects_synchronizations():
    p, q = P("0*(a.(0*0))"), P("0*('a.(0*0))")
    e = expand_pair(p, q)
    assert P("tau.(0*0)").sf in [l.sf for l in _leaves(e.body)]
    assert Par(P("0*0"), P("0*0")) in [l.body for l in _leaves(e.body)]


def test_expand_pair_rejects_bad_shape():
    with pytest.raises(ValueError):
        expand_pair(P("a.0"), P("b*0"))
    with pytest.raises(ValueError):
        expand_pair(P("0*X"), P("b*0"))


def _agrees(net):
    t = eliminate_parallel(net)
    assert not any(isinstance(x, Par) for x in _nodes(t))
    return bisimilar_lts(build_lts(net, net_transitions), 0, build_lts(t), 0, "strong")


def _nodes(t):
    yield t
    for f in getattr(t, "__match_args__", ()):
        c = getattr(t, f)
        if hasattr(c, "__match_args__"):
            yield from _nodes(c)


@pytest.mark.parametrize("text", ["a*0 | b*0", "a.0 | 'a.0", "a*0 | 'a*0",
                                  "a.b.0 | 'b.0 | 'a.0", "(a+'a)*0 | a.0"])
def test_elimination_examples(text):
    assert _agrees(parse_net(text))


def test_leaf_elimination_is_normal_form():
    p = P("a.b.0+tau.0")
    assert eliminate_parallel(p) == to_normal_form(p, "strong")[0]


def test_first_moves_of_synchronizing_pair():
    t = eliminate_parallel(parse_net("a.0 | 'a.0"))
    assert {a for a, _ in transitions(t)} == {"a", "'a", TAU}


def test_elimination_random():
    rng = random.Random(4)
    for _ in range(30):
        p = rand_process(rng, rng.randint(1, 8), acts=COACTS, vars=())
        q = rand_process(rng, rng.randint(1, 8), acts=COACTS, vars=())
        assert not free_vars(p) and not free_vars(q)
        assert _agrees(Par(p, q))
        assert bisimilar(eliminate_parallel(Par(p, q)), eliminate_parallel(Par(q, p)), "strong")


def test_interleaving_is_not_a_potential_prefix():
    assert not is_potential_prefix(build_lts(parse_net("a*0 | b*0"), net_transitions))
