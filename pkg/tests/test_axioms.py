from __future__ import annotations

import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import rand_process, rand_sumform
from flatiter.axioms import (SCHEMES, AMeta, CertificateError, PMeta, ProofBuilder, ProofError,
                             apply_scheme, axiom_system, check_proof, format_certificate,
                             is_valid, parse_certificate, provable_sumform_eq, scheme,
                             single_axiom_proof, substitute_proof)
from flatiter.derive import fold
from flatiter.equivalences import congruent
from flatiter.terms import NIL, TAU, SAct, P, Var, init_actions, parse_sumform as S, term_size

KINDS = ["strong", "branching", "eta", "delay", "weak"]


def test_system_contents():
    assert len(axiom_system("strong").names) == 8
    strong = set(axiom_system("strong").names)
    assert set(axiom_system("branching").names) == strong | {"FT1", "FT2"}
    assert set(axiom_system("eta").names) == strong | {"FT1", "FT2", "T3", "FT3"}
    assert set(axiom_system("delay").names) == strong | {"T1", "FFIR"}
    assert set(axiom_system("weak").names) == set(axiom_system("delay").names) | {"T3", "FT3"}
    assert "A1s" in axiom_system("strong") and "FT1" not in axiom_system("strong")


def test_apply_scheme_examples():
    assert apply_scheme(P("0*Y"), scheme("FA1"), (), "l2r", {"x": Var("Y")}) == Var("Y")
    assert apply_scheme(P("0.b.0"), scheme("A6"), (), "l2r") == NIL
    assert apply_scheme(P("(a+tau)*0"), scheme("FT1"), (), "l2r") == P("tau.(a*0)+a*0")


def test_apply_scheme_errors():
    with pytest.raises(ValueError):
        apply_scheme(P("a.0"), scheme("FA1"), (), "l2r")
    with pytest.raises((ValueError, IndexError)):
        apply_scheme(P("a.0"), scheme("A4"), (0,), "l2r")


def test_single_fa1_proof_checks():
    pr = single_axiom_proof("FA1", "l2r", {"x": Var("X")})
    check_proof(pr, "strong")
    assert (pr.lhs, pr.rhs) == (P("0*X"), P("X"))


def _bks1():
    pb = ProofBuilder()
    return pb.proof(fold(pb, SAct("a"), Var("X")))


def test_bks1_certificate():
    pr = _bks1()
    assert (pr.lhs, pr.rhs) == (P("a.(a*X)+X"), P("a*X"))
    assert "FA2" in pr.cited()
    check_proof(pr, "strong")


def test_bks1_with_wrong_scheme_is_rejected():
    pr = _bks1()
    steps = [dataclasses.replace(s, scheme="FT2") if s.scheme == "FA2" else s for s in pr.steps]
    bad = dataclasses.replace(pr, steps=steps)
    with pytest.raises(ProofError):
        check_proof(bad, "strong")
    with pytest.raises(ProofError):
        check_proof(bad, "branching")


def test_foreign_axiom_rejected():
    pr = single_axiom_proof("T1", "l2r", {"alpha": SAct("a"), "x": NIL})
    assert is_valid(pr, "delay")
    assert not is_valid(pr, "strong")
    assert not is_valid(pr, "eta")


def test_tampered_equation_rejected():
    pr = single_axiom_proof("FA1", "l2r", {"x": Var("X")})
    st0 = pr.steps[0]
    bad = dataclasses.replace(pr, steps=[dataclasses.replace(st0, rhs=Var("Y"))], rhs=Var("Y"))
    with pytest.raises(ProofError):
        check_proof(bad, "strong")
    mismatch = dataclasses.replace(pr, rhs=Var("Y"))
    with pytest.raises(ProofError):
        check_proof(mismatch, "strong")


def test_provable_sumform_eq_examples():
    assert "A3s" in provable_sumform_eq(S("a+a"), S("a")).cited()
    assert "A4s" in provable_sumform_eq(S("a+0"), S("a")).cited()
    assert provable_sumform_eq(S("a"), S("b")) is None
    pr = provable_sumform_eq(S("(b+tau)+a+0+b"), S("a+(tau+b)"))
    check_proof(pr, "strong")
    assert pr.cited() <= {"A1s", "A2s", "A3s", "A4s"}


@given(st.integers(0, 10**6))
@settings(max_examples=80, deadline=None)
def test_provable_sumform_eq_iff_same_actions(seed):
    rng = random.Random(seed)
    s, t = rand_sumform(rng, ("a", "b", TAU), 7), rand_sumform(rng, ("a", "b", TAU), 7)
    pr = provable_sumform_eq(s, t)
    assert (pr is not None) == (init_actions(s) == init_actions(t))
    if pr is not None:
        check_proof(pr, "strong")


def random_instance(rng, sch, size=10):
    """A random instance of ``sch``; every assigned process has at most
    ``size`` nodes."""
    asg = {}
    for name, typ in sch.metavars.items():
        if typ is PMeta:
            asg[name] = rand_process(rng, rng.randint(1, size), acts=("a", "b", TAU))
        elif typ is AMeta:
            asg[name] = SAct(rng.choice(("a", "b", TAU)))
        else:
            asg[name] = rand_sumform(rng, ("a", "b", TAU), rng.choice((1, 1, 3)))
    return (asg, *sch.instance(asg))


@pytest.mark.parametrize("kind", KINDS)
def test_soundness_sample(kind):
    rng = random.Random(kind)
    for sch in axiom_system(kind).schemes:
        if sch.sort != "proc":
            continue
        for _ in range(25):
            _, lhs, rhs = random_instance(rng, sch)
            assert congruent(lhs, rhs, kind), (sch.key, str(lhs), str(rhs))


def test_checker_rewriter_coherence():
    rng = random.Random(5)
    for key, sch in SCHEMES.items():
        if sch.sort != "proc":
            continue
        for _ in range(10):
            asg, lhs, rhs = random_instance(rng, sch, 14)
            for direction in ("l2r", "r2l"):
                pr = single_axiom_proof(key, direction, asg)
                src = lhs if direction == "l2r" else rhs
                assert apply_scheme(src, sch, (), direction, asg) == pr.rhs
                assert pr.lhs == src


def test_substitution_preserves_validity():
    pr = _bks1()
    for sigma in ({"X": P("b.Y+0")}, {"X": P("(a+tau)*X")}, {"Y": P("0")}):
        sub = substitute_proof(pr, sigma)
        check_proof(sub, "strong")
    sub = substitute_proof(pr, {"X": P("tau.0")})
    assert (sub.lhs, sub.rhs) == (P("a.(a*tau.0)+tau.0"), P("a*tau.0"))


def test_certificate_round_trip():
    for pr in (_bks1(), provable_sumform_eq(S("a+b"), S("b+a")),
               single_axiom_proof("FT2", "l2r", {"alpha": SAct(TAU), "s": S("a"),
                                                 "x": NIL, "y": Var("X")})):
        text = format_certificate(pr)
        back = parse_certificate(text)
        assert back == pr
        assert format_certificate(back) == text


def test_certificate_shape():
    text = format_certificate(single_axiom_proof("FA1", "l2r", {"x": Var("X")}))
    assert text.splitlines() == ["1 axiom FA1 proc l2r x:=X |- 0*X = X", "claim |- 0*X = X"]


@pytest.mark.parametrize("text", [
    "",
    "1 axiom FA1 proc l2r x:=X |- 0*X = X\n",
    "1 axiom FA1 proc l2r x:=X 0*X = X\nclaim |- 0*X = X\n",
    "2 axiom FA1 proc l2r x:=X |- 0*X = X\nclaim |- 0*X = X\n",
    "1 axiom FA1 proc l2r x:=X |- 0*X = (X\nclaim |- 0*X = X\n",
    "claim |- 0*X = X\n1 axiom FA1 proc l2r x:=X |- 0*X = X\n",
])
def test_malformed_certificates(text):
    with pytest.raises(CertificateError):
        parse_certificate(text)
