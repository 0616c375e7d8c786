from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

from gen import mutate, rand_process
from flatiter.axioms import SCHEMES, check_proof, is_valid, parse_certificate
from flatiter.equivalences import congruent
from flatiter.normalize import to_normal_form
from flatiter.prover import NotCongruent, Proved, prove_congruent, prove_nf
from flatiter.terms import P

FIXTURES = Path(__file__).parent / "fixtures"
KINDS = ["strong", "branching", "eta", "delay", "weak"]

sys.path.insert(0, str(FIXTURES))
from make_fixtures import instances  # noqa: E402


def test_fa1_is_one_step():
    out = prove_congruent(P("0*X"), P("X"), "strong")
    assert isinstance(out, Proved)
    assert len(out.proof.steps) == 1 and out.proof.cited() == {"FA1"}


def test_reflexivity():
    out = prove_congruent(P("a.X+b.0"), P("a.X+b.0"), "weak")
    assert [s.kind for s in out.proof.steps] == ["refl"]


@pytest.mark.parametrize("lhs,rhs,kind", [
    ("a*(a*X)", "a*X", "strong"),
    ("a.(a*X)+X", "a*X", "strong"),
    ("tau.X", "tau.X+X", "delay"),
    ("a.(tau.(X+Y)+X)", "a.(X+Y)", "branching"),
    ("tau.(tau.(X+Y)+X)", "tau.(X+Y)", "branching"),
    ("a.(b+tau)*X", "a.b*X", "branching"),
    ("a.(b+tau)*X", "a.b*X", "delay"),
    ("a.tau*tau.tau*b.tau*0+a.tau*b.tau*0", "a.tau*b.tau*0", "eta"),
])
def test_derived_laws(lhs, rhs, kind):
    out = prove_congruent(P(lhs), P(rhs), kind)
    assert out
    check_proof(out.proof, kind)
    assert (out.proof.lhs, out.proof.rhs) == (P(lhs), P(rhs))


def test_not_congruent_witness():
    out = prove_congruent(P("tau.0"), P("0"), "weak")
    assert isinstance(out, NotCongruent) and not out
    assert out.label == "tau"
    assert "tau" in out.describe()
    out = prove_congruent(P("a.0"), P("b.0"), "strong")
    assert not out


def test_prove_nf_reflexive():
    n, _ = to_normal_form(P("a.X"))
    pr = prove_nf(n, n)
    assert [s.kind for s in pr.steps] == ["refl"]


def test_prove_nf_duplicate_summand():
    p, q = P("0*(a.(0*0))"), P("0*(a.(0*0)+a.(0*0))")
    pr = prove_nf(p, q, "strong")
    assert "A3" in pr.cited()
    check_proof(pr, "strong")


def test_prove_nf_case_IIb_uses_ft2():
    p, _ = to_normal_form(P("tau.(a.0+b.0)"), "branching")
    q, _ = to_normal_form(P("a.0+b.0"), "branching")
    pr = prove_nf(p, q, "branching", gamma="a")
    assert "FT2" in pr.cited()
    assert (pr.lhs, pr.rhs) == (P(f"a.{p}"), P(f"a.{q}"))
    check_proof(pr, "branching")


def test_prove_nf_rejects_other_modes():
    with pytest.raises(ValueError):
        prove_nf(P("0*0"), P("0*0"), "weak")


@pytest.mark.parametrize("path", sorted(FIXTURES.glob("*.cert")), ids=lambda p: p.stem)
def test_fixture_certificates(path):
    wanted = {stem: (key, rel, asg) for stem, key, rel, asg in instances()}
    key, rel, asg = wanted[path.stem]
    pr = parse_certificate(path.read_text())
    assert (pr.lhs, pr.rhs) == SCHEMES[key].instance(asg)
    check_proof(pr, rel)
    assert key not in pr.cited()


def test_fixture_set_is_complete():
    assert len(list(FIXTURES.glob("*.cert"))) == 15


@pytest.mark.parametrize("kind", KINDS)
def test_completeness_sample(kind):
    rng = random.Random(kind)
    proved = 0
    for _ in range(40):
        p = rand_process(rng, rng.randint(1, 10), acts=("a", "b", "tau"))
        q = mutate(rng, p, kind) if rng.random() < 0.7 else rand_process(rng, rng.randint(1, 10))
        out = prove_congruent(p, q, kind)
        assert bool(out) == congruent(p, q, kind)
        if out:
            proved += 1
            assert is_valid(out.proof, kind)
    assert proved > 10
