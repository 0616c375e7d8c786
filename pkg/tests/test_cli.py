from __future__ import annotations

import json

import pytest

from flatiter.cli import main
from flatiter.equivalences import bisimilar_lts
from flatiter.parallel import net_transitions, parse_net
from flatiter.semantics import build_lts
from flatiter.terms import P


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv,code", [
    (["check", "tau.0", "0", "--rel", "weak", "--mode", "equivalence"], 0),
    (["check", "tau.0", "0", "--rel", "weak", "--mode", "congruence"], 1),
    (["check", "0*X", "X", "--rel", "strong"], 0),
    (["check", "a.(", "0"], 2),
    (["check", "a.0"], 2),
    (["check", "a.0", "a.0", "--rel", "bogus"], 2),
])
def test_check_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_check_json_verdict(capsys):
    code, out, _ = run(capsys, "check", "a.0+a.0", "a.0", "--json")
    v = json.loads(out)
    assert code == 0
    assert v == {"command": "check", "inputs": ["a.0+a.0", "a.0"], "rel": "strong",
                 "mode": "congruence", "result": True}


def test_check_batch(capsys, tmp_path):
    f = tmp_path / "pairs.txt"
    f.write_text("# pairs\na.0+a.0 ; a.0\n\ntau.X ; tau.X+X\n")
    code, out, _ = run(capsys, "check", "--batch", str(f), "--rel", "delay")
    assert code == 0 and out.count("related") == 2
    code2, out2, _ = run(capsys, "check", "--batch", str(f), "--rel", "delay", "--jobs", "2")
    assert (code2, out2) == (code, out)
    f.write_text("a.0 ; b.0\n")
    assert run(capsys, "check", "--batch", str(f))[0] == 1
    f.write_text("a.0 b.0\n")
    assert run(capsys, "check", "--batch", str(f))[0] == 2


def test_term_from_file(capsys, tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("0*X\n")
    assert run(capsys, "check", f"@{f}", "X")[0] == 0
    assert run(capsys, "check", f"@{tmp_path / 'missing'}", "X")[0] == 2


def test_prove_verify_round_trip(capsys, tmp_path):
    cert = tmp_path / "bks1.cert"
    code, out, _ = run(capsys, "prove", "a.(a*X)+X", "a*X", "--out", str(cert))
    assert code == 0 and "certificate written" in out
    text = cert.read_text()
    assert "FA2" in text and "FA1" in text
    assert run(capsys, "verify", str(cert))[0] == 0


def test_prove_t2_in_delay(capsys, tmp_path):
    cert = tmp_path / "t2.cert"
    assert run(capsys, "prove", "tau.X", "tau.X+X", "--rel", "delay", "--out", str(cert))[0] == 0
    assert run(capsys, "verify", str(cert), "--rel", "delay")[0] == 0
    assert run(capsys, "verify", str(cert), "--rel", "strong")[0] == 1


def test_prove_failure_writes_nothing(capsys, tmp_path):
    cert = tmp_path / "none.cert"
    code, out, _ = run(capsys, "prove", "tau.0", "0", "--rel", "weak", "--out", str(cert))
    assert code == 1 and not cert.exists()
    assert out.startswith("not weak congruent")


def test_prove_to_stdout(capsys):
    code, out, _ = run(capsys, "prove", "0*X", "X")
    assert code == 0
    assert out.splitlines()[-1] == "claim |- 0*X = X"


def test_verify_errors(capsys, tmp_path):
    cert = tmp_path / "c.cert"
    cert.write_text("1 axiom FA1 proc l2r x:=X |- 0*X = X\nclaim |- 0*X = X\n")
    assert run(capsys, "verify", str(cert))[0] == 0
    cert.write_text("1 axiom FT2 proc l2r alpha:=a s:=0 x:=0 y:=0 |- "
                    "a.0*(tau.0*(0+0)+0) = a.0*(0+0)\nclaim |- a.0*(tau.0*(0+0)+0) = a.0*(0+0)\n")
    assert run(capsys, "verify", str(cert), "--rel", "strong")[0] == 1
    assert run(capsys, "verify", str(cert), "--rel", "branching")[0] == 0
    cert.write_text("1 axiom FA1 proc l2r x:=X |- 0*X = X\n")
    assert run(capsys, "verify", str(cert))[0] == 2
    assert run(capsys, "verify", str(tmp_path / "missing"))[0] == 2


def test_lts_output(capsys):
    assert run(capsys, "lts", "a*0")[1] == 'des (0,1,1)\n(0,"a",0)\n'
    assert run(capsys, "lts", "0")[1] == "des (0,0,1)\n"
    out = run(capsys, "lts", "0*X")[1]
    assert out.startswith("des (0,2,2)") and '"var:X"' in out


def test_lts_of_net(capsys):
    out = run(capsys, "lts", "a.0 | 'a.0")[1]
    assert '"tau"' in out


def test_normalize(capsys, tmp_path):
    code, out, _ = run(capsys, "normalize", "X", "--mode", "strong", "--proof")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "0*X"
    assert lines[1].startswith("1 axiom FA1 proc r2l")
    cert = tmp_path / "n.cert"
    assert run(capsys, "normalize", "(a+b).X", "--out", str(cert))[0] == 0
    assert run(capsys, "verify", str(cert))[0] == 0
    assert run(capsys, "normalize", "(a+b).(a+b).X", "--fuel", "1")[0] == 2


def test_saturate(capsys, tmp_path):
    cert = tmp_path / "s.cert"
    code, out, _ = run(capsys, "saturate", "a.0", "--rel", "weak", "--strong", "--out", str(cert))
    assert code == 0
    assert run(capsys, "verify", str(cert), "--rel", "weak")[0] == 0
    assert run(capsys, "saturate", "tau.a.0", "--rel", "delay")[0] == 0


def test_phi(capsys):
    assert run(capsys, "phi", "(a+tau+a)*0") == (0, "tau.a*0+a*0\n", "")
    code, out, _ = run(capsys, "phi", "(a+b)*0")
    assert code == 1 and out.strip() == "not a potential prefix-iteration expression"


def test_expand(capsys):
    code, out, _ = run(capsys, "expand", "a*0 | b*0")
    assert code == 0
    t = P(out.strip())
    net = parse_net("a*0 | b*0")
    assert bisimilar_lts(build_lts(net, net_transitions), 0, build_lts(t), 0, "strong")
    assert run(capsys, "expand", "a.X | 0")[0] == 2


def test_deterministic_output(capsys):
    first = run(capsys, "prove", "a.tau*tau.tau*b.tau*0+a.tau*b.tau*0", "a.tau*b.tau*0", "--rel", "eta")
    second = run(capsys, "prove", "a.tau*tau.tau*b.tau*0+a.tau*b.tau*0", "a.tau*b.tau*0", "--rel", "eta")
    assert first == second and first[0] == 0
