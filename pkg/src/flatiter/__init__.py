"""Basic CCS with flat iteration: semantics, equivalence checking,
axiom systems with checkable proofs, and an equational prover."""

from .axioms import (Proof, ProofError, axiom_system, check_proof, format_certificate,
                     parse_certificate, provable_sumform_eq)
from .equivalences import (RelKind, bisimilar, congruent, is_potential_prefix, is_saturated,
                           is_strongly_saturated)
from .normalize import (head_normal_form, phi, phi_axioms, rewrite_R, saturate, strong_saturate,
                        to_normal_form)
from .parallel import Par, eliminate_parallel, net_transitions, parse_net
from .prover import NotCongruent, Proved, prove_congruent, prove_nf
from .semantics import build_lts, transitions
from .terms import P, format_term, parse_process, parse_sumform

__all__ = [
    "P", "Par", "Proof", "ProofError", "NotCongruent", "Proved", "RelKind", "axiom_system",
    "bisimilar", "build_lts", "check_proof", "congruent", "eliminate_parallel",
    "format_certificate", "format_term", "head_normal_form", "is_potential_prefix",
    "is_saturated", "is_strongly_saturated", "net_transitions", "parse_certificate",
    "parse_net", "parse_process", "parse_sumform", "phi", "phi_axioms", "provable_sumform_eq",
    "prove_congruent", "prove_nf", "rewrite_R", "saturate", "strong_saturate",
    "to_normal_form", "transitions",
]
