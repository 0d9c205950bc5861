"""Tests for the proof scripts and the trace checker"""

from dataclasses import replace

import pytest

from schanuel.engine import select_transcendence_basis
from schanuel.errors import (
    DegenerateWitnessError,
    ObligationError,
    TraceFormatError,
)
from schanuel.facts import (
    Provenance,
    StatementKind,
    algebraically_independent,
    linearly_disjoint,
    witness_relation,
)
from schanuel.rules import witness_problem
from schanuel.scripts import (
    default_witness,
    exponential_tower_independence,
    linear_disjointness,
    logarithmic_tower_independence,
    prove_corollary,
    replay_theorem,
)
from schanuel.terms import ONE, e, exp_tower, i_pi, log, mul, rational
from schanuel.trace import ProofTrace, check_trace


@pytest.fixture(name="cor4_trace")
def fixture_cor4_trace(settings):
    """Trace of the exponential tower corollary at depth 2"""
    return prove_corollary("cor4", 2, settings=settings)


@pytest.fixture(name="heuristic_trace")
def fixture_heuristic_trace(kb):
    """A conclusion resting on a numeric basis choice"""
    _, basis = select_transcendence_basis([e()], "identity", kb,
                                          mode="heuristic")
    fact = kb.derive("basis-independent",
                     algebraically_independent([e()], "Q"), [basis])
    return ProofTrace.from_fact(kb, fact, "basis")


def test_small_trace(small_trace):
    """Verify a one-step trace checks"""
    assert len(small_trace.steps) == 1
    assert check_trace(small_trace)


def test_trace_header(cor4_trace):
    """Verify the header records tool, axioms and result"""
    header = cor4_trace.header
    assert header["tool"] == "schanuel"
    assert header["version"] == "0.1.0"
    assert header["script"] == "cor4"
    assert "lang-4.12" in header["axioms"]
    assert "schanuel-conjecture" in header["axioms"]
    assert header["packs"] == ["core", "disjointness"]
    assert header["provenance"] == "ConditionalOnSC"
    assert len(header["timestamp"]) == len("20260412-101010123456")


def test_exponential_tower(kb):
    """Verify e, e^e, e^e^e are independent over Q"""
    fact = exponential_tower_independence(kb, 3)
    assert set(fact.statement.terms) == {exp_tower(k) for k in (1, 2, 3)}
    assert fact.provenance is Provenance.CONDITIONAL_ON_SC
    with pytest.raises(ValueError, match="positive"):
        exponential_tower_independence(kb, 0)


def test_logarithmic_tower(kb):
    """Verify the log tower of pi has the expected size"""
    fact = logarithmic_tower_independence(kb, 3)
    assert len(fact.statement.terms) == 4
    assert i_pi() in fact.statement.terms
    assert not fact.is_open
    with pytest.raises(ValueError, match="non-negative"):
        logarithmic_tower_independence(kb, -1)


@pytest.mark.parametrize("which, depth", [
    ("cor1", 1),
    ("cor1", 2),
    ("cor2", 1),
    ("cor2", 2),
    ("cor3", 1),
    ("cor3", 4),
    ("cor4", 1),
    ("cor4", 5),
])
def test_corollaries_check(which, depth, settings):
    """Verify every corollary trace replays"""
    trace = prove_corollary(which, depth, settings=settings)
    verdict = check_trace(trace)
    assert verdict.valid, verdict.describe()
    assert trace.provenance is Provenance.CONDITIONAL_ON_SC


def test_cor3_uses_monomial_reduction(settings):
    """Verify the log tower argument reduces a linear relation and records
    the sign of i*pi"""
    trace = prove_corollary("cor3", 2, settings=settings)
    rules = [step.rule for step in trace.steps]
    assert "reduce-linear-to-monomial" in rules
    notes = [step.conclusion.base for step in trace.steps
             if step.rule == "monomial-triviality"]
    assert any(note.startswith("q even") for note in notes)
    assert trace.result.kind is StatementKind.ALGEBRAICALLY_INDEPENDENT
    assert trace.result.base == "E:2"


def test_cor4_result(cor4_trace):
    """Verify cor4 concludes independence over L_d"""
    assert cor4_trace.result.base == "L:2"
    assert set(cor4_trace.result.terms) == {exp_tower(1), exp_tower(2)}


def test_theorem(settings):
    """Verify the disjointness theorem at (1, 1) replays"""
    trace = replay_theorem(1, 1, settings=settings)
    assert check_trace(trace)
    assert trace.result == linearly_disjoint(1, 1)
    rules = {step.rule for step in trace.steps}
    assert {"lang-4.12", "schanuel-conjecture", "witness-independence",
            "discharge-disjointness"} <= rules


def test_theorem_base_case_is_exact(kb):
    """Verify level 0 disjointness needs no conjecture"""
    assert linear_disjointness(kb, 0, 3).provenance is Provenance.EXACT
    with pytest.raises(ValueError, match="non-negative"):
        linear_disjointness(kb, -1, 1)


def test_default_witness():
    """Verify the witness schema"""
    l_terms, e_terms = default_witness(2, 1)
    assert l_terms == (ONE, i_pi())
    assert e_terms == (ONE, exp_tower(2))


@pytest.mark.parametrize("witness", [
    ((ONE, rational(2)), (ONE, e())),
    ((ONE,), (ONE, e())),
    ((rational(0),), (e(),)),
    ((e(),), (ONE,)),
])
def test_degenerate_witness(witness, settings):
    """Verify witnesses that cannot refute disjointness are rejected"""
    with pytest.raises(DegenerateWitnessError):
        replay_theorem(1, 1, witness=witness, settings=settings)


@pytest.fixture(name="dependent_logs")
def fixture_dependent_logs():
    """log 2 + log 3 - log 6 = 0, with e terms in E_1"""
    l_terms = (log(rational(2)), log(rational(3)), log(rational(6)))
    return l_terms, (ONE, e(), mul(e(), e()))


def test_q_dependent_witness_is_rejected(dependent_logs, settings):
    """Verify a confirmed Q-linear relation among the l terms is caught"""
    problem = witness_problem(*dependent_logs, 1, 1, settings)
    assert problem is not None
    assert "among the l terms" in problem
    with pytest.raises(DegenerateWitnessError, match="among the l terms"):
        replay_theorem(1, 1, witness=dependent_logs, settings=settings)


def test_witness_needs_qbar_independence(kb):
    """Verify the witness hypothesis requires independence of its l terms"""
    l_terms, e_terms = default_witness(1, 1)
    with pytest.raises(ObligationError, match="QbarLinearlyIndependent"):
        kb.derive("not-disjoint-hypothesis",
                  witness_relation(l_terms, e_terms, 1, 1))


def test_prove_corollary_errors():
    """Verify unknown names and depths"""
    with pytest.raises(ValueError, match="Unknown corollary"):
        prove_corollary("cor5")
    with pytest.raises(ValueError, match="positive"):
        prove_corollary("cor1", 0)


def test_scripts_are_idempotent(kb):
    """Verify re-running a corollary adds no facts"""
    first = prove_corollary("cor4", 2, kb=kb)
    size = len(kb)
    second = prove_corollary("cor4", 2, kb=kb)
    assert len(kb) == size
    assert first.steps == second.steps


def test_deleting_any_step_fails(cor4_trace):
    """Verify every step is needed"""
    for index in range(len(cor4_trace.steps)):
        steps = cor4_trace.steps[:index] + cor4_trace.steps[index + 1:]
        damaged = ProofTrace(cor4_trace.header, steps)
        assert not check_trace(damaged), index


def test_removing_a_premise_fails(cor4_trace):
    """Verify the final step needs both premises"""
    last = cor4_trace.steps[-1]
    assert len(last.premises) == 2
    for kept in last.premises:
        steps = cor4_trace.steps[:-1] + [replace(last, premises=(kept,))]
        verdict = check_trace(ProofTrace(cor4_trace.header, steps))
        assert not verdict.valid
        assert verdict.step is not None


def test_undeclared_axiom_fails(cor4_trace):
    """Verify the Lang axiom must be listed"""
    header = dict(cor4_trace.header)
    header["axioms"] = [a for a in header["axioms"] if a != "lang-4.12"]
    verdict = check_trace(ProofTrace(header, cor4_trace.steps))
    assert not verdict.valid
    assert "lang-4.12" in verdict.reason


def test_changed_anchor_fails(small_trace):
    """Verify anchors must match the registry"""
    step = replace(small_trace.steps[0], anchor="trust me")
    assert not check_trace(ProofTrace(small_trace.header, [step]))


def test_heuristic_provenance_propagates(heuristic_trace):
    """Verify a heuristic premise makes the conclusion heuristic"""
    assert heuristic_trace.provenance is Provenance.HEURISTIC_NUMERIC
    assert check_trace(heuristic_trace)


def test_upgraded_provenance_fails(heuristic_trace):
    """Verify a conclusion cannot claim more than its premises"""
    last = heuristic_trace.steps[-1]
    steps = heuristic_trace.steps[:-1] + [
        replace(last, provenance=Provenance.EXACT)]
    header = dict(heuristic_trace.header, provenance="Exact")
    verdict = check_trace(ProofTrace(header, steps))
    assert not verdict.valid
    assert verdict.step == last.id
    assert "provenance algebra" in verdict.reason


def test_open_assumption_fails(kb):
    """Verify a conclusion resting on a chosen basis is rejected"""
    _, fact = select_transcendence_basis([e()], "identity", kb,
                                         mode="existential")
    verdict = check_trace(ProofTrace.from_fact(kb, fact, "basis"))
    assert not verdict.valid
    assert "open assumptions" in verdict.reason


def test_jsonl_file(cor4_trace, tmp_path):
    """Verify a written trace reads back and checks"""
    path = cor4_trace.write(str(tmp_path / "traces" / "cor4.jsonl"))
    assert check_trace(path)
    again = ProofTrace.read(path)
    assert again.steps == cor4_trace.steps
    assert again.header["script"] == "cor4"


def test_malformed_trace(tmp_path):
    """Verify malformed files raise TraceFormatError"""
    path = tmp_path / "bad.jsonl"
    path.write_text('{"header": {}}\n{"id": 1}\n', encoding="utf-8")
    with pytest.raises(TraceFormatError, match="Line 2"):
        check_trace(str(path))
    with pytest.raises(TraceFormatError, match="empty"):
        ProofTrace.from_jsonl("")
