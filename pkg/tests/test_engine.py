"""Tests for the independence engine"""

import itertools

import pytest

from schanuel.engine import (
    Certificate,
    CounterRelation,
    Unknown,
    algebraic_over_fact,
    assume_relation,
    check_q_linear_independence,
    derive_disjointness_rules,
    derive_monomial,
    monomial_triviality,
    nonzero_fact,
    prove_algebraic_independence,
    schanuel_apply,
    select_transcendence_basis,
    trdeg_bound,
)
from schanuel.errors import (
    CoverageError,
    MissingCertificateError,
    ObligationError,
    SchanuelError,
    UnknownStatusError,
)
from schanuel.facts import (
    Provenance,
    RelationKind,
    StatementKind,
    algebraic_over,
    algebraically_independent,
    q_linearly_independent,
    trdeg_at_least,
)
from schanuel.knowledge import KnowledgeBase
from schanuel.rules import RULES
from schanuel.scripts import logarithmic_tower_independence
from schanuel.syntax import parse
from schanuel.terms import ONE, alg, e, exp, i_pi, pi, power, rational


def _li_of_one(kb):
    return kb.derive("declared", q_linearly_independent([ONE]))


def test_schanuel_apply(kb):
    """Verify {1} independent gives trdeg Q(1, e) >= 1"""
    fact = schanuel_apply(kb, [ONE], _li_of_one(kb))
    assert fact.statement == trdeg_at_least([ONE, e()], 1)
    assert fact.provenance is Provenance.CONDITIONAL_ON_SC
    assert fact.rule == "schanuel-conjecture"


def test_schanuel_apply_needs_terms(kb):
    """Verify the empty set is rejected"""
    with pytest.raises(ValueError, match="nonempty"):
        schanuel_apply(kb, [], _li_of_one(kb))


def test_schanuel_apply_needs_matching_certificate(kb, settings):
    """Verify the certificate must match the set and the store"""
    li = _li_of_one(kb)
    with pytest.raises(MissingCertificateError):
        schanuel_apply(kb, [ONE, e()], li)
    with pytest.raises(MissingCertificateError):
        schanuel_apply(KnowledgeBase(settings), [ONE], li)


def test_nonzero_fact(kb):
    """Verify nonzero facts are certified and reused"""
    fact = nonzero_fact(kb, parse("exp(1) - 3"))
    assert fact is not None
    assert fact.provenance is Provenance.EXACT
    assert nonzero_fact(kb, parse("exp(1) - 3")) is fact
    assert nonzero_fact(kb, rational(0)) is None


def test_algebraic_over_fact(kb):
    """Verify syntactic generation and rational multiples"""
    fact = algebraic_over_fact(kb, power(e(), 2), [e()])
    assert fact.rule == "syntactic-generation"
    fact = algebraic_over_fact(kb, exp(rational(3)), [exp(rational(2))])
    assert fact.rule == "exp-rational-multiple"
    assert algebraic_over_fact(kb, exp(e()), [e()]) is None


def test_li_one_and_e(kb):
    """Verify {1, e} is certified conditionally"""
    result = check_q_linear_independence([ONE, e()], kb)
    assert isinstance(result, Certificate)
    assert result.fact.provenance is Provenance.CONDITIONAL_ON_SC
    assert result.fact.statement == q_linearly_independent([ONE, e()])


def test_li_counter_relation_for_logs(kb):
    """Verify log 2 + log 3 - log 6 = 0 is reported"""
    terms = [parse(f"log({a})") for a in (2, 3, 6)]
    result = check_q_linear_independence(terms, kb)
    assert isinstance(result, CounterRelation)
    coefficients = dict(zip(result.relation.terms,
                            result.relation.coefficients))
    assert coefficients == {terms[0]: 1, terms[1]: 1, terms[2]: -1}


@pytest.mark.parametrize("texts", [("0", "exp(1)"), ("1", "2")])
def test_li_exact_dependencies(kb, texts):
    """Verify zero elements and rational ratios are caught exactly"""
    result = check_q_linear_independence([parse(t) for t in texts], kb)
    assert isinstance(result, CounterRelation)


def test_li_by_lookup_after_log_tower(kb):
    """Verify the log tower set is certified from stored facts"""
    logarithmic_tower_independence(kb, 2)
    terms = [i_pi(), parse("log(pi)"), parse("log(log(pi))")]
    result = check_q_linear_independence(terms, kb)
    assert isinstance(result, Certificate)
    assert result.fact.provenance is Provenance.CONDITIONAL_ON_SC


def test_li_unknown(kb):
    """Verify pi and e are neither certified nor refuted"""
    result = check_q_linear_independence([pi(), e()], kb)
    assert isinstance(result, Unknown)
    assert result.reason


def test_li_rejects_empty(kb):
    """Verify the empty set is rejected"""
    with pytest.raises(ValueError, match="nonempty"):
        check_q_linear_independence([], kb)


def test_prove_algebraic_independence_of_e(kb):
    """Verify e is transcendental assuming the conjecture"""
    fact = prove_algebraic_independence(kb, [e()], 4)
    assert fact.statement == algebraically_independent([e()], "Q")
    assert fact.provenance is Provenance.CONDITIONAL_ON_SC
    assert prove_algebraic_independence(kb, [alg("sqrt2")], 4) is None


def test_trdeg_of_algebraic_set(kb):
    """Verify trdeg Q(sqrt 2, 1 + sqrt 2) is 0"""
    interval = trdeg_bound([alg("sqrt2"), parse("1 + alg(sqrt2)")], kb)
    assert (interval.lower, interval.upper) == (0, 0)
    assert interval.exact


def test_trdeg_of_e_and_e_squared(kb):
    """Verify trdeg Q(e, e^2) is 1 once trdeg Q(1, e) >= 1 is known"""
    schanuel_apply(kb, [ONE], _li_of_one(kb))
    interval = trdeg_bound([e(), power(e(), 2)], kb)
    assert (interval.lower, interval.upper) == (1, 1)
    assert interval.exact
    assert interval.facts[-1].rule == "trdeg-squeeze"


def test_trdeg_without_knowledge(kb):
    """Verify an unknown set gets the trivial lower bound"""
    interval = trdeg_bound([e(), pi()], kb)
    assert interval.lower == 0
    assert interval.upper == 2
    assert not interval.exact


def _closure(subset, pool, deps):
    current = set(subset)
    changed = True
    while changed:
        changed = False
        for x in pool:
            if x not in current and any(d <= current for d in deps.get(x, ())):
                current.add(x)
                changed = True
    return current


def test_trdeg_matches_brute_force(rng, settings):
    """Verify trdeg bounds against exhaustive search on closure systems"""
    atoms = [exp(rational(k)) for k in range(1, 9)]
    for _ in range(500):
        kb = KnowledgeBase(settings)
        pool = rng.sample(atoms, rng.randint(1, 8))
        deps = {}
        for x in pool:
            others = [y for y in pool if y is not x]
            if others and rng.random() < 0.4:
                over = frozenset(rng.sample(others,
                                            rng.randint(1, len(others))))
                deps.setdefault(x, []).append(over)
                kb.derive("declared", algebraic_over(x, over))
        brute = next(
            subset for size in range(len(pool) + 1)
            for subset in itertools.combinations(pool, size)
            if _closure(subset, pool, deps) == set(pool))
        interval = trdeg_bound(pool, kb)
        assert interval.upper == len(brute)
        kb.derive("declared", algebraically_independent(brute, "Q"))
        interval = trdeg_bound(pool, kb)
        assert interval.lower == interval.upper == len(brute)


def test_monomial_triviality(kb):
    """Verify a generic relation over {1} is trivial given e independent"""
    ai = prove_algebraic_independence(kb, [e()], 4)
    monomial = derive_monomial(kb, assume_relation(kb, [ONE]))
    assert monomial.statement.relation.kind is RelationKind.MONOMIAL
    trivial = monomial_triviality(kb, monomial, ai)
    assert trivial.statement.terms == (ONE,)
    assert trivial.is_open


def test_monomial_triviality_needs_coverage(kb):
    """Verify exp(e) is not a monomial in e"""
    ai = prove_algebraic_independence(kb, [e()], 4)
    monomial = derive_monomial(kb, assume_relation(kb, [e()]))
    with pytest.raises(CoverageError):
        monomial_triviality(kb, monomial, ai)


def test_select_basis_exp_image(kb):
    """Verify exp(1), exp(2), exp(e) reduce to a basis of two"""
    basis, fact = select_transcendence_basis(
        [ONE, rational(2), e()], "exp-image", kb)
    assert basis == (ONE, e())
    assert fact.provenance is Provenance.CONDITIONAL_ON_SC
    assert not fact.is_open


@pytest.mark.parametrize("term, expected", [
    (alg("sqrt2"), ()),
    (i_pi(), (i_pi(),)),
])
def test_select_basis_identity(kb, term, expected):
    """Verify the identity target on single elements"""
    basis, _ = select_transcendence_basis([term], "identity", kb)
    assert basis == expected


def test_select_basis_unknown_status(kb):
    """Verify certified mode refuses pi and e"""
    with pytest.raises(UnknownStatusError):
        select_transcendence_basis([pi(), e()], "identity", kb)


def test_select_basis_modes(kb):
    """Verify the existential and heuristic modes"""
    basis, fact = select_transcendence_basis([e()], "identity", kb,
                                             mode="existential")
    assert basis == (e(),)
    assert fact.is_open
    basis, fact = select_transcendence_basis([e()], "identity", kb,
                                             mode="heuristic")
    assert basis == (e(),)
    assert fact.provenance is Provenance.HEURISTIC_NUMERIC


def test_select_basis_rejects_arguments(kb):
    """Verify unknown targets and modes"""
    with pytest.raises(ValueError, match="Basis target"):
        select_transcendence_basis([e()], "image", kb)
    with pytest.raises(ValueError, match="Unknown basis selection mode"):
        select_transcendence_basis([e()], "identity", kb, mode="lucky")


def test_heuristic_weakens_conclusions(kb):
    """Verify a heuristic basis makes its consequences heuristic"""
    _, basis = select_transcendence_basis([e()], "identity", kb,
                                          mode="heuristic")
    fact = kb.derive("basis-independent",
                     algebraically_independent([e()], "Q"), [basis])
    assert fact.provenance is Provenance.HEURISTIC_NUMERIC


def test_disjointness_pack(kb):
    """Verify the disjointness rules are enabled on request"""
    with pytest.raises(ObligationError, match="not enabled"):
        kb.derive("tower-exclusion", q_linearly_independent([ONE]))
    names = derive_disjointness_rules(kb)
    assert "lang-4.12" in names
    assert "tower-exclusion" in names


def test_obligation_error(kb):
    """Verify a rule refuses an unjustified step"""
    with pytest.raises(ObligationError):
        kb.derive("schanuel-conjecture", trdeg_at_least([ONE, e()], 1))


def test_facts_are_sound_and_monotone(kb):
    """Verify provenance floors and premises across a workload"""
    check_q_linear_independence([ONE, e()], kb)
    snapshot = list(kb.facts)
    check_q_linear_independence([parse(f"log({a})") for a in (2, 3, 6)], kb)
    logarithmic_tower_independence(kb, 2)
    select_transcendence_basis([ONE, rational(2), e()], "exp-image", kb)
    select_transcendence_basis([e()], "identity", kb, mode="heuristic")
    assert kb.facts[:len(snapshot)] == snapshot
    for fact in kb.facts:
        premises = [kb.get(p) for p in fact.premises]
        assert all(p.id < fact.id for p in premises)
        assert fact.provenance >= RULES[fact.rule].floor
        assert all(fact.provenance >= p.provenance for p in premises)


_FUZZ_ATOMS = (ONE, e(), exp(rational(2)), exp(e()), i_pi())
_FUZZ_TRANSCENDENTAL = (e(), exp(rational(2)), exp(e()))


def _fuzz_step(kb, rng):
    pick = rng.randrange(5)
    if pick == 0:
        chosen = rng.sample(_FUZZ_ATOMS, rng.randint(1, 3))
        kb.derive("declared", q_linearly_independent(chosen))
    elif pick == 1:
        known = kb.of_kind(StatementKind.Q_LINEARLY_INDEPENDENT)
        if known:
            li = rng.choice(known)
            schanuel_apply(kb, li.statement.terms, li)
    elif pick == 2:
        term = rng.choice(_FUZZ_TRANSCENDENTAL)
        basis, fact = select_transcendence_basis([term], "identity", kb,
                                                 mode="heuristic")
        if basis:
            kb.derive("basis-independent",
                      algebraically_independent(basis, "Q"), [fact])
    elif pick == 3:
        trdeg_bound(rng.sample(_FUZZ_ATOMS, rng.randint(1, 4)), kb)
    else:
        derived = [f for f in kb.facts if f.premises]
        if not derived:
            return
        target = rng.choice(derived)
        swapped = []
        for premise in target.premises:
            kind = kb.get(premise).statement.kind
            swapped.append(rng.choice([f for f in kb.facts
                                       if f.statement.kind is kind]))
        try:
            kb.derive(target.rule, target.statement, swapped)
        except SchanuelError:
            pass


def test_no_exact_fact_rests_on_heuristics(rng, settings):
    """Verify random derivation sequences never upgrade heuristic premises"""
    for _ in range(1000):
        kb = KnowledgeBase(settings)
        for _ in range(rng.randint(3, 6)):
            _fuzz_step(kb, rng)
        for fact in kb.facts:
            if fact.provenance is Provenance.HEURISTIC_NUMERIC:
                continue
            assert all(kb.get(p).provenance
                       is not Provenance.HEURISTIC_NUMERIC
                       for p in fact.premises), fact


def test_derivation_is_idempotent(kb):
    """Verify repeating a run adds no facts"""
    check_q_linear_independence([ONE, e()], kb)
    size = len(kb)
    check_q_linear_independence([ONE, e()], kb)
    assert len(kb) == size
