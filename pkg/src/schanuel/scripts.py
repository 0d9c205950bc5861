"""Replayable proof scripts: the disjointness theorem and its corollaries.

Each script derives its conclusion in a KnowledgeBase and returns the
ProofTrace of that conclusion. Scripts are idempotent: re-running one on the
same knowledge base adds no facts.
"""

import logging
from typing import Optional, Sequence, Tuple

from .config import Settings
from .engine import (
    derive_disjointness_rules,
    nonzero_fact,
    schanuel_apply,
    squeeze_independent,
)
from .errors import DegenerateWitnessError
from .facts import (
    Fact,
    RelationKind,
    RelationVector,
    algebraic_over,
    algebraically_independent,
    all_of,
    contradiction,
    disjoint_fields,
    exp_image,
    free_fields,
    intersection_is_qbar,
    linearly_disjoint,
    member_e,
    member_l,
    member_qbar,
    not_member_e,
    not_member_l,
    not_member_qbar,
    q_linearly_independent,
    qbar_linearly_independent,
    relation_holds,
    relation_trivial,
    residue_algebraic,
    support,
    transcendence_basis,
    trdeg_at_least,
    trdeg_same,
    witness_relation,
)
from .knowledge import KnowledgeBase
from .rules import (
    existential_basis,
    image_of,
    monomial_rows,
    ratio,
    witness_problem,
)
from .support import exp_support, log_support
from .terms import (
    ONE,
    Term,
    alg,
    e,
    exp_tower,
    generated_by,
    i_pi,
    is_algebraic,
    log_tower,
    normalize,
    pi,
    sorted_terms,
    to_text,
)
from .trace import ProofTrace

logger = logging.getLogger(__name__)

SCRIPT_NAMES = ("theorem", "cor1", "cor2", "cor3", "cor4")


def _set(terms) -> tuple:
    return tuple(sorted_terms({normalize(t) for t in terms}))


def default_witness(m: int, n: int) -> Tuple[tuple, tuple]:
    """The witness schema l = (1, lambda_n), e = (1, exp^[m](1)).

    lambda_1 is i*pi and lambda_n is log_[n-1] pi, an element of L_n.
    """
    top = i_pi() if n == 1 else log_tower(n - 1)
    return (ONE, normalize(top)), (ONE, normalize(exp_tower(m)))


def _new_kb(kb: Optional[KnowledgeBase], settings: Optional[Settings]
            ) -> KnowledgeBase:
    if kb is not None:
        return kb
    return KnowledgeBase(settings)


# --------------------------------------------------------- the theorem

class _TheoremReplay:
    """One refutation of a witness against E_m and L_n."""
    def __init__(self, kb: KnowledgeBase, m: int, n: int, previous: Fact,
                 l_terms: Sequence[Term], e_terms: Sequence[Term]):
        self.kb = kb
        self.m = m
        self.n = n
        self.previous = previous
        self.l_terms = tuple(normalize(t) for t in l_terms)
        self.e_terms = tuple(normalize(t) for t in e_terms)

    def supports(self):
        """Exp supports of the e terms, log supports of the l terms.

        Returns (A, C, generation facts).
        """
        kb = self.kb
        pool_a, pool_c, generation = set(), set(), []
        for x in self.e_terms:
            if is_algebraic(x):
                continue
            found = exp_support(x)
            fact = kb.derive("support-exp", support(found))
            pool_a.update(found.elements)
            generators = exp_image(found.elements)
            for y in _set([x, *found.elements]):
                generation.append(kb.derive(
                    "support-generation", algebraic_over(y, generators),
                    [fact]))
        for x in self.l_terms:
            if is_algebraic(x):
                continue
            found = log_support(x)
            fact = kb.derive("support-log", support(found))
            pool_c.update(found.elements)
            for y in _set([x, *exp_image(found.elements)]):
                generation.append(kb.derive(
                    "support-generation", algebraic_over(y, found.elements),
                    [fact]))
        logger.debug("Supports: |A| = %d, |C| = %d", len(pool_a), len(pool_c))
        return _set(pool_a), _set(pool_c), generation

    def basis(self, pool: tuple, target: str):
        """Choose a basis; returns (basis, independence fact, span facts)."""
        kb = self.kb
        chosen = existential_basis(pool, target)
        choice = kb.derive("basis-choice",
                           transcendence_basis(chosen, pool, target))
        images = _set(image_of(b, target) for b in chosen)
        spans = [kb.derive("basis-spans",
                           algebraic_over(image_of(a, target), images),
                           [choice])
                 for a in pool if image_of(a, target) not in images]
        independent = kb.derive("basis-independent",
                                algebraically_independent(images, "Q"),
                                [choice]) if images else None
        return chosen, independent, spans

    def independence_of_union(self, b_set, d_set, ai_b, ai_d, meet) -> Fact:
        """B and D together are Q-linearly independent.

        A relation splits as (part on D) = -(part on B); the left side is in
        L_n, the right in E_{m-1}, so both are algebraic. Independence of D
        kills the D part, and the exponentiated B part is a trivial monomial
        in the independent exp(B).
        """
        kb = self.kb
        whole = _set([*b_set, *d_set])
        holds = kb.derive("generic-relation",
                          relation_holds(RelationVector.generic(whole)))
        trivials = []
        current = holds
        if d_set:
            residue = kb.derive("linear-residue",
                                residue_algebraic(holds.statement.relation,
                                                  d_set), [holds, meet])
            killed = kb.derive("ai-kills-linear",
                               relation_trivial(holds.statement.relation,
                                                d_set), [residue, ai_d])
            trivials.append(killed)
            if b_set:
                current = kb.derive(
                    "restrict-relation",
                    relation_holds(holds.statement.relation.restricted(
                        b_set)), [holds, killed])
        if b_set:
            relation = current.statement.relation.as_kind(
                RelationKind.MONOMIAL)
            mono = kb.derive("reduce-linear-to-monomial",
                             relation_holds(relation), [current])
            covered, note = monomial_rows(relation, ai_b.statement.terms)
            trivials.append(kb.derive(
                "monomial-triviality", relation_trivial(relation, covered,
                                                        note), [mono, ai_b]))
        return kb.derive("li-from-trivial-relation",
                         q_linearly_independent(whole), trivials)

    def run(self) -> Fact:
        kb = self.kb
        m, n = self.m, self.n
        problem = witness_problem(self.l_terms, self.e_terms, m, n,
                                  kb.settings)
        if problem is not None:
            raise DegenerateWitnessError(problem)
        derive_disjointness_rules(kb)
        independent_l = kb.derive("witness-independence",
                                  qbar_linearly_independent(self.l_terms))
        hypothesis = kb.derive("not-disjoint-hypothesis", witness_relation(
            self.l_terms, self.e_terms, m, n), [independent_l])

        pool_a, pool_c, generation = self.supports()
        b_set, ai_b, spans_b = self.basis(pool_a, "exp-image")
        d_set, ai_d, spans_d = self.basis(pool_c, "identity")
        if not b_set and not d_set:
            raise DegenerateWitnessError(
                "Witness terms are all algebraic; nothing to refute")
        meet = kb.derive("disjoint-intersection",
                         intersection_is_qbar(m - 1, n), [self.previous])
        li = self.independence_of_union(b_set, d_set, ai_b, ai_d, meet)
        whole = li.statement.terms
        low = schanuel_apply(kb, whole, li)
        count = len(whole)

        # trdeg Q(B, D, exp B, exp D) = trdeg Q(B, C, exp A, exp D)
        #   = trdeg Q(C, exp A) = trdeg Q(D, exp B)
        exp_a, exp_b, exp_d = (exp_image(pool_a), exp_image(b_set),
                               exp_image(d_set))
        chain = [
            _set([*b_set, *pool_c, *exp_a, *exp_d]),
            _set([*pool_c, *exp_a]),
            _set([*d_set, *exp_b]),
        ]
        dependencies = [*generation, *spans_b, *spans_d]
        for target in chain:
            same = kb.derive("trdeg-same",
                             trdeg_same(low.statement.terms, target),
                             dependencies)
            low = kb.derive("trdeg-transport", trdeg_at_least(target, count),
                            [low, same])
        independent = squeeze_independent(kb, low, chain[-1], [])
        over_qbar = kb.derive(
            "ai-base-change",
            algebraically_independent(independent.statement.terms, "Qbar"),
            [independent])
        free = kb.derive("ai-union-free", free_fields(exp_b, d_set),
                         [over_qbar])
        disjoint = kb.derive("lang-4.12", disjoint_fields(exp_b, d_set),
                             [free])

        located = []
        for terms, side, facts in ((self.e_terms, exp_b,
                                    [*generation, *spans_b]),
                                   (self.l_terms, d_set,
                                    [*generation, *spans_d])):
            for x in terms:
                if generated_by(x, side):
                    continue
                located.append(kb.derive("algebraic-transitive",
                                         algebraic_over(x, side), facts))
        absurd = kb.derive("witness-contradiction", contradiction(m, n),
                           [hypothesis, disjoint, *located])
        result = kb.derive("discharge-disjointness", linearly_disjoint(m, n),
                           [absurd, self.previous])
        logger.info("Theorem (%d, %d): witness %s refuted, |B| = %d, "
                    "|D| = %d", m, n,
                    " + ".join(f"{to_text(a)} * {to_text(b)}"
                               for a, b in zip(self.l_terms, self.e_terms)),
                    len(b_set), len(d_set))
        return result


def linear_disjointness(kb: KnowledgeBase, m: int, n: int,
                        witness: Optional[tuple] = None) -> Fact:
    """LinearlyDisjoint(m, n), by induction on m.

    Parameters
    ----------
    kb: KnowledgeBase
        Store for the derivation; earlier levels are reused.
    m: int
        E-level.
    n: int
        L-level.
    witness: tuple (default=None)
        (l terms, e terms) refuted at level m; the default schema otherwise.

    Returns
    -------
    The ConditionalOnSC fact, or the Exact base case when m or n is 0.
    """
    if m < 0 or n < 0:
        raise ValueError(f"Levels must be non-negative, input: ({m}, {n})")
    if m == 0 or n == 0:
        return kb.derive("disjointness-base", linearly_disjoint(m, n))
    known = kb.find(linearly_disjoint(m, n))
    if known is not None and witness is None:
        return known
    previous = linear_disjointness(kb, m - 1, n)
    l_terms, e_terms = witness or default_witness(m, n)
    return _TheoremReplay(kb, m, n, previous, l_terms, e_terms).run()


def replay_theorem(m: int, n: int, witness: Optional[tuple] = None,
                   kb: Optional[KnowledgeBase] = None,
                   settings: Optional[Settings] = None) -> ProofTrace:
    """Trace of LinearlyDisjoint(m, n).

    Parameters
    ----------
    m: int
        E-level of the refuted witness.
    n: int
        L-level of the refuted witness.
    witness: tuple (default=None)
        (l terms, e terms) with l in L_n independent over Qbar and e in E_m.
    kb: KnowledgeBase (default=None)
        Store to extend; a fresh one otherwise.
    settings: Settings (default=None)
        Settings of a fresh store.

    Returns
    -------
    The ProofTrace ending in LinearlyDisjoint(m, n).
    """
    kb = _new_kb(kb, settings)
    fact = linear_disjointness(kb, m, n, witness)
    return ProofTrace.from_fact(kb, fact, "theorem")


# ----------------------------------------------------------- corollaries

def exponential_tower_independence(kb: KnowledgeBase, depth: int) -> Fact:
    """AI({e, e^e, ..., exp^[depth](1)}) over Q."""
    if depth < 1:
        raise ValueError(f"Depth must be a positive integer, input: {depth}")
    one = nonzero_fact(kb, ONE)
    li = kb.derive("nonzero-singleton", q_linearly_independent([ONE]), [one])
    tower = [exp_tower(1)]
    independent = squeeze_independent(
        kb, schanuel_apply(kb, [ONE], li), tower, [])
    logger.info("Exponential tower: e is transcendental")
    for k in range(2, depth + 1):
        arguments = [ONE, *tower]
        li = kb.derive("ai-implies-li", q_linearly_independent(arguments),
                       [independent, one])
        tower.append(exp_tower(k))
        independent = squeeze_independent(
            kb, schanuel_apply(kb, arguments, li), tower, [])
        logger.info("Exponential tower: e, ..., exp^[%d](1) algebraically "
                    "independent", k)
    return independent


def logarithmic_tower_independence(kb: KnowledgeBase, depth: int) -> Fact:
    """AI({i*pi, log pi, ..., log_[depth] pi}) over Q.

    Each round assumes a relation q i*pi + sum q_k log_[k] pi = 0; its
    exponential (-1)^q prod (log_[k-1] pi)^q_k = 1 is a monomial in the
    previous round's independent set, so every q_k vanishes and i*pi alone
    is independent. Schanuel's Conjecture then lifts the new set.
    """
    if depth < 0:
        raise ValueError(f"Depth must be non-negative, input: {depth}")
    base = normalize(i_pi())
    cert = nonzero_fact(kb, base)
    base_li = kb.derive("nonzero-singleton", q_linearly_independent([base]),
                        [cert])
    members = [base]
    independent = squeeze_independent(
        kb, schanuel_apply(kb, members, base_li), members, [])
    logger.info("Logarithmic tower: i*pi is transcendental")
    for k in range(1, depth + 1):
        members = [*members, normalize(log_tower(k))]
        holds = kb.derive("generic-relation",
                          relation_holds(RelationVector.generic(members)))
        relation = holds.statement.relation.as_kind(RelationKind.MONOMIAL)
        mono = kb.derive("reduce-linear-to-monomial", relation_holds(relation),
                         [holds])
        covered, note = monomial_rows(relation, independent.statement.terms)
        trivial = kb.derive("monomial-triviality",
                            relation_trivial(relation, covered, note),
                            [mono, independent])
        li = kb.derive("li-from-trivial-relation",
                       q_linearly_independent(members), [trivial, base_li])
        low = schanuel_apply(kb, members, li)
        independent = squeeze_independent(kb, low, members, [])
        logger.info("Logarithmic tower: i*pi, ..., log_[%d] pi algebraically "
                    "independent", k)
    return independent


def _over_tower(kb: KnowledgeBase, independent: Fact, disjoint: Fact,
                base: str) -> Fact:
    over_qbar = kb.derive(
        "ai-base-change",
        algebraically_independent(independent.statement.terms, "Qbar"),
        [independent])
    return kb.derive("freeness-transfer",
                     algebraically_independent(independent.statement.terms,
                                               base), [disjoint, over_qbar])


def corollary_one(kb: KnowledgeBase, depth: int) -> Fact:
    """E_d meet L_d is Qbar, shown on sqrt(2)."""
    derive_disjointness_rules(kb)
    disjoint = linear_disjointness(kb, depth, depth)
    meet = kb.derive("disjoint-intersection",
                     intersection_is_qbar(depth, depth), [disjoint])
    root = alg("sqrt2")
    in_e = kb.derive("e-level", member_e(root, depth))
    in_l = kb.derive("l-level", member_l(root, depth))
    algebraic = kb.derive("disjoint-meet", member_qbar(root),
                          [disjoint, in_e, in_l])
    return kb.derive("conjunction", all_of(meet.statement,
                                           algebraic.statement),
                     [meet, algebraic])


def corollary_two(kb: KnowledgeBase, depth: int) -> Fact:
    """pi is not in E_d and e is not in L_d."""
    derive_disjointness_rules(kb)
    i_pi_term = normalize(i_pi())
    pi_term = normalize(pi())
    e_term = normalize(e())

    log_ai = logarithmic_tower_independence(kb, 0)
    outside = kb.derive("transcendental", not_member_qbar(i_pi_term),
                        [log_ai])
    in_l = kb.derive("l-level", member_l(i_pi_term, 1))
    meet = kb.derive("disjoint-intersection", intersection_is_qbar(depth, 1),
                     [linear_disjointness(kb, depth, 1)])
    excluded = kb.derive("tower-exclusion", not_member_e(i_pi_term, depth),
                         [outside, in_l, meet])
    factor = nonzero_fact(kb, ratio(pi_term, i_pi_term))
    pi_excluded = kb.derive("algebraic-multiple-exclusion",
                            not_member_e(pi_term, depth), [excluded, factor])
    logger.info("pi is not in E_%d", depth)

    exp_ai = exponential_tower_independence(kb, 1)
    outside = kb.derive("transcendental", not_member_qbar(e_term), [exp_ai])
    in_e = kb.derive("e-level", member_e(e_term, 1))
    meet = kb.derive("disjoint-intersection", intersection_is_qbar(1, depth),
                     [linear_disjointness(kb, 1, depth)])
    e_excluded = kb.derive("tower-exclusion", not_member_l(e_term, depth),
                           [outside, in_e, meet])
    logger.info("e is not in L_%d", depth)
    return kb.derive("conjunction", all_of(pi_excluded.statement,
                                           e_excluded.statement),
                     [pi_excluded, e_excluded])


def corollary_three(kb: KnowledgeBase, depth: int) -> Fact:
    """i*pi, log pi, ..., log_[d] pi are algebraically independent over E_d."""
    derive_disjointness_rules(kb)
    independent = logarithmic_tower_independence(kb, depth)
    disjoint = linear_disjointness(kb, depth, depth + 1)
    return _over_tower(kb, independent, disjoint, f"E:{depth}")


def corollary_four(kb: KnowledgeBase, depth: int) -> Fact:
    """e, ..., exp^[d](1) are algebraically independent over L_d."""
    derive_disjointness_rules(kb)
    independent = exponential_tower_independence(kb, depth)
    disjoint = linear_disjointness(kb, depth, depth)
    return _over_tower(kb, independent, disjoint, f"L:{depth}")


_COROLLARIES = {
    "cor1": corollary_one,
    "cor2": corollary_two,
    "cor3": corollary_three,
    "cor4": corollary_four,
}


def prove_corollary(which: str, depth: Optional[int] = None,
                    kb: Optional[KnowledgeBase] = None,
                    settings: Optional[Settings] = None) -> ProofTrace:
    """Trace of one corollary.

    Parameters
    ----------
    which: str
        "cor1", "cor2", "cor3" or "cor4".
    depth: int (default=None)
        Tower depth, at least 1; 1 when None.
    kb: KnowledgeBase (default=None)
        Store to extend; a fresh one otherwise.
    settings: Settings (default=None)
        Settings of a fresh store.

    Returns
    -------
    The ProofTrace of the corollary's conclusion.
    """
    script = _COROLLARIES.get(which)
    if script is None:
        raise ValueError(f"Unknown corollary: {which}, expected one of "
                         f"{', '.join(_COROLLARIES)}")
    depth = 1 if depth is None else depth
    if depth < 1:
        raise ValueError(f"Depth must be a positive integer, input: {depth}")
    kb = _new_kb(kb, settings)
    fact = script(kb, depth)
    logger.info("%s at depth %d: %s [%s]", which, depth,
                fact.statement.describe(), fact.provenance.label)
    return ProofTrace.from_fact(kb, fact, which)
