"""Independence engine: conditional certificates from Schanuel's Conjecture.

Every conclusion is stored in a KnowledgeBase through a registered rule, so
the certificates produced here replay under the trace checker.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .errors import (
    CoverageError,
    InsufficientPrecisionError,
    MissingCertificateError,
    PrecisionEscalationError,
    UnknownStatusError,
)
from .facts import (
    Fact,
    RelationKind,
    RelationVector,
    StatementKind,
    algebraic_over,
    algebraically_independent,
    min_spanning_set,
    nonzero,
    q_linearly_independent,
    qbar_linearly_independent,
    relation_holds,
    relation_trivial,
    span,
    transcendence_basis,
    trdeg_at_least,
    trdeg_at_most,
    trdeg_equals,
)
from .knowledge import KnowledgeBase
from .numeric import certify_nonzero
from .relations import (
    falsify_linear_independence,
    probe_algebraic_independence,
    required_precision,
)
from .rules import (
    CLASSICAL_BASES,
    TARGETS,
    dependencies,
    existential_basis,
    factor_over,
    image_of,
    monomial_rows,
    ratio,
)
from .terms import (
    NodeKind,
    Term,
    exp,
    generated_by,
    is_algebraic,
    is_rational,
    linear_decomposition,
    mul,
    normalize,
    sorted_terms,
    to_text,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Certificate:
    fact: Fact


@dataclass(frozen=True)
class CounterRelation:
    relation: RelationVector


@dataclass(frozen=True)
class Unknown:
    reason: str


@dataclass(frozen=True)
class TrdegInterval:
    """Bounds lower <= trdeg <= upper, with the facts that prove them."""
    lower: int
    upper: int
    facts: Tuple[Fact, ...]

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def _term_set(terms) -> tuple:
    return tuple(sorted_terms(normalize(t) for t in terms))


# ------------------------------------------------------------ small facts

def nonzero_fact(kb: KnowledgeBase, x: Term) -> Optional[Fact]:
    """Exact Nonzero fact from an enclosure, or None."""
    x = normalize(x)
    known = kb.find(nonzero(x))
    if known is not None:
        return known
    certificate = certify_nonzero(x, kb.settings)
    if certificate is None:
        return None
    return kb.derive("ball-nonzero", nonzero(x, certificate.precision))


def algebraic_over_fact(kb: KnowledgeBase, y: Term, generators
                        ) -> Optional[Fact]:
    """Certify y algebraic over Q(generators), or None.

    Tries syntactic generation, rational multiples of exponents, then
    chains of known AlgebraicOver facts.
    """
    y = normalize(y)
    generators = _term_set(generators)
    if generated_by(y, generators):
        return kb.derive("syntactic-generation",
                         algebraic_over(y, generators))
    if y.kind is NodeKind.EXP and linear_decomposition(
            y.argument, [g.argument for g in generators
                         if g.kind is NodeKind.EXP]) is not None:
        return kb.derive("exp-rational-multiple",
                         algebraic_over(y, generators))
    known = kb.find(algebraic_over(y, generators))
    if known is not None:
        return known
    deps = kb.dependencies()
    pool = {y, *deps}
    if y in span(generators, pool, deps):
        premises = kb.dependency_facts(pool)
        return kb.derive("algebraic-transitive",
                         algebraic_over(y, generators), premises)
    return None


# ------------------------------------------------- the conjecture and trdeg

def schanuel_apply(kb: KnowledgeBase, terms, li: Fact) -> Fact:
    """TrdegAtLeast(S and exp(S), |S|) from Q-linear independence of S.

    Parameters
    ----------
    kb: KnowledgeBase
        Store holding `li`.
    terms: set of Term
        The set S, nonempty.
    li: Fact
        A fact of `kb` proving QLinearlyIndependent(S).

    Returns
    -------
    The ConditionalOnSC (or weaker) TrdegAtLeast fact.
    """
    expected = q_linearly_independent(terms)
    if not expected.terms:
        raise ValueError("Schanuel's Conjecture needs a nonempty set")
    if li not in kb or li.statement != expected:
        raise MissingCertificateError(
            "No linear independence certificate for "
            + ", ".join(to_text(t) for t in expected.terms))
    exps = [exp(t) for t in expected.terms]
    return kb.derive("schanuel-conjecture",
                     trdeg_at_least([*expected.terms, *exps],
                                    len(expected.terms)), [li])


def squeeze_independent(kb: KnowledgeBase, low: Fact, spanning,
                        dependency_facts: Optional[Sequence[Fact]] = None
                        ) -> Fact:
    """AI(spanning) from trdeg Q(T) >= k and T algebraic over k elements."""
    spanning = _term_set(spanning)
    terms, count = low.statement.terms, low.statement.count
    deps = kb.dependency_facts(terms) if dependency_facts is None \
        else list(dependency_facts)
    high = kb.derive("trdeg-spanning",
                     trdeg_at_most(terms, len(spanning), spanning), deps)
    equals = kb.derive("trdeg-squeeze", trdeg_equals(terms, count),
                       [low, high])
    return kb.derive("trdeg-independent",
                     algebraically_independent(spanning, "Q"),
                     [equals, high])


def trdeg_bound(terms, kb: KnowledgeBase) -> TrdegInterval:
    """Interval for trdeg Q(S) from the knowledge base.

    The upper bound is the size of a smallest spanning subset under known
    AlgebraicOver facts and syntactic generation. The lower bound is the
    best TrdegAtLeast or independence fact, reduced by its elements outside
    the closure of S. Equal bounds add a TrdegEquals fact.
    """
    s = _term_set(terms)
    derived = []
    own = kb.dependency_facts(s)
    deps = dependencies([f.statement for f in own])
    basis = min_spanning_set(s, deps)
    high = kb.derive("trdeg-spanning", trdeg_at_most(s, len(basis), basis),
                     own)
    derived.append(high)

    best, source, source_deps = 0, None, ()
    candidates = kb.of_kind(StatementKind.TRDEG_AT_LEAST) + [
        f for f in kb.of_kind(StatementKind.ALGEBRAICALLY_INDEPENDENT)
        if f.statement.base in CLASSICAL_BASES]
    for fact in candidates:
        t = fact.statement.terms
        k = fact.statement.count if fact.statement.count is not None \
            else len(t)
        if k <= best:
            continue
        facts = kb.dependency_facts(set(t) | set(s))
        closure = span(s, t, dependencies([f.statement for f in facts]))
        value = k - sum(1 for x in t if x not in closure)
        if value > best:
            best, source, source_deps = value, fact, facts
    if source is None:
        low = kb.derive("trdeg-trivial-lower", trdeg_at_least(s, 0))
    else:
        if source.statement.kind is StatementKind.ALGEBRAICALLY_INDEPENDENT:
            source = kb.derive(
                "ai-trdeg", trdeg_at_least(source.statement.terms,
                                           len(source.statement.terms)),
                [source])
            derived.append(source)
        low = kb.derive("trdeg-restrict", trdeg_at_least(s, best),
                        [source, *source_deps])
    derived.append(low)
    if best == len(basis):
        derived.append(kb.derive("trdeg-squeeze", trdeg_equals(s, best),
                                 [low, high]))
    return TrdegInterval(best, len(basis), tuple(derived))


# -------------------------------------------------------- relation handling

def assume_relation(kb: KnowledgeBase, terms) -> Fact:
    """Hypothesis: an arbitrary rational relation over `terms` holds."""
    return kb.derive("generic-relation",
                     relation_holds(RelationVector.generic(terms)))


def reduce_linear_to_monomial(relation: RelationVector) -> RelationVector:
    """The monomial image prod exp(x_i)^q_i = 1 of sum q_i x_i = 0.

    exp(q * log(-1; 0)) is (-1)^q, which normalization produces when the
    image is formed.
    """
    if relation.kind is not RelationKind.LINEAR:
        raise ValueError("Only linear relations reduce to monomials")
    return relation.as_kind(RelationKind.MONOMIAL)


def derive_monomial(kb: KnowledgeBase, holds: Fact) -> Fact:
    relation = reduce_linear_to_monomial(holds.statement.relation)
    return kb.derive("reduce-linear-to-monomial", relation_holds(relation),
                     [holds])


def monomial_triviality(kb: KnowledgeBase, holds: Fact, ai: Fact) -> Fact:
    """Coefficients vanish on every term whose exp image involves `ai`.

    Parameters
    ----------
    kb: KnowledgeBase
        The store.
    holds: Fact
        RelationHolds of a monomial relation.
    ai: Fact
        AlgebraicallyIndependent of the bases.

    Returns
    -------
    A RelationTrivial fact; a single (-1)^q factor is recorded as "q even".

    Raises
    ------
    CoverageError when some exp image is not a monomial over the bases.
    """
    relation = holds.statement.relation
    covered, note = monomial_rows(relation, ai.statement.terms)
    return kb.derive("monomial-triviality",
                     relation_trivial(relation, covered, note), [holds, ai])


# ------------------------------------------------------ linear independence

def _exact_dependency(s: tuple) -> Optional[RelationVector]:
    for x in s:
        if is_rational(x, 0):
            return RelationVector((x,), (1,))
    for i, x in enumerate(s):
        for y in s[i + 1:]:
            q = ratio(y, x)
            if q is not None and is_rational(q):
                return RelationVector.from_rationals((x, y), (q.value, -1))
    return None


def _atoms(images) -> list:
    """Non-algebraic factors of the given terms."""
    out = set()
    for t in images:
        if is_algebraic(t):
            continue
        for item in (t.children if t.kind is NodeKind.PRODUCT else (t,)):
            base = item.base if item.kind is NodeKind.POWER else item
            if not is_algebraic(base):
                out.add(base)
    return sorted_terms(out)


def _li_by_lookup(kb: KnowledgeBase, s: tuple) -> Optional[Fact]:
    known = kb.find(q_linearly_independent(s))
    if known is not None:
        return known
    wanted = set(s)
    for fact in kb.of_kind(StatementKind.Q_LINEARLY_INDEPENDENT):
        if wanted <= set(fact.statement.terms):
            return kb.derive("li-subset", q_linearly_independent(s), [fact])
    for fact in kb.of_kind(StatementKind.QBAR_LINEARLY_INDEPENDENT):
        if wanted <= set(fact.statement.terms):
            sub = kb.derive("li-subset", qbar_linearly_independent(s),
                            [fact])
            return kb.derive("qbar-li-implies-q-li",
                             q_linearly_independent(s), [sub])
    return None


def _li_by_monomials(kb: KnowledgeBase, s: tuple, budget: int
                     ) -> Optional[Fact]:
    bases = _atoms(normalize(exp(x)) for x in s)
    if not bases or any(factor_over(normalize(exp(x)), bases) is None
                        for x in s):
        return None
    ai = prove_algebraic_independence(kb, bases, budget - 1)
    if ai is None:
        return None
    try:
        covered, _ = monomial_rows(RelationVector.generic(s),
                                   ai.statement.terms)
    except CoverageError as exc:
        logger.debug("Monomial route failed: %s", exc)
        return None
    rest = tuple(t for t in s if t not in covered)
    if len(rest) == len(s):
        return None
    rest_li = _li_fact(kb, rest, budget - 1) if rest else None
    if rest and rest_li is None:
        return None
    holds = assume_relation(kb, s)
    trivial = monomial_triviality(kb, derive_monomial(kb, holds), ai)
    premises = [trivial] + ([rest_li] if rest_li is not None else [])
    return kb.derive("li-from-trivial-relation", q_linearly_independent(s),
                     premises)


def _li_fact(kb: KnowledgeBase, s: tuple, budget: int) -> Optional[Fact]:
    """Symbolic routes to QLinearlyIndependent(s)."""
    known = _li_by_lookup(kb, s)
    if known is not None:
        return known
    if len(s) == 1:
        cert = nonzero_fact(kb, s[0])
        if cert is not None:
            return kb.derive("nonzero-singleton", q_linearly_independent(s),
                             [cert])
        return None
    algebraic = [x for x in s if is_algebraic(x)]
    rest = [x for x in s if x not in algebraic]
    if len(algebraic) <= 1 and rest:
        ai = prove_algebraic_independence(kb, rest, budget)
        cert = nonzero_fact(kb, algebraic[0]) if algebraic else None
        if ai is not None and (cert is not None or not algebraic):
            premises = [ai] + ([cert] if cert is not None else [])
            return kb.derive("ai-implies-li", q_linearly_independent(s),
                             premises)
    if budget > 0:
        return _li_by_monomials(kb, s, budget)
    return None


def check_q_linear_independence(terms, kb: KnowledgeBase,
                                depth_budget: Optional[int] = None):
    """Certify, refute or give up on Q-linear independence of a set.

    Parameters
    ----------
    terms: set of Term
        Nonempty candidate set.
    kb: KnowledgeBase
        Store for the derived facts; earlier facts are reused.
    depth_budget: int (default=None)
        Recursion budget; settings.depth_budget when None.

    Returns
    -------
    Certificate(fact), CounterRelation(relation) for an exactly confirmed
    relation, or Unknown(reason).
    """
    s = _term_set(terms)
    if not s:
        raise ValueError("Linear independence needs a nonempty set")
    budget = kb.settings.depth_budget if depth_budget is None \
        else depth_budget
    relation = _exact_dependency(s)
    if relation is not None:
        return CounterRelation(relation)
    fact = _li_fact(kb, s, budget)
    if fact is not None:
        return Certificate(fact)
    settings = kb.settings
    precision = max(settings.precision,
                    required_precision(settings.height, len(s)))
    try:
        relation = falsify_linear_independence(s, precision, settings.height,
                                               settings)
    except (PrecisionEscalationError, InsufficientPrecisionError) as exc:
        return Unknown(str(exc))
    if relation is not None:
        return CounterRelation(relation)
    return Unknown(f"No certificate within depth {budget} and no relation "
                   f"of height <= {settings.height}")


# ---------------------------------------------------- algebraic independence

def _core(x: Term) -> Term:
    """x without its algebraic factors."""
    if x.kind is not NodeKind.PRODUCT:
        return x
    rest = [c for c in x.children if not is_algebraic(c)]
    return mul(*rest) if rest and len(rest) < len(x.children) else x


def _ai_by_lookup(kb: KnowledgeBase, x: tuple) -> Optional[Fact]:
    for base in CLASSICAL_BASES:
        known = kb.find(algebraically_independent(x, base))
        if known is not None:
            return known
    wanted = set(x)
    for fact in kb.of_kind(StatementKind.ALGEBRAICALLY_INDEPENDENT):
        if fact.statement.base in CLASSICAL_BASES \
                and wanted <= set(fact.statement.terms):
            return kb.derive("ai-subset",
                             algebraically_independent(x,
                                                       fact.statement.base),
                             [fact])
    return None


def _ai_by_rescaling(kb: KnowledgeBase, x: tuple, budget: int
                     ) -> Optional[Fact]:
    cores = {t: _core(t) for t in x}
    if all(c is t for t, c in cores.items()):
        return None
    if len(set(cores.values())) != len(x):
        return None
    current = prove_algebraic_independence(kb, cores.values(), budget)
    if current is None:
        return None
    members = set(current.statement.terms)
    base = current.statement.base
    for t, core in cores.items():
        if core is t:
            continue
        factor = nonzero_fact(kb, ratio(t, core))
        if factor is None:
            return None
        members = (members - {core}) | {t}
        current = kb.derive("ai-rescale",
                            algebraically_independent(members, base),
                            [current, factor])
    return current


def prove_algebraic_independence(kb: KnowledgeBase, terms, budget: int
                                 ) -> Optional[Fact]:
    """Certify algebraic independence of a set over Q, or None.

    Routes: known facts and their subsets, removal of algebraic factors,
    Schanuel's Conjecture on the set itself when its exponentials are
    generated by it, and on its logarithms when it consists of exponentials
    generated by their own arguments.
    """
    x = _term_set(terms)
    if not x or any(is_algebraic(t) for t in x):
        return None
    known = _ai_by_lookup(kb, x)
    if known is not None:
        return known
    rescaled = _ai_by_rescaling(kb, x, budget)
    if rescaled is not None:
        return rescaled
    if budget <= 0:
        return None

    if all(generated_by(normalize(exp(t)), x) for t in x):
        li = _li_fact(kb, x, budget - 1)
        if li is not None:
            return squeeze_independent(kb, schanuel_apply(kb, x, li), x)

    if all(t.kind is NodeKind.EXP for t in x):
        arguments = _term_set(t.argument for t in x)
        if all(generated_by(a, x) for a in arguments):
            li = _li_fact(kb, arguments, budget - 1)
            if li is not None:
                return squeeze_independent(
                    kb, schanuel_apply(kb, arguments, li), x)
    return None


# ------------------------------------------------------- transcendence bases

def select_transcendence_basis(terms, target: str, kb: KnowledgeBase,
                               mode: str = "certified"):
    """Greedy transcendence basis in term order.

    Parameters
    ----------
    terms: set of Term
        The pool A.
    target: str
        "exp-image": exp(B) is a basis of Q(exp(A)); "identity": B is a
        basis of Q(A).
    kb: KnowledgeBase
        Source of AlgebraicOver and independence facts.
    mode: str (default="certified")
        "certified" proves every decision, "heuristic" falls back to a
        numeric monomial probe, "existential" chooses by syntax and states
        the basis as a hypothesis.

    Returns
    -------
    (B, TranscendenceBasis fact).
    """
    if target not in TARGETS:
        raise ValueError(f"Basis target must be one of {TARGETS}, input: "
                         f"{target}")
    pool = _term_set(terms)
    if mode == "existential":
        basis = existential_basis(pool, target)
        return basis, kb.derive("basis-choice",
                                transcendence_basis(basis, pool, target))
    if mode not in ("certified", "heuristic"):
        raise ValueError(f"Unknown basis selection mode: {mode}")

    chosen, images, spanning = [], [], []
    for a in pool:
        image = image_of(a, target)
        dependency = algebraic_over_fact(kb, image, images)
        if dependency is not None:
            spanning.append(dependency)
            continue
        if mode == "certified":
            if prove_algebraic_independence(
                    kb, images + [image], kb.settings.depth_budget) is None:
                raise UnknownStatusError(
                    f"Cannot classify {to_text(a)} against the basis "
                    f"{', '.join(to_text(b) for b in chosen) or 'so far'}")
            chosen.append(a)
            images.append(image)
        elif probe_algebraic_independence(images + [image], kb.settings):
            chosen.append(a)
            images.append(image)

    basis = _term_set(chosen)
    statement = transcendence_basis(basis, pool, target)
    if mode == "heuristic":
        return basis, kb.derive("numeric-basis", statement)
    premises = list(spanning)
    if images:
        premises.insert(0, prove_algebraic_independence(
            kb, images, kb.settings.depth_budget))
    return basis, kb.derive("basis-certified", statement, premises)


def derive_disjointness_rules(kb: KnowledgeBase) -> list:
    """Enable freeness transfer, the meet rule, the Lang axiom and tower
    exclusion on `kb`."""
    names = kb.enable("disjointness")
    logger.debug("Enabled disjointness rules: %s", ", ".join(names))
    return names
