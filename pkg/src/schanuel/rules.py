"""Inference rules shared by the knowledge base and the trace checker.

A rule's `check` receives the conclusion and the premise statements and
returns None when the step is justified, or a reason string otherwise. Checks
re-derive everything from the statements themselves, so a serialized step can
be re-validated without the process that produced it.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Optional

from sympy import Matrix

from .config import Settings
from .errors import (
    AlgebraicInversionError,
    CoverageError,
    SchanuelError,
    UndefinedLevelError,
)
from .facts import (
    Provenance,
    RelationKind,
    RelationVector,
    Statement,
    StatementKind as K,
    exp_image,
    span,
)
from .numeric import NonzeroCertificate, certify_nonzero
from .relations import (
    falsify_linear_independence,
    probe_algebraic_independence,
    required_precision,
)
from .support import exp_support, log_support, verify_closure, SupportKind
from .terms import (
    ONE,
    NodeKind,
    Term,
    e_level,
    exp,
    generated_by,
    is_algebraic,
    is_rational,
    l_level,
    linear_decomposition,
    mul,
    normalize,
    power,
    to_text,
)

TARGETS = ("exp-image", "identity")
CLASSICAL_BASES = ("Q", "Qbar")


@dataclass(frozen=True)
class InferenceRule:
    """A named, replayable inference step.

    `floor` is the weakest provenance the rule itself contributes.
    `hypothesis` rules open an assumption that a `releases` rule later
    discharges. Steps depending on a discharged assumption must use
    `schematic` rules only. `axiom` names the axiom a trace header has to
    list for the rule to be admissible.
    """
    name: str
    check: Callable[[Statement, list], Optional[str]]
    floor: Provenance = Provenance.EXACT
    anchor: str = ""
    pack: str = "core"
    hypothesis: bool = False
    releases: Optional[Callable[[Statement, Statement, Statement], bool]] = None
    schematic: bool = True
    axiom: Optional[str] = None


RULES: Dict[str, InferenceRule] = {}
PACKS = ("core", "disjointness")


def rule(name: str, **kwargs):
    """Register the decorated check function as an inference rule."""
    def register(check):
        if name in RULES:
            raise ValueError(f"Rule {name} is already registered")
        RULES[name] = InferenceRule(name, check, **kwargs)
        return check
    return register


def axioms(pack_names=PACKS) -> list:
    """Axiom names of the rules in the given packs."""
    return sorted({r.axiom for r in RULES.values()
                   if r.axiom and r.pack in pack_names})


# ----------------------------------------------------------------- helpers

def _only(premises, kind) -> list:
    return [p for p in premises if p.kind is kind]


def _one(premises, kind) -> Optional[Statement]:
    found = _only(premises, kind)
    return found[0] if len(found) == 1 else None


def _expect(statement: Statement, kind) -> Optional[str]:
    if statement.kind is not kind:
        return f"Conclusion must be {kind.value}, got {statement.kind.value}"
    return None


def _names(terms) -> str:
    return "{" + ", ".join(to_text(t) for t in terms) + "}"


def dependencies(premises) -> dict:
    """Term -> list of sets it is algebraic over, from AlgebraicOver facts."""
    out = {}
    for p in _only(premises, K.ALGEBRAIC_OVER):
        out.setdefault(p.subject, []).append(frozenset(p.terms))
    return out


def ratio(y: Term, x: Term) -> Optional[Term]:
    """Normalized y / x, or None when x is zero."""
    try:
        return mul(y, power(x, -1))
    except AlgebraicInversionError:
        return None


def image_of(term: Term, target: str) -> Term:
    return normalize(exp(term)) if target == "exp-image" else term


def existential_basis(pool, target: str) -> tuple:
    """Greedy basis in term order using syntactic generation only."""
    chosen = []
    for a in sorted(set(pool)):
        if not generated_by(image_of(a, target),
                            [image_of(b, target) for b in chosen]):
            chosen.append(a)
    return tuple(chosen)


def factor_over(t: Term, bases) -> Optional[tuple]:
    """Split t as (algebraic constant, {base: exponent}).

    None when some factor is neither algebraic nor one of the bases.
    """
    base_set = set(bases)
    if t in base_set:
        return ONE, {t: 1}
    if is_algebraic(t):
        return t, {}
    items = t.children if t.kind is NodeKind.PRODUCT else (t,)
    constant = []
    exponents = {}
    for item in items:
        if item.kind is NodeKind.POWER:
            base, n = item.base, item.exponent
        else:
            base, n = item, 1
        if base in base_set:
            exponents[base] = exponents.get(base, 0) + n
        elif is_algebraic(base):
            constant.append(item)
        else:
            return None
    return (mul(*constant) if constant else ONE), exponents


def monomial_rows(relation: RelationVector, bases) -> tuple:
    """Exponent rows of exp(x_i) over AI bases.

    Returns
    -------
    (covered terms, parity note). Covered terms are those with a nonzero
    row; the rows of the covered terms are linearly independent.

    Raises
    ------
    CoverageError when an exp image does not factor over the bases or the
    rows are dependent.
    """
    bases = sorted(set(bases))
    rows = []
    covered = []
    units = []
    for x in relation.terms:
        image = normalize(exp(x))
        split = factor_over(image, bases)
        if split is None:
            raise CoverageError(
                f"exp({to_text(x)}) = {to_text(image)} is not a monomial "
                f"over the independent set {_names(bases)}")
        constant, exponents = split
        row = [exponents.get(b, 0) for b in bases]
        if any(row):
            rows.append(row)
            covered.append(x)
        else:
            units.append((x, constant))
    if rows and Matrix(rows).rank() != len(rows):
        raise CoverageError(
            f"Exponent rows over {_names(bases)} are linearly dependent")
    note = ""
    if len(units) == 1 and is_rational(units[0][1], -1):
        note = f"q even for {to_text(units[0][0])}"
    return tuple(sorted(covered)), note


def independence_problem(l_terms, settings: Optional[Settings] = None
                         ) -> Optional[str]:
    """Why the l terms of a witness are not linearly independent over Qbar.

    Zero terms and algebraic ratios are found exactly. A Q-linear relation
    is searched for numerically and only counts once it is confirmed.
    """
    if not l_terms:
        return "Witness needs at least one l term"
    for x in l_terms:
        if is_rational(x, 0):
            return "A zero l term is not linearly independent over Qbar"
    for i, x in enumerate(l_terms):
        for y in l_terms[i + 1:]:
            q = ratio(y, x)
            if q is not None and is_algebraic(q):
                return (f"{to_text(x)} and {to_text(y)} are dependent over "
                        "Qbar")
    settings = settings or Settings()
    precision = max(settings.precision,
                    required_precision(settings.height, len(l_terms)))
    try:
        relation = falsify_linear_independence(l_terms, precision,
                                               settings.height, settings)
    except SchanuelError as exc:
        return f"Relation search among {_names(l_terms)} failed: {exc}"
    if relation is not None:
        return f"{relation.describe()} among the l terms"
    return None


def _witness_shape(l_terms, e_terms, m: int, n: int) -> Optional[str]:
    if not l_terms or len(l_terms) != len(e_terms):
        return "Witness needs equally many l and e terms, at least one"
    for x in l_terms:
        level = l_level(x)
        if level is None or level > n:
            return f"{to_text(x)} is not in L_{n}"
    for x in e_terms:
        level = e_level(x)
        if level is None or level > m:
            return f"{to_text(x)} is not in E_{m}"
    if not any(certify_nonzero(x) is not None for x in e_terms):
        return "No e term is certified nonzero"
    return None


def witness_problem(l_terms, e_terms, m: int, n: int,
                    settings: Optional[Settings] = None) -> Optional[str]:
    """Why (l, e) cannot witness failed disjointness of E_m and L_n."""
    return _witness_shape(l_terms, e_terms, m, n) \
        or independence_problem(l_terms, settings)


# -------------------------------------------------------------- level rules

@rule("e-level", anchor="E_n membership from the syntactic exp depth")
def _check_e_level(statement, premises):
    problem = _expect(statement, K.MEMBER_E)
    if problem:
        return problem
    level = e_level(statement.subject)
    if level is None or level > statement.levels[0]:
        return f"{to_text(statement.subject)} has E-level {level}"
    return None


@rule("l-level", anchor="L_n membership from the syntactic log depth")
def _check_l_level(statement, premises):
    problem = _expect(statement, K.MEMBER_L)
    if problem:
        return problem
    level = l_level(statement.subject)
    if level is None or level > statement.levels[0]:
        return f"{to_text(statement.subject)} has L-level {level}"
    return None


@rule("qbar-level", anchor="E_0 = L_0 = Qbar")
def _check_qbar_level(statement, premises):
    problem = _expect(statement, K.MEMBER_QBAR)
    if problem:
        return problem
    if not is_algebraic(statement.subject):
        return f"{to_text(statement.subject)} has Exp or Log nodes"
    return None


@rule("syntactic-generation",
      anchor="field operations and algebraic constants stay algebraic")
def _check_generation(statement, premises):
    problem = _expect(statement, K.ALGEBRAIC_OVER)
    if problem:
        return problem
    if not generated_by(statement.subject, statement.terms):
        return (f"{to_text(statement.subject)} is not generated by "
                f"{_names(statement.terms)}")
    return None


@rule("exp-rational-multiple",
      anchor="exp(q*a) is algebraic over exp(a) for rational q")
def _check_exp_multiple(statement, premises):
    problem = _expect(statement, K.ALGEBRAIC_OVER)
    if problem:
        return problem
    x = statement.subject
    if x.kind is not NodeKind.EXP:
        return f"{to_text(x)} is not an exponential"
    arguments = [t.argument for t in statement.terms
                 if t.kind is NodeKind.EXP]
    if linear_decomposition(x.argument, arguments) is None:
        return (f"{to_text(x.argument)} is not a rational combination of "
                f"{_names(arguments)}")
    return None


@rule("ball-nonzero", schematic=False,
      anchor="an enclosure excluding zero certifies a nonzero value")
def _check_ball_nonzero(statement, premises):
    problem = _expect(statement, K.NONZERO)
    if problem:
        return problem
    precision = int((statement.data or {}).get("precision", 0))
    if not NonzeroCertificate(statement.subject, precision, 0).recheck():
        return (f"Enclosure of {to_text(statement.subject)} at {precision} "
                "bits does not exclude zero")
    return None


@rule("nonzero-singleton",
      anchor="a nonzero number is linearly independent on its own")
def _check_nonzero_singleton(statement, premises):
    problem = _expect(statement, K.Q_LINEARLY_INDEPENDENT)
    if problem:
        return problem
    nonzero = _one(premises, K.NONZERO)
    if nonzero is None or statement.terms != (nonzero.subject,):
        return "Needs Nonzero(x) for the singleton {x}"
    return None


@rule("declared", schematic=False, axiom="declared",
      anchor="fact supplied by the caller")
def _check_declared(statement, premises):
    if premises:
        return "Declared facts take no premises"
    return None


# ------------------------------------------------------------ the conjecture

@rule("schanuel-conjecture", floor=Provenance.CONDITIONAL_ON_SC,
      axiom="schanuel-conjecture",
      anchor="Schanuel's Conjecture: Q-linearly independent x_1..x_n give "
             "trdeg Q(x, exp x) >= n")
def _check_schanuel(statement, premises):
    problem = _expect(statement, K.TRDEG_AT_LEAST)
    if problem:
        return problem
    li = _one(premises, K.Q_LINEARLY_INDEPENDENT)
    if li is None:
        return "Needs exactly one QLinearlyIndependent premise"
    if not li.terms:
        return "Schanuel's Conjecture needs a nonempty set"
    expected = tuple(sorted(set(li.terms) | set(exp_image(li.terms))))
    if statement.terms != expected:
        return f"Conclusion set must be S and exp(S), {_names(expected)}"
    if statement.count != len(li.terms):
        return f"Conclusion degree must be {len(li.terms)}"
    return None


# ------------------------------------------------------- trdeg bookkeeping

@rule("trdeg-spanning", anchor="trdeg is at most the size of a spanning set")
def _check_spanning(statement, premises):
    problem = _expect(statement, K.TRDEG_AT_MOST)
    if problem:
        return problem
    if statement.count != len(statement.others):
        return "Degree must equal the size of the spanning set"
    covered = span(statement.others, statement.terms, dependencies(premises))
    missing = [t for t in statement.terms if t not in covered]
    if missing:
        return f"{_names(missing)} not algebraic over the spanning set"
    return None


@rule("trdeg-squeeze", anchor="matching lower and upper bounds")
def _check_squeeze(statement, premises):
    problem = _expect(statement, K.TRDEG_EQUALS)
    if problem:
        return problem
    low = _one(premises, K.TRDEG_AT_LEAST)
    high = _one(premises, K.TRDEG_AT_MOST)
    if low is None or high is None:
        return "Needs one TrdegAtLeast and one TrdegAtMost premise"
    if not low.terms == high.terms == statement.terms:
        return "Bounds must concern the conclusion set"
    if not low.count == high.count == statement.count:
        return "Bounds must both equal the conclusion degree"
    return None


@rule("trdeg-independent",
      anchor="a spanning set of size trdeg is algebraically independent")
def _check_trdeg_independent(statement, premises):
    problem = _expect(statement, K.ALGEBRAICALLY_INDEPENDENT)
    if problem:
        return problem
    equals = _one(premises, K.TRDEG_EQUALS)
    high = _one(premises, K.TRDEG_AT_MOST)
    if equals is None or high is None:
        return "Needs one TrdegEquals and one TrdegAtMost premise"
    if equals.terms != high.terms or statement.terms != high.others:
        return "Conclusion must be the spanning set of the squeezed field"
    if equals.count != len(high.others) or statement.base != "Q":
        return "Spanning set size must equal the degree, over Q"
    return None


@rule("trdeg-same",
      anchor="mutually algebraic sets generate fields of equal trdeg")
def _check_trdeg_same(statement, premises):
    problem = _expect(statement, K.TRDEG_SAME)
    if problem:
        return problem
    deps = dependencies(premises)
    pool = set(statement.terms) | set(statement.others)
    for source, target in ((statement.terms, statement.others),
                           (statement.others, statement.terms)):
        covered = span(source, pool, deps)
        missing = [t for t in target if t not in covered]
        if missing:
            return f"{_names(missing)} not algebraic over {_names(source)}"
    return None


@rule("trdeg-transport", anchor="trdeg bounds move across equal trdeg")
def _check_transport(statement, premises):
    problem = _expect(statement, K.TRDEG_AT_LEAST)
    if problem:
        return problem
    low = _one(premises, K.TRDEG_AT_LEAST)
    same = _one(premises, K.TRDEG_SAME)
    if low is None or same is None:
        return "Needs one TrdegAtLeast and one TrdegSame premise"
    if {same.terms, same.others} != {low.terms, statement.terms}:
        return "TrdegSame must relate the premise and conclusion sets"
    if statement.count > low.count:
        return "Transported degree exceeds the premise"
    return None


@rule("trdeg-restrict",
      anchor="each element outside the closure lowers trdeg by at most one")
def _check_restrict(statement, premises):
    problem = _expect(statement, K.TRDEG_AT_LEAST)
    if problem:
        return problem
    low = _one(premises, K.TRDEG_AT_LEAST)
    if low is None:
        return "Needs one TrdegAtLeast premise"
    covered = span(statement.terms, low.terms, dependencies(premises))
    outside = sum(1 for t in low.terms if t not in covered)
    if statement.count > low.count - outside:
        return (f"Degree {statement.count} exceeds {low.count} - {outside} "
                "elements outside the closure")
    return None


@rule("ai-trdeg", anchor="an independent set has full trdeg")
def _check_ai_trdeg(statement, premises):
    problem = _expect(statement, K.TRDEG_AT_LEAST)
    if problem:
        return problem
    ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
    if ai is None or ai.base not in CLASSICAL_BASES:
        return "Needs one AlgebraicallyIndependent premise over Q or Qbar"
    if statement.terms != ai.terms or statement.count > len(ai.terms):
        return "Conclusion must bound the independent set by its size"
    return None


@rule("trdeg-trivial-lower", anchor="trdeg is non-negative")
def _check_trivial_lower(statement, premises):
    problem = _expect(statement, K.TRDEG_AT_LEAST)
    if problem:
        return problem
    if statement.count > 0 or premises:
        return "Only the bound 0 holds without premises"
    return None


# ------------------------------------------------------- independence rules

@rule("ai-implies-li",
      anchor="algebraically independent numbers and one nonzero algebraic "
             "number are Q-linearly independent")
def _check_ai_li(statement, premises):
    problem = _expect(statement, K.Q_LINEARLY_INDEPENDENT)
    if problem:
        return problem
    ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
    if ai is None or ai.base not in CLASSICAL_BASES:
        return "Needs one AlgebraicallyIndependent premise over Q or Qbar"
    algebraic = [t for t in statement.terms if is_algebraic(t)]
    if len(algebraic) > 1:
        return "At most one algebraic element is allowed"
    if algebraic:
        nonzero = _one(premises, K.NONZERO)
        if nonzero is None or nonzero.subject != algebraic[0]:
            return f"Needs Nonzero({to_text(algebraic[0])})"
    rest = [t for t in statement.terms if t not in algebraic]
    if not set(rest) <= set(ai.terms):
        return "Transcendental part is not covered by the independent set"
    return None


@rule("ai-base-change",
      anchor="independence over Q and over Qbar coincide")
def _check_base_change(statement, premises):
    problem = _expect(statement, K.ALGEBRAICALLY_INDEPENDENT)
    if problem:
        return problem
    ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
    if ai is None or ai.terms != statement.terms:
        return "Needs the same set independent over the other base"
    if {ai.base, statement.base} - set(CLASSICAL_BASES):
        return "Only Q and Qbar may be exchanged"
    return None


@rule("ai-subset", anchor="subsets of independent sets are independent")
def _check_ai_subset(statement, premises):
    problem = _expect(statement, K.ALGEBRAICALLY_INDEPENDENT)
    if problem:
        return problem
    ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
    if ai is None or ai.base != statement.base:
        return "Needs an independent superset over the same base"
    if not set(statement.terms) <= set(ai.terms):
        return "Conclusion is not a subset of the premise"
    return None


@rule("li-subset", anchor="subsets of independent sets are independent")
def _check_li_subset(statement, premises):
    if statement.kind not in (K.Q_LINEARLY_INDEPENDENT,
                              K.QBAR_LINEARLY_INDEPENDENT):
        return "Conclusion must be a linear independence statement"
    li = _one(premises, statement.kind)
    if li is None or not set(statement.terms) <= set(li.terms):
        return "Needs an independent superset of the same kind"
    return None


@rule("qbar-li-implies-q-li",
      anchor="independence over Qbar implies independence over Q")
def _check_qbar_q(statement, premises):
    problem = _expect(statement, K.Q_LINEARLY_INDEPENDENT)
    if problem:
        return problem
    li = _one(premises, K.QBAR_LINEARLY_INDEPENDENT)
    if li is None or li.terms != statement.terms:
        return "Needs QbarLinearlyIndependent of the same set"
    return None


@rule("ai-rescale",
      anchor="multiplying by a nonzero algebraic number keeps independence")
def _check_rescale(statement, premises):
    problem = _expect(statement, K.ALGEBRAICALLY_INDEPENDENT)
    if problem:
        return problem
    ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
    nonzero = _one(premises, K.NONZERO)
    if ai is None or nonzero is None or ai.base != statement.base:
        return "Needs an independent set and a Nonzero factor"
    added = set(statement.terms) - set(ai.terms)
    dropped = set(ai.terms) - set(statement.terms)
    if len(added) != 1 or len(dropped) != 1 \
            or len(statement.terms) != len(ai.terms):
        return "Exactly one element must be replaced"
    (y,), (x,) = added, dropped
    q = ratio(y, x)
    if q is None or not is_algebraic(q) or q != nonzero.subject:
        return (f"{to_text(y)} / {to_text(x)} is not the certified nonzero "
                "algebraic factor")
    return None


@rule("transcendental", anchor="an independent element is not algebraic")
def _check_transcendental(statement, premises):
    problem = _expect(statement, K.NOT_MEMBER_QBAR)
    if problem:
        return problem
    ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
    if ai is None or statement.subject not in ai.terms:
        return "Needs an independent set containing the subject"
    return None


# ---------------------------------------------------- generic relations

def _releases_generic(statement, premise, assumption):
    if premise.kind is not K.RELATION_TRIVIAL:
        return False
    if assumption.kind is not K.RELATION_HOLDS:
        return False
    relation = assumption.relation
    return (relation.is_generic and relation.kind is RelationKind.LINEAR
            and relation.label == premise.relation.label
            and relation.terms == statement.terms)


@rule("generic-relation", hypothesis=True,
      anchor="suppose an arbitrary rational relation sum q_x x = 0")
def _check_generic(statement, premises):
    problem = _expect(statement, K.RELATION_HOLDS)
    if problem:
        return problem
    relation = statement.relation
    if premises or relation is None or not relation.is_generic:
        return "A generic relation is assumed without premises"
    if relation.kind is not RelationKind.LINEAR:
        return "Assumed relations are linear"
    if relation.label != RelationVector.generic(relation.terms).label:
        return "Label does not match the related set"
    return None


@rule("reduce-linear-to-monomial",
      anchor="exponentiating sum q_i x_i = 0 gives prod exp(x_i)^q_i = 1")
def _check_reduce(statement, premises):
    problem = _expect(statement, K.RELATION_HOLDS)
    if problem:
        return problem
    holds = _one(premises, K.RELATION_HOLDS)
    if holds is None or holds.relation.kind is not RelationKind.LINEAR:
        return "Needs one linear RelationHolds premise"
    if statement.relation != holds.relation.as_kind(RelationKind.MONOMIAL):
        return "Conclusion must be the monomial image of the premise"
    return None


@rule("monomial-triviality",
      anchor="a monomial in independent numbers equal to 1 is trivial")
def _check_monomial(statement, premises):
    problem = _expect(statement, K.RELATION_TRIVIAL)
    if problem:
        return problem
    holds = _one(premises, K.RELATION_HOLDS)
    ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
    if holds is None or ai is None or ai.base not in CLASSICAL_BASES:
        return "Needs a RelationHolds and an AlgebraicallyIndependent premise"
    relation = holds.relation
    if relation.kind is not RelationKind.MONOMIAL:
        return "Relation must be monomial"
    if statement.relation != relation:
        return "Conclusion must concern the premise relation"
    try:
        covered, note = monomial_rows(relation, ai.terms)
    except CoverageError as exc:
        return str(exc)
    if statement.terms != covered or statement.base != note:
        return f"Covered set must be {_names(covered)} with note '{note}'"
    if not relation.is_generic:
        coefficients = dict(zip(relation.terms, relation.coefficients))
        if any(coefficients[t] for t in covered):
            return "Premises are inconsistent: covered coefficients are not 0"
    return None


@rule("linear-residue",
      anchor="the L_n part of a relation between E_m and L_n elements lies "
             "in E_m cap L_n = Qbar")
def _check_residue(statement, premises):
    problem = _expect(statement, K.RESIDUE_ALGEBRAIC)
    if problem:
        return problem
    holds = _one(premises, K.RELATION_HOLDS)
    meet = _one(premises, K.INTERSECTION_IS_QBAR)
    if holds is None or meet is None:
        return "Needs RelationHolds and IntersectionIsQbar premises"
    relation = holds.relation
    if relation.kind is not RelationKind.LINEAR \
            or statement.relation != relation:
        return "Conclusion must concern the linear premise relation"
    m, n = meet.levels
    part = set(statement.terms)
    if not part <= set(relation.terms):
        return "Residue part is not part of the relation"
    for t in relation.terms:
        level = l_level(t) if t in part else e_level(t)
        bound = n if t in part else m
        if level is None or level > bound:
            tower = f"L_{n}" if t in part else f"E_{m}"
            return f"{to_text(t)} is not in {tower}"
    return None


@rule("ai-kills-linear",
      anchor="a linear form in independent numbers is algebraic only when "
             "its coefficients vanish")
def _check_kills_linear(statement, premises):
    problem = _expect(statement, K.RELATION_TRIVIAL)
    if problem:
        return problem
    residue = _one(premises, K.RESIDUE_ALGEBRAIC)
    ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
    if residue is None or ai is None or ai.base not in CLASSICAL_BASES:
        return "Needs ResidueAlgebraic and AlgebraicallyIndependent premises"
    if statement.relation != residue.relation \
            or statement.terms != residue.terms or statement.base:
        return "Conclusion must cover the residue part"
    if not set(residue.terms) <= set(ai.terms):
        return "Residue part is not independent"
    return None


@rule("restrict-relation",
      anchor="dropping vanishing coefficients keeps the relation")
def _check_restrict_relation(statement, premises):
    problem = _expect(statement, K.RELATION_HOLDS)
    if problem:
        return problem
    holds = _one(premises, K.RELATION_HOLDS)
    trivial = _one(premises, K.RELATION_TRIVIAL)
    if holds is None or trivial is None or not holds.relation.is_generic:
        return "Needs a generic RelationHolds and a RelationTrivial premise"
    if trivial.relation != holds.relation:
        return "Trivial coefficients concern another relation"
    rest = [t for t in holds.relation.terms if t not in trivial.terms]
    if statement.relation != holds.relation.restricted(rest):
        return "Conclusion must be the relation on the remaining terms"
    return None


@rule("li-from-trivial-relation", releases=_releases_generic,
      anchor="an arbitrary relation with all coefficients zero proves "
             "linear independence")
def _check_li_from_trivial(statement, premises):
    problem = _expect(statement, K.Q_LINEARLY_INDEPENDENT)
    if problem:
        return problem
    trivials = _only(premises, K.RELATION_TRIVIAL)
    if not trivials:
        return "Needs RelationTrivial premises"
    labels = {p.relation.label for p in trivials}
    label = RelationVector.generic(statement.terms).label
    if labels != {label}:
        return "Trivial coefficients must concern the assumed relation"
    whole = set(statement.terms)
    covered = set()
    for p in trivials:
        if not set(p.relation.terms) <= whole:
            return "Relation mentions terms outside the set"
        covered |= set(p.terms)
    rest = whole - covered
    if rest:
        lis = _only(premises, K.Q_LINEARLY_INDEPENDENT)
        if len(lis) != 1 or not rest <= set(lis[0].terms):
            return f"Remaining terms {_names(rest)} need an independence fact"
    return None


# -------------------------------------------------------------- supports

def _check_support(statement, kind: SupportKind):
    problem = _expect(statement, K.SUPPORT)
    if problem:
        return problem
    extract = exp_support if kind is SupportKind.EXP else log_support
    try:
        fresh = extract(statement.subject)
    except UndefinedLevelError as exc:
        return str(exc)
    if statement.data != fresh.to_dict() or statement.base != kind.value:
        return "Recorded support differs from the extracted one"
    if statement.terms != fresh.elements \
            or statement.count != fresh.level_witness:
        return "Statement fields disagree with the support"
    if not verify_closure(fresh):
        return "Support closure does not hold"
    return None


@rule("support-exp",
      anchor="x in E_n is generated by exp(A) for a finite A in E_{n-1}")
def _check_support_exp(statement, premises):
    return _check_support(statement, SupportKind.EXP)


@rule("support-log",
      anchor="x in L_n is generated by a finite C with exp(C) in L_{n-1}")
def _check_support_log(statement, premises):
    return _check_support(statement, SupportKind.LOG)


@rule("support-generation",
      anchor="a support generates its subject and its own elements")
def _check_support_generation(statement, premises):
    problem = _expect(statement, K.ALGEBRAIC_OVER)
    if problem:
        return problem
    support = _one(premises, K.SUPPORT)
    if support is None:
        return "Needs one Support premise"
    y = statement.subject
    generators = set(statement.terms)
    if support.base == SupportKind.EXP.value:
        sources = {support.subject, *support.terms}
        needed = set(exp_image(support.terms))
    else:
        sources = {support.subject, *exp_image(support.terms)}
        needed = set(support.terms)
    if y not in sources:
        return f"{to_text(y)} is not the subject or a support element"
    if not needed <= generators:
        return "Generators must contain the support image"
    if not generated_by(y, generators):
        return f"{to_text(y)} is not generated by the support"
    return None


@rule("algebraic-transitive",
      anchor="algebraic over algebraic is algebraic")
def _check_transitive(statement, premises):
    problem = _expect(statement, K.ALGEBRAIC_OVER)
    if problem:
        return problem
    deps = dependencies(premises)
    pool = {statement.subject, *deps}
    if statement.subject not in span(statement.terms, pool, deps):
        return (f"{to_text(statement.subject)} is not reached from "
                f"{_names(statement.terms)}")
    return None


# ------------------------------------------------------- transcendence bases

def _basis_shape(statement) -> Optional[str]:
    problem = _expect(statement, K.TRANSCENDENCE_BASIS)
    if problem:
        return problem
    if statement.base not in TARGETS:
        return f"Unknown basis target {statement.base}"
    if not set(statement.terms) <= set(statement.others):
        return "Basis is not a subset of the pool"
    return None


def _releases_witness(statement, premise, assumption):
    if premise.kind is not K.CONTRADICTION:
        return False
    if assumption.kind in (K.TRANSCENDENCE_BASIS,
                           K.QBAR_LINEARLY_INDEPENDENT):
        return True
    return (assumption.kind is K.WITNESS_RELATION
            and assumption.levels == statement.levels)


@rule("basis-choice", hypothesis=True,
      anchor="choose a transcendence basis inside the generating set")
def _check_basis_choice(statement, premises):
    problem = _basis_shape(statement)
    if problem:
        return problem
    if premises:
        return "A chosen basis takes no premises"
    if statement.terms != existential_basis(statement.others,
                                            statement.base):
        return "Basis differs from the greedy choice"
    return None


@rule("basis-certified",
      anchor="an independent subset over which the rest is algebraic")
def _check_basis_certified(statement, premises):
    problem = _basis_shape(statement)
    if problem:
        return problem
    target = statement.base
    images = [image_of(b, target) for b in statement.terms]
    if images:
        ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
        if ai is None or ai.base not in CLASSICAL_BASES \
                or not set(images) <= set(ai.terms):
            return "Basis images need an independence fact"
    pool = [image_of(a, target) for a in statement.others]
    covered = span(images, pool, dependencies(premises))
    missing = [t for t in pool if t not in covered]
    if missing:
        return f"{_names(missing)} not algebraic over the basis"
    return None


@rule("numeric-basis", floor=Provenance.HEURISTIC_NUMERIC, schematic=False,
      anchor="no low-degree integer relation among the basis images")
def _check_numeric_basis(statement, premises):
    problem = _basis_shape(statement)
    if problem:
        return problem
    target = statement.base
    images = [image_of(b, target) for b in statement.terms]
    if not probe_algebraic_independence(images):
        return "Basis images satisfy a low-degree relation"
    for a in statement.others:
        if a in statement.terms:
            continue
        image = image_of(a, target)
        if not generated_by(image, images) \
                and probe_algebraic_independence(images + [image]):
            return f"{to_text(a)} looks independent of the basis"
    return None


@rule("basis-spans", anchor="the pool is algebraic over a basis")
def _check_basis_spans(statement, premises):
    problem = _expect(statement, K.ALGEBRAIC_OVER)
    if problem:
        return problem
    basis = _one(premises, K.TRANSCENDENCE_BASIS)
    if basis is None:
        return "Needs one TranscendenceBasis premise"
    target = basis.base
    if statement.terms != tuple(sorted({image_of(b, target)
                                        for b in basis.terms})):
        return "Generators must be the basis images"
    if statement.subject not in {image_of(a, target) for a in basis.others}:
        return "Subject must be the image of a pool element"
    return None


@rule("basis-independent", anchor="a transcendence basis is independent")
def _check_basis_independent(statement, premises):
    problem = _expect(statement, K.ALGEBRAICALLY_INDEPENDENT)
    if problem:
        return problem
    basis = _one(premises, K.TRANSCENDENCE_BASIS)
    if basis is None or statement.base != "Q":
        return "Needs one TranscendenceBasis premise, concluding over Q"
    images = tuple(sorted({image_of(b, basis.base) for b in basis.terms}))
    if statement.terms != images:
        return "Conclusion must be the basis images"
    return None


# ------------------------------------------------- disjointness and towers

@rule("disjointness-base",
      anchor="Qbar is linearly disjoint from every extension over Qbar")
def _check_disjoint_base(statement, premises):
    problem = _expect(statement, K.LINEARLY_DISJOINT)
    if problem:
        return problem
    if premises or 0 not in statement.levels \
            or min(statement.levels) < 0:
        return "Only level 0 is disjoint without premises"
    return None


@rule("witness-independence", hypothesis=True,
      anchor="the l terms of a witness are linearly independent over Qbar")
def _check_witness_independence(statement, premises):
    problem = _expect(statement, K.QBAR_LINEARLY_INDEPENDENT)
    if problem:
        return problem
    if premises:
        return "Witness independence is assumed without premises"
    return independence_problem(statement.terms)


@rule("not-disjoint-hypothesis", hypothesis=True,
      anchor="suppose E_m and L_n are not linearly disjoint over Qbar")
def _check_witness(statement, premises):
    problem = _expect(statement, K.WITNESS_RELATION)
    if problem:
        return problem
    independent = _one(premises, K.QBAR_LINEARLY_INDEPENDENT)
    if independent is None or len(premises) != 1 \
            or set(independent.terms) != set(statement.terms) \
            or len(set(statement.terms)) != len(statement.terms):
        return "Needs QbarLinearlyIndependent of exactly the l terms"
    m, n = statement.levels
    return _witness_shape(statement.terms, statement.others, m, n)


@rule("ai-union-free",
      anchor="independent sets split into free generated fields")
def _check_union_free(statement, premises):
    problem = _expect(statement, K.FREE_FIELDS)
    if problem:
        return problem
    ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
    if ai is None or ai.base != "Qbar":
        return "Needs independence over Qbar"
    left, right = set(statement.terms), set(statement.others)
    if left & right or not (left | right) <= set(ai.terms):
        return "Parts must be disjoint subsets of the independent set"
    return None


@rule("witness-contradiction",
      anchor="a nontrivial sum l_i e_i = 0 contradicts linear disjointness")
def _check_witness_contradiction(statement, premises):
    problem = _expect(statement, K.CONTRADICTION)
    if problem:
        return problem
    witness = _one(premises, K.WITNESS_RELATION)
    disjoint = _one(premises, K.DISJOINT_FIELDS)
    if witness is None or disjoint is None:
        return "Needs WitnessRelation and DisjointFields premises"
    if statement.levels != witness.levels:
        return "Levels differ from the witness"
    left, right = set(disjoint.terms), set(disjoint.others)
    over = {}
    for p in _only(premises, K.ALGEBRAIC_OVER):
        over.setdefault(p.subject, []).append(set(p.terms))
    for terms, side in ((witness.others, left), (witness.terms, right)):
        for x in terms:
            if generated_by(x, side):
                continue
            if not any(t <= side for t in over.get(x, ())):
                return f"{to_text(x)} is not algebraic over {_names(side)}"
    return None


@rule("discharge-disjointness", releases=_releases_witness,
      anchor="the refuted witness gives linear disjointness of E_m and L_n")
def _check_discharge(statement, premises):
    problem = _expect(statement, K.LINEARLY_DISJOINT)
    if problem:
        return problem
    m, n = statement.levels
    absurd = _one(premises, K.CONTRADICTION)
    previous = _one(premises, K.LINEARLY_DISJOINT)
    if absurd is None or previous is None:
        return "Needs Contradiction and LinearlyDisjoint premises"
    if absurd.levels != (m, n) or previous.levels != (m - 1, n):
        return f"Needs Contradiction({m}, {n}) and the level {m - 1} case"
    return None


@rule("disjoint-intersection",
      anchor="linearly disjoint fields meet in the base field")
def _check_disjoint_intersection(statement, premises):
    problem = _expect(statement, K.INTERSECTION_IS_QBAR)
    if problem:
        return problem
    disjoint = _one(premises, K.LINEARLY_DISJOINT)
    if disjoint is None or disjoint.levels != statement.levels:
        return "Needs LinearlyDisjoint at the same levels"
    return None


@rule("conjunction", anchor="conjunction introduction")
def _check_conjunction(statement, premises):
    problem = _expect(statement, K.ALL_OF)
    if problem:
        return problem
    if tuple(premises) != statement.parts or not premises:
        return "Parts must be the premises in order"
    return None


@rule("freeness-transfer", pack="disjointness",
      anchor="linear disjointness implies freeness")
def _check_freeness(statement, premises):
    problem = _expect(statement, K.ALGEBRAICALLY_INDEPENDENT)
    if problem:
        return problem
    disjoint = _one(premises, K.LINEARLY_DISJOINT)
    ai = _one(premises, K.ALGEBRAICALLY_INDEPENDENT)
    if disjoint is None or ai is None or ai.base != "Qbar" \
            or ai.terms != statement.terms:
        return "Needs LinearlyDisjoint and the set independent over Qbar"
    m, n = disjoint.levels
    if statement.base == f"L:{n}":
        level_of, bound = e_level, m
    elif statement.base == f"E:{m}":
        level_of, bound = l_level, n
    else:
        return f"Base must be L:{n} or E:{m}"
    for t in statement.terms:
        level = level_of(t)
        if level is None or level > bound:
            return f"{to_text(t)} is not in the other tower"
    return None


@rule("disjoint-meet", pack="disjointness",
      anchor="an element of both disjoint towers is algebraic")
def _check_meet(statement, premises):
    problem = _expect(statement, K.MEMBER_QBAR)
    if problem:
        return problem
    disjoint = _one(premises, K.LINEARLY_DISJOINT)
    in_e = _one(premises, K.MEMBER_E)
    in_l = _one(premises, K.MEMBER_L)
    if None in (disjoint, in_e, in_l):
        return "Needs LinearlyDisjoint, MemberE and MemberL premises"
    m, n = disjoint.levels
    x = statement.subject
    if in_e.subject != x or in_l.subject != x \
            or in_e.levels[0] > m or in_l.levels[0] > n:
        return "Memberships must concern the subject within the levels"
    return None


@rule("lang-4.12", pack="disjointness", axiom="lang-4.12",
      anchor="external-axiom: Lang-4.12 (free over an algebraically closed "
             "base implies linearly disjoint)")
def _check_lang(statement, premises):
    problem = _expect(statement, K.DISJOINT_FIELDS)
    if problem:
        return problem
    free = _one(premises, K.FREE_FIELDS)
    if free is None or free.terms != statement.terms \
            or free.others != statement.others:
        return "Needs FreeFields of the same generators"
    return None


def _tower_exclusion(statement, premises):
    outside = _one(premises, K.NOT_MEMBER_QBAR)
    meet = _one(premises, K.INTERSECTION_IS_QBAR)
    if outside is None or meet is None \
            or outside.subject != statement.subject:
        return "Needs NotMemberQbar of the subject and IntersectionIsQbar"
    m, n = meet.levels
    if statement.kind is K.NOT_MEMBER_E:
        member = _one(premises, K.MEMBER_L)
        bound, own = n, m
    elif statement.kind is K.NOT_MEMBER_L:
        member = _one(premises, K.MEMBER_E)
        bound, own = m, n
    else:
        return "Conclusion must be NotMemberE or NotMemberL"
    if member is None or member.subject != statement.subject \
            or member.levels[0] > bound:
        return "Needs membership in the other tower within the levels"
    if statement.levels[0] != own:
        return f"Exclusion holds at level {own}"
    return None


@rule("tower-exclusion", pack="disjointness",
      anchor="a transcendental element of one tower avoids the other")
def _check_tower_exclusion(statement, premises):
    return _tower_exclusion(statement, premises)


@rule("qbar-in-towers", pack="disjointness",
      anchor="algebraic numbers lie in E_0 = L_0")
def _check_qbar_in_towers(statement, premises):
    if statement.kind not in (K.MEMBER_E, K.MEMBER_L):
        return "Conclusion must be MemberE or MemberL"
    qbar = _one(premises, K.MEMBER_QBAR)
    if qbar is None or qbar.subject != statement.subject:
        return "Needs MemberQbar of the subject"
    return None


@rule("algebraic-multiple-exclusion", pack="disjointness",
      anchor="non-membership is invariant under nonzero algebraic factors")
def _check_multiple_exclusion(statement, premises):
    if statement.kind not in (K.NOT_MEMBER_E, K.NOT_MEMBER_L,
                              K.NOT_MEMBER_QBAR):
        return "Conclusion must be a non-membership"
    outside = _one(premises, statement.kind)
    nonzero = _one(premises, K.NONZERO)
    if outside is None or nonzero is None \
            or outside.levels != statement.levels:
        return "Needs the same non-membership and a Nonzero factor"
    q = ratio(statement.subject, outside.subject)
    if q is None or not is_algebraic(q) or q != nonzero.subject:
        return "Subjects must differ by the certified algebraic factor"
    return None
