"""Statements, relation vectors and facts of the knowledge base."""

import hashlib
import itertools
import math
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from fractions import Fraction
from typing import Callable, Optional, Tuple

from .terms import (
    Term,
    exp,
    generated_by,
    normalize,
    sorted_terms,
    to_text,
)


class Provenance(IntEnum):
    """Certification strength; larger is weaker."""
    EXACT = 0
    CONDITIONAL_ON_SC = 1
    HEURISTIC_NUMERIC = 2

    @property
    def label(self) -> str:
        return _PROVENANCE_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "Provenance":
        for member, name in _PROVENANCE_LABELS.items():
            if name == label:
                return member
        raise ValueError(f"Unknown provenance: {label}")


_PROVENANCE_LABELS = {
    Provenance.EXACT: "Exact",
    Provenance.CONDITIONAL_ON_SC: "ConditionalOnSC",
    Provenance.HEURISTIC_NUMERIC: "HeuristicNumeric",
}


class StatementKind(str, Enum):
    Q_LINEARLY_INDEPENDENT = "QLinearlyIndependent"
    QBAR_LINEARLY_INDEPENDENT = "QbarLinearlyIndependent"
    ALGEBRAICALLY_INDEPENDENT = "AlgebraicallyIndependent"
    ALGEBRAIC_OVER = "AlgebraicOver"
    TRDEG_AT_LEAST = "TrdegAtLeast"
    TRDEG_AT_MOST = "TrdegAtMost"
    TRDEG_EQUALS = "TrdegEquals"
    TRDEG_SAME = "TrdegSame"
    MEMBER_E = "MemberE"
    MEMBER_L = "MemberL"
    MEMBER_QBAR = "MemberQbar"
    NOT_MEMBER_E = "NotMemberE"
    NOT_MEMBER_L = "NotMemberL"
    NOT_MEMBER_QBAR = "NotMemberQbar"
    LINEARLY_DISJOINT = "LinearlyDisjoint"
    INTERSECTION_IS_QBAR = "IntersectionIsQbar"
    NONZERO = "Nonzero"
    TRANSCENDENCE_BASIS = "TranscendenceBasis"
    SUPPORT = "Support"
    RELATION_HOLDS = "RelationHolds"
    RELATION_TRIVIAL = "RelationTrivial"
    RESIDUE_ALGEBRAIC = "ResidueAlgebraic"
    WITNESS_RELATION = "WitnessRelation"
    FREE_FIELDS = "FreeFields"
    DISJOINT_FIELDS = "DisjointFields"
    CONTRADICTION = "Contradiction"
    ALL_OF = "AllOf"


class RelationKind(str, Enum):
    LINEAR = "Linear"
    MONOMIAL = "Monomial"


def _term_set(terms) -> Tuple[Term, ...]:
    return tuple(sorted_terms(normalize(t) for t in terms))


def exp_image(terms) -> Tuple[Term, ...]:
    """Normalized exp of each term, as a sorted set."""
    return _term_set(exp(t) for t in terms)


@dataclass(frozen=True)
class RelationVector:
    """Integer relation over ordered terms.

    Linear means sum q_i * x_i = 0; Monomial means prod exp(x_i)^q_i = 1.
    `coefficients` is None for a generic relation whose coefficients are
    universally quantified; `label` names such a relation.
    """
    terms: Tuple[Term, ...]
    coefficients: Optional[Tuple[int, ...]]
    kind: RelationKind = RelationKind.LINEAR
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "terms",
                           tuple(normalize(t) for t in self.terms))
        if self.coefficients is None:
            if not self.label:
                raise ValueError("A generic relation needs a label")
            return
        coefficients = tuple(self.coefficients)
        if len(coefficients) != len(self.terms):
            raise ValueError(
                f"Relation has {len(self.terms)} terms but "
                f"{len(coefficients)} coefficients")
        if any(not isinstance(c, int) or isinstance(c, bool)
               for c in coefficients):
            raise ValueError(f"Coefficients must be integers: {coefficients}")
        if coefficients and not any(coefficients):
            raise ValueError("Coefficients must not all be zero")
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def from_rationals(cls, terms, values, kind=RelationKind.LINEAR
                       ) -> "RelationVector":
        """Clear denominators and divide by the gcd."""
        values = [Fraction(v) for v in values]
        lcm = 1
        for v in values:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        ints = [int(v * lcm) for v in values]
        g = 0
        for c in ints:
            g = math.gcd(g, c)
        g = g or 1
        return cls(tuple(terms), tuple(c // g for c in ints), kind)

    @classmethod
    def generic(cls, terms, kind=RelationKind.LINEAR) -> "RelationVector":
        """A universally quantified relation over the sorted term set."""
        ordered = _term_set(terms)
        digest = hashlib.sha1(
            "|".join(to_text(t) for t in ordered).encode("utf-8")
        ).hexdigest()[:8]
        return cls(ordered, None, kind, f"q{digest}")

    @property
    def is_generic(self) -> bool:
        return self.coefficients is None

    def as_kind(self, kind: RelationKind) -> "RelationVector":
        return replace(self, kind=kind)

    def restricted(self, subset) -> "RelationVector":
        """The same generic relation read on a subset of its terms."""
        keep = set(subset)
        if not self.is_generic:
            raise ValueError("Only generic relations can be restricted")
        return RelationVector(tuple(t for t in self.terms if t in keep), None,
                              self.kind, self.label)

    def symbols(self) -> list:
        if self.is_generic:
            return [f"{self.label}[{to_text(t)}]" for t in self.terms]
        return [str(c) for c in self.coefficients]

    def describe(self) -> str:
        """Readable form: the linear sum, or the monomial on exp images."""
        if self.kind is RelationKind.LINEAR:
            parts = [f"{c} * {to_text(t)}"
                     for c, t in zip(self.symbols(), self.terms)]
            return " + ".join(parts) + " = 0"
        parts = [f"{to_text(normalize(exp(t)))} ^ {c}"
                 for c, t in zip(self.symbols(), self.terms)]
        return " * ".join(parts) + " = 1"

    def to_dict(self) -> dict:
        return {
            "terms": [to_text(t) for t in self.terms],
            "coefficients": None if self.coefficients is None
            else list(self.coefficients),
            "kind": self.kind.value,
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict, parse: Callable) -> "RelationVector":
        coefficients = data.get("coefficients")
        return cls(tuple(parse(t) for t in data["terms"]),
                   None if coefficients is None
                   else tuple(int(c) for c in coefficients),
                   RelationKind(data["kind"]), data.get("label"))


@dataclass(frozen=True)
class Statement:
    """The proposition a fact asserts.

    Which fields are meaningful depends on `kind`; set-valued fields hold
    normalized terms in term order.
    """
    kind: StatementKind
    terms: Tuple[Term, ...] = ()
    subject: Optional[Term] = None
    others: Tuple[Term, ...] = ()
    count: Optional[int] = None
    levels: Tuple[int, ...] = ()
    base: str = ""
    relation: Optional[RelationVector] = None
    parts: Tuple["Statement", ...] = ()
    data: Optional[dict] = field(default=None, compare=False, hash=False)

    def describe(self) -> str:
        names = ", ".join(to_text(t) for t in self.terms)
        others = ", ".join(to_text(t) for t in self.others)
        subject = to_text(self.subject) if self.subject is not None else ""
        kind = self.kind
        if kind in (StatementKind.Q_LINEARLY_INDEPENDENT,
                    StatementKind.QBAR_LINEARLY_INDEPENDENT):
            return f"{kind.value}({{{names}}})"
        if kind is StatementKind.ALGEBRAICALLY_INDEPENDENT:
            return f"{kind.value}({{{names}}} over {self.base})"
        if kind is StatementKind.ALGEBRAIC_OVER:
            return f"{kind.value}({subject}, {{{names}}})"
        if kind in (StatementKind.TRDEG_AT_LEAST, StatementKind.TRDEG_AT_MOST,
                    StatementKind.TRDEG_EQUALS):
            return f"{kind.value}({{{names}}}, {self.count})"
        if kind is StatementKind.TRDEG_SAME:
            return f"{kind.value}({{{names}}}, {{{others}}})"
        if kind in (StatementKind.MEMBER_E, StatementKind.MEMBER_L,
                    StatementKind.NOT_MEMBER_E, StatementKind.NOT_MEMBER_L):
            return f"{kind.value}({subject}, {self.levels[0]})"
        if kind in (StatementKind.MEMBER_QBAR, StatementKind.NOT_MEMBER_QBAR,
                    StatementKind.NONZERO):
            return f"{kind.value}({subject})"
        if kind in (StatementKind.LINEARLY_DISJOINT,
                    StatementKind.INTERSECTION_IS_QBAR,
                    StatementKind.CONTRADICTION):
            return f"{kind.value}({', '.join(map(str, self.levels))})"
        if kind in (StatementKind.RELATION_HOLDS,
                    StatementKind.RELATION_TRIVIAL,
                    StatementKind.RESIDUE_ALGEBRAIC):
            extra = f" on {{{names}}}" if self.terms else ""
            note = f" [{self.base}]" if self.base else ""
            return f"{kind.value}({self.relation.describe()}{extra}){note}"
        if kind is StatementKind.ALL_OF:
            return " AND ".join(p.describe() for p in self.parts)
        if kind is StatementKind.SUPPORT:
            return (f"{kind.value}[{self.base}]({subject}; {{{names}}}, "
                    f"level {self.count})")
        return f"{kind.value}({{{names}}}; {{{others}}}; {self.base})"

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        if self.terms:
            out["terms"] = [to_text(t) for t in self.terms]
        if self.subject is not None:
            out["subject"] = to_text(self.subject)
        if self.others:
            out["others"] = [to_text(t) for t in self.others]
        if self.count is not None:
            out["count"] = self.count
        if self.levels:
            out["levels"] = list(self.levels)
        if self.base:
            out["base"] = self.base
        if self.relation is not None:
            out["relation"] = self.relation.to_dict()
        if self.parts:
            out["parts"] = [p.to_dict() for p in self.parts]
        if self.data is not None:
            out["data"] = self.data
        return out

    @classmethod
    def from_dict(cls, data: dict, parse: Callable) -> "Statement":
        relation = data.get("relation")
        return cls(
            StatementKind(data["kind"]),
            tuple(parse(t) for t in data.get("terms", ())),
            parse(data["subject"]) if "subject" in data else None,
            tuple(parse(t) for t in data.get("others", ())),
            data.get("count"),
            tuple(int(v) for v in data.get("levels", ())),
            data.get("base", ""),
            None if relation is None
            else RelationVector.from_dict(relation, parse),
            tuple(cls.from_dict(p, parse) for p in data.get("parts", ())),
            data.get("data"),
        )


# Statement constructors. Set-valued arguments are normalized and sorted.

def q_linearly_independent(terms) -> Statement:
    return Statement(StatementKind.Q_LINEARLY_INDEPENDENT, _term_set(terms))


def qbar_linearly_independent(terms) -> Statement:
    return Statement(StatementKind.QBAR_LINEARLY_INDEPENDENT,
                     _term_set(terms))


def algebraically_independent(terms, base: str = "Q") -> Statement:
    """`base` is "Q", "Qbar", "E:m" or "L:n"."""
    return Statement(StatementKind.ALGEBRAICALLY_INDEPENDENT,
                     _term_set(terms), base=base)


def algebraic_over(subject: Term, terms) -> Statement:
    return Statement(StatementKind.ALGEBRAIC_OVER, _term_set(terms),
                     subject=normalize(subject))


def trdeg_at_least(terms, count: int) -> Statement:
    return Statement(StatementKind.TRDEG_AT_LEAST, _term_set(terms),
                     count=count)


def trdeg_at_most(terms, count: int, spanning=()) -> Statement:
    """trdeg Q(terms) <= count, with the spanning set in `others`."""
    return Statement(StatementKind.TRDEG_AT_MOST, _term_set(terms),
                     others=_term_set(spanning), count=count)


def trdeg_equals(terms, count: int) -> Statement:
    return Statement(StatementKind.TRDEG_EQUALS, _term_set(terms),
                     count=count)


def trdeg_same(terms, others) -> Statement:
    return Statement(StatementKind.TRDEG_SAME, _term_set(terms),
                     others=_term_set(others))


def member_e(subject: Term, level: int) -> Statement:
    return Statement(StatementKind.MEMBER_E, subject=normalize(subject),
                     levels=(level,))


def member_l(subject: Term, level: int) -> Statement:
    return Statement(StatementKind.MEMBER_L, subject=normalize(subject),
                     levels=(level,))


def member_qbar(subject: Term) -> Statement:
    return Statement(StatementKind.MEMBER_QBAR, subject=normalize(subject))


def not_member_e(subject: Term, level: int) -> Statement:
    return Statement(StatementKind.NOT_MEMBER_E, subject=normalize(subject),
                     levels=(level,))


def not_member_l(subject: Term, level: int) -> Statement:
    return Statement(StatementKind.NOT_MEMBER_L, subject=normalize(subject),
                     levels=(level,))


def not_member_qbar(subject: Term) -> Statement:
    return Statement(StatementKind.NOT_MEMBER_QBAR,
                     subject=normalize(subject))


def linearly_disjoint(m: int, n: int) -> Statement:
    return Statement(StatementKind.LINEARLY_DISJOINT, levels=(m, n))


def intersection_is_qbar(m: int, n: int) -> Statement:
    return Statement(StatementKind.INTERSECTION_IS_QBAR, levels=(m, n))


def nonzero(subject: Term, precision: int = 0) -> Statement:
    return Statement(StatementKind.NONZERO, subject=normalize(subject),
                     data={"precision": precision})


def transcendence_basis(basis, pool, target: str) -> Statement:
    """`target` "exp-image": exp(basis) is a transcendence basis of
    Q(exp(pool)); "identity": basis is one of Q(pool)."""
    return Statement(StatementKind.TRANSCENDENCE_BASIS, _term_set(basis),
                     others=_term_set(pool), base=target)


def support(support_set) -> Statement:
    return Statement(StatementKind.SUPPORT, support_set.elements,
                     subject=support_set.subject,
                     count=support_set.level_witness,
                     base=support_set.kind.value,
                     data=support_set.to_dict())


def relation_holds(relation: RelationVector) -> Statement:
    return Statement(StatementKind.RELATION_HOLDS, relation=relation)


def relation_trivial(relation: RelationVector, covered, note: str = ""
                     ) -> Statement:
    """Coefficients of `relation` on `covered` vanish."""
    return Statement(StatementKind.RELATION_TRIVIAL, _term_set(covered),
                     relation=relation, base=note)


def residue_algebraic(relation: RelationVector, part) -> Statement:
    """The part of `relation` on `part` sums to an algebraic number."""
    return Statement(StatementKind.RESIDUE_ALGEBRAIC, _term_set(part),
                     relation=relation)


def witness_relation(l_terms, e_terms, m: int, n: int) -> Statement:
    """sum l_i * e_i = 0 with l in L_n independent over Qbar, e in E_m."""
    return Statement(StatementKind.WITNESS_RELATION,
                     tuple(normalize(t) for t in l_terms),
                     others=tuple(normalize(t) for t in e_terms),
                     levels=(m, n))


def free_fields(left, right) -> Statement:
    return Statement(StatementKind.FREE_FIELDS, _term_set(left),
                     others=_term_set(right))


def disjoint_fields(left, right) -> Statement:
    return Statement(StatementKind.DISJOINT_FIELDS, _term_set(left),
                     others=_term_set(right))


def contradiction(m: int, n: int) -> Statement:
    return Statement(StatementKind.CONTRADICTION, levels=(m, n))


def all_of(*parts: Statement) -> Statement:
    return Statement(StatementKind.ALL_OF, parts=tuple(parts))


@dataclass(frozen=True)
class Fact:
    """A derived statement with its justification.

    `assumptions` holds the ids of the open hypotheses the fact depends on.
    """
    id: int
    statement: Statement
    rule: str
    premises: Tuple[int, ...]
    provenance: Provenance
    anchor: str = ""
    assumptions: frozenset = frozenset()

    @property
    def is_open(self) -> bool:
        return bool(self.assumptions)


# --------------------------------------------------------- closure systems

def span(start, candidates, dependencies) -> set:
    """Terms of `candidates` algebraic over `start`.

    Parameters
    ----------
    start: iterable of Term
        Generators.
    candidates: iterable of Term
        Terms that may join the span.
    dependencies: dict
        Term -> list of frozensets T with the term algebraic over Q(T).

    Returns
    -------
    start plus every candidate reachable by syntactic generation or by a
    dependency whose set already lies in the span.
    """
    current = set(start)
    pending = [c for c in candidates if c not in current]
    changed = True
    while changed and pending:
        changed = False
        still = []
        for x in pending:
            if generated_by(x, current) or any(
                    deps <= current for deps in dependencies.get(x, ())):
                current.add(x)
                changed = True
            else:
                still.append(x)
        pending = still
    return current


# Above this many elements the spanning search is greedy.
EXACT_SPANNING_LIMIT = 12


def min_spanning_set(elements, dependencies) -> tuple:
    """A smallest subset of `elements` whose span covers all of them.

    Exhaustive for small sets, greedy in term order otherwise.
    """
    elements = sorted_terms(elements)
    target = set(elements)
    if len(elements) <= EXACT_SPANNING_LIMIT:
        for size in range(len(elements) + 1):
            for subset in itertools.combinations(elements, size):
                if target <= span(subset, elements, dependencies):
                    return tuple(subset)
    chosen = []
    for x in elements:
        if x not in span(chosen, elements, dependencies):
            chosen.append(x)
    return tuple(chosen)
