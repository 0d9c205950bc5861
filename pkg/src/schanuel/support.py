"""Support sets one tower level down.

For x in E_n the exp support is a finite A in E_{n-1} with x and A generated
by exp(A) over the algebraic numbers: every maximal Exp-subterm of x, and of
each element of A, is exp(a) for some a in A. The log support is the dual
over Log nodes.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from .errors import UndefinedLevelError
from .terms import (
    NodeKind,
    Term,
    e_level,
    exp,
    l_level,
    maximal_subterms,
    normalize,
    sort_key,
    sorted_terms,
    subterms,
    to_constructor,
    to_text,
)


class SupportKind(str, Enum):
    EXP = "exp"
    LOG = "log"


@dataclass(frozen=True)
class ClosureEntry:
    """Nodes consumed by one source term.

    For exp supports, `consumed` lists the arguments of the maximal
    Exp-subterms of `source`; for log supports, its maximal Log-subterms.
    """
    source: Term
    consumed: Tuple[Term, ...]


@dataclass(frozen=True)
class SupportSet:
    kind: SupportKind
    subject: Term
    elements: Tuple[Term, ...]
    level_witness: int
    certificate: Tuple[ClosureEntry, ...]

    def sources(self) -> list:
        """Terms whose closure the certificate must cover."""
        if self.kind is SupportKind.EXP:
            return [self.subject, *self.elements]
        return [self.subject, *(c.argument for c in self.elements)]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "subject": to_text(self.subject),
            "elements": [to_text(t) for t in self.elements],
            "level_witness": self.level_witness,
            "certificate": [
                {"source": to_text(entry.source),
                 "consumed": [to_text(t) for t in entry.consumed]}
                for entry in self.certificate
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, parse) -> "SupportSet":
        """Rebuild from to_dict output, with `parse` turning text into terms."""
        return cls(
            SupportKind(data["kind"]),
            parse(data["subject"]),
            tuple(parse(t) for t in data["elements"]),
            int(data["level_witness"]),
            tuple(ClosureEntry(parse(entry["source"]),
                               tuple(parse(t) for t in entry["consumed"]))
                  for entry in data["certificate"]),
        )


def _exp_consumed(source: Term) -> Tuple[Term, ...]:
    return tuple(sorted_terms(
        m.argument for m in maximal_subterms(source, NodeKind.EXP)))


def _log_consumed(source: Term) -> Tuple[Term, ...]:
    return tuple(maximal_subterms(source, NodeKind.LOG))


def exp_support(x: Term) -> SupportSet:
    """Exp-side support: the level-by-level cascade of Exp arguments.

    Parameters
    ----------
    x: Term
        A term with e_level n >= 1.

    Returns
    -------
    The SupportSet with elements in E_{n-1} and one certificate entry per
    source term.
    """
    x = normalize(x)
    level = e_level(x)
    if level is None:
        raise UndefinedLevelError(
            f"{to_text(x)} contains Log nodes and has no E-level")
    if level == 0:
        raise UndefinedLevelError(f"{to_text(x)} is algebraic, level 0")
    elements = set()
    entries = {}
    frontier = [x]
    while frontier:
        source = frontier.pop()
        if source in entries:
            continue
        consumed = _exp_consumed(source)
        entries[source] = ClosureEntry(source, consumed)
        for arg in consumed:
            if arg not in elements:
                elements.add(arg)
                frontier.append(arg)
    ordered = tuple(sorted_terms(elements))
    return SupportSet(SupportKind.EXP, x, ordered, level - 1,
                      tuple(entries[s] for s in [x, *ordered]
                            if s in entries))


def log_support(x: Term) -> SupportSet:
    """Log-side support: every Log subterm of x.

    exp(log(u; k)) normalizes to u, one level down, so C = all Log subterms
    gives exp(C) in L_{n-1} with x and exp(C) generated by C.
    """
    x = normalize(x)
    level = l_level(x)
    if level is None:
        raise UndefinedLevelError(
            f"{to_text(x)} contains Exp nodes and has no L-level")
    if level == 0:
        raise UndefinedLevelError(f"{to_text(x)} is algebraic, level 0")
    elements = tuple(sorted_terms(
        n for n in subterms(x) if n.kind is NodeKind.LOG))
    entries = {}
    for source in [x, *(c.argument for c in elements)]:
        if source not in entries:
            entries[source] = ClosureEntry(source, _log_consumed(source))
    return SupportSet(SupportKind.LOG, x, elements, level - 1,
                      tuple(entries.values()))


def closure_diagnostics(s: SupportSet) -> list:
    """Every violated support invariant, re-derived from the terms.

    An empty list means the support is valid.
    """
    problems = []
    members = set(s.elements)
    if list(s.elements) != sorted(members, key=sort_key):
        problems.append("Elements are not distinct and sorted")
    level_of = e_level if s.kind is SupportKind.EXP else l_level
    tower = "E" if s.kind is SupportKind.EXP else "L"
    subject_level = level_of(s.subject)
    if subject_level is None:
        problems.append(f"Subject {to_constructor(s.subject)} has no "
                        f"{tower}-level")
        return problems
    if subject_level > s.level_witness + 1:
        problems.append(f"Subject level {subject_level} exceeds witness "
                        f"{s.level_witness} + 1")

    for element in s.elements:
        if s.kind is SupportKind.EXP:
            level = e_level(element)
        else:
            if element.kind is not NodeKind.LOG:
                problems.append(f"Element {to_constructor(element)} is not "
                                "a Log node")
                continue
            level = l_level(normalize(element.argument))
        if level is None or level > s.level_witness:
            problems.append(f"Element {to_constructor(element)} is not in "
                            f"{tower}_{s.level_witness}")

    recorded = {entry.source: entry.consumed for entry in s.certificate}
    consume = _exp_consumed if s.kind is SupportKind.EXP else _log_consumed
    for source in s.sources():
        actual = consume(source)
        if recorded.get(source) != actual:
            problems.append(f"Certificate entry for {to_constructor(source)} "
                            "does not match its subterms")
        for node in actual:
            if node not in members:
                label = "Exp-argument" if s.kind is SupportKind.EXP \
                    else "Log-subterm"
                problems.append(f"{label} {to_constructor(node)} not in "
                                f"{'A' if s.kind is SupportKind.EXP else 'C'}")
    return problems


def verify_closure(s: SupportSet) -> bool:
    """Whether all support invariants hold."""
    return not closure_diagnostics(s)


def image(support: SupportSet) -> list:
    """exp(A) for exp supports, exp(C) for log supports, normalized."""
    return sorted_terms(normalize(exp(t)) for t in support.elements)
