"""Append-only knowledge base of derived facts."""

import logging
import threading
from typing import Dict, Iterable, List, Optional, Sequence, Union

from .config import Settings
from .errors import BudgetExhaustedError, ObligationError
from .facts import Fact, Provenance, Statement, StatementKind
from .rules import PACKS, RULES, InferenceRule

logger = logging.getLogger(__name__)


def assumption_closure(rule: InferenceRule, statement: Statement,
                       premises: Sequence[Fact], fact_id: int,
                       fact_of) -> frozenset:
    """Open assumptions of a new fact.

    Parameters
    ----------
    rule: InferenceRule
        The rule deriving the fact.
    statement: Statement
        Its conclusion.
    premises: list of Fact
        Its premises, in order.
    fact_id: int
        Id of the new fact; hypotheses depend on themselves.
    fact_of: callable
        Id -> Fact, for assumption and cone lookups.

    Returns
    -------
    The set of hypothesis fact ids the new fact still depends on.

    Raises
    ------
    ObligationError when a discharged assumption was used by a step whose
    rule is not schematic.
    """
    out = set()
    for premise in premises:
        for assumption in premise.assumptions:
            hypothesis = fact_of(assumption)
            if rule.releases is not None and rule.releases(
                    statement, premise.statement, hypothesis.statement):
                gap = _non_schematic_step(premise, assumption, fact_of)
                if gap is not None:
                    raise ObligationError(
                        rule.name, f"Fact {gap.id} ({gap.rule}) depends on "
                        f"the discharged assumption {assumption} but is not "
                        "schematic")
                continue
            out.add(assumption)
    if rule.hypothesis:
        out.add(fact_id)
    return frozenset(out)


def _non_schematic_step(root: Fact, assumption: int, fact_of
                        ) -> Optional[Fact]:
    stack = [root]
    seen = set()
    while stack:
        fact = stack.pop()
        if fact.id in seen or assumption not in fact.assumptions:
            continue
        seen.add(fact.id)
        rule = RULES.get(fact.rule)
        if rule is None or not (rule.schematic or rule.hypothesis):
            return fact
        stack.extend(fact_of(p) for p in fact.premises)
    return None


def required_provenance(rule: InferenceRule,
                        premises: Iterable[Fact]) -> Provenance:
    """The rule floor weakened by every premise."""
    return max([rule.floor, *(p.provenance for p in premises)])


class KnowledgeBase:
    """Monotone fact store.

    Facts are never retracted. Each statement is stored once per set of open
    assumptions, so re-running a derivation returns the existing fact.
    Lookups only see facts without open assumptions unless asked otherwise.
    """
    def __init__(self, settings: Optional[Settings] = None,
                 packs: Sequence[str] = ("core",)):
        self.settings = settings or Settings()
        self.facts: List[Fact] = []
        self.packs = set(packs)
        self._index: Dict[tuple, Fact] = {}
        self._closed: Dict[Statement, Fact] = {}
        self._dependencies: Dict[object, list] = {}
        self._lock = threading.RLock()

    def __len__(self):
        return len(self.facts)

    def __contains__(self, fact: Fact):
        return 0 < fact.id <= len(self.facts) \
            and self.facts[fact.id - 1] is fact

    def enable(self, pack: str) -> List[str]:
        """Make a rule pack available; returns its rule names."""
        if pack not in PACKS:
            raise ValueError(f"Unknown rule pack: {pack}")
        with self._lock:
            self.packs.add(pack)
        return sorted(r.name for r in RULES.values() if r.pack == pack)

    def get(self, fact_id: int) -> Fact:
        if not 0 < fact_id <= len(self.facts):
            raise KeyError(f"No fact {fact_id}")
        return self.facts[fact_id - 1]

    def find(self, statement: Statement) -> Optional[Fact]:
        """The fact proving `statement` without open assumptions."""
        return self._closed.get(statement)

    def of_kind(self, kind: StatementKind) -> List[Fact]:
        """Facts without open assumptions of one statement kind."""
        return [f for f in self._closed.values() if f.statement.kind is kind]

    def dependencies(self) -> dict:
        """Term -> list of frozensets it is known algebraic over."""
        return {k: list(v) for k, v in self._dependencies.items()}

    def dependency_facts(self, subjects) -> List[Fact]:
        """Closed AlgebraicOver facts about the given subjects."""
        wanted = set(subjects)
        return [f for f in self.of_kind(StatementKind.ALGEBRAIC_OVER)
                if f.statement.subject in wanted]

    def derive(self, rule_name: str, statement: Statement,
               premises: Sequence[Union[Fact, int]] = ()) -> Fact:
        """Apply a rule and store its conclusion.

        Parameters
        ----------
        rule_name: str
            A registered rule of an enabled pack.
        statement: Statement
            The conclusion.
        premises: list of Fact or int
            Premise facts of this knowledge base, or their ids.

        Returns
        -------
        The stored Fact, possibly an existing one.

        Raises
        ------
        ObligationError when the rule does not justify the step.
        BudgetExhaustedError when the store is full.
        """
        rule = RULES.get(rule_name)
        if rule is None or rule.pack not in self.packs:
            raise ObligationError(rule_name, "Rule is not enabled")
        facts = [self.get(p) if isinstance(p, int) else p for p in premises]
        for fact in facts:
            if fact not in self:
                raise ObligationError(
                    rule_name, f"Premise {fact.id} is not in this store")
        reason = rule.check(statement, [f.statement for f in facts])
        if reason is not None:
            raise ObligationError(rule_name, reason)
        provenance = required_provenance(rule, facts)

        with self._lock:
            next_id = len(self.facts) + 1
            assumptions = assumption_closure(rule, statement, facts,
                                             next_id, self.get)
            key = (statement, rule.hypothesis,
                   assumptions - {next_id} if rule.hypothesis
                   else assumptions)
            existing = self._index.get(key)
            if existing is not None and existing.provenance <= provenance:
                return existing
            if len(self.facts) >= self.settings.max_facts:
                raise BudgetExhaustedError(
                    f"Knowledge base holds {len(self.facts)} facts")
            fact = Fact(next_id, statement, rule.name,
                        tuple(f.id for f in facts), provenance, rule.anchor,
                        assumptions)
            self.facts.append(fact)
            self._index[key] = fact
            if not assumptions:
                known = self._closed.get(statement)
                if known is None or known.provenance > provenance:
                    self._closed[statement] = fact
                if statement.kind is StatementKind.ALGEBRAIC_OVER:
                    self._dependencies.setdefault(
                        statement.subject, []).append(
                            frozenset(statement.terms))
        logger.debug("Fact %d by %s: %s [%s]", fact.id, rule.name,
                     statement.describe(), provenance.label)
        return fact

    def cone(self, fact: Fact) -> List[Fact]:
        """The fact and all its ancestors, in id order."""
        seen = set()
        stack = [fact]
        while stack:
            current = stack.pop()
            if current.id in seen:
                continue
            seen.add(current.id)
            stack.extend(self.get(p) for p in current.premises)
        return [self.get(i) for i in sorted(seen)]
