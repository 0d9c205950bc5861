"""Proof traces and the independent trace checker.

A trace is a JSON Lines file: a header record, then one record per step with
the fields id, rule, premises, conclusion, anchor and provenance. The
checker trusts nothing but the rule registry: it re-runs every rule check,
recomputes provenance and open assumptions, and compares the last conclusion
with the advertised result.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime
from typing import List, Optional, Tuple, Union

from .algebraic import REGISTRY
from .config import Settings
from .errors import ObligationError, SchanuelError, TraceFormatError
from .facts import Fact, Provenance, Statement
from .knowledge import KnowledgeBase, assumption_closure, required_provenance
from .rules import RULES, axioms
from .syntax import parse
from .terms import NodeKind, subterms

logger = logging.getLogger(__name__)

TOOL = "schanuel"
VERSION = "0.1.0"


@dataclass(frozen=True)
class TraceStep:
    id: int
    rule: str
    premises: Tuple[int, ...]
    conclusion: Statement
    anchor: str
    provenance: Provenance

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "rule": self.rule,
            "premises": list(self.premises),
            "conclusion": self.conclusion.to_dict(),
            "anchor": self.anchor,
            "provenance": self.provenance.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TraceStep":
        return cls(int(data["id"]), str(data["rule"]),
                   tuple(int(p) for p in data["premises"]),
                   Statement.from_dict(data["conclusion"], parse),
                   str(data.get("anchor", "")),
                   Provenance.from_label(data["provenance"]))


def _constant_names(statement: Statement) -> set:
    roots = [*statement.terms, *statement.others]
    if statement.subject is not None:
        roots.append(statement.subject)
    if statement.relation is not None:
        roots.extend(statement.relation.terms)
    names = {node.const.name for t in roots for node in subterms(t)
             if node.kind is NodeKind.ALGEBRAIC}
    for part in statement.parts:
        names |= _constant_names(part)
    return names


@dataclass
class ProofTrace:
    header: dict
    steps: List[TraceStep] = field(default_factory=list)

    @property
    def script(self) -> str:
        return self.header.get("script", "")

    @property
    def result(self) -> Optional[Statement]:
        """The conclusion of the last step."""
        return self.steps[-1].conclusion if self.steps else None

    @property
    def provenance(self) -> Optional[Provenance]:
        return self.steps[-1].provenance if self.steps else None

    @classmethod
    def from_fact(cls, kb: KnowledgeBase, fact: Fact, script: str,
                  settings: Optional[Settings] = None) -> "ProofTrace":
        """The trace of `fact`: its cone in `kb`, renumbered from 1.

        Parameters
        ----------
        kb: KnowledgeBase
            Store holding the fact.
        fact: Fact
            The conclusion.
        script: str
            Name of the producing script, recorded in the header.
        settings: Settings (default=None)
            Settings recorded in the header; kb.settings when None.

        Returns
        -------
        The ProofTrace.
        """
        cone = kb.cone(fact)
        renumber = {f.id: index for index, f in enumerate(cone, start=1)}
        steps = [TraceStep(renumber[f.id], f.rule,
                           tuple(renumber[p] for p in f.premises),
                           f.statement, f.anchor, f.provenance)
                 for f in cone]
        names = set()
        for step in steps:
            names |= _constant_names(step.conclusion)
        header = {
            "tool": TOOL,
            "version": VERSION,
            "timestamp": datetime.now().strftime("%Y%m%d-%H%M%S%f"),
            "config": (settings or kb.settings).snapshot(),
            "axioms": axioms(kb.packs),
            "packs": sorted(kb.packs),
            "script": script,
            "result": fact.statement.to_dict(),
            "provenance": fact.provenance.label,
            "registry": REGISTRY.snapshot(names),
        }
        return cls(header, steps)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"header": self.header}, sort_keys=True)]
        lines.extend(json.dumps(step.to_dict(), sort_keys=True)
                     for step in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "ProofTrace":
        """Parse a trace, registering the algebraic constants it carries.

        Raises
        ------
        TraceFormatError on malformed records.
        """
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            raise TraceFormatError("Trace is empty")
        try:
            header = json.loads(lines[0])["header"]
            REGISTRY.restore(header.get("registry", []))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise TraceFormatError(f"Line 1: bad header: {exc}") from exc
        steps = []
        for number, line in enumerate(lines[1:], start=2):
            try:
                steps.append(TraceStep.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError,
                    SchanuelError) as exc:
                raise TraceFormatError(f"Line {number}: {exc}") from exc
        return cls(header, steps)

    def write(self, path: str) -> str:
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_jsonl())
        return path

    @classmethod
    def read(cls, path: str) -> "ProofTrace":
        with open(path, encoding="utf-8") as f:
            return cls.from_jsonl(f.read())


@dataclass(frozen=True)
class Verdict:
    """Outcome of check_trace; `step` is the first failing step id."""
    valid: bool
    step: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.valid

    def describe(self) -> str:
        if self.valid:
            return "valid"
        where = f" at step {self.step}" if self.step is not None else ""
        return f"invalid{where}: {self.reason}"


def _invalid(step: Optional[int], reason: str) -> Verdict:
    logger.info("Trace rejected at step %s: %s", step, reason)
    return Verdict(False, step, reason)


def check_trace(trace: Union[ProofTrace, str, os.PathLike]) -> Verdict:
    """Replay every step of a trace.

    Parameters
    ----------
    trace: ProofTrace or path
        A parsed trace, or a JSON Lines file.

    Returns
    -------
    Verdict, valid or with the first failing step.

    Raises
    ------
    TraceFormatError when a file does not parse.
    """
    if not isinstance(trace, ProofTrace):
        trace = ProofTrace.read(os.fspath(trace))
    if not trace.steps:
        return _invalid(None, "Trace has no steps")
    header = trace.header
    declared = set(header.get("axioms", ()))
    packs = set(header.get("packs", ("core",)))

    facts = {}
    last = 0
    for step in trace.steps:
        if step.id <= last:
            return _invalid(step.id, "Step ids must increase")
        last = step.id
        rule = RULES.get(step.rule)
        if rule is None:
            return _invalid(step.id, f"Unknown rule {step.rule}")
        if rule.pack not in packs:
            return _invalid(step.id, f"Rule pack {rule.pack} is not enabled")
        if rule.axiom and rule.axiom not in declared:
            return _invalid(step.id, f"Axiom {rule.axiom} is not declared")
        if step.anchor != rule.anchor:
            return _invalid(step.id, "Anchor differs from the rule's")
        missing = [p for p in step.premises if p not in facts]
        if missing:
            return _invalid(step.id, f"Premises {missing} are not earlier "
                            "steps")
        premises = [facts[p] for p in step.premises]
        try:
            reason = rule.check(step.conclusion,
                                [p.statement for p in premises])
        except (SchanuelError, ValueError) as exc:
            reason = str(exc)
        if reason is not None:
            return _invalid(step.id, reason)
        expected = required_provenance(rule, premises)
        if step.provenance != expected:
            return _invalid(step.id, f"Provenance {step.provenance.label} "
                            f"violates the provenance algebra, expected "
                            f"{expected.label}")
        try:
            assumptions = assumption_closure(rule, step.conclusion, premises,
                                             step.id, facts.__getitem__)
        except ObligationError as exc:
            return _invalid(step.id, str(exc))
        facts[step.id] = Fact(step.id, step.conclusion, step.rule,
                              step.premises, step.provenance, step.anchor,
                              assumptions)

    final = trace.steps[-1]
    if header.get("provenance", final.provenance.label) \
            != final.provenance.label:
        return _invalid(final.id, "Header provenance differs from the "
                        "conclusion")
    if facts[final.id].assumptions:
        return _invalid(final.id, "Conclusion depends on open assumptions "
                        f"{sorted(facts[final.id].assumptions)}")
    try:
        advertised = Statement.from_dict(header["result"], parse)
    except (KeyError, TypeError, ValueError, SchanuelError) as exc:
        return _invalid(None, f"Header result is unreadable: {exc}")
    if final.conclusion != advertised:
        return _invalid(final.id, "Last conclusion is not the advertised "
                        "result")
    used = {p for step in trace.steps for p in step.premises}
    for step in trace.steps[:-1]:
        if step.id not in used:
            return _invalid(step.id, "Step is not used by the conclusion")
    return Verdict(True)
