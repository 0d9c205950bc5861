"""Tests for exp and log support sets"""

from dataclasses import replace

import pytest

from schanuel.errors import UndefinedLevelError
from schanuel.support import (
    SupportKind,
    closure_diagnostics,
    exp_support,
    image,
    log_support,
    verify_closure,
)
from schanuel.syntax import parse
from schanuel.terms import (
    ONE,
    NodeKind,
    alg,
    e,
    e_level,
    exp,
    exp_tower,
    i_pi,
    l_level,
    normalize,
)


def test_exp_support_of_triple_tower():
    """Verify the support of e^(e^e) is {1, e, e^e}"""
    support = exp_support(exp_tower(3))
    assert support.kind is SupportKind.EXP
    assert set(support.elements) == {ONE, e(), exp(e())}
    assert support.level_witness == 2
    assert verify_closure(support)


def test_exp_support_of_e():
    """Verify the support of e is {1}"""
    support = exp_support(e())
    assert support.elements == (ONE,)
    assert support.level_witness == 0
    assert image(support) == [e()]


def test_exp_support_of_sum():
    """Verify every maximal Exp argument enters the support"""
    support = exp_support(parse("exp(1) + exp(alg(sqrt2))"))
    assert set(support.elements) == {ONE, normalize(alg("sqrt2"))}
    assert verify_closure(support)


def test_log_support_of_log_log_pi():
    """Verify the support of log log pi holds every Log subterm"""
    support = log_support(parse("log(log(pi))"))
    assert support.kind is SupportKind.LOG
    assert i_pi() in support.elements
    assert len(support.elements) == 3
    assert support.level_witness == 2
    assert verify_closure(support)


def test_log_support_of_i_pi():
    """Verify log(-1; 0) supports itself at level 0"""
    support = log_support(i_pi())
    assert support.elements == (i_pi(),)
    assert support.level_witness == 0
    assert verify_closure(support)


@pytest.mark.parametrize("text, build", [
    ("5", log_support),
    ("alg(sqrt2)", exp_support),
    ("log(2)", exp_support),
    ("exp(1)", log_support),
])
def test_support_undefined(text, build):
    """Verify algebraic or wrong-tower terms have no support"""
    with pytest.raises(UndefinedLevelError):
        build(parse(text))


def test_tampered_support_fails():
    """Verify dropping an element is diagnosed"""
    support = exp_support(exp_tower(3))
    tampered = replace(support, elements=tuple(
        t for t in support.elements if t is not ONE))
    assert not verify_closure(tampered)
    assert any("not in A" in problem
               for problem in closure_diagnostics(tampered))


def test_tampered_level_witness_fails():
    """Verify a level witness below the subject is diagnosed"""
    support = exp_support(exp_tower(3))
    tampered = replace(support, level_witness=1)
    problems = closure_diagnostics(tampered)
    assert any("exceeds witness" in problem for problem in problems)


def test_tampered_log_support_fails():
    """Verify a log support missing its innermost Log is diagnosed"""
    support = log_support(parse("log(log(pi))"))
    tampered = replace(support, elements=tuple(
        t for t in support.elements if t is not i_pi()))
    assert any("not in C" in problem
               for problem in closure_diagnostics(tampered))


def test_random_supports_are_closed(rng, term_factory):
    """Verify supports of random single-tower terms pass the checker"""
    checked = 0
    for _ in range(200):
        kind = rng.choice([NodeKind.EXP, NodeKind.LOG])
        t = normalize(term_factory(rng, 4, kind))
        if kind is NodeKind.EXP and e_level(t):
            support = exp_support(t)
        elif kind is NodeKind.LOG and l_level(t):
            support = log_support(t)
        else:
            continue
        assert closure_diagnostics(support) == []
        checked += 1
    assert checked > 50
