"""Tests for terms, normalization, levels and the parser"""

import pytest

from schanuel.errors import LogOfZeroError, TermSyntaxError
from schanuel.syntax import parse, parse_raw
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
    log,
    log_tower,
    normalize,
    pi,
    power,
    product_of,
    rational,
    sorted_terms,
    subterms,
    sum_of,
    term_order,
    to_constructor,
    to_text,
)


@pytest.mark.parametrize("text, expected", [
    ("exp(exp(1))", "Exp(Exp(Rational(1)))"),
    ("log(-1; 0)", "Log(Rational(-1), 0)"),
    ("exp(log(2; 0))", "Rational(2)"),
    ("exp(log(exp(1)))", "Exp(Rational(1))"),
    ("1 + 2", "Rational(3)"),
])
def test_parse_examples(text, expected):
    """Verify parse normalizes to the expected constructor form"""
    assert to_constructor(parse(text)) == expected


def test_terms_are_interned():
    """Verify structurally equal terms are one object"""
    assert parse("exp(exp(1))") is exp(exp(rational(1)))
    assert parse("log(-1)") is i_pi()
    assert rational(3) is rational("3")


@pytest.mark.parametrize("raw, expected", [
    (sum_of(rational(1), rational(2)), rational(3)),
    (exp(log(exp(ONE), 0)), exp(ONE)),
    (product_of(exp(ONE), exp(ONE)), power(exp(ONE), 2)),
    (product_of(alg("sqrt2"), alg("sqrt2")), rational(2)),
    (sum_of(log(rational(2), 1), product_of(rational(-1),
                                             log(rational(2), 0))),
     product_of(rational(2), i_pi())),
])
def test_normalize_examples(raw, expected):
    """Verify normalization rewrites"""
    assert normalize(raw) is normalize(expected)


def test_log_of_zero():
    """Verify a Log whose argument cancels is rejected"""
    with pytest.raises(LogOfZeroError):
        parse("log(exp(1) - exp(1))")


@pytest.mark.parametrize("text, e_expected, l_expected", [
    ("exp(1)", 1, None),
    ("7", 0, 0),
    ("exp(exp(exp(1)))", 3, None),
    ("log(-1; 0)", None, 1),
    ("alg(sqrt2)", 0, 0),
    ("log(log(pi))", None, 3),
    ("exp(1) + log(2)", None, None),
])
def test_levels(text, e_expected, l_expected):
    """Verify the syntactic tower levels"""
    t = parse(text)
    assert e_level(t) == e_expected
    assert l_level(t) == l_expected


def test_tower_constructors():
    """Verify exp_tower and log_tower levels"""
    for n in range(5):
        assert e_level(exp_tower(n)) == n
        assert l_level(normalize(log_tower(n))) == n + 1
    with pytest.raises(ValueError, match="non-negative"):
        exp_tower(-1)


def test_pi_is_minus_i_times_i_pi():
    """Verify pi is an algebraic multiple of log(-1; 0)"""
    t = normalize(pi())
    assert t.kind is NodeKind.PRODUCT
    assert i_pi() in t.children
    assert l_level(t) == 1


def test_term_order():
    """Verify the term order basics"""
    assert term_order(rational(1), exp(ONE)) < 0
    assert term_order(exp(ONE), rational(1)) > 0
    t = parse("exp(2) + log(3)")
    assert term_order(t, t) == 0
    pool = [exp(ONE), rational(2), i_pi()]
    first = sorted_terms(pool)
    assert first == sorted_terms(reversed(pool))
    assert first[0] is rational(2)


@pytest.mark.parametrize("text, position", [
    ("exp(", 4),
    ("1 +", 3),
    ("2 ^ 0", 4),
    ("alg(nosuch)", 4),
    ("1/0", 2),
    ("foo", 0),
    ("1 $ 2", 2),
])
def test_parse_errors(text, position):
    """Verify syntax errors carry the offending position"""
    with pytest.raises(TermSyntaxError) as info:
        parse(text)
    assert info.value.position == position


@pytest.mark.parametrize("kind", [NodeKind.EXP, NodeKind.LOG])
def test_normalize_idempotent(rng, term_factory, kind):
    """Verify normalize is idempotent and leaves no Exp(Log(...))"""
    for _ in range(200):
        t = normalize(term_factory(rng, 4, kind))
        assert normalize(t) is t
        for node in subterms(t):
            if node.kind is NodeKind.EXP:
                assert node.argument.kind is not NodeKind.LOG


@pytest.mark.parametrize("kind", [NodeKind.EXP, NodeKind.LOG])
def test_print_parse_round_trip(rng, term_factory, kind):
    """Verify parse(print(t)) is t on normal forms"""
    for _ in range(200):
        raw = term_factory(rng, 3, kind)
        t = normalize(raw)
        assert parse(to_text(t)) is t
        assert parse(to_text(raw)) is t


def test_parse_raw_keeps_structure():
    """Verify parse_raw does not normalize"""
    t = parse_raw("exp(log(2))")
    assert t.kind is NodeKind.EXP
    assert normalize(t) is rational(2)


def test_e_level_not_increased_by_normalization(rng, term_factory):
    """Verify levels of normal forms never exceed the raw levels"""
    for _ in range(100):
        raw = term_factory(rng, 4, NodeKind.EXP)
        assert e_level(normalize(raw)) <= e_level(raw)
    assert e_level(parse("exp(log(2))")) == 0
    assert e_level(e()) == 1
