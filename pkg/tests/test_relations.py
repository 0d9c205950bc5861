"""Tests for integer relation search and exact confirmation"""

import pytest

from schanuel.errors import InsufficientPrecisionError
from schanuel.facts import RelationKind, RelationVector
from schanuel.engine import reduce_linear_to_monomial
from schanuel.numeric import evaluate
from schanuel.relations import (
    confirm_relation,
    falsify_linear_independence,
    find_integer_relation,
    linear_combination,
    monomial_image,
    probe_algebraic_independence,
    required_precision,
)
from schanuel.syntax import parse
from schanuel.terms import ONE, alg, e, exp, i_pi, log, normalize, pi, rational

_PRIMES = (2, 3, 5, 7, 11, 13)


@pytest.fixture(name="log_2_3_6")
def fixture_log_2_3_6():
    """log 2 + log 3 - log 6 = 0"""
    return RelationVector(
        tuple(parse(f"log({a}; 0)") for a in (2, 3, 6)), (1, 1, -1))


def test_required_precision():
    """Verify the precision floor grows with height and count"""
    assert required_precision(100, 3) == 84
    assert required_precision(10000, 4) > required_precision(10000, 3)


def test_find_integer_relation_none_for_one_and_pi():
    """Verify no small relation between 1 and pi"""
    values = [evaluate(ONE, 256), evaluate(pi(), 256)]
    assert find_integer_relation(values, 100) is None


def test_find_integer_relation_zero_value():
    """Verify a value enclosing zero yields a unit vector"""
    values = [evaluate(exp(ONE), 128), evaluate(rational(0), 128)]
    assert find_integer_relation(values, 10) == (0, 1)


def test_find_integer_relation_insufficient_precision():
    """Verify the search refuses too coarse enclosures"""
    values = [evaluate(parse(f"log({p})"), 64) for p in _PRIMES[:3]]
    with pytest.raises(InsufficientPrecisionError):
        find_integer_relation(values, 10000)


def test_find_integer_relation_rejects_height():
    """Verify the height must be positive"""
    with pytest.raises(ValueError, match="Height must be a positive"):
        find_integer_relation([evaluate(ONE, 64)], 0)


def test_find_planted_relations(rng):
    """Verify planted relations of height <= 1000 among <= 6 values are
    recovered at 512 bits"""
    logs = [parse(f"log({p}; 0)") for p in _PRIMES]
    for _ in range(100):
        bases = rng.sample(logs, rng.randint(1, 5))
        planted = [rng.randint(-1000, 1000) for _ in bases]
        if not any(planted):
            planted[0] = 1
        combined = linear_combination(RelationVector(tuple(bases),
                                                     tuple(planted)))
        values = [evaluate(t, 512) for t in (*bases, combined)]
        found = find_integer_relation(values, 1000)
        assert found is not None
        expected = (*planted, -1)
        assert found in (expected, tuple(-q for q in expected))


def test_confirm_relation(log_2_3_6, settings):
    """Verify exact confirmation of linear and monomial relations"""
    assert confirm_relation(log_2_3_6, settings)
    assert confirm_relation(log_2_3_6.as_kind(RelationKind.MONOMIAL),
                            settings)
    wrong = RelationVector(log_2_3_6.terms, (1, 1, 1))
    assert not confirm_relation(wrong, settings)
    generic = RelationVector.generic(log_2_3_6.terms)
    assert not confirm_relation(generic, settings)


def test_confirm_relation_rejects_multiples_of_two_pi_i(settings):
    """Verify a trivial monomial image alone does not confirm"""
    assert not confirm_relation(RelationVector((i_pi(),), (2,)), settings)
    branches = RelationVector((log(rational(2), 1), log(rational(2), 0)),
                              (1, -1))
    assert not confirm_relation(branches, settings)


def test_falsify_linear_independence(settings):
    """Verify log 2, log 3, log 6 are shown dependent"""
    terms = [parse(f"log({a})") for a in (2, 3, 6)]
    relation = falsify_linear_independence(terms, 200, 100, settings)
    assert relation is not None
    assert relation.coefficients == (1, 1, -1)
    assert relation.kind is RelationKind.LINEAR


def test_falsify_linear_independence_none(settings):
    """Verify no relation is reported for 1 and e"""
    assert falsify_linear_independence([ONE, e()], 256, 100,
                                       settings) is None


def test_reduce_linear_to_monomial(log_2_3_6):
    """Verify the monomial image keeps terms and coefficients"""
    monomial = reduce_linear_to_monomial(log_2_3_6)
    assert monomial.kind is RelationKind.MONOMIAL
    assert monomial.coefficients == log_2_3_6.coefficients
    assert monomial.describe().endswith("= 1")
    assert monomial_image(monomial) is ONE
    with pytest.raises(ValueError, match="Only linear relations"):
        reduce_linear_to_monomial(monomial)


@pytest.mark.parametrize("precision", [128, 256, 512])
def test_monomial_image_matches_exp_of_sum(rng, precision):
    """Verify exp of a linear combination equals its monomial image"""
    pool = [parse(f"log({a}; 0)") for a in range(2, 10)] + [i_pi()]
    for _ in range(100):
        chosen = rng.sample(pool, rng.randint(1, 4))
        coefficients = [rng.randint(-50, 50) for _ in chosen]
        if not any(coefficients):
            coefficients[0] = 1
        relation = RelationVector(tuple(chosen), tuple(coefficients))
        direct = evaluate(normalize(exp(linear_combination(relation))),
                          precision)
        assert direct.overlaps(evaluate(monomial_image(relation), precision))


def test_probe_algebraic_independence(settings):
    """Verify the heuristic probe on e and on sqrt(2)"""
    assert probe_algebraic_independence([e()], settings)
    assert not probe_algebraic_independence([alg("sqrt2")], settings)
    assert probe_algebraic_independence([], settings)
