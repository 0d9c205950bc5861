"""Tests for enclosure evaluation and nonzero certificates"""

import math

import pytest

from schanuel.config import Settings
from schanuel.errors import PrecisionEscalationError
from schanuel.numeric import certify_nonzero, evaluate, evaluate_once
from schanuel.syntax import parse, parse_raw
from schanuel.terms import NodeKind, normalize, product_of, rational, sum_of


def test_evaluate_i_pi():
    """Verify log(-1; 0) encloses i*pi"""
    ball = evaluate(parse("log(-1; 0)"), 128)
    assert abs(float(ball.midpoint.imag) - math.pi) < 1e-12
    assert abs(float(ball.midpoint.real)) < 1e-12
    assert float(ball.radius) < 1e-30


def test_evaluate_branch_offset():
    """Verify branch k adds 2*pi*i*k"""
    ball = evaluate(parse("log(2; 1)"), 128)
    assert abs(float(ball.midpoint.real) - math.log(2)) < 1e-12
    assert abs(float(ball.midpoint.imag) - 2 * math.pi) < 1e-12


def test_evaluate_e():
    """Verify exp(1) encloses e"""
    ball = evaluate(parse("exp(1)"), 64)
    assert abs(float(ball.midpoint.real) - math.e) < 1e-12
    assert not ball.contains_zero()


def test_evaluate_log_log_pi():
    """Verify log log pi is about 0.13518"""
    ball = evaluate(parse("log(log(pi))"), 256)
    assert abs(float(ball.midpoint.real) - 0.13518) < 1e-4
    assert abs(float(ball.midpoint.imag)) < 1e-30


def test_evaluate_rejects_precision():
    """Verify the precision must be positive"""
    with pytest.raises(ValueError, match="Precision must be a positive"):
        evaluate(parse("exp(1)"), 0)


def test_evaluate_degenerate_log():
    """Verify a Log argument that encloses zero escalates and fails"""
    settings = Settings(max_doublings=2)
    t = parse_raw("log(2 - 2)")
    assert evaluate_once(t, 64) is None
    with pytest.raises(PrecisionEscalationError):
        evaluate(t, 64, settings)


@pytest.mark.parametrize("precision", [64, 128, 256])
def test_normalization_preserves_value(rng, term_factory, precision):
    """Verify balls of raw and normalized terms overlap"""
    for _ in range(50):
        raw = term_factory(rng, 2, rng.choice([NodeKind.EXP, NodeKind.LOG]))
        assert evaluate(raw, precision).overlaps(
            evaluate(normalize(raw), precision))


def test_refinement_is_consistent(rng, term_factory):
    """Verify balls at increasing precision stay within summed radii"""
    for _ in range(30):
        t = normalize(term_factory(rng, 3, NodeKind.LOG))
        coarse = evaluate(t, 64)
        fine = evaluate(t, 512)
        assert coarse.overlaps(fine)
        assert fine.radius <= coarse.radius


def test_certify_nonzero_i_pi():
    """Verify i*pi is certified at the starting precision"""
    certificate = certify_nonzero(parse("log(-1; 0)"))
    assert certificate is not None
    assert certificate.precision == 64
    assert certificate.magnitude_lower > 3
    assert certificate.recheck()


def test_certify_nonzero_e_minus_3():
    """Verify e - 3 is certified nonzero"""
    certificate = certify_nonzero(parse("exp(1) - 3"))
    assert certificate is not None
    assert 0 < certificate.magnitude_lower < 0.2818


def test_certify_nonzero_rational():
    """Verify rationals are certified without evaluation"""
    assert certify_nonzero(rational(5)).precision == 0
    assert certify_nonzero(rational(0)) is None


def test_certify_nonzero_exact_zero():
    """Verify exp(log 2) - 2 is never certified"""
    assert certify_nonzero(parse_raw("exp(log(2; 0)) - 2")) is None


def test_certify_nonzero_never_certifies_zero(rng, term_factory):
    """Verify randomized zero identities are never certified"""
    settings = Settings(max_doublings=3)
    for _ in range(100):
        t = term_factory(rng, 2, rng.choice([NodeKind.EXP, NodeKind.LOG]))
        zero = sum_of(t, product_of(rational(-1), t))
        assert certify_nonzero(zero, settings) is None
