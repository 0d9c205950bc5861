"""Midpoint-radius enclosures of terms.

Each evaluation runs in its own mpmath context so concurrent evaluations at
different precisions do not interfere. Exact zero is never concluded here:
a ball can only certify that a value is nonzero.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from mpmath import MPContext

from .algebraic import is_real, refine_box
from .config import Settings
from .errors import PrecisionEscalationError
from .terms import NodeKind, Term, normalize, to_text

logger = logging.getLogger(__name__)

# Extra working bits on top of the advertised precision.
_GUARD_BITS = 16


class _Degenerate(ArithmeticError):
    """A Log or inverse argument enclosure contains zero."""


def _to_fraction(value) -> Fraction:
    man, exp = value.man_exp
    return Fraction(int(man)) * (Fraction(2) ** int(exp))


@dataclass(frozen=True)
class BallValue:
    """Complex ball: the true value lies within `radius` of `midpoint`.

    `real` marks values known to be real, whose midpoint has a zero
    imaginary part and whose radius bounds only the real error.
    """
    midpoint: object
    radius: object
    precision: int
    context: object
    real: bool = False

    def contains_zero(self) -> bool:
        return abs(self.midpoint) <= self.radius

    def magnitude_lower(self):
        """Lower bound on the absolute value, clamped at 0."""
        low = abs(self.midpoint) - self.radius
        return low if low > 0 else self.context.mpf(0)

    def overlaps(self, other: "BallValue") -> bool:
        return abs(self.midpoint - other.midpoint) <= self.radius + other.radius

    def _slack(self, mid):
        return abs(mid) * self.context.mpf(2) ** (2 - self.context.prec)

    def __add__(self, other: "BallValue") -> "BallValue":
        mid = self.midpoint + other.midpoint
        return BallValue(mid, self.radius + other.radius + self._slack(mid),
                         min(self.precision, other.precision), self.context,
                         self.real and other.real)

    def scaled(self, q) -> "BallValue":
        """Ball of q * value for an integer or rational q."""
        q = Fraction(q)
        factor = self.context.mpf(q.numerator) / q.denominator
        mid = self.midpoint * factor
        return BallValue(mid, self.radius * abs(factor) + self._slack(mid),
                         self.precision, self.context, self.real)

    def __str__(self):
        digits = max(int(self.precision * 0.30103), 5)
        mid = self.context.nstr(self.midpoint, min(digits, 30))
        rad = self.context.nstr(self.radius, 3)
        return f"{mid} +/- {rad}"


class _Evaluator:
    def __init__(self, precision: int):
        self.precision = precision
        self.ctx = MPContext()
        self.ctx.prec = precision + _GUARD_BITS
        self.eps = self.ctx.mpf(2) ** (2 - self.ctx.prec)
        self.cache = {}

    def ball(self, mid, rad, real=False) -> BallValue:
        if real:
            mid = self.ctx.mpc(mid.real, 0)
        rad = rad + abs(mid) * self.eps
        return BallValue(mid, rad, self.precision, self.ctx, real)

    def evaluate(self, t: Term) -> BallValue:
        out = self.cache.get(t)
        if out is None:
            out = self._evaluate(t)
            self.cache[t] = out
        return out

    def _evaluate(self, t: Term) -> BallValue:
        ctx = self.ctx
        kind = t.kind
        if kind is NodeKind.RATIONAL:
            mid = ctx.mpc(ctx.mpf(t.value.numerator) / t.value.denominator)
            return self.ball(mid, ctx.mpf(0), True)
        if kind is NodeKind.ALGEBRAIC:
            box = refine_box(t.const, Fraction(1, 2 ** (self.precision + 4)))
            re, im = box.center()
            mid = ctx.mpc(ctx.mpf(re.numerator) / re.denominator,
                          ctx.mpf(im.numerator) / im.denominator)
            side = box.max_side()
            return self.ball(mid, ctx.mpf(side.numerator) / side.denominator,
                             is_real(t.const))
        if kind is NodeKind.SUM:
            balls = [self.evaluate(c) for c in t.children]
            mid = ctx.fsum(b.midpoint for b in balls)
            rad = ctx.fsum(b.radius for b in balls)
            return self.ball(mid, rad, all(b.real for b in balls))
        if kind is NodeKind.PRODUCT:
            out = self.evaluate(t.children[0])
            for child in t.children[1:]:
                out = self._mul(out, self.evaluate(child))
            return out
        if kind is NodeKind.POWER:
            return self._pow(self.evaluate(t.base), t.exponent)
        if kind is NodeKind.EXP:
            a = self.evaluate(t.argument)
            mid = ctx.exp(a.midpoint)
            rad = abs(mid) * ctx.expm1(a.radius)
            return self.ball(mid, rad, a.real)
        return self._log(t)

    def _mul(self, a: BallValue, b: BallValue) -> BallValue:
        mid = a.midpoint * b.midpoint
        rad = (abs(a.midpoint) * b.radius + abs(b.midpoint) * a.radius
               + a.radius * b.radius)
        return self.ball(mid, rad, a.real and b.real)

    def _inv(self, a: BallValue) -> BallValue:
        mag = abs(a.midpoint)
        if mag <= a.radius:
            raise _Degenerate("inverse of a ball containing zero")
        return self.ball(1 / a.midpoint, a.radius / (mag * (mag - a.radius)),
                         a.real)

    def _pow(self, a: BallValue, n: int) -> BallValue:
        base = self._inv(a) if n < 0 else a
        n = abs(n)
        out = None
        while n:
            if n & 1:
                out = base if out is None else self._mul(out, base)
            n >>= 1
            if n:
                base = self._mul(base, base)
        return out

    def _log(self, t: Term) -> BallValue:
        ctx = self.ctx
        a = self.evaluate(t.argument)
        mag = abs(a.midpoint)
        if mag <= a.radius:
            raise _Degenerate("logarithm of a ball containing zero")
        rad = -ctx.log1p(-a.radius / mag)
        real = False
        if a.real:
            x = a.midpoint.real
            if x < 0:
                mid = ctx.mpc(ctx.log(-x), +ctx.pi)
            else:
                mid = ctx.mpc(ctx.log(x), 0)
                real = t.branch == 0
        else:
            mid = ctx.log(a.midpoint)
            if a.midpoint.real < 0 and abs(a.midpoint.imag) <= a.radius:
                logger.warning("Log argument of %s crosses the branch cut at "
                               "%d bits; inflating the radius", to_text(t),
                               self.precision)
                rad += 2 * ctx.pi
        if t.branch:
            mid += ctx.mpc(0, 2 * ctx.pi * t.branch)
        return self.ball(mid, rad, real)


def evaluate_once(t: Term, precision: int) -> Optional[BallValue]:
    """One evaluation attempt; None when an argument ball contains zero."""
    try:
        return _Evaluator(precision).evaluate(t)
    except _Degenerate:
        return None


def evaluate(t: Term, precision: int, settings: Optional[Settings] = None
             ) -> BallValue:
    """Sound enclosure of a term.

    Parameters
    ----------
    t: Term
        The term; it is evaluated as given.
    precision: int
        Working precision in bits.
    settings: Settings (default=None)
        Supplies the doubling count and the precision cap.

    Returns
    -------
    The BallValue at the first precision where every Log and inverse argument
    excludes zero.
    """
    settings = settings or Settings()
    if precision < 1:
        raise ValueError(f"Precision must be a positive integer, input: "
                         f"{precision}")
    p = precision
    for _ in range(settings.max_doublings + 1):
        ball = evaluate_once(t, p)
        if ball is not None:
            return ball
        logger.warning("Escalating precision for %s to %d bits",
                       to_text(t), 2 * p)
        p = min(2 * p, settings.precision_cap)
    raise PrecisionEscalationError(
        f"Enclosure of {to_text(t)} stays degenerate up to {p} bits")


@dataclass(frozen=True)
class NonzeroCertificate:
    """Exact evidence that a term is nonzero."""
    term: Term
    precision: int
    magnitude_lower: Fraction

    def recheck(self) -> bool:
        """Re-evaluate and confirm the enclosure excludes zero."""
        if self.precision == 0:
            t = normalize(self.term)
            return t.kind is NodeKind.RATIONAL and t.value != 0
        ball = evaluate_once(self.term, self.precision)
        return ball is not None and not ball.contains_zero()


def certify_nonzero(t: Term, settings: Optional[Settings] = None
                    ) -> Optional[NonzeroCertificate]:
    """Certify t != 0 by enclosure, escalating precision.

    Parameters
    ----------
    t: Term
        Term to test; it is normalized first.
    settings: Settings (default=None)
        Start precision, doubling count and precision cap.

    Returns
    -------
    A NonzeroCertificate, or None when no tested precision excludes zero.
    """
    settings = settings or Settings()
    t = normalize(t)
    if t.kind is NodeKind.RATIONAL:
        if t.value == 0:
            return None
        return NonzeroCertificate(t, 0, abs(t.value))
    p = settings.start_precision
    for _ in range(settings.max_doublings + 1):
        ball = evaluate_once(t, p)
        if ball is not None and not ball.contains_zero():
            return NonzeroCertificate(t, p, _to_fraction(
                ball.context.mpf(ball.magnitude_lower())))
        if p >= settings.precision_cap:
            break
        p = min(2 * p, settings.precision_cap)
    logger.debug("No nonzero certificate for %s", to_text(t))
    return None
