"""Integer relation search on enclosures, with exact confirmation.

A relation found numerically is only evidence. `confirm_relation` is the
gate: it accepts a linear relation when the combination normalizes to zero,
or when its monomial image normalizes to 1 and the combination is enclosed
in a disk too small to hold a nonzero multiple of 2*pi*i.
"""

import itertools
import logging
from typing import Optional, Sequence

from mpmath import MPContext

from .config import Settings
from .errors import InsufficientPrecisionError
from .facts import RelationKind, RelationVector
from .numeric import BallValue, evaluate
from .terms import (
    ONE,
    Term,
    add,
    exp,
    is_rational,
    mul,
    normalize,
    power,
    rational,
    to_text,
)

logger = logging.getLogger(__name__)

# Lower bound on 2*pi.
_TWO_PI_LOWER = 6


def required_precision(max_height: int, count: int) -> int:
    """Smallest precision accepted by find_integer_relation."""
    return 4 * int(max_height).bit_length() * count


def find_integer_relation(values: Sequence[BallValue], max_height: int,
                          max_steps: int = 20000) -> Optional[tuple]:
    """Search for small integers q with sum q_i * v_i close to 0.

    Parameters
    ----------
    values: list of BallValue
        Enclosures at a common precision.
    max_height: int
        Bound on the absolute value of each entry.
    max_steps: int (default=20000)
        PSLQ iteration ceiling.

    Returns
    -------
    The integer vector, or None. A vector is evidence only and must be
    confirmed symbolically by the caller.
    """
    if max_height < 1:
        raise ValueError(f"Height must be a positive integer, input: "
                         f"{max_height}")
    if not values:
        raise ValueError("Relation search needs at least one value")
    precision = min(v.precision for v in values)
    needed = required_precision(max_height, len(values))
    if precision < needed:
        raise InsufficientPrecisionError(
            f"Relation search over {len(values)} values of height "
            f"{max_height} needs {needed} bits, got {precision}")

    for index, value in enumerate(values):
        if value.contains_zero():
            return tuple(int(i == index) for i in range(len(values)))
    if len(values) == 1:
        return None

    ctx = MPContext()
    ctx.prec = max(precision, 53)
    # Real image of each complex value; relations over C survive it.
    mix = ctx.euler
    reals = [ctx.mpf(v.midpoint.real) + mix * ctx.mpf(v.midpoint.imag)
             for v in values]
    tol = ctx.mpf(2) ** (-(precision // 2))
    try:
        found = ctx.pslq(reals, tol=tol, maxcoeff=max_height + 1,
                         maxsteps=max_steps)
    except ValueError as exc:
        logger.warning("PSLQ rejected its input: %s", exc)
        return None
    if found is None:
        return None
    relation = tuple(int(q) for q in found)
    if max(abs(q) for q in relation) > max_height or not any(relation):
        return None

    # Post-hoc check of the threshold on the complex values.
    total = values[0].scaled(relation[0])
    for q, value in zip(relation[1:], values[1:]):
        total = total + value.scaled(q)
    if total.magnitude_lower() > tol:
        logger.warning("Discarded PSLQ hit %s: residual exceeds 2^-%d",
                       relation, precision // 2)
        return None
    return relation


def _oriented(coefficients) -> tuple:
    """Flip signs so that the first nonzero entry is positive."""
    for q in coefficients:
        if q:
            return tuple(coefficients) if q > 0 else tuple(
                -c for c in coefficients)
    return tuple(coefficients)


def linear_combination(relation: RelationVector) -> Term:
    """Normalized sum q_i * x_i."""
    return add(*(mul(rational(q), t)
                 for q, t in zip(relation.coefficients, relation.terms)))


def monomial_image(relation: RelationVector) -> Term:
    """Normalized product exp(x_i)^q_i."""
    factors = [power(exp(t), q)
               for q, t in zip(relation.coefficients, relation.terms) if q]
    return mul(*factors) if factors else ONE


def confirm_relation(relation: RelationVector,
                     settings: Optional[Settings] = None) -> bool:
    """Exact confirmation of a concrete linear or monomial relation.

    Parameters
    ----------
    relation: RelationVector
        A relation with integer coefficients.
    settings: Settings (default=None)
        Precision used for the 2*pi*i exclusion enclosure.

    Returns
    -------
    True only when the relation is proven to hold.
    """
    if relation.is_generic:
        return False
    settings = settings or Settings()
    if relation.kind is RelationKind.MONOMIAL:
        return is_rational(monomial_image(relation), 1)
    combination = linear_combination(relation)
    if is_rational(combination, 0):
        return True
    if not is_rational(monomial_image(relation), 1):
        return False
    # The combination is 2*pi*i*k; a small enclosure forces k = 0.
    ball = evaluate(combination, settings.precision, settings)
    return abs(ball.midpoint) + ball.radius < _TWO_PI_LOWER


def falsify_linear_independence(terms: Sequence[Term], precision: int,
                                max_height: int,
                                settings: Optional[Settings] = None
                                ) -> Optional[RelationVector]:
    """Find and confirm a Q-linear relation among terms.

    Parameters
    ----------
    terms: list of Term
        Candidate set; duplicates are dropped, order is kept.
    precision: int
        Working precision in bits.
    max_height: int
        Coefficient bound.
    settings: Settings (default=None)
        Escalation and PSLQ step settings.

    Returns
    -------
    A confirmed RelationVector, or None.
    """
    settings = settings or Settings()
    ordered = list(dict.fromkeys(normalize(t) for t in terms))
    values = [evaluate(t, precision, settings) for t in ordered]
    found = find_integer_relation(values, max_height,
                                  settings.pslq_max_steps)
    if found is None:
        return None
    relation = RelationVector.from_rationals(ordered, _oriented(found))
    if confirm_relation(relation, settings):
        logger.info("Confirmed relation %s", relation.describe())
        return relation
    logger.warning("Discarded unconfirmed relation %s among %s",
                   relation.coefficients,
                   ", ".join(to_text(t) for t in ordered))
    return None


def monomials(terms: Sequence[Term], degree: int = 2) -> list:
    """All monomials of total degree at most `degree`, 1 first."""
    out = [ONE]
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(terms, d):
            out.append(mul(*combo))
    return out


def probe_algebraic_independence(terms: Sequence[Term],
                                 settings: Optional[Settings] = None) -> bool:
    """Heuristic: no integer relation among low-degree monomials.

    Parameters
    ----------
    terms: list of Term
        Candidate independent set.
    settings: Settings (default=None)
        Height and precision; precision is raised to what the search needs.

    Returns
    -------
    True when no relation of total degree <= 2 and height <= settings.height
    is found. This is numeric evidence, never a proof.
    """
    settings = settings or Settings()
    if not terms:
        return True
    basis = list(dict.fromkeys(monomials(list(terms))))
    if any(is_rational(m) and m is not ONE for m in basis):
        return False
    precision = max(settings.precision,
                    required_precision(settings.height, len(basis)))
    values = [evaluate(m, precision, settings) for m in basis]
    found = find_integer_relation(values, settings.height,
                                  settings.pslq_max_steps)
    if found is not None:
        logger.debug("Monomial probe found %s over %s", found,
                     ", ".join(to_text(m) for m in basis))
    return found is None
