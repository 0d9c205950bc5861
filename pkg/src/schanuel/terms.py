"""Exp-log terms over algebraic leaves.

Terms are hash-consed: constructing a node that already exists returns the
existing object, so structural equality is identity. The constructors in this
module build raw nodes; `normalize` brings a term to normal form.
"""

import functools
import itertools
import logging
import threading
from enum import IntEnum
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

from .algebraic import REGISTRY, AlgebraicConst, field_op, power as alg_power
from .errors import AlgebraicInversionError, DegreeCapError, LogOfZeroError

logger = logging.getLogger(__name__)


class NodeKind(IntEnum):
    """Node kinds, in term-order rank."""
    RATIONAL = 0
    ALGEBRAIC = 1
    SUM = 2
    PRODUCT = 3
    POWER = 4
    EXP = 5
    LOG = 6


class Term:
    """An immutable, interned node of the term DAG.

    Do not instantiate directly; use the constructor functions.
    """
    __slots__ = ("kind", "value", "const", "children", "exponent", "branch",
                 "uid", "__weakref__")

    def __init__(self, kind, value, const, children, exponent, branch, uid):
        self.kind = kind
        self.value = value
        self.const = const
        self.children = children
        self.exponent = exponent
        self.branch = branch
        self.uid = uid

    @property
    def argument(self) -> "Term":
        """Argument of an Exp or Log node, base of a Power node."""
        return self.children[0]

    base = argument

    def __repr__(self):
        return f"Term({to_text(self)})"

    def __str__(self):
        return to_text(self)

    def __lt__(self, other):
        return term_order(self, other) < 0


_TABLE = {}
_TABLE_LOCK = threading.Lock()
_UIDS = itertools.count()


def _intern(kind, key, value=None, const=None, children=(), exponent=None,
            branch=None) -> Term:
    full_key = (kind, key, tuple(c.uid for c in children))
    node = _TABLE.get(full_key)
    if node is not None:
        return node
    with _TABLE_LOCK:
        node = _TABLE.get(full_key)
        if node is None:
            node = Term(kind, value, const, tuple(children), exponent,
                        branch, next(_UIDS))
            _TABLE[full_key] = node
    return node


def rational(value: Union[int, Fraction, str]) -> Term:
    """Rational leaf."""
    value = Fraction(value)
    return _intern(NodeKind.RATIONAL, value, value=value)


def alg(handle: Union[str, AlgebraicConst]) -> Term:
    """Algebraic leaf referencing the constant registry.

    Parameters
    ----------
    handle: str or AlgebraicConst
        A registered name, or a constant to identify or register.

    Returns
    -------
    The leaf node.
    """
    if isinstance(handle, str):
        const = REGISTRY.resolve(handle)
    elif handle.name is None:
        const = REGISTRY.intern(handle)
    else:
        const = handle
    return _intern(NodeKind.ALGEBRAIC, const.name, const=const)


def sum_of(*children: Term) -> Term:
    """Raw Sum node."""
    if not children:
        raise ValueError("Sum needs at least one child")
    return _intern(NodeKind.SUM, None, children=children)


def product_of(*children: Term) -> Term:
    """Raw Product node."""
    if not children:
        raise ValueError("Product needs at least one child")
    return _intern(NodeKind.PRODUCT, None, children=children)


def power(base: Term, exponent: int) -> Term:
    """Raw integer power node."""
    if not isinstance(exponent, int) or isinstance(exponent, bool):
        raise ValueError(f"Exponent must be an integer, input: {exponent}")
    if exponent == 0:
        raise ValueError("Exponent must be nonzero")
    return _intern(NodeKind.POWER, exponent, children=(base,),
                   exponent=exponent)


def exp(argument: Term) -> Term:
    """Raw Exp node."""
    return _intern(NodeKind.EXP, None, children=(argument,))


def log(argument: Term, branch: int = 0) -> Term:
    """Raw Log node: principal logarithm plus 2*pi*i*branch."""
    if not isinstance(branch, int) or isinstance(branch, bool):
        raise ValueError(f"Branch must be an integer, input: {branch}")
    return _intern(NodeKind.LOG, branch, children=(argument,), branch=branch)


ZERO = rational(0)
ONE = rational(1)


def is_rational(t: Term, value=None) -> bool:
    if t.kind is not NodeKind.RATIONAL:
        return False
    return value is None or t.value == value


# ---------------------------------------------------------------- ordering

_RANK_ONLY = (NodeKind.RATIONAL, NodeKind.ALGEBRAIC)


def term_order(a: Term, b: Term) -> int:
    """Total order on terms: -1, 0 or 1.

    Kind rank first, then a recursive lexicographic comparison, then the
    branch index.
    """
    if a is b:
        return 0
    if a.kind != b.kind:
        return -1 if a.kind < b.kind else 1
    if a.kind is NodeKind.RATIONAL:
        return (a.value > b.value) - (a.value < b.value)
    if a.kind is NodeKind.ALGEBRAIC:
        ka = (a.const.degree, a.const.min_poly, a.const.name or "")
        kb = (b.const.degree, b.const.min_poly, b.const.name or "")
        return (ka > kb) - (ka < kb)
    for x, y in zip(a.children, b.children):
        c = term_order(x, y)
        if c:
            return c
    if len(a.children) != len(b.children):
        return -1 if len(a.children) < len(b.children) else 1
    if a.kind is NodeKind.POWER:
        return (a.exponent > b.exponent) - (a.exponent < b.exponent)
    if a.kind is NodeKind.LOG:
        return (a.branch > b.branch) - (a.branch < b.branch)
    return 0


sort_key = functools.cmp_to_key(term_order)


def sorted_terms(terms) -> list:
    """Distinct terms in term order."""
    return sorted(set(terms), key=sort_key)


# ----------------------------------------------------------- normalization

def _split_coefficient(t: Term):
    """(rational coefficient, monomial) with monomial None for constants."""
    if t.kind is NodeKind.RATIONAL:
        return t.value, None
    if t.kind is NodeKind.PRODUCT and t.children[0].kind is NodeKind.RATIONAL:
        rest = t.children[1:]
        return (t.children[0].value,
                rest[0] if len(rest) == 1 else product_of(*rest))
    return Fraction(1), t


def _fold_algebraic(leaves) -> Optional[list]:
    """Multiply (const, exponent) pairs exactly; None when over the cap."""
    result = None
    try:
        for const, n in leaves:
            value = alg_power(const, n, REGISTRY.degree_cap)
            result = value if result is None else field_op(
                "mul", result, value, REGISTRY.degree_cap)
    except DegreeCapError:
        logger.debug("Left %d algebraic factors unfolded", len(leaves))
        return None
    return [result]


def _leaf(const: AlgebraicConst) -> Term:
    if const.is_rational:
        return rational(const.as_fraction())
    return alg(const)


def _norm_pow(base: Term, n: int) -> Term:
    if n == 0:
        return ONE
    if n == 1:
        return base
    kind = base.kind
    if kind is NodeKind.RATIONAL:
        if base.value == 0 and n < 0:
            raise AlgebraicInversionError("Inversion of zero")
        return rational(base.value ** n)
    if kind is NodeKind.ALGEBRAIC:
        folded = _fold_algebraic([(base.const, n)])
        return power(base, n) if folded is None else _leaf(folded[0])
    if kind is NodeKind.POWER:
        return _norm_pow(base.base, base.exponent * n)
    if kind is NodeKind.PRODUCT:
        return _norm_product([_norm_pow(c, n) for c in base.children])
    return power(base, n)


def _norm_product(factors: Sequence[Term]) -> Term:
    coefficient = Fraction(1)
    exponents = {}
    for factor in factors:
        items = factor.children if factor.kind is NodeKind.PRODUCT \
            else (factor,)
        for item in items:
            if item.kind is NodeKind.RATIONAL:
                coefficient *= item.value
                continue
            if item.kind is NodeKind.POWER:
                base, n = item.base, item.exponent
            else:
                base, n = item, 1
            exponents[base] = exponents.get(base, 0) + n
    if coefficient == 0:
        return ZERO

    leaves = [(b, n) for b, n in exponents.items()
              if n and b.kind is NodeKind.ALGEBRAIC]
    if len(leaves) > 1 or any(abs(n) != 1 for _, n in leaves) \
            or any(n < 0 for _, n in leaves):
        folded = _fold_algebraic([(b.const, n) for b, n in leaves])
        if folded is not None:
            for b, _ in leaves:
                del exponents[b]
            value = folded[0]
            if value.is_rational:
                coefficient *= value.as_fraction()
            else:
                leaf = alg(value)
                exponents[leaf] = exponents.get(leaf, 0) + 1

    out = [b if n == 1 else power(b, n)
           for b, n in exponents.items() if n]
    out.sort(key=sort_key)
    if coefficient != 1 or not out:
        out.insert(0, rational(coefficient))
    if len(out) == 1:
        return out[0]
    return product_of(*out)


def _collapse_branches(coefficients: dict) -> None:
    """Rewrite Log groups over one argument whose coefficients cancel.

    Sum of q_j * log(u; k_j) with sum q_j = 0 equals 2*pi*i * sum q_j*k_j,
    which is written as a multiple of log(-1; 0).
    """
    groups = {}
    for mono, q in coefficients.items():
        if mono is not None and mono.kind is NodeKind.LOG and q:
            groups.setdefault(mono.argument, []).append(mono)
    for members in groups.values():
        if len(members) < 2:
            continue
        if sum(coefficients[m] for m in members) != 0:
            continue
        offset = sum(coefficients[m] * m.branch for m in members)
        for m in members:
            del coefficients[m]
        if offset:
            i_pi = log(rational(-1), 0)
            coefficients[i_pi] = coefficients.get(i_pi, 0) + 2 * offset


def _norm_sum(terms: Sequence[Term]) -> Term:
    coefficients = {}
    for term in terms:
        items = term.children if term.kind is NodeKind.SUM else (term,)
        for item in items:
            q, mono = _split_coefficient(item)
            coefficients[mono] = coefficients.get(mono, 0) + q
    _collapse_branches(coefficients)

    algebraic = [(m, q) for m, q in coefficients.items()
                 if m is not None and q and m.kind is NodeKind.ALGEBRAIC]
    if len(algebraic) > 1:
        try:
            total = None
            for mono, q in algebraic:
                part = field_op("mul", mono.const,
                                AlgebraicConst.from_rational(q),
                                REGISTRY.degree_cap)
                total = part if total is None else field_op(
                    "add", total, part, REGISTRY.degree_cap)
        except DegreeCapError:
            total = None
        if total is not None:
            for mono, _ in algebraic:
                del coefficients[mono]
            if total.is_rational:
                coefficients[None] = coefficients.get(None, 0) \
                    + total.as_fraction()
            else:
                leaf = alg(total)
                coefficients[leaf] = coefficients.get(leaf, 0) + 1

    out = []
    constant = coefficients.pop(None, 0)
    for mono, q in coefficients.items():
        if q == 0:
            continue
        out.append(mono if q == 1 else _norm_product([rational(q), mono]))
    out.sort(key=sort_key)
    if constant or not out:
        out.insert(0, rational(constant))
    if len(out) == 1:
        return out[0]
    return sum_of(*out)


@functools.lru_cache(maxsize=None)
def normalize(t: Term) -> Term:
    """Canonical normal form of a term.

    Parameters
    ----------
    t: Term
        Any well-formed term.

    Returns
    -------
    The normal form: flattened, sorted Sums and Products with collected like
    terms, at most one rational leaf per Sum or Product, folded algebraic
    leaves, and no Exp(Log(...)) subterm.
    """
    kind = t.kind
    if kind is NodeKind.RATIONAL:
        return t
    if kind is NodeKind.ALGEBRAIC:
        return _leaf(t.const)
    if kind is NodeKind.EXP:
        arg = normalize(t.argument)
        if arg.kind is NodeKind.LOG:
            return arg.argument
        return exp(arg)
    if kind is NodeKind.LOG:
        arg = normalize(t.argument)
        if is_rational(arg, 0):
            raise LogOfZeroError(f"Logarithm of zero in {to_text(t)}")
        return log(arg, t.branch)
    if kind is NodeKind.POWER:
        return _norm_pow(normalize(t.base), t.exponent)
    children = [normalize(c) for c in t.children]
    if kind is NodeKind.SUM:
        return _norm_sum(children)
    return _norm_product(children)


def add(*terms: Term) -> Term:
    """Normalized sum."""
    return _norm_sum([normalize(t) for t in terms])


def mul(*terms: Term) -> Term:
    """Normalized product."""
    return _norm_product([normalize(t) for t in terms])


# ------------------------------------------------------------------ levels

@functools.lru_cache(maxsize=None)
def e_level(t: Term) -> Optional[int]:
    """Syntactic E-tower level: an upper bound n with t in E_n.

    None when a Log node occurs.
    """
    if t.kind in _RANK_ONLY:
        return 0
    if t.kind is NodeKind.LOG:
        return None
    levels = [e_level(c) for c in t.children]
    if any(level is None for level in levels):
        return None
    top = max(levels)
    return top + 1 if t.kind is NodeKind.EXP else top


@functools.lru_cache(maxsize=None)
def l_level(t: Term) -> Optional[int]:
    """Syntactic L-tower level; None when an Exp node occurs."""
    if t.kind in _RANK_ONLY:
        return 0
    if t.kind is NodeKind.EXP:
        return None
    levels = [l_level(c) for c in t.children]
    if any(level is None for level in levels):
        return None
    top = max(levels)
    return top + 1 if t.kind is NodeKind.LOG else top


def is_algebraic(t: Term) -> bool:
    """Whether t has no Exp and no Log node."""
    return e_level(t) == 0 and l_level(t) == 0


# ---------------------------------------------------------------- traversal

def subterms(t: Term) -> Iterator[Term]:
    """Each distinct node reachable from t, parents before children."""
    seen = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        yield node
        stack.extend(reversed(node.children))


def maximal_subterms(t: Term, kind: NodeKind) -> list:
    """Outermost nodes of a kind: not nested inside another node of it."""
    found = set()
    seen = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if node.kind is kind:
            found.add(node)
            continue
        stack.extend(node.children)
    return sorted_terms(found)


def leaves(t: Term) -> list:
    """Algebraic leaves of t, by registry name."""
    return sorted({n.const.name for n in subterms(t)
                   if n.kind is NodeKind.ALGEBRAIC})


# ----------------------------------------------------------------- printing

def _rational_text(value: Fraction) -> str:
    text = str(value)
    return f"({text})" if value < 0 else text


@functools.lru_cache(maxsize=None)
def to_text(t: Term) -> str:
    """Fully parenthesized text form, parseable back to the same term."""
    kind = t.kind
    if kind is NodeKind.RATIONAL:
        return _rational_text(t.value)
    if kind is NodeKind.ALGEBRAIC:
        return f"alg({t.const.name})"
    if kind is NodeKind.SUM:
        return "(" + " + ".join(to_text(c) for c in t.children) + ")"
    if kind is NodeKind.PRODUCT:
        return "(" + " * ".join(to_text(c) for c in t.children) + ")"
    if kind is NodeKind.POWER:
        return f"({to_text(t.base)} ^ {t.exponent})"
    if kind is NodeKind.EXP:
        return f"exp({to_text(t.argument)})"
    return f"log({to_text(t.argument)}; {t.branch})"


# -------------------------------------------------------- named constants

def i_pi() -> Term:
    """i*pi, the principal logarithm of -1."""
    return log(rational(-1), 0)


def pi() -> Term:
    """pi as (-1) * i * log(-1; 0)."""
    return mul(rational(-1), alg("i"), i_pi())


def e() -> Term:
    return exp(ONE)


def exp_tower(n: int) -> Term:
    """exp^[n](1), with exp^[0](1) = 1."""
    if n < 0:
        raise ValueError(f"Tower height must be non-negative, input: {n}")
    t = ONE
    for _ in range(n):
        t = exp(t)
    return t


def log_tower(n: int) -> Term:
    """log_[n] pi on the principal branch, with log_[0] pi = pi."""
    if n < 0:
        raise ValueError(f"Tower height must be non-negative, input: {n}")
    t = pi()
    for _ in range(n):
        t = log(t, 0)
    return t


@functools.lru_cache(maxsize=None)
def to_constructor(t: Term) -> str:
    """Constructor-style rendering, e.g. Exp(Rational(1)), for diagnostics."""
    kind = t.kind
    if kind is NodeKind.RATIONAL:
        return f"Rational({t.value})"
    if kind is NodeKind.ALGEBRAIC:
        return f"AlgebraicLeaf({t.const.name})"
    if kind is NodeKind.POWER:
        return f"IntPow({to_constructor(t.base)}, {t.exponent})"
    if kind is NodeKind.LOG:
        return f"Log({to_constructor(t.argument)}, {t.branch})"
    inner = ", ".join(to_constructor(c) for c in t.children)
    return f"{kind.name.capitalize()}({inner})"


# -------------------------------------------------- syntactic dependence

def generated_by(t: Term, generators) -> bool:
    """Whether t is built from generators and algebraic leaves by field ops.

    This is the checkable form of "t is algebraic over Q(generators)".
    """
    gens = set(generators)
    seen = {}

    def walk(node):
        if node in seen:
            return seen[node]
        if node in gens or node.kind in _RANK_ONLY:
            out = True
        elif node.kind in (NodeKind.SUM, NodeKind.PRODUCT, NodeKind.POWER):
            out = all(walk(c) for c in node.children)
        else:
            out = False
        seen[node] = out
        return out

    return walk(t)


def linear_decomposition(x: Term, basis) -> Optional[dict]:
    """Rational coefficients expressing x as a combination of basis terms.

    Only monomials of x that match basis monomials exactly are used; the
    constant part of x needs a nonzero rational in the basis. Returns
    {basis term: coefficient} or None.
    """
    x = normalize(x)
    by_mono = {}
    for b in basis:
        q, mono = _split_coefficient(normalize(b))
        if q:
            by_mono.setdefault(mono, (b, q))
    items = x.children if x.kind is NodeKind.SUM else (x,)
    out = {}
    for item in items:
        q, mono = _split_coefficient(item)
        if q == 0:
            continue
        hit = by_mono.get(mono)
        if hit is None:
            return None
        b, qb = hit
        out[b] = out.get(b, 0) + q / qb
    return out
