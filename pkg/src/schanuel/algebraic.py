"""Exact arithmetic in the algebraic closure of the rationals.

An algebraic constant is a primitive irreducible integer polynomial together
with a rational complex rectangle that contains exactly one of its roots.
Field operations go through resultants and pick the right irreducible factor
by numeric enclosure of the result.
"""

import functools
import hashlib
import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import sympy
from mpmath import MPContext
from sympy import Poly

from .errors import (
    AlgebraicInversionError,
    DegreeCapError,
    NonIsolatingBoxError,
    ReduciblePolynomialError,
    UnknownConstantError,
)

logger = logging.getLogger(__name__)

DEFAULT_DEGREE_CAP = 64

_X, _Y = sympy.symbols("x y")

# Refinement rounds before a box/root overlap is declared ambiguous.
_MAX_ISOLATION_ROUNDS = 12


def _fraction(value) -> Fraction:
    """Convert a sympy/int/str rational to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    return Fraction(value)


def _mpf_to_fraction(value) -> Fraction:
    """Exact Fraction of a binary mpf."""
    man, exp = value.man_exp
    return Fraction(int(man)) * (Fraction(2) ** int(exp))


@dataclass(frozen=True)
class ComplexBox:
    """Closed rectangle [re_lo, re_hi] x [im_lo, im_hi] with rational ends."""
    re_lo: Fraction
    re_hi: Fraction
    im_lo: Fraction
    im_hi: Fraction

    def __post_init__(self):
        for name in ("re_lo", "re_hi", "im_lo", "im_hi"):
            object.__setattr__(self, name, _fraction(getattr(self, name)))
        if self.re_lo > self.re_hi or self.im_lo > self.im_hi:
            raise ValueError(f"Box bounds out of order: {self}")

    @classmethod
    def around(cls, re, im, radius) -> "ComplexBox":
        """Square box of half side `radius` centered at re + i*im."""
        re, im, radius = _fraction(re), _fraction(im), _fraction(radius)
        return cls(re - radius, re + radius, im - radius, im + radius)

    def max_side(self) -> Fraction:
        return max(self.re_hi - self.re_lo, self.im_hi - self.im_lo)

    def center(self) -> Tuple[Fraction, Fraction]:
        return ((self.re_lo + self.re_hi) / 2, (self.im_lo + self.im_hi) / 2)

    def contains(self, other: "ComplexBox") -> bool:
        return (self.re_lo <= other.re_lo and other.re_hi <= self.re_hi
                and self.im_lo <= other.im_lo and other.im_hi <= self.im_hi)

    def intersects(self, other: "ComplexBox") -> bool:
        return not (other.re_hi < self.re_lo or self.re_hi < other.re_lo
                    or other.im_hi < self.im_lo or self.im_hi < other.im_lo)

    def intersection(self, other: "ComplexBox") -> "ComplexBox":
        return ComplexBox(max(self.re_lo, other.re_lo),
                          min(self.re_hi, other.re_hi),
                          max(self.im_lo, other.im_lo),
                          min(self.im_hi, other.im_hi))

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.re_lo, self.re_hi, self.im_lo, self.im_hi)


@dataclass(frozen=True)
class AlgebraicConst:
    """An algebraic number: minimal polynomial plus isolating box.

    `min_poly` lists integer coefficients from the constant term upwards.
    """
    min_poly: Tuple[int, ...]
    box: ComplexBox
    name: Optional[str] = field(default=None, compare=False)

    @property
    def degree(self) -> int:
        return len(self.min_poly) - 1

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    @property
    def is_zero(self) -> bool:
        return self.min_poly == (0, 1)

    def as_fraction(self) -> Fraction:
        """Value of a degree-one constant."""
        if not self.is_rational:
            raise ValueError(f"Constant of degree {self.degree} is not rational")
        return Fraction(-self.min_poly[0], self.min_poly[1])

    def poly(self) -> Poly:
        return _to_poly(self.min_poly)

    @classmethod
    def from_rational(cls, value) -> "AlgebraicConst":
        value = _fraction(value)
        return cls((-value.numerator, value.denominator),
                   ComplexBox(value, value, 0, 0))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "min_poly": list(self.min_poly),
            "box": [str(v) for v in self.box.as_tuple()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AlgebraicConst":
        return cls(tuple(int(c) for c in data["min_poly"]),
                   ComplexBox(*(Fraction(v) for v in data["box"])),
                   data.get("name"))


def _to_poly(coeffs: Sequence[int]) -> Poly:
    return Poly(list(reversed([int(c) for c in coeffs])), _X, domain="ZZ")


def _coefficients(poly: Poly) -> Tuple[int, ...]:
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _primitive(poly: Poly) -> Poly:
    """Primitive part with positive leading coefficient."""
    _, prim = poly.primitive()
    if prim.LC() < 0:
        prim = -prim
    return prim


def _root_boxes(poly: Poly, eps: Fraction) -> list:
    """Isolating rectangles of all roots of a squarefree polynomial."""
    real, cplx = poly.intervals(
        all=True, eps=sympy.Rational(eps.numerator, eps.denominator), sqf=True)
    boxes = [ComplexBox(_fraction(s), _fraction(t), 0, 0) for s, t in real]
    for lower, upper in cplx:
        lo_re, lo_im = lower.as_real_imag()
        hi_re, hi_im = upper.as_real_imag()
        boxes.append(ComplexBox(_fraction(lo_re), _fraction(hi_re),
                                _fraction(lo_im), _fraction(hi_im)))
    return boxes


def _roots_in_box(poly: Poly, box: ComplexBox) -> list:
    """Isolating rectangles of the roots of `poly` lying in `box`.

    Roots whose rectangle keeps straddling the border after every refinement
    round are reported as inside.
    """
    eps = box.max_side() / 8 or Fraction(1, 2**8)
    eps = min(eps, Fraction(1, 4))
    inside, ambiguous = [], []
    for _ in range(_MAX_ISOLATION_ROUNDS):
        inside, ambiguous = [], []
        for rect in _root_boxes(poly, eps):
            if box.contains(rect):
                inside.append(rect)
            elif box.intersects(rect):
                ambiguous.append(rect)
        if not ambiguous:
            return inside
        eps /= 2**8
    return inside + ambiguous


def make_algebraic(poly: Sequence[int], box: ComplexBox,
                   name: Optional[str] = None,
                   degree_cap: int = DEFAULT_DEGREE_CAP) -> AlgebraicConst:
    """Build an algebraic constant from a polynomial and an isolating box.

    Parameters
    ----------
    poly: Sequence[int]
        Integer coefficients, constant term first.
    box: ComplexBox
        Rectangle expected to contain exactly one root.
    name: str (default=None)
        Registry name.
    degree_cap: int (default=64)
        Largest admissible degree.

    Returns
    -------
    The AlgebraicConst. A reducible polynomial is replaced by the factor
    owning the single root in the box.
    """
    if not any(int(c) for c in poly):
        raise ValueError("Polynomial must be nonzero")
    full = _primitive(_to_poly(poly))
    if full.degree() < 1:
        raise ValueError("Constant polynomial has no roots")
    if full.degree() > degree_cap:
        raise DegreeCapError(
            f"Degree {full.degree()} exceeds the cap {degree_cap}")

    _, factors = full.factor_list()
    irreducible = [_primitive(f) for f, _ in factors if f.degree() >= 1]
    reducible = len(factors) > 1 or factors[0][1] > 1
    hits = []
    for factor in irreducible:
        roots = _roots_in_box(factor, box)
        if roots:
            hits.append((factor, roots))
    total = sum(len(roots) for _, roots in hits)
    if total != 1:
        if reducible:
            raise ReduciblePolynomialError(
                [_coefficients(f) for f in irreducible])
        raise NonIsolatingBoxError(total)
    factor = hits[0][0]
    if reducible:
        logger.debug("Replaced reducible polynomial %s by factor %s",
                     _coefficients(full), _coefficients(factor))
    return AlgebraicConst(_coefficients(factor), box, name)


def _horner(ctx, coeffs: Sequence[int], z):
    """Value and derivative of the polynomial at z."""
    value = ctx.mpc(0)
    deriv = ctx.mpc(0)
    for c in reversed(coeffs):
        deriv = deriv * z + value
        value = value * z + c
    return value, deriv


@functools.lru_cache(maxsize=None)
def _coarse_box(a: AlgebraicConst) -> ComplexBox:
    """A small isolating sub-box of a.box, computed once per constant."""
    eps = min(a.box.max_side() / 16, Fraction(1, 2**24)) or Fraction(1, 2**24)
    roots = _roots_in_box(a.poly(), a.box)
    if len(roots) != 1:
        raise NonIsolatingBoxError(len(roots))
    for rect in _root_boxes(a.poly(), eps):
        if rect.intersects(roots[0]) and a.box.intersects(rect):
            return a.box.intersection(rect)
    return roots[0]


@functools.lru_cache(maxsize=4096)
def refine_box(a: AlgebraicConst, target_radius) -> ComplexBox:
    """Shrink the isolating box of `a` below a target size.

    Newton iteration from a coarse isolating box, followed by the inclusion
    disk of radius deg * |p(z)/p'(z)|, which contains a root; as the disk sits
    inside a box isolating one root, it encloses that root.

    Parameters
    ----------
    a: AlgebraicConst
        Constant to refine.
    target_radius: Fraction
        Bound on the largest side of the returned box.

    Returns
    -------
    A sub-box of a.box still isolating the root.
    """
    target = _fraction(target_radius)
    if target <= 0:
        raise ValueError(f"Target radius must be positive, input: {target}")
    if a.box.max_side() <= target:
        return a.box
    if a.is_rational:
        value = a.as_fraction()
        return ComplexBox(value, value, 0, 0)
    coarse = _coarse_box(a)
    if coarse.max_side() <= target:
        return coarse

    bits = max(64, target.denominator.bit_length()
               - target.numerator.bit_length() + 32)
    ctx = MPContext()
    ctx.prec = bits
    re, im = coarse.center()
    z = ctx.mpc(ctx.mpf(re.numerator) / re.denominator,
                ctx.mpf(im.numerator) / im.denominator)
    tiny = ctx.mpf(2) ** (8 - bits)
    for _ in range(4 * bits):
        value, deriv = _horner(ctx, a.min_poly, z)
        if not deriv:
            break
        step = value / deriv
        z -= step
        if abs(step) <= tiny * max(1, abs(z)):
            break
    value, deriv = _horner(ctx, a.min_poly, z)
    if deriv:
        rho = a.degree * abs(value) / abs(deriv) * (1 + tiny) \
            + tiny * max(1, abs(z))
        rho_q = _mpf_to_fraction(rho)
        disk = ComplexBox.around(_mpf_to_fraction(z.real),
                                 _mpf_to_fraction(z.imag), rho_q)
        if 2 * rho_q <= target and coarse.contains(disk):
            return disk
    logger.debug("Newton refinement fell back to root isolation for %s",
                 a.min_poly)
    for rect in _root_boxes(a.poly(), target):
        if coarse.contains(rect):
            return rect
        if coarse.intersects(rect) and rect.max_side() <= target:
            return rect
    raise NonIsolatingBoxError(0)


def root_separation_bound(a: AlgebraicConst) -> Fraction:
    """Lower bound on the distance between distinct roots of a.min_poly."""
    n = a.degree
    if n < 2:
        return Fraction(1)
    poly = a.poly()
    disc = abs(int(poly.discriminant()))
    ctx = MPContext()
    ctx.prec = 64
    norm = ctx.sqrt(sum(ctx.mpf(c) ** 2 for c in a.min_poly))
    bound = ctx.sqrt(3 * ctx.mpf(disc)) / (
        ctx.mpf(n) ** (ctx.mpf(n + 2) / 2) * norm ** (n - 1))
    return _mpf_to_fraction(bound * ctx.mpf("0.99"))


def same_root(a: AlgebraicConst, b: AlgebraicConst) -> bool:
    """Whether two constants denote the same algebraic number."""
    if a.min_poly != b.min_poly:
        return False
    if a.is_rational:
        return True
    sep = root_separation_bound(a)
    return refine_box(a, sep / 4).intersects(refine_box(b, sep / 4))


def _enclosure(a: AlgebraicConst, ctx):
    """Midpoint and radius of a tight disk around a."""
    box = refine_box(a, Fraction(1, 2 ** (ctx.prec + 8)))
    re, im = box.center()
    mid = ctx.mpc(ctx.mpf(re.numerator) / re.denominator,
                  ctx.mpf(im.numerator) / im.denominator)
    half = box.max_side()
    rad = ctx.mpf(half.numerator) / half.denominator
    return mid, rad * 2


def _disk_of(op: str, a: AlgebraicConst, b: Optional[AlgebraicConst], ctx):
    """Disk around op(a, b) at the context precision."""
    am, ar = _enclosure(a, ctx)
    slack = ctx.mpf(2) ** (4 - ctx.prec)
    if op == "neg":
        mid, rad = -am, ar
    elif op == "inv":
        if abs(am) <= ar:
            return None
        mid = 1 / am
        rad = ar / (abs(am) * (abs(am) - ar))
    else:
        bm, br = _enclosure(b, ctx)
        if op == "add":
            mid, rad = am + bm, ar + br
        else:
            mid = am * bm
            rad = abs(am) * br + abs(bm) * ar + ar * br
    return mid, rad + slack * (1 + abs(mid))


def _result_polynomial(op: str, a: AlgebraicConst,
                       b: Optional[AlgebraicConst]) -> Poly:
    """A polynomial vanishing at op(a, b), via resultants."""
    if op == "neg":
        return _to_poly([c if k % 2 == 0 else -c
                         for k, c in enumerate(a.min_poly)])
    if op == "inv":
        return _to_poly(list(reversed(a.min_poly)))
    pa = sum(c * _Y**k for k, c in enumerate(a.min_poly))
    if op == "add":
        pb = sum(c * (_X - _Y)**k for k, c in enumerate(b.min_poly))
    else:
        pb = sum(c * _X**k * _Y**(b.degree - k)
                 for k, c in enumerate(b.min_poly))
    return Poly(sympy.resultant(pa, pb, _Y), _X, domain="ZZ")


def field_op(op: str, a: AlgebraicConst, b: Optional[AlgebraicConst] = None,
             degree_cap: int = DEFAULT_DEGREE_CAP) -> AlgebraicConst:
    """Exact field operation on algebraic constants.

    Parameters
    ----------
    op: str
        One of "add", "mul", "neg", "inv".
    a: AlgebraicConst
        First operand.
    b: AlgebraicConst (default=None)
        Second operand for "add" and "mul".
    degree_cap: int (default=64)
        Largest admissible result degree.

    Returns
    -------
    The result; degree-one results denote rationals.
    """
    if op not in ("add", "mul", "neg", "inv"):
        raise ValueError(f"Unknown field operation: {op}")
    if op in ("add", "mul") and b is None:
        raise ValueError(f"Operation {op} needs two operands")
    if op == "inv" and a.is_zero:
        raise AlgebraicInversionError("Inversion of zero")
    if op in ("add", "mul") and a.degree * b.degree > degree_cap ** 2:
        raise DegreeCapError(
            f"Resultant degree {a.degree * b.degree} is out of reach")

    resultant = _result_polynomial(op, a, b)
    if resultant.is_zero:
        raise ValueError(f"Degenerate resultant for {op}")
    _, factors = resultant.factor_list()
    candidates = [_primitive(f) for f, _ in factors if f.degree() >= 1]

    ctx = MPContext()
    for prec in (64, 128, 256, 512, 1024, 2048, 4096):
        ctx.prec = prec
        disk = _disk_of(op, a, b, ctx)
        if disk is None:
            continue
        mid, rad = disk
        rad_q = _mpf_to_fraction(rad)
        window = ComplexBox.around(_mpf_to_fraction(mid.real),
                                   _mpf_to_fraction(mid.imag), rad_q)
        eps = max(rad_q, Fraction(1, 2 ** (prec + 8)))
        hits = []
        for factor in candidates:
            for rect in _root_boxes(factor, eps):
                if window.intersects(rect):
                    hits.append((factor, rect))
        if len(hits) == 1:
            factor, rect = hits[0]
            if factor.degree() > degree_cap:
                raise DegreeCapError(
                    f"Result degree {factor.degree()} exceeds the cap "
                    f"{degree_cap}")
            return AlgebraicConst(_coefficients(factor), rect)
    raise NonIsolatingBoxError(0)


def power(a: AlgebraicConst, exponent: int,
          degree_cap: int = DEFAULT_DEGREE_CAP) -> AlgebraicConst:
    """a ** exponent by repeated squaring over field_op."""
    if exponent == 0:
        return AlgebraicConst.from_rational(1)
    base = field_op("inv", a, degree_cap=degree_cap) if exponent < 0 else a
    n = abs(exponent)
    result = None
    while n:
        if n & 1:
            result = base if result is None else field_op(
                "mul", result, base, degree_cap)
        n >>= 1
        if n:
            base = field_op("mul", base, base, degree_cap)
    return result


_BUILTINS = {
    "i": ((1, 0, 1), ("-1/2", "1/2", "1/2", "3/2")),
    "sqrt2": ((-2, 0, 1), ("1", "2", "-1/2", "1/2")),
    "sqrt3": ((-3, 0, 1), ("1", "2", "-1/2", "1/2")),
    "cbrt2": ((-2, 0, 0, 1), ("1", "3/2", "-1/4", "1/4")),
    "phi": ((-1, -1, 1), ("1", "2", "-1/2", "1/2")),
}


class AlgebraicRegistry:
    """Named algebraic constants, safe for concurrent use."""
    def __init__(self, **kwargs):
        """Initializer for AlgebraicRegistry.

        Parameters
        ----------
        **degree_cap: int (default=64)
            Degree cap applied to registered and derived constants.
        """
        self.degree_cap = kwargs.get("degree_cap", DEFAULT_DEGREE_CAP)
        self._lock = threading.RLock()
        self._by_name = {}
        self._builtins_loaded = False

    def _load_builtins(self):
        if self._builtins_loaded:
            return
        self._builtins_loaded = True
        for name, (coeffs, box) in _BUILTINS.items():
            self._by_name[name] = make_algebraic(
                coeffs, ComplexBox(*(Fraction(v) for v in box)), name)

    def register(self, name: str, const: AlgebraicConst) -> AlgebraicConst:
        """Register a constant under a name.

        Re-registering the same number under its name is a no-op; binding the
        name to a different number raises ValueError.
        """
        with self._lock:
            self._load_builtins()
            named = AlgebraicConst(const.min_poly, const.box, name)
            existing = self._by_name.get(name)
            if existing is not None:
                if not same_root(existing, named):
                    raise ValueError(
                        f"Constant {name} already bound to another number")
                return existing
            self._by_name[name] = named
            return named

    def resolve(self, name: str) -> AlgebraicConst:
        with self._lock:
            self._load_builtins()
            try:
                return self._by_name[name]
            except KeyError:
                raise UnknownConstantError(
                    f"Algebraic constant {name} is not registered") from None

    def names(self) -> list:
        with self._lock:
            self._load_builtins()
            return sorted(self._by_name)

    def intern(self, const: AlgebraicConst) -> AlgebraicConst:
        """Return the registered constant equal to `const`, registering it
        under a derived name when it is new."""
        with self._lock:
            self._load_builtins()
            for existing in self._by_name.values():
                if same_root(existing, const):
                    return existing
            coarse = _coarse_box(AlgebraicConst(const.min_poly, const.box))
            digest = hashlib.sha1(
                repr((const.min_poly, coarse.as_tuple())).encode("utf-8")
            ).hexdigest()[:10]
            name = f"c{digest}"
            named = AlgebraicConst(const.min_poly, const.box, name)
            self._by_name[name] = named
            logger.debug("Registered derived constant %s for %s",
                         name, const.min_poly)
            return named

    def load_file(self, path: str) -> list:
        """Load `name : c0,...,cd : re_lo,re_hi,im_lo,im_hi` lines.

        Parameters
        ----------
        path: str
            Registry file path. Blank lines and lines starting with # are
            skipped.

        Returns
        -------
        The list of loaded names.
        """
        loaded = []
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = [p.strip() for p in line.split(":")]
                if len(parts) != 3:
                    raise ValueError(
                        f"{path}:{lineno}: expected 'name : coeffs : box'")
                name, coeffs, box = parts
                bounds = [Fraction(v) for v in box.split(",")]
                if len(bounds) != 4:
                    raise ValueError(
                        f"{path}:{lineno}: box needs four bounds")
                const = make_algebraic(
                    [int(c) for c in coeffs.split(",")],
                    ComplexBox(*bounds), name, self.degree_cap)
                self.register(name, const)
                loaded.append(name)
        logger.info("Loaded %d algebraic constants from %s", len(loaded), path)
        return loaded

    def snapshot(self, names) -> list:
        """Serializable records for the given names."""
        return [self.resolve(name).to_dict() for name in sorted(set(names))]

    def restore(self, records) -> None:
        """Register constants from snapshot records."""
        for record in records:
            const = AlgebraicConst.from_dict(record)
            self.register(record["name"], const)


REGISTRY = AlgebraicRegistry()


@functools.lru_cache(maxsize=None)
def is_real(a: AlgebraicConst) -> bool:
    """Whether the isolated root is real."""
    if a.is_rational:
        return True
    roots = _roots_in_box(a.poly(), a.box)
    return len(roots) == 1 and roots[0].im_lo == roots[0].im_hi == 0
