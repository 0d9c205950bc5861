"""Parser for the term grammar.

    expr    := product (("+" | "-") product)*
    product := unary ("*" unary)*
    unary   := "-" unary | power
    power   := atom ("^" ["-"] integer)?
    atom    := integer ["/" integer] | "alg(" name ")" | "exp(" expr ")"
             | "log(" expr [";" ["-"] integer] ")" | "(" expr ")"
             | "pi" | "e" | "i"

Whitespace is ignored. `log(t)` means the principal branch.
"""

import re
from fractions import Fraction

from . import terms
from .errors import TermSyntaxError, UnknownConstantError

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S)")
_SPACE = re.compile(r"\s*")


def _tokenize(text: str) -> list:
    tokens = []
    pos = _SPACE.match(text, 0).end()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        number, name, symbol = match.groups()
        start = match.start()
        if number is not None:
            tokens.append(("int", number, start))
        elif name is not None:
            tokens.append(("name", name, start))
        else:
            if symbol not in "+-*^/;()":
                raise TermSyntaxError(start, f"unexpected character {symbol!r}")
            tokens.append(("sym", symbol, start))
        pos = _SPACE.match(text, match.end()).end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def _accept(self, kind, value=None):
        tok_kind, tok_value, _ = self.current
        if tok_kind == kind and (value is None or tok_value == value):
            self.index += 1
            return tok_value
        return None

    def _expect(self, kind, value=None, what=None):
        out = self._accept(kind, value)
        if out is None:
            raise TermSyntaxError(
                self.current[2], f"expected {what or value or kind}, "
                f"found {self.current[1] or 'end of input'!r}")
        return out

    def parse(self) -> terms.Term:
        result = self.expr()
        if self.current[0] != "end":
            raise TermSyntaxError(
                self.current[2], f"unexpected {self.current[1]!r}")
        return result

    def expr(self):
        parts = [self.product()]
        while True:
            if self._accept("sym", "+") is not None:
                parts.append(self.product())
            elif self._accept("sym", "-") is not None:
                parts.append(terms.product_of(terms.rational(-1),
                                              self.product()))
            else:
                break
        return parts[0] if len(parts) == 1 else terms.sum_of(*parts)

    def product(self):
        parts = [self.unary()]
        while self._accept("sym", "*") is not None:
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else terms.product_of(*parts)

    def unary(self):
        if self._accept("sym", "-") is not None:
            return terms.product_of(terms.rational(-1), self.unary())
        return self.power()

    def _signed_int(self) -> int:
        sign = -1 if self._accept("sym", "-") is not None else 1
        return sign * int(self._expect("int", what="integer"))

    def power(self):
        base = self.atom()
        if self._accept("sym", "^") is not None:
            position = self.current[2]
            exponent = self._signed_int()
            if exponent == 0:
                raise TermSyntaxError(position, "exponent must be nonzero")
            return terms.power(base, exponent)
        return base

    def atom(self):
        kind, value, position = self.current
        if kind == "int":
            self.index += 1
            if self._accept("sym", "/") is not None:
                den_position = self.current[2]
                den = int(self._expect("int", what="denominator"))
                if den == 0:
                    raise TermSyntaxError(den_position,
                                          "denominator must be positive")
                return terms.rational(Fraction(int(value), den))
            return terms.rational(int(value))
        if self._accept("sym", "(") is not None:
            inner = self.expr()
            self._expect("sym", ")")
            return inner
        if kind != "name":
            raise TermSyntaxError(
                position, f"expected a term, found {value or 'end of input'!r}")
        self.index += 1
        if value == "pi":
            return terms.pi()
        if value == "e":
            return terms.e()
        if value == "i":
            return terms.alg("i")
        if value == "alg":
            self._expect("sym", "(")
            name_position = self.current[2]
            name = self._expect("name", what="constant name")
            self._expect("sym", ")")
            try:
                return terms.alg(name)
            except UnknownConstantError as exc:
                raise TermSyntaxError(
                    name_position, f"unknown algebraic constant {name!r}"
                ) from exc
        if value == "exp":
            self._expect("sym", "(")
            inner = self.expr()
            self._expect("sym", ")")
            return terms.exp(inner)
        if value == "log":
            self._expect("sym", "(")
            inner = self.expr()
            branch = 0
            if self._accept("sym", ";") is not None:
                branch = self._signed_int()
            self._expect("sym", ")")
            return terms.log(inner, branch)
        raise TermSyntaxError(position, f"unknown name {value!r}")


def parse_raw(text: str) -> terms.Term:
    """Parse without normalizing."""
    return _Parser(text).parse()


def parse(text: str) -> terms.Term:
    """Parse term text into its normal form.

    Parameters
    ----------
    text: str
        Term in the grammar of this module.

    Returns
    -------
    The normalized Term.
    """
    return terms.normalize(parse_raw(text))
