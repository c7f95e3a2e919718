"""
Exact scalars: the base field k (Q or F_p), polynomials in t over k, and the
local ring O = k[t] localized at (t - s0)

Every LocalScalar is kept in canonical form num/den with gcd(num, den) = 1,
den monic and den(s0) != 0, so equality is plain comparison of the parts.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Dict, List, Tuple, Union

from sympy import isprime
from sympy.polys.domains import QQ, GF
from sympy.polys.rings import PolyElement, ring as poly_ring

from .exceptions import (
    DivisionByNonUnit, InvalidFieldError, PoleAtPoint, ScalarSyntaxError
)

MAX_CHARACTERISTIC = 2 ** 31

ScalarLike = Union["LocalScalar", int, Fraction, str]


class FieldKind(str, Enum):
    """Supported base fields"""
    RATIONALS = "Q"
    PRIME = "Fp"


@lru_cache(maxsize=None)
def _domain_and_ring(kind: FieldKind, characteristic: int) -> Tuple[Any, Any, PolyElement]:
    domain = QQ if kind is FieldKind.RATIONALS else GF(characteristic)
    polys, t = poly_ring("t", domain)
    return domain, polys, t


_POINT_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")
_FIELD_PATTERN = re.compile(r"F\s*(\d+)|Fp:\s*(\d+)|GF\(\s*(\d+)\s*\)", flags=re.IGNORECASE)


@dataclass(frozen=True)
class BaseField:
    """The residue field k: the rationals or a prime field F_p"""
    kind: FieldKind
    characteristic: int = 0

    def __post_init__(self) -> None:
        if self.kind is FieldKind.RATIONALS:
            if self.characteristic != 0:
                raise InvalidFieldError(self.label, "the rationals have characteristic 0")
            return
        p = self.characteristic
        if p < 2 or p >= MAX_CHARACTERISTIC or not isprime(p):
            raise InvalidFieldError(f"F{p}", "characteristic must be a prime below 2^31")

    @classmethod
    def rationals(cls) -> BaseField:
        return cls(FieldKind.RATIONALS, 0)

    @classmethod
    def prime(cls, p: int) -> BaseField:
        return cls(FieldKind.PRIME, p)

    @classmethod
    def parse(cls, descriptor: str) -> BaseField:
        """Parse 'Q', 'QQ', 'F5', 'Fp:5' or 'GF(5)'"""
        text = descriptor.strip()
        if text.upper() in ("Q", "QQ"):
            return cls.rationals()
        match = _FIELD_PATTERN.fullmatch(text)
        if not match:
            raise InvalidFieldError(descriptor, "expected Q or F<p>")
        return cls.prime(int(next(group for group in match.groups() if group)))

    @property
    def label(self) -> str:
        return "Q" if self.kind is FieldKind.RATIONALS else f"F{self.characteristic}"

    @property
    def domain(self) -> Any:
        return _domain_and_ring(self.kind, self.characteristic)[0]

    @property
    def polys(self) -> Any:
        return _domain_and_ring(self.kind, self.characteristic)[1]

    @property
    def t(self) -> PolyElement:
        return _domain_and_ring(self.kind, self.characteristic)[2]

    @property
    def two_is_unit(self) -> bool:
        return self.characteristic != 2

    def element(self, value: Any) -> Any:
        """Convert an int, Fraction, literal string or domain element into k"""
        domain = self.domain
        if isinstance(value, bool):
            raise TypeError("booleans are not field elements")
        if isinstance(value, int):
            return domain.convert(value)
        if isinstance(value, Fraction):
            return self.divide(domain.convert(value.numerator), domain.convert(value.denominator))
        if isinstance(value, str):
            match = _POINT_PATTERN.match(value)
            if not match:
                raise ScalarSyntaxError(value, 0, "expected an integer or fraction literal")
            numerator = domain.convert(int(match.group(1)))
            denominator = domain.convert(int(match.group(2) or 1))
            if not denominator:
                raise ScalarSyntaxError(value, len(value) - 1, "division by zero")
            return self.divide(numerator, denominator)
        if domain.of_type(value):
            return value
        return domain.convert(value)

    def divide(self, a: Any, b: Any) -> Any:
        if not b:
            raise DivisionByNonUnit(self.format(b))
        return self.domain.quo(a, b)

    def to_pair(self, x: Any) -> Tuple[int, int]:
        """Numerator/denominator integers; F_p residues lie in [0, p)"""
        value = self.domain.to_sympy(x)
        if self.kind is FieldKind.RATIONALS:
            return int(value.p), int(value.q)
        return int(value) % self.characteristic, 1

    def format(self, x: Any) -> str:
        numerator, denominator = self.to_pair(x)
        return str(numerator) if denominator == 1 else f"{numerator}/{denominator}"


@dataclass(frozen=True)
class LocalRing:
    """The local ring O of rational functions over k regular at s0"""
    field: BaseField
    base_point: Any

    @classmethod
    def at(cls, field: BaseField, base_point: Any = 0) -> LocalRing:
        return cls(field, field.element(base_point))

    @classmethod
    def rationals(cls, base_point: Any = 0) -> LocalRing:
        return cls.at(BaseField.rationals(), base_point)

    @classmethod
    def prime(cls, p: int, base_point: Any = 0) -> LocalRing:
        return cls.at(BaseField.prime(p), base_point)

    @property
    def polys(self) -> Any:
        return self.field.polys

    @cached_property
    def zero(self) -> LocalScalar:
        return LocalScalar(self, self.polys.zero, self.polys.one)

    @cached_property
    def one(self) -> LocalScalar:
        return LocalScalar(self, self.polys.one, self.polys.one)

    @cached_property
    def t(self) -> LocalScalar:
        return LocalScalar(self, self.field.t, self.polys.one)

    @cached_property
    def pi_poly(self) -> PolyElement:
        return self.field.t - self.polys(self.base_point)

    @cached_property
    def pi(self) -> LocalScalar:
        """The uniformizer t - s0"""
        return LocalScalar(self, self.pi_poly, self.polys.one)

    @property
    def base_point_label(self) -> str:
        return self.field.format(self.base_point)

    def point(self, value: Any) -> Any:
        return self.field.element(value)

    def scalar(self, value: ScalarLike) -> LocalScalar:
        """Coerce ints, fractions, expression strings and scalars into O"""
        if isinstance(value, LocalScalar):
            if value.ring != self:
                raise ValueError("scalar belongs to a different local ring")
            return value
        if isinstance(value, str):
            return parse_scalar(self, value)
        if isinstance(value, Fraction):
            return self.from_polys(self.polys(value.numerator), self.polys(value.denominator))
        constant = self.field.element(value)
        if not constant:
            return self.zero
        return LocalScalar(self, self.polys(constant), self.polys.one)

    def poly(self, coefficients: List[Any]) -> LocalScalar:
        """Polynomial from coefficients, lowest degree first"""
        terms = {(i,): self.field.element(c) for i, c in enumerate(coefficients)}
        return LocalScalar(self, self.polys.from_dict({m: c for m, c in terms.items() if c}), self.polys.one)

    def from_polys(self, num: PolyElement, den: PolyElement) -> LocalScalar:
        """Canonical num/den; raises DivisionByNonUnit if den vanishes at s0 after cancellation"""
        if not den:
            raise DivisionByNonUnit("0", self.base_point_label)
        if not num:
            return self.zero
        if den != 1:
            g = num.gcd(den)
            if g != 1:
                num = num.exquo(g)
                den = den.exquo(g)
            lc = den.LC
            if lc != self.field.domain.one:
                num = num.quo_ground(lc)
                den = den.monic()
            if not den(self.base_point):
                raise DivisionByNonUnit(_format_fraction(self, num, den), self.base_point_label)
        return LocalScalar(self, num, den)

    def parse(self, text: str) -> LocalScalar:
        return parse_scalar(self, text)


@dataclass(frozen=True, eq=False, slots=True)
class LocalScalar:
    """An element num/den of O in canonical form; immutable"""
    ring: LocalRing
    num: PolyElement
    den: PolyElement

    # Coercion

    def _coerce(self, other: Any) -> Any:
        if isinstance(other, LocalScalar):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError("operands belong to different local rings")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.ring.scalar(other)
        return None

    # Ring arithmetic

    def __add__(self, other: Any) -> LocalScalar:
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        if self.den == b.den:
            if self.den == 1:
                return LocalScalar(self.ring, self.num + b.num, self.den)
            return self.ring.from_polys(self.num + b.num, self.den)
        return self.ring.from_polys(self.num * b.den + b.num * self.den, self.den * b.den)

    __radd__ = __add__

    def __neg__(self) -> LocalScalar:
        return LocalScalar(self.ring, -self.num, self.den)

    def __sub__(self, other: Any) -> LocalScalar:
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return self + (-b)

    def __rsub__(self, other: Any) -> LocalScalar:
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return b + (-self)

    def __mul__(self, other: Any) -> LocalScalar:
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        if not self.num or not b.num:
            return self.ring.zero
        if self.den == 1 and b.den == 1:
            return LocalScalar(self.ring, self.num * b.num, self.den)
        return self.ring.from_polys(self.num * b.num, self.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> LocalScalar:
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        if not b.is_unit():
            raise DivisionByNonUnit(str(b), self.ring.base_point_label)
        return self.ring.from_polys(self.num * b.den, self.den * b.num)

    def __rtruediv__(self, other: Any) -> LocalScalar:
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return b / self

    def __pow__(self, exponent: int) -> LocalScalar:
        if exponent < 0:
            return self.ring.one / (self ** -exponent)
        return LocalScalar(self.ring, self.num ** exponent, self.den ** exponent)

    def divide_exact(self, other: LocalScalar) -> LocalScalar:
        """self/other, defined in O whenever valuation(self) >= valuation(other)"""
        if not other.num:
            raise DivisionByNonUnit(str(other), self.ring.base_point_label)
        if not self.num:
            return self.ring.zero
        return self.ring.from_polys(self.num * other.den, self.den * other.num)

    # Comparison

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LocalScalar):
            return self.ring == other.ring and self.num == other.num and self.den == other.den
        if isinstance(other, int) and not isinstance(other, bool):
            return self == self.ring.scalar(other)
        return NotImplemented

    def __hash__(self) -> int:
        # constants hash like the numbers they equal; over F_p, the residue in [0, p)
        if self.den == 1 and self.num.is_ground:
            numerator, denominator = self.ring.field.to_pair(self.num.LC)
            return hash(Fraction(numerator, denominator))
        return hash((self.num, self.den))

    def __bool__(self) -> bool:
        return bool(self.num)

    @property
    def is_zero(self) -> bool:
        return not self.num

    # Local structure

    def valuation(self) -> Union[int, float]:
        """Order of vanishing at s0; math.inf for zero"""
        if not self.num:
            return math.inf
        v = 0
        num = self.num
        s0 = self.ring.base_point
        while not num(s0):
            num = num.exquo(self.ring.pi_poly)
            v += 1
        return v

    def is_unit(self) -> bool:
        return bool(self.num) and bool(self.num(self.ring.base_point))

    def eval_at(self, point: Any) -> Any:
        """num(s)/den(s) in k; PoleAtPoint when den(s) = 0"""
        field = self.ring.field
        s = field.element(point)
        d = self.den(s)
        if not d:
            raise PoleAtPoint(str(self), field.format(s))
        return field.divide(self.num(s), d)

    def residue(self) -> Any:
        """Image in the residue field k = O/(t - s0)"""
        return self.eval_at(self.ring.base_point)

    def has_pole_at(self, point: Any) -> bool:
        return not self.den(self.ring.field.element(point))

    @property
    def is_polynomial(self) -> bool:
        return self.den == 1

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"LocalScalar({format_scalar(self)!r} over {self.ring.field.label} at s0={self.ring.base_point_label})"


# Textual syntax

def _poly_terms(field: BaseField, poly: PolyElement) -> Dict[int, Tuple[int, int]]:
    return {monom[0]: field.to_pair(coeff) for monom, coeff in poly.items()}


def _format_int_poly(terms: Dict[int, int]) -> str:
    if not terms:
        return "0"
    pieces: List[str] = []
    for degree in sorted(terms, reverse=True):
        c = terms[degree]
        if c == 0:
            continue
        magnitude = abs(c)
        if degree == 0:
            body = str(magnitude)
        else:
            power = "t" if degree == 1 else f"t^{degree}"
            body = power if magnitude == 1 else f"{magnitude}*{power}"
        if not pieces:
            pieces.append(f"-{body}" if c < 0 else body)
        else:
            pieces.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(pieces) if pieces else "0"


def _wrap(text: str) -> str:
    return text if re.fullmatch(r"\d+|t", text) else f"({text})"


def _format_fraction(local: LocalRing, num: PolyElement, den: PolyElement) -> str:
    field = local.field
    num_terms = _poly_terms(field, num)
    den_terms = _poly_terms(field, den)
    if field.kind is FieldKind.RATIONALS:
        scale = math.lcm(*(q for _, q in list(num_terms.values()) + list(den_terms.values())), 1)
        numerator = {d: p * (scale // q) for d, (p, q) in num_terms.items()}
        denominator = {d: p * (scale // q) for d, (p, q) in den_terms.items()}
        content = math.gcd(*numerator.values(), *denominator.values())
        if content > 1:
            numerator = {d: c // content for d, c in numerator.items()}
            denominator = {d: c // content for d, c in denominator.items()}
    else:
        numerator = {d: p for d, (p, _) in num_terms.items()}
        denominator = {d: p for d, (p, _) in den_terms.items()}
    num_text = _format_int_poly(numerator)
    if denominator == {0: 1}:
        return num_text
    return f"{_wrap(num_text)}/{_wrap(_format_int_poly(denominator))}"


def format_scalar(a: LocalScalar) -> str:
    """Canonical expression string; parse_scalar(format_scalar(a)) == a"""
    if not a.num:
        return "0"
    return _format_fraction(a.ring, a.num, a.den)


_TOKEN_PATTERN = re.compile(r"\s*(?:(\d+)|(t)|([-+*/^()]))")


class _ScalarParser:
    """Recursive descent over + - * / ^ ( ), integers and t, evaluated in k(t)"""

    def __init__(self, local: LocalRing, text: str):
        self.local = local
        self.text = text
        self.tokens = self._tokenize(text)
        self.index = 0

    def _tokenize(self, text: str) -> List[Tuple[str, str, int]]:
        tokens = []
        position = 0
        while position < len(text):
            if text[position:].strip() == "":
                break
            match = _TOKEN_PATTERN.match(text, position)
            if not match:
                offset = len(text[position:]) - len(text[position:].lstrip())
                raise ScalarSyntaxError(text, position + offset, f"unexpected character '{text[position + offset]}'")
            integer, variable, operator = match.groups()
            start = match.start(1) if integer else match.start(2) if variable else match.start(3)
            if integer:
                tokens.append(("int", integer, start))
            elif variable:
                tokens.append(("t", variable, start))
            else:
                tokens.append(("op", operator, start))
            position = match.end()
        tokens.append(("end", "", len(text)))
        return tokens

    def _peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def _take(self) -> Tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _fail(self, reason: str) -> ScalarSyntaxError:
        return ScalarSyntaxError(self.text, self._peek()[2], reason)

    def parse(self) -> LocalScalar:
        if self._peek()[0] == "end":
            raise self._fail("empty expression")
        num, den = self._expression()
        if self._peek()[0] != "end":
            raise self._fail(f"unexpected '{self._peek()[1]}'")
        try:
            return self.local.from_polys(num, den)
        except DivisionByNonUnit:
            raise ScalarSyntaxError(self.text, 0, f"denominator vanishes at s0={self.local.base_point_label}")

    def _expression(self) -> Tuple[PolyElement, PolyElement]:
        num, den = self._term()
        while self._peek()[:2] in (("op", "+"), ("op", "-")):
            sign = self._take()[1]
            rnum, rden = self._term()
            if sign == "-":
                rnum = -rnum
            num, den = num * rden + rnum * den, den * rden
        return num, den

    def _term(self) -> Tuple[PolyElement, PolyElement]:
        num, den = self._unary()
        while self._peek()[:2] in (("op", "*"), ("op", "/")):
            operator = self._take()
            rnum, rden = self._unary()
            if operator[1] == "*":
                num, den = num * rnum, den * rden
            else:
                if not rnum:
                    raise ScalarSyntaxError(self.text, operator[2], "division by zero")
                num, den = num * rden, den * rnum
        return num, den

    def _unary(self) -> Tuple[PolyElement, PolyElement]:
        if self._peek()[:2] == ("op", "-"):
            self._take()
            num, den = self._unary()
            return -num, den
        if self._peek()[:2] == ("op", "+"):
            self._take()
            return self._unary()
        return self._power()

    def _power(self) -> Tuple[PolyElement, PolyElement]:
        num, den = self._atom()
        if self._peek()[:2] == ("op", "^"):
            self._take()
            kind, value, _ = self._peek()
            if kind != "int":
                raise self._fail("exponent must be a non-negative integer")
            self._take()
            exponent = int(value)
            num, den = num ** exponent, den ** exponent
        return num, den

    def _atom(self) -> Tuple[PolyElement, PolyElement]:
        kind, value, _ = self._peek()
        polys = self.local.polys
        if kind == "int":
            self._take()
            return polys(self.local.field.domain.convert(int(value))), polys.one
        if kind == "t":
            self._take()
            return self.local.field.t, polys.one
        if (kind, value) == ("op", "("):
            self._take()
            result = self._expression()
            if self._peek()[:2] != ("op", ")"):
                raise self._fail("expected ')'")
            self._take()
            return result
        raise self._fail("expected a number, 't' or '('")


def parse_scalar(local: LocalRing, text: str) -> LocalScalar:
    """Parse an expression like '(t^2-1)/(t-2)' into O"""
    return _ScalarParser(local, text).parse()
