"""Exact scalar domains: the rationals, Q[t] and Q(t).

Elements are the native sympy domain elements (``gmpy2.mpq`` when gmpy2 is
available, ``PolyElement`` and ``FracElement`` otherwise); a :class:`Domain`
carries the tag and knows how to parse, format, convert and specialise them.
Containers (matrices, algebras) hold the domain, individual entries do not.
"""

from __future__ import annotations

import re
from enum import Enum
from fractions import Fraction

from sympy.polys.domains import QQ as _SQQ
from sympy.polys.fields import FracElement, field
from sympy.polys.rings import PolyElement, ring

from .errors import DomainError, PoleError, ScalarParseError

_RING, _t = ring("t", _SQQ)
_FIELD, _T = field("t", _SQQ)
_MPQ = type(_SQQ(1))


class DomainKind(Enum):
    RATIONAL = "QQ"
    POLY_T = "QQ[t]"
    RATFUN_T = "QQ(t)"


def _poly_from_terms(terms) -> PolyElement:
    p = _RING.zero
    for (k,), c in terms:
        p += _RING({(k,): _SQQ.convert(c)})
    return p


def _frac_to_poly(f: FracElement) -> PolyElement:
    den = f.denom
    if den.degree() > 0:
        raise DomainError(f"{f} is not a polynomial")
    c = _SQQ.convert(den.LC)
    return _poly_from_terms([(m, _SQQ.convert(a) / c) for m, a in f.numer.terms()])


def _poly_to_frac(p: PolyElement) -> FracElement:
    return sum((_FIELD(c) * _T ** k for (k,), c in p.terms()), _FIELD.zero)


class Domain:
    """One of the three exact scalar domains."""

    def __init__(self, kind: DomainKind):
        self.kind = kind
        if kind is DomainKind.RATIONAL:
            self.zero, self.one = _SQQ.zero, _SQQ.one
        elif kind is DomainKind.POLY_T:
            self.zero, self.one = _RING.zero, _RING.one
        else:
            self.zero, self.one = _FIELD.zero, _FIELD.one

    def __repr__(self):
        return f"Domain({self.tag})"

    @property
    def tag(self) -> str:
        return self.kind.value

    @property
    def is_field(self) -> bool:
        return self.kind is not DomainKind.POLY_T

    @property
    def has_parameter(self) -> bool:
        return self.kind is not DomainKind.RATIONAL

    @property
    def field(self) -> "Domain":
        return QQ_T_FRAC if self.kind is DomainKind.POLY_T else self

    # -- conversion -------------------------------------------------------

    def convert(self, x):
        """Coerce an int, Fraction, string or element of another domain."""
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, Fraction):
            x = _SQQ(x.numerator, x.denominator)
        if isinstance(x, bool):
            x = int(x)
        kind = self.kind
        if isinstance(x, (int, _MPQ)):
            q = _SQQ.convert(x)
            if kind is DomainKind.RATIONAL:
                return q
            if kind is DomainKind.POLY_T:
                return _RING.ground_new(q)
            return _FIELD(q)
        if isinstance(x, PolyElement):
            if kind is DomainKind.POLY_T:
                return x
            if kind is DomainKind.RATFUN_T:
                return _poly_to_frac(x)
            if x.is_ground:
                return _SQQ.convert(x.LC) if x else _SQQ.zero
            raise DomainError(f"{x} is not a rational number")
        if isinstance(x, FracElement):
            if kind is DomainKind.RATFUN_T:
                return x
            p = _frac_to_poly(x)
            return self.convert(p)
        raise DomainError(f"cannot convert {x!r} into {self.tag}")

    # -- structure --------------------------------------------------------

    def is_constant(self, x) -> bool:
        """True for elements of Q inside the domain (the units, when nonzero)."""
        if self.kind is DomainKind.RATIONAL:
            return True
        if self.kind is DomainKind.POLY_T:
            return x.is_ground
        return x.numer.is_ground and x.denom.is_ground

    def is_unit(self, x) -> bool:
        if not x:
            return False
        return self.is_field or x.is_ground

    def degree(self, x) -> int:
        """Euclidean norm on Q[t]; -1 for zero."""
        if self.kind is not DomainKind.POLY_T:
            raise DomainError("degree is only defined on QQ[t]")
        return x.degree() if x else -1

    def normalize_monic(self, x):
        if self.kind is not DomainKind.POLY_T or not x:
            return x
        return x.quo_ground(x.LC)

    def numer_denom(self, x) -> tuple[PolyElement, PolyElement]:
        """(numerator, monic denominator) as Q[t] polynomials, coprime."""
        if self.kind is DomainKind.RATIONAL:
            return _RING.ground_new(x), _RING.one
        if self.kind is DomainKind.POLY_T:
            return x, _RING.one
        num = _poly_from_terms(x.numer.terms())
        den = _poly_from_terms(x.denom.terms())
        lc = den.LC
        return num.quo_ground(lc), den.quo_ground(lc)

    def evaluate(self, x, c):
        """Specialise t -> c (c rational); raises PoleError at a pole."""
        c = _SQQ.convert(c) if not isinstance(c, Fraction) else _SQQ(c.numerator, c.denominator)
        if self.kind is DomainKind.RATIONAL:
            return x
        num, den = self.numer_denom(x)
        dv = _horner(den, c)
        if not dv:
            raise PoleError(f"{self.format(x)} has a pole at t = {c}")
        return _horner(num, c) / dv

    # -- text -------------------------------------------------------------

    def parse(self, text: str):
        value = _Parser(text).parse()
        try:
            return self.convert(value)
        except DomainError as exc:
            raise ScalarParseError(f"{text!r}: {exc}") from None

    def format(self, x) -> str:
        if self.kind is DomainKind.RATIONAL:
            return str(x)
        num, den = self.numer_denom(x)
        if den == 1:
            return _format_poly(num)
        return f"({_format_poly(num)})/({_format_poly(den)})"


def _horner(p: PolyElement, c):
    acc = _SQQ.zero
    if not p:
        return acc
    coeffs = dict(((k,), a) for (k,), a in p.terms())
    for k in range(p.degree(), -1, -1):
        acc = acc * c + coeffs.get((k,), 0)
    return acc


def _format_poly(p: PolyElement) -> str:
    if not p:
        return "0"
    out = []
    for (k,), c in p.terms():
        neg = c < 0
        a = -c if neg else c
        if k == 0:
            body = str(a)
        else:
            mono = "t" if k == 1 else f"t^{k}"
            body = mono if a == 1 else f"{a}*{mono}"
        if out:
            out.append(("-" if neg else "+") + body)
        else:
            out.append(("-" if neg else "") + body)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|(t)|([-+*/^()]))")


class _Parser:
    """Recursive descent over  sum := [+-] product ([+-] product)* ;
    product := power ([*/]? power)* ; power := atom [^ int] ;
    atom := int | t | ( sum ).  Values are computed in Q(t)."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m:
                raise ScalarParseError(f"{text!r}: unexpected character at offset {pos}")
            self.tokens.append(m.group(1) or m.group(2) or m.group(3))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _take(self):
        tok = self._peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise ScalarParseError("empty coefficient")
        value = self._sum()
        if self._peek() is not None:
            raise ScalarParseError(f"{self.text!r}: trailing input {self._peek()!r}")
        return value

    def _sum(self):
        sign = 1
        if self._peek() in ("+", "-"):
            sign = -1 if self._take() == "-" else 1
        value = sign * self._product()
        while self._peek() in ("+", "-"):
            op = self._take()
            rhs = self._product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _product(self):
        value = self._power()
        while True:
            tok = self._peek()
            if tok in ("*", "/"):
                self._take()
                rhs = self._power()
                if tok == "*":
                    value = value * rhs
                else:
                    if not rhs:
                        raise ScalarParseError(f"{self.text!r}: zero denominator")
                    value = value / rhs
            elif tok is not None and (tok == "t" or tok == "(" or tok.isdigit()):
                value = value * self._power()
            else:
                return value

    def _power(self):
        base = self._atom()
        if self._peek() == "^":
            self._take()
            tok = self._take()
            if tok is None or not tok.isdigit():
                raise ScalarParseError(f"{self.text!r}: exponent must be a nonnegative integer")
            return base ** int(tok)
        return base

    def _atom(self):
        tok = self._take()
        if tok is None:
            raise ScalarParseError(f"{self.text!r}: unexpected end of input")
        if tok.isdigit():
            return _FIELD(int(tok))
        if tok == "t":
            return _T
        if tok == "(":
            value = self._sum()
            if self._take() != ")":
                raise ScalarParseError(f"{self.text!r}: missing ')'")
            return value
        raise ScalarParseError(f"{self.text!r}: unexpected {tok!r}")


QQ = Domain(DomainKind.RATIONAL)
QQ_T = Domain(DomainKind.POLY_T)
QQ_T_FRAC = Domain(DomainKind.RATFUN_T)

_BY_TAG = {d.tag: d for d in (QQ, QQ_T, QQ_T_FRAC)}


def domain_from_tag(tag: str) -> Domain:
    try:
        return _BY_TAG[tag]
    except KeyError:
        raise DomainError(f"unknown scalar domain {tag!r}; expected one of {sorted(_BY_TAG)}") from None


def t_poly() -> PolyElement:
    """The generator t of Q[t]."""
    return _t


def rational_roots(p: PolyElement) -> list:
    """Rational roots of p, sorted."""
    roots = []
    for f in irreducible_factors(p):
        if f.degree() == 1:
            coeffs = dict(f.terms())
            roots.append(-coeffs.get((0,), _SQQ.zero) / coeffs[(1,)])
    return sorted(roots)


def irreducible_factors(p: PolyElement) -> list[PolyElement]:
    """Monic irreducible factors of p over Q (with multiplicity collapsed)."""
    if not p or p.is_ground:
        return []
    _, factors = p.factor_list()
    out = [f.quo_ground(f.LC) for f, _ in factors]
    return sorted(out, key=lambda f: (f.degree(), _format_poly(f)))
