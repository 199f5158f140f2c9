"""Exact coefficient rings in the formal deformation parameter ``q``.

``LaurentScalar`` is an element of Q[q, q^-1]; ``RationalScalar`` is an
element of the fraction field Q(q).  Both are immutable, hashable and
compare structurally, which is possible because every value is kept in a
canonical form.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["LaurentScalar", "RationalScalar", "as_laurent"]


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class LaurentScalar:
    """Laurent polynomial in ``q`` with rational coefficients.

    Stored as a tuple of ``(exponent, coefficient)`` pairs sorted by
    exponent, with no zero coefficients.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        acc: dict[int, Fraction] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for e, c in items:
                c = _frac(c)
                if c:
                    acc[int(e)] = acc.get(int(e), Fraction(0)) + c
        self._terms = tuple(sorted((e, c) for e, c in acc.items() if c))
        self._hash = None

    @classmethod
    def _raw(cls, terms: tuple) -> "LaurentScalar":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "LaurentScalar":
        c = _frac(c)
        return cls._raw(((0, c),) if c else ())

    @classmethod
    def q(cls, k: int = 1) -> "LaurentScalar":
        return cls._raw(((k, Fraction(1)),))

    @property
    def terms(self) -> tuple:
        return self._terms

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0] == 0)

    def min_exp(self) -> int:
        return self._terms[0][0]

    def max_exp(self) -> int:
        return self._terms[-1][0]

    def leading_coefficient(self) -> Fraction:
        return self._terms[-1][1]

    # ring operations

    def __add__(self, other):
        other = as_laurent(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for e, c in other._terms:
            s = acc.get(e, 0) + c
            if s:
                acc[e] = s
            else:
                acc.pop(e, None)
        return LaurentScalar._raw(tuple(sorted(acc.items())))

    __radd__ = __add__

    def __neg__(self):
        return LaurentScalar._raw(tuple((e, -c) for e, c in self._terms))

    def __sub__(self, other):
        other = as_laurent(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = as_laurent(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = as_laurent(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        if not self._terms or not other._terms:
            return LaurentScalar._raw(())
        if len(other._terms) == 1:
            f, d = other._terms[0]
            return LaurentScalar._raw(tuple((e + f, c * d) for e, c in self._terms))
        if len(self._terms) == 1:
            return other * self
        acc: dict[int, Fraction] = {}
        for e, c in self._terms:
            for f, d in other._terms:
                acc[e + f] = acc.get(e + f, 0) + c * d
        return LaurentScalar._raw(tuple(sorted((e, c) for e, c in acc.items() if c)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("only monomials are invertible in Q[q, q^-1]")
            e, c = self._terms[0]
            return LaurentScalar._raw(((e * k, c**k),))
        result = LaurentScalar.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> "LaurentScalar":
        """Multiply by ``q**k``."""
        return LaurentScalar._raw(tuple((e + k, c) for e, c in self._terms))

    def __eq__(self, other):
        if isinstance(other, LaurentScalar):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == LaurentScalar.const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("L", self._terms))
        return self._hash

    def evaluate(self, value):
        """Substitute a concrete exact value for ``q``."""
        value = _frac(value)
        return sum((c * value**e for e, c in self._terms), Fraction(0))

    def at_one(self) -> Fraction:
        return sum((c for _, c in self._terms), Fraction(0))

    def __repr__(self):
        return f"LaurentScalar({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms:
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                qq = "q" if e == 1 else f"q^{e}"
                body = qq if mag == 1 else f"{mag} {qq}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)


def as_laurent(x, strict: bool = True):
    if isinstance(x, LaurentScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentScalar.const(x)
    if strict:
        raise TypeError(f"cannot interpret {x!r} as a Laurent polynomial in q")
    return NotImplemented


# Dense polynomial helpers over Q; coefficient lists run from low to high degree.


def _trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        f = a[-1] / lead
        quot[k] = f
        for i, c in enumerate(b):
            a[i + k] -= f * c
        _trim(a)
    return _trim(quot), a


def _poly_gcd(a: list, b: list) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]


def _to_poly(x: LaurentScalar) -> tuple[int, list]:
    """Split ``x`` as ``q**shift * P(q)`` with ``P(0) != 0``."""
    lo = x.min_exp()
    p = [Fraction(0)] * (x.max_exp() - lo + 1)
    for e, c in x.terms:
        p[e - lo] = c
    return lo, p


def _from_poly(shift: int, p: list) -> LaurentScalar:
    return LaurentScalar(((i + shift, c) for i, c in enumerate(p) if c))


class RationalScalar:
    """Element of Q(q) kept as ``num / den`` in lowest terms.

    Canonical form: ``den`` is a monic polynomial in ``q`` with nonzero
    constant term; all powers of ``q`` live in ``num``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = as_laurent(num)
        den = as_laurent(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = num, LaurentScalar.const(1)
            return
        a, p = _to_poly(num)
        b, d = _to_poly(den)
        g = _poly_gcd(p, d)
        if len(g) > 1:
            p, _ = _poly_divmod(p, g)
            d, _ = _poly_divmod(d, g)
        lead = d[-1]
        p = [c / lead for c in p]
        d = [c / lead for c in d]
        self.num = _from_poly(a - b, p)
        self.den = _from_poly(0, d)

    @classmethod
    def coerce(cls, x) -> "RationalScalar":
        if isinstance(x, RationalScalar):
            return x
        return cls(as_laurent(x))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_laurent(self) -> bool:
        return self.den == 1

    def to_laurent(self) -> LaurentScalar:
        if not self.is_laurent():
            raise ValueError(f"{self} has a non-monomial denominator")
        return self.num

    def __add__(self, other):
        o = RationalScalar.coerce(other)
        if self.den == o.den:
            return RationalScalar(self.num + o.num, self.den)
        return RationalScalar(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        r = RationalScalar.__new__(RationalScalar)
        r.num, r.den = -self.num, self.den
        return r

    def __sub__(self, other):
        return self + (-RationalScalar.coerce(other))

    def __rsub__(self, other):
        return RationalScalar.coerce(other) - self

    def __mul__(self, other):
        o = RationalScalar.coerce(other)
        return RationalScalar(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalScalar.coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero in Q(q)")
        return RationalScalar(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalScalar.coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, (RationalScalar, LaurentScalar, int, Fraction)):
            o = RationalScalar.coerce(other)
            return self.num == o.num and self.den == o.den
        return NotImplemented

    def __hash__(self):
        return hash(("R", self.num, self.den))

    def __repr__(self):
        return f"RationalScalar({self})"

    def __str__(self):
        if self.is_laurent():
            return str(self.num)
        return f"({self.num}) / ({self.den})"
