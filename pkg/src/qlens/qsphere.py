"""Coordinate algebra of the odd quantum sphere O(S^{2n+1}_q).

Generators ``z_0, ..., z_n`` and their adjoints ``z_i*`` subject to

    z_i z_j   = q^-1 z_j z_i                      (i < j)
    z_i* z_j  = q z_j z_i*                        (i != j)
    z_n* z_n  = z_n z_n*
    z_i* z_i  = z_i z_i* + (1 - q^2) sum_{j>i} z_j z_j*
    sum_i z_i z_i* = 1

Elements are kept in the normal-form basis ``z^a (z*)^b`` with
``min(a_n, b_n) == 0``, obtained from the oriented rewriting system

    (R1) z_j z_i   -> q z_i z_j                   i < j
    (R2) z_j* z_i* -> q z_i* z_j*                 j < i
    (R3) z_i* z_j  -> q z_j z_i*                  i != j
    (R4) z_i* z_i  -> z_i z_i* + (1-q^2) sum_{j>i} z_j z_j*   i < n
    (R5) z_n* z_n  -> z_n z_n*
    (R6) z_n z_n*  -> 1 - sum_{i<n} z_i z_i*

A letter is a pair ``(index, star)`` with ``star`` in {0, 1}; a word is a
tuple of letters.
"""

from __future__ import annotations

import re
import random
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .scalars import LaurentScalar, as_laurent

__all__ = [
    "ANY_DEGREE",
    "Element",
    "Monomial",
    "ParseError",
    "RewriteBudgetError",
    "degree",
    "format_element",
    "gen",
    "normalize",
    "parse",
    "reduce_words",
    "specialize_q1",
    "star",
]

_ONE = LaurentScalar.const(1)
_MINUS_ONE = LaurentScalar.const(-1)
_Q = LaurentScalar.q(1)
_ONE_MINUS_Q2 = LaurentScalar({0: 1, 2: -1})


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"position {position}: {message}")
        self.position = position


class RewriteBudgetError(RuntimeError):
    pass


class _AnyDegree:
    """Degree marker for the zero element, which is homogeneous of every degree."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ANY_DEGREE"

    __str__ = __repr__


ANY_DEGREE = _AnyDegree()


class Monomial(NamedTuple):
    """Normal-form basis monomial ``z_0^a0 ... z_n^an (z_n*)^bn ... (z_0*)^b0``."""

    a: tuple
    b: tuple

    @property
    def n(self) -> int:
        return len(self.a) - 1

    @property
    def length(self) -> int:
        return sum(self.a) + sum(self.b)

    def is_one(self) -> bool:
        return not any(self.a) and not any(self.b)

    def is_normal(self) -> bool:
        return min(self.a[-1], self.b[-1]) == 0

    def word(self) -> tuple:
        w = []
        for i, k in enumerate(self.a):
            w.extend([(i, 0)] * k)
        for i in range(len(self.b) - 1, -1, -1):
            w.extend([(i, 1)] * self.b[i])
        return tuple(w)

    def degree(self, weights) -> int:
        m = _weights(weights)
        return sum(x * w for x, w in zip(self.a, m)) - sum(x * w for x, w in zip(self.b, m))

    @classmethod
    def one(cls, n: int) -> "Monomial":
        z = (0,) * (n + 1)
        return cls(z, z)

    def __str__(self):
        if self.is_one():
            return "1"
        parts = []
        for i, k in enumerate(self.a):
            if k:
                parts.append(f"z{i}" if k == 1 else f"z{i}^{k}")
        for i in range(len(self.b) - 1, -1, -1):
            k = self.b[i]
            if k:
                parts.append(f"z{i}*" if k == 1 else f"z{i}*^{k}")
        return " ".join(parts)


def _weights(m) -> tuple:
    return tuple(getattr(m, "m", m))


# --- rewriting --------------------------------------------------------------


def _rewrite_pair(x, y, n):
    """Right-hand side of the rule whose left side is the word ``x y``, or None."""
    i, s = x
    j, t = y
    if s == 0 and t == 0:
        if j < i:  # R1
            return ((_Q, ((j, 0), (i, 0))),)
        return None
    if s == 1 and t == 1:
        if i < j:  # R2
            return ((_Q, ((j, 1), (i, 1))),)
        return None
    if s == 0:
        if i == j == n:  # R6
            return ((_ONE, ()),) + tuple((_MINUS_ONE, ((k, 0), (k, 1))) for k in range(n))
        return None
    if i != j:  # R3
        return ((_Q, ((j, 0), (i, 1))),)
    if i < n:  # R4
        return ((_ONE, ((i, 0), (i, 1))),) + tuple(
            (_ONE_MINUS_Q2, ((k, 0), (k, 1))) for k in range(i + 1, n + 1)
        )
    return ((_ONE, ((n, 0), (n, 1))),)  # R5


def _redexes(word, n):
    return [p for p in range(len(word) - 1) if _rewrite_pair(word[p], word[p + 1], n) is not None]


def _apply_at(word, p, n):
    rhs = _rewrite_pair(word[p], word[p + 1], n)
    head, tail = word[:p], word[p + 2 :]
    return [(c, head + w + tail) for c, w in rhs]


def _word_to_monomial(word, n) -> Monomial:
    a = [0] * (n + 1)
    b = [0] * (n + 1)
    for i, s in word:
        (b if s else a)[i] += 1
    return Monomial(tuple(a), tuple(b))


def reduce_words(terms, n: int, rng: random.Random | None = None, budget: int = 200_000):
    """Reduce a linear combination of words to normal form by explicit rewriting.

    With ``rng`` unset, the leftmost redex of each word is rewritten; with an
    ``rng`` both the word and the redex are chosen at random.  Raises
    ``RewriteBudgetError`` when more than ``budget`` rule applications are
    needed.  Returns a dict ``Monomial -> LaurentScalar``.
    """
    work: dict[tuple, LaurentScalar] = {}
    for c, w in terms:
        w = tuple(w)
        work[w] = work.get(w, LaurentScalar()) + c
    done: dict[Monomial, LaurentScalar] = {}
    steps = 0
    while work:
        if rng is None:
            w = next(iter(work))
        else:
            w = rng.choice(list(work))
        c = work.pop(w)
        if not c:
            continue
        red = _redexes(w, n)
        if not red:
            mono = _word_to_monomial(w, n)
            done[mono] = done.get(mono, LaurentScalar()) + c
            continue
        steps += 1
        if steps > budget:
            raise RewriteBudgetError(f"rewriting exceeded {budget} steps")
        p = red[0] if rng is None else rng.choice(red)
        for d, w2 in _apply_at(w, p, n):
            work[w2] = work.get(w2, LaurentScalar()) + c * d
    return {m: c for m, c in done.items() if c}


@lru_cache(maxsize=None)
def _nf_append(mono: Monomial, letter: tuple, n: int) -> tuple:
    """Normal form of (normal monomial) * letter, leftmost strategy."""
    word = mono.word()
    # A normal word followed by one letter has at most one redex: the last pair.
    if not word or _rewrite_pair(word[-1], letter, n) is None:
        return ((_word_to_monomial(word + (letter,), n), _ONE),)
    acc: dict[Monomial, LaurentScalar] = {}
    for c, w in _apply_at(word + (letter,), len(word) - 1, n):
        for m2, c2 in _nf_word(w, n):
            acc[m2] = acc.get(m2, LaurentScalar()) + c * c2
    return tuple((m, c) for m, c in acc.items() if c)


@lru_cache(maxsize=None)
def _nf_word(word: tuple, n: int) -> tuple:
    # Normalizing the prefix first coincides with always rewriting the leftmost redex.
    if len(word) <= 1:
        return ((_word_to_monomial(word, n), _ONE),)
    acc: dict[Monomial, LaurentScalar] = {}
    for m, c in _nf_word(word[:-1], n):
        for m2, c2 in _nf_append(m, word[-1], n):
            acc[m2] = acc.get(m2, LaurentScalar()) + c * c2
    return tuple((m, c) for m, c in acc.items() if c)


@lru_cache(maxsize=None)
def _mono_mul(x: Monomial, y: Monomial, n: int) -> tuple:
    current = {x: _ONE}
    for letter in y.word():
        acc: dict[Monomial, LaurentScalar] = {}
        for m, c in current.items():
            for m2, c2 in _nf_append(m, letter, n):
                acc[m2] = acc.get(m2, LaurentScalar()) + c * c2
        current = {m: c for m, c in acc.items() if c}
    return tuple(current.items())


@lru_cache(maxsize=None)
def _mono_star(x: Monomial, n: int) -> tuple:
    word = tuple((i, 1 - s) for i, s in reversed(x.word()))
    return _nf_word(word, n)


def _letter(obj, n: int) -> tuple:
    if isinstance(obj, str):
        m = re.fullmatch(r"z(\d+)(\*?)", obj.strip())
        if not m:
            raise ValueError(f"not a letter: {obj!r}")
        i, s = int(m.group(1)), 1 if m.group(2) else 0
    else:
        i, s = obj
        s = 1 if s else 0
    if not 0 <= i <= n:
        raise ValueError(f"generator index {i} out of range for n={n}")
    return (i, s)


# --- elements ---------------------------------------------------------------


class Element:
    """Element of O(S^{2n+1}_q) in normal form.

    Supports ``+``, ``-``, ``*`` (with Elements, ints, Fractions and
    LaurentScalars) and nonnegative integer powers.  Equality is equality of
    normal forms.
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms=None):
        """Build from a mapping ``Monomial -> coefficient``; monomials outside
        the normal-form basis are rewritten."""
        self.n = n
        self._hash = None
        acc: dict[Monomial, LaurentScalar] = {}
        for mono, c in (terms or {}).items():
            c = as_laurent(c)
            if not c:
                continue
            if len(mono.a) != n + 1 or len(mono.b) != n + 1:
                raise ValueError(f"monomial {mono} does not live in the n={n} sphere")
            if mono.is_normal():
                acc[mono] = acc.get(mono, LaurentScalar()) + c
            else:
                for m2, c2 in _nf_word(mono.word(), n):
                    acc[m2] = acc.get(m2, LaurentScalar()) + c * c2
        self._terms = {m: c for m, c in acc.items() if c}

    @classmethod
    def _trusted(cls, n: int, terms: dict) -> "Element":
        obj = cls.__new__(cls)
        obj.n = n
        obj._hash = None
        obj._terms = {m: c for m, c in terms.items() if c}
        return obj

    @classmethod
    def zero(cls, n: int) -> "Element":
        return cls._trusted(n, {})

    @classmethod
    def one(cls, n: int) -> "Element":
        return cls.scalar(1, n)

    @classmethod
    def scalar(cls, c, n: int) -> "Element":
        return cls._trusted(n, {Monomial.one(n): as_laurent(c)})

    @classmethod
    def monomial(cls, mono: Monomial, c=1) -> "Element":
        return cls(mono.n, {mono: c})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def monomials(self) -> list:
        return sorted(self._terms, key=_term_key)

    def coefficient(self, mono: Monomial) -> LaurentScalar:
        return self._terms.get(mono, LaurentScalar())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def _check(self, other: "Element"):
        if other.n != self.n:
            raise ValueError(f"sphere index mismatch: n={self.n} vs n={other.n}")

    def _coerce(self, other):
        if isinstance(other, Element):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, LaurentScalar)):
            return Element.scalar(other, self.n)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, LaurentScalar()) + c
        return Element._trusted(self.n, acc)

    __radd__ = __add__

    def __neg__(self):
        return Element._trusted(self.n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c) -> "Element":
        c = as_laurent(c)
        return Element._trusted(self.n, {m: v * c for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, LaurentScalar)):
            return self.scale(other)
        if not isinstance(other, Element):
            return NotImplemented
        self._check(other)
        acc: dict[Monomial, LaurentScalar] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                c12 = c1 * c2
                for m, c in _mono_mul(m1, m2, self.n):
                    acc[m] = acc.get(m, LaurentScalar()) + c12 * c
        return Element._trusted(self.n, acc)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, LaurentScalar)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers of sphere elements are not defined")
        result = Element.one(self.n)
        for _ in range(k):
            result = result * self
        return result

    def star(self) -> "Element":
        acc: dict[Monomial, LaurentScalar] = {}
        for m1, c1 in self._terms.items():
            for m, c in _mono_star(m1, self.n):
                acc[m] = acc.get(m, LaurentScalar()) + c1 * c
        return Element._trusted(self.n, acc)

    def degree(self, weights):
        return degree(self, weights)

    def specialize_q1(self) -> dict:
        return specialize_q1(self)

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction, LaurentScalar)):
            return self._terms == Element.scalar(other, self.n)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Element(n={self.n}, {format_element(self)!r})"

    def __str__(self):
        return format_element(self)


def gen(i: int, n: int, star: bool = False) -> Element:
    """The generator ``z_i`` (or ``z_i*``) of O(S^{2n+1}_q)."""
    if not 0 <= i <= n:
        raise ValueError(f"generator index {i} out of range for n={n}")
    return Element._trusted(n, dict(_nf_word(((i, 1 if star else 0),), n)))


def normalize(terms, n: int) -> Element:
    """Normal form of a raw linear combination of words.

    ``terms`` is an iterable of ``(coefficient, word)``; letters may be given
    as ``(index, star)`` pairs or strings such as ``"z0*"``.
    """
    acc: dict[Monomial, LaurentScalar] = {}
    for c, word in terms:
        c = as_laurent(c)
        w = tuple(_letter(x, n) for x in word)
        for m, c2 in _nf_word(w, n):
            acc[m] = acc.get(m, LaurentScalar()) + c * c2
    return Element._trusted(n, acc)


def star(x: Element) -> Element:
    return x.star()


def degree(x: Element, weights):
    """Weighted degree of ``x``: an int, ``ANY_DEGREE`` for zero, ``None`` if inhomogeneous."""
    m = _weights(weights)
    if len(m) != x.n + 1:
        raise ValueError(f"weight vector of length {len(m)} for a sphere with {x.n + 1} generators")
    degs = {mono.degree(m) for mono in x._terms}
    if not degs:
        return ANY_DEGREE
    if len(degs) > 1:
        return None
    return degs.pop()


def specialize_q1(x: Element) -> dict:
    """Classical limit: set ``q = 1`` and let the letters commute.

    Returns ``{(a, b): Fraction}`` where ``(a, b)`` are the exponent vectors
    of ``z`` and ``conj(z)``.
    """
    out: dict[tuple, Fraction] = {}
    for mono, c in x._terms.items():
        key = (mono.a, mono.b)
        out[key] = out.get(key, Fraction(0)) + c.at_one()
    return {k: v for k, v in out.items() if v}


# --- formatting -------------------------------------------------------------


def _term_key(mono: Monomial):
    return (mono.length, tuple(-e for e in mono.a + mono.b))


def _format_term(mono: Monomial, c: LaurentScalar) -> tuple[bool, str]:
    """Return (negative, body) for one term."""
    if c.is_monomial():
        e, v = c.terms[0]
        neg = v < 0
        mag = abs(v)
        qs = "" if e == 0 else ("q" if e == 1 else f"q^{e}")
        if qs:
            coef = qs if mag == 1 else f"{mag} {qs}"
        else:
            coef = "" if mag == 1 and not mono.is_one() else str(mag)
    else:
        neg = c.terms[0][1] < 0
        coef = f"({-c if neg else c})"
    if mono.is_one():
        return neg, coef
    return neg, f"{coef} {mono}" if coef else str(mono)


def format_element(x: Element) -> str:
    """Canonical text form; ``parse(format_element(x), x.n) == x``."""
    if not x._terms:
        return "0"
    out = []
    for mono in sorted(x._terms, key=_term_key):
        neg, body = _format_term(mono, x._terms[mono])
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out)


# --- parsing ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<gen>z(?P<idx>\d+))|(?P<q>q)|(?P<num>\d+(?:/\d+)?)|(?P<op>[-+^*()]))"
)


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", start)
        start = m.start(m.lastgroup) if m.lastgroup != "idx" else m.start("gen")
        if m.group("gen"):
            toks.append(("gen", int(m.group("idx")), start))
        elif m.group("q"):
            toks.append(("q", None, start))
        elif m.group("num"):
            toks.append(("num", Fraction(m.group("num")), start))
        else:
            toks.append((m.group("op"), None, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, n: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.n = n

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[0])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def expr(self) -> Element:
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        total = self.term() * sign
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            total = total + t if op == "+" else total - t
        return total

    def term(self) -> Element:
        if self.peek()[0] not in ("gen", "q", "num", "("):
            tok = self.peek()
            what = "end of input" if tok[0] == "end" else repr(tok[0])
            raise ParseError(f"expected a factor, found {what}", tok[2])
        result = self.factor()
        while self.peek()[0] in ("gen", "q", "num", "("):
            result = result * self.factor()
        return result

    def factor(self) -> Element:
        kind, val, pos = self.peek()
        is_q = kind == "q"
        atom = self.atom()
        while self.peek()[0] == "*":
            self.take()
            atom = atom.star()
        if self.peek()[0] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "-":
                neg_pos = self.take()[2]
                if not is_q:
                    raise ParseError("negative exponents are only allowed on q", neg_pos)
                neg = True
            k_tok = self.take("num")
            k = k_tok[1]
            if k.denominator != 1:
                raise ParseError("exponent must be an integer", k_tok[2])
            k = int(k)
            if is_q:
                return Element.scalar(LaurentScalar.q(-k if neg else k), self.n)
            return atom**k
        return atom

    def atom(self) -> Element:
        kind, val, pos = self.take()
        if kind == "gen":
            if val > self.n:
                raise ParseError(f"generator z{val} exceeds n={self.n}", pos)
            return gen(val, self.n)
        if kind == "q":
            return Element.scalar(LaurentScalar.q(1), self.n)
        if kind == "num":
            return Element.scalar(val, self.n)
        if kind == "(":
            inner = self.expr()
            self.take(")")
            return inner
        what = "end of input" if kind == "end" else repr(kind)
        raise ParseError(f"unexpected {what}", pos)


def parse(text: str, n: int) -> Element:
    """Parse an expression in the generators ``z0 .. zn`` into normal form.

    ``*`` is the adjoint suffix (binding tightest), juxtaposition is the
    product, ``^`` takes integer powers (negative only on ``q``).
    """
    p = _Parser(text, n)
    x = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[0]!r}", tok[2])
    return x
