"""Weighted circle actions on O(S^{2n+1}_q) and the principal-bundle layer.

Degree convention: ``z_i`` has degree ``+m_i`` and ``z_i*`` degree ``-m_i``.
A grading is certified strong in degree ``N`` by a :class:`GradingWitness`
(``sum u_i v_i = 1`` with ``u_i`` of degree ``N``, ``v_i`` of degree ``-N``);
a :class:`Frame` is the special case ``v_i = u_i*``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Sequence

from .qsphere import ANY_DEGREE, Element, Monomial, _term_key, degree, format_element, gen, parse
from .scalars import LaurentScalar, RationalScalar

__all__ = [
    "Frame",
    "GradingWitness",
    "LensMembership",
    "Report",
    "WeightError",
    "WeightVector",
    "big_m",
    "emit_pimsner_presentation",
    "frame_power",
    "inner_product_matrix",
    "is_admissible",
    "is_coprime",
    "is_pairwise_coprime",
    "lens_membership",
    "n_m",
    "read_frame",
    "read_witness",
    "sharp",
    "sharp_base",
    "solve_witness",
    "spectral_basis",
    "unweighted_frame",
    "verify_frame",
    "verify_grading_witness",
    "verify_pimsner_reconstruction",
    "wp_generators",
    "write_frame",
    "write_witness",
]


class WeightError(ValueError):
    """A weight vector violates the precondition of an operation."""


@dataclass(frozen=True)
class WeightVector:
    m: tuple

    def __post_init__(self):
        m = tuple(self.m)
        if not m:
            raise WeightError("empty weight vector")
        for w in m:
            if not isinstance(w, int) or isinstance(w, bool) or w < 1:
                raise WeightError(f"weights must be positive integers, got {w!r}")
        object.__setattr__(self, "m", m)

    @classmethod
    def of(cls, m) -> "WeightVector":
        return m if isinstance(m, WeightVector) else cls(tuple(m))

    @property
    def n(self) -> int:
        return len(self.m) - 1

    def __iter__(self):
        return iter(self.m)

    def __len__(self):
        return len(self.m)

    def __getitem__(self, i):
        return self.m[i]

    def __str__(self):
        return " ".join(map(str, self.m))


def n_m(m) -> int:
    """Product ``m_1 * ... * m_n`` (``m_0`` excluded)."""
    m = WeightVector.of(m)
    if m.n < 1:
        raise WeightError("N_m needs at least two weights")
    return math.prod(m.m[1:])


def big_m(m) -> int:
    """Sum ``m_1 + ... + m_n`` (``m_0`` excluded)."""
    return sum(WeightVector.of(m).m[1:])


def is_coprime(m) -> bool:
    return reduce(math.gcd, WeightVector.of(m).m) == 1


def _first_common_pair(m):
    for i, j in itertools.combinations(range(len(m)), 2):
        if math.gcd(m[i], m[j]) != 1:
            return i, j
    return None


def is_pairwise_coprime(m) -> bool:
    return _first_common_pair(WeightVector.of(m).m) is None


def is_admissible(m) -> bool:
    """Every ``m_j`` (``j >= 1``) is coprime to some earlier weight."""
    m = WeightVector.of(m).m
    return all(any(math.gcd(m[i], m[j]) == 1 for i in range(j)) for j in range(1, len(m)))


def _require_pairwise_coprime(p):
    pair = _first_common_pair(p.m)
    if pair is not None:
        i, j = pair
        raise WeightError(
            f"weights are not pairwise coprime: gcd(p_{i}, p_{j}) = gcd({p[i]}, {p[j]}) = {math.gcd(p[i], p[j])}"
        )


def sharp(p) -> WeightVector:
    """The weight vector with entries ``prod_{j != i} p_j``."""
    p = WeightVector.of(p)
    _require_pairwise_coprime(p)
    return WeightVector(tuple(math.prod(p.m[:i] + p.m[i + 1 :]) for i in range(len(p))))


def sharp_base(m) -> WeightVector | None:
    """Pairwise coprime ``p`` with ``sharp(p) == m``, or None if there is none."""
    m = WeightVector.of(m)
    if m.n == 0:
        return WeightVector((1,)) if m.m == (1,) else None
    if m.n == 1:
        p = WeightVector((m[1], m[0]))
    else:
        # prod(m) = P**n where P = prod(p)
        total = math.prod(m.m)
        P = round(total ** (1.0 / m.n))
        P = next((c for c in range(max(P - 2, 1), P + 3) if c**m.n == total), None)
        if P is None or any(P % w for w in m.m):
            return None
        p = WeightVector(tuple(P // w for w in m.m))
    if not is_pairwise_coprime(p) or sharp(p) != m:
        return None
    return p


# --- degree-0 generators ----------------------------------------------------


def _word_element(word, n) -> Element:
    x = Element.one(n)
    for i, s in word:
        x = x * gen(i, n, star=bool(s))
    return x


def _check_degree_zero(elems, m):
    for x in elems:
        if degree(x, m) not in (0, ANY_DEGREE):
            raise AssertionError(f"generator {x} is not of degree 0 for weights {m}")
    return elems


def wp_generators(m, family: str = "general", exponent_cap: int = 3, p=None) -> list[Element]:
    """Degree-0 elements generating the weighted projective space algebra.

    ``general``: ``z_i z_i*`` for all ``i`` and ``z^k`` for ``k . m = 0`` with
    ``|k_i| <= exponent_cap``, where a negative ``k_i`` contributes
    ``(z_i*)^(-k_i)``; starred factors are written first.
    ``sharp``: ``a_ij = (z_i*)^(m_j/g) z_j^(m_i/g)``, ``g = gcd(m_i, m_j)``;
    requires ``m == sharp(p)`` for pairwise coprime ``p``.
    ``teardrop``: ``b_ij = z_i* z_j`` (``i <= j < n``) and
    ``c_l = z_0^l_0 ... z_{n-1}^l_{n-1} z_n*`` with ``sum l = m_n``; requires
    ``m = (1, ..., 1, l)``.
    """
    m = WeightVector.of(m)
    n = m.n
    out: list[Element] = []
    if family == "general":
        if exponent_cap < 0:
            raise WeightError("exponent cap must be nonnegative")
        out.extend(gen(i, n) * gen(i, n, star=True) for i in range(n + 1))
        rng = range(-exponent_cap, exponent_cap + 1)
        for k in itertools.product(rng, repeat=n + 1):
            if not any(k) or sum(a * b for a, b in zip(k, m.m)) != 0:
                continue
            word = [(i, 1) for i in range(n + 1) for _ in range(-k[i])]
            word += [(i, 0) for i in range(n + 1) for _ in range(k[i])]
            out.append(_word_element(word, n))
    elif family == "sharp":
        if p is None:
            p = sharp_base(m)
            if p is None:
                raise WeightError(f"weights ({m}) are not of the form sharp(p) for pairwise coprime p")
        else:
            p = WeightVector.of(p)
            if sharp(p) != m:
                raise WeightError(f"sharp({p}) = ({sharp(p)}) differs from ({m})")
        for i in range(n + 1):
            for j in range(n + 1):
                g = math.gcd(m[i], m[j])
                word = [(i, 1)] * (m[j] // g) + [(j, 0)] * (m[i] // g)
                out.append(_word_element(word, n))
    elif family == "teardrop":
        if n < 1 or any(w != 1 for w in m.m[:-1]):
            raise WeightError(f"teardrop family needs weights (1, ..., 1, l), got ({m})")
        l = m[n]
        for i in range(n):
            for j in range(i, n):
                out.append(_word_element([(i, 1), (j, 0)], n))
        for ls in _compositions(n, l):
            word = [(i, 0) for i in range(n) for _ in range(ls[i])] + [(n, 1)]
            out.append(_word_element(word, n))
    else:
        raise ValueError(f"unknown generator family {family!r}")
    return _check_degree_zero(out, m)


def _compositions(parts: int, total: int) -> Iterator[tuple]:
    """Nonnegative vectors of the given length and sum, lexicographically descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(parts - 1, total - first):
            yield (first,) + rest


def spectral_basis(m, deg: int, length_cap: int) -> list[Monomial]:
    """Normal-form monomials of weighted degree ``deg`` with at most ``length_cap`` letters."""
    m = WeightVector.of(m)
    k = m.n + 1
    out = []
    for length in range(length_cap + 1):
        for s in range(length + 1):
            for a in _compositions(k, s):
                da = sum(x * w for x, w in zip(a, m.m))
                for b in _compositions(k, length - s):
                    if a[-1] and b[-1]:
                        continue
                    if da - sum(x * w for x, w in zip(b, m.m)) == deg:
                        out.append(Monomial(a, b))
    return sorted(out, key=_term_key)


# --- reports ----------------------------------------------------------------


@dataclass(frozen=True)
class Report:
    """Outcome of a verification.

    ``check`` names the failed condition (``homogeneity``, ``sum``,
    ``reconstruction``, ``length``, ``module``) and is ``None`` on success.
    """

    status: str
    check: str | None = None
    failed_index: int | None = None
    residual: Element | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_text(self) -> str:
        lines = [f"status: {self.status}"]
        if not self.passed:
            lines.append(f"check: {self.check}")
            if self.failed_index is not None:
                lines.append(f"failed_index: {self.failed_index}")
            if self.residual is not None:
                lines.append(f"residual: {format_element(self.residual)}")
        return "\n".join(lines) + "\n"

    def to_machine(self) -> str:
        def opt(v):
            return "none" if v is None else str(v)

        res = "none" if self.residual is None else format_element(self.residual)
        return (
            f"status: {self.status}\ncheck: {opt(self.check)}\n"
            f"failed_index: {opt(self.failed_index)}\nresidual: {res}\n"
        )

    @classmethod
    def from_machine(cls, text: str, n: int) -> "Report":
        kv = _key_values(text)
        idx = kv.get("failed_index", "none")
        res = kv.get("residual", "none")
        chk = kv.get("check", "none")
        return cls(
            status=kv["status"],
            check=None if chk == "none" else chk,
            failed_index=None if idx == "none" else int(idx),
            residual=None if res == "none" else parse(res, n),
        )


def _key_values(text: str) -> dict[str, str]:
    out = {}
    for ln in text.splitlines():
        if ":" in ln:
            k, v = ln.split(":", 1)
            out[k.strip()] = v.strip()
    return out


_PASS = Report("pass")


# --- strong gradings --------------------------------------------------------


@dataclass(frozen=True)
class GradingWitness:
    weights: WeightVector
    degree: int
    us: tuple
    vs: tuple
    # sum us[i] vs[i] == denominator; a nontrivial one was cleared from a Q(q) solution,
    # and the witness holds for every q where it does not vanish
    denominator: LaurentScalar = LaurentScalar.const(1)

    @property
    def n(self) -> int:
        return self.weights.n


def _homogeneity_failure(elems, m, d, offset=0):
    for k, x in enumerate(elems):
        if degree(x, m) not in (d, ANY_DEGREE):
            return Report("fail", "homogeneity", k + offset, x)
    return None


def verify_grading_witness(w: GradingWitness) -> Report:
    """Check degrees of ``us`` (+N) and ``vs`` (-N) and ``sum us[i] vs[i] == 1``
    (or ``== w.denominator`` when one is set).

    Indices into ``vs`` are reported offset by ``len(us)``.
    """
    if len(w.us) != len(w.vs):
        return Report("fail", "length", min(len(w.us), len(w.vs)))
    bad = _homogeneity_failure(w.us, w.weights, w.degree) or _homogeneity_failure(
        w.vs, w.weights, -w.degree, len(w.us)
    )
    if bad:
        return bad
    total = Element.zero(w.n)
    for u, v in zip(w.us, w.vs):
        total = total + u * v
    if not w.denominator:
        return Report("fail", "denominator")
    residual = Element.scalar(w.denominator, w.n) - total
    if residual:
        return Report("fail", "sum", None, residual)
    return _PASS


def _solve_linear(rows: list[list[RationalScalar]], rhs: list[RationalScalar]):
    """One solution of ``rows @ x == rhs`` over Q(q), free variables set to 0, or None."""
    m = [r[:] + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        candidates = [i for i in range(r, len(m)) if m[i][c]]
        if not candidates:
            continue
        # prefer unit pivots (monomials in q) to keep the solution Laurent
        piv = next((i for i in candidates if m[i][c].num.is_monomial() and m[i][c].is_laurent()), candidates[0])
        m[r], m[piv] = m[piv], m[r]
        inv = RationalScalar(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] for row in m[r:]):
        return None
    x = [RationalScalar(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][-1]
    return x


def solve_witness(m, deg: int, length_cap: int) -> GradingWitness | None:
    """Search for a strong-grading witness in degree ``deg`` among monomials of
    at most ``length_cap`` letters.

    Solves ``sum c_ab u_a v_b = 1`` exactly over Q(q).  Returns None when no
    solution exists within the cap, which says nothing about strongness.
    If the solution needs denominators that are not powers of q, their
    product is cleared into ``vs`` and kept as ``denominator``; the q values
    where it vanishes are excluded.
    """
    m = WeightVector.of(m)
    n = m.n
    U = spectral_basis(m, deg, length_cap)
    V = spectral_basis(m, -deg, length_cap)
    if not U or not V:
        return None
    pairs = [(a, b) for a in range(len(U)) for b in range(len(V))]
    products = [Element.monomial(U[a]) * Element.monomial(V[b]) for a, b in pairs]
    support = sorted({mono for p in products for mono in p.terms}, key=_term_key)
    one = Monomial.one(n)
    if one not in support:
        return None
    rows = [[RationalScalar(p.coefficient(mono)) for p in products] for mono in support]
    rhs = [RationalScalar(1 if mono == one else 0) for mono in support]
    sol = _solve_linear(rows, rhs)
    if sol is None:
        return None
    common = LaurentScalar.const(1)
    for den in sorted({c.den for c in sol if c and not c.is_laurent()}, key=str):
        common = common * den
    us, vs = [], []
    for a in range(len(U)):
        v = Element.zero(n)
        for b in range(len(V)):
            c = sol[a * len(V) + b]
            if c:
                v = v + Element.monomial(V[b]) * (c * common).to_laurent()
        if v:
            us.append(Element.monomial(U[a]))
            vs.append(v)
    return GradingWitness(m, deg, tuple(us), tuple(vs), common)


# --- frames and Cuntz-Pimsner relations -------------------------------------


@dataclass(frozen=True)
class Frame:
    weights: WeightVector
    degree: int
    etas: tuple

    @property
    def n(self) -> int:
        return self.weights.n


def unweighted_frame(n: int) -> Frame:
    """The frame ``{z_0, ..., z_n}`` of the unweighted action in degree 1."""
    return Frame(WeightVector((1,) * (n + 1)), 1, tuple(gen(i, n) for i in range(n + 1)))


def verify_frame(f: Frame) -> Report:
    """Check degrees, ``sum eta eta* == 1``, and ``eta_k == sum_j eta_j <eta_j, eta_k>``."""
    bad = _homogeneity_failure(f.etas, f.weights, f.degree)
    if bad:
        return bad
    total = Element.zero(f.n)
    for eta in f.etas:
        total = total + eta * eta.star()
    residual = Element.one(f.n) - total
    if residual:
        return Report("fail", "sum", None, residual)
    for k, xi in enumerate(f.etas):
        rebuilt = Element.zero(f.n)
        for eta in f.etas:
            rebuilt = rebuilt + eta * (eta.star() * xi)
        if rebuilt != xi:
            return Report("fail", "reconstruction", k, xi - rebuilt)
    return _PASS


def frame_power(f: Frame, d: int) -> Frame:
    """Frame of the d-th tensor power: all ordered d-fold products, ``len(f.etas)**d`` of them."""
    if d < 1:
        raise ValueError("power must be a positive integer")
    etas = []
    for combo in itertools.product(f.etas, repeat=d):
        x = combo[0]
        for y in combo[1:]:
            x = x * y
        etas.append(x)
    return Frame(f.weights, d * f.degree, tuple(etas))


def inner_product_matrix(f: Frame) -> list[list[Element]]:
    """Entries ``<eta_i, eta_j> = eta_i* eta_j``, all in the degree-0 subalgebra."""
    stars = [eta.star() for eta in f.etas]
    return [[s * eta for eta in f.etas] for s in stars]


def verify_pimsner_reconstruction(f: Frame, b: Element) -> Report:
    """Check ``b eta_j == sum_i eta_i <eta_i, b eta_j>`` for every ``j``."""
    if degree(b, f.weights) not in (0, ANY_DEGREE):
        raise WeightError(f"{b} is not in the degree-0 subalgebra")
    stars = [eta.star() for eta in f.etas]
    for j, eta_j in enumerate(f.etas):
        lhs = b * eta_j
        rhs = Element.zero(f.n)
        for eta_i, s in zip(f.etas, stars):
            rhs = rhs + eta_i * (s * lhs)
        if lhs != rhs:
            return Report("fail", "module", j, lhs - rhs)
    return _PASS


@dataclass(frozen=True)
class LensMembership:
    member: bool
    lens_degree: int | None = None


def lens_membership(x: Element, m, N: int) -> LensMembership:
    """Whether ``x`` lies in the fixed points of the Z_N action, and its lens degree."""
    if N < 1:
        raise ValueError("N must be positive")
    m = WeightVector.of(m)
    if any(mono.degree(m) % N for mono in x.terms):
        return LensMembership(False)
    d = degree(x, m)
    if isinstance(d, int):
        return LensMembership(True, d // N)
    return LensMembership(True)


def emit_pimsner_presentation(f: Frame, b_list: Sequence[Element] = ()) -> str:
    """Generators-and-relations presentation of the Cuntz-Pimsner algebra of ``f``.

    Raises ``WeightError`` when the frame does not verify or a ``b`` is not
    of degree 0.
    """
    rep = verify_frame(f)
    if not rep.passed:
        raise WeightError(f"frame does not verify ({rep.check}); residual: {rep.residual}")
    k = len(f.etas)
    ips = inner_product_matrix(f)
    lines = [
        "presentation: cuntz-pimsner",
        f"weights: {f.weights}",
        f"degree: {f.degree}",
        "generators: " + " ".join(f"S{j}" for j in range(k)),
        "frame:",
    ]
    lines += [f"  S{j} ~ {format_element(eta)}" for j, eta in enumerate(f.etas)]
    lines.append("relations:")
    for i in range(k):
        for j in range(k):
            lines.append(f"  S{i}* S{j} = {format_element(ips[i][j])}")
    lines.append("  " + " + ".join(f"S{j} S{j}*" for j in range(k)) + " = 1")
    stars = [eta.star() for eta in f.etas]
    for t, b in enumerate(b_list):
        if degree(b, f.weights) not in (0, ANY_DEGREE):
            raise WeightError(f"b{t} = {b} is not in the degree-0 subalgebra")
        lines.append(f"  b{t} := {format_element(b)}")
        for j, eta_j in enumerate(f.etas):
            lhs = b * eta_j
            terms = []
            for i in range(k):
                c = stars[i] * lhs
                if c:
                    terms.append(f"S{i} ({format_element(c)})")
            lines.append(f"  b{t} S{j} = " + (" + ".join(terms) if terms else "0"))
    return "\n".join(lines) + "\n"


# --- file formats -----------------------------------------------------------


def _read_blocks(text: str):
    header: dict[str, str] = {}
    blocks: list[list[tuple[int, str]]] = [[]]
    for lineno, raw in enumerate(text.splitlines(), 1):
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        if ln == "--":
            blocks.append([])
        elif ln.split(":", 1)[0] in ("weights", "degree", "denominator"):
            k, v = ln.split(":", 1)
            header[k] = v.strip()
        else:
            blocks[-1].append((lineno, ln))
    if "weights" not in header or "degree" not in header:
        raise ValueError("missing 'weights:' or 'degree:' header line")
    weights = WeightVector(tuple(int(x) for x in header["weights"].split()))
    deg = int(header["degree"])
    parsed = []
    for block in blocks:
        elems = []
        for lineno, ln in block:
            try:
                elems.append(parse(ln, weights.n))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
        parsed.append(tuple(elems))
    return weights, deg, parsed, header


def read_witness(text: str) -> GradingWitness:
    weights, deg, blocks, header = _read_blocks(text)
    if len(blocks) != 2:
        raise ValueError(f"a witness file has two blocks separated by '--', found {len(blocks)}")
    den = LaurentScalar.const(1)
    if "denominator" in header:
        x = parse(header["denominator"], weights.n)
        if any(not mono.is_one() for mono in x.terms):
            raise ValueError("denominator must be a scalar in q")
        den = x.coefficient(Monomial.one(weights.n))
    return GradingWitness(weights, deg, blocks[0], blocks[1], den)


def write_witness(w: GradingWitness) -> str:
    lines = [f"weights: {w.weights}", f"degree: {w.degree}"]
    if w.denominator != 1:
        lines.append(f"denominator: {w.denominator}")
    lines += [format_element(u) for u in w.us]
    lines.append("--")
    lines += [format_element(v) for v in w.vs]
    return "\n".join(lines) + "\n"


def read_frame(text: str) -> Frame:
    weights, deg, blocks, _ = _read_blocks(text)
    if len(blocks) != 1:
        raise ValueError("a frame file has a single block")
    return Frame(weights, deg, blocks[0])


def write_frame(f: Frame) -> str:
    lines = [f"weights: {f.weights}", f"degree: {f.degree}"]
    lines += [format_element(eta) for eta in f.etas]
    return "\n".join(lines) + "\n"
