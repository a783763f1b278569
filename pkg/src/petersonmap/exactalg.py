"""Exact polynomials in the equivariant parameters and root-denominator fractions.

H_T(pt) is realised as Z[a_1, ..., a_r] with a_i the i-th simple root.
Fractions arising from fixed-point localization only ever have products of
roots in the denominator, so ``LinFrac`` stores a numerator polynomial over
a multiset of primitive linear forms and never needs a multivariate gcd.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Exp = tuple[int, ...]


class ExactAlgebraError(ArithmeticError):
    pass


class NotPolynomial(ExactAlgebraError):
    pass


class DivisionByNonLinearProduct(ExactAlgebraError):
    pass


class Poly:
    """Sparse integer polynomial; terms map exponent tuples to non-zero ints."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exp, int] | None = None):
        self.nvars = nvars
        self.terms: dict[Exp, int] = {e: c for e, c in (terms or {}).items() if c}
        self._hash = None

    # -- constructors ---------------------------------------------------

    @classmethod
    def const(cls, nvars: int, c: int) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        """a_i, with i 1-based."""
        return cls(nvars, {tuple(int(k == i - 1) for k in range(nvars)): 1})

    @classmethod
    def linear(cls, coords: Sequence[int]) -> "Poly":
        n = len(coords)
        return cls(n, {tuple(int(k == i) for k in range(n)): c for i, c in enumerate(coords) if c})

    # -- basic protocol -------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Poly.const(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        return format_poly(self)

    def _check(self, other: "Poly") -> None:
        if self.nvars != other.nvars:
            raise ExactAlgebraError("rank mismatch")

    # -- ring operations ------------------------------------------------

    def __add__(self, other: "Poly | int") -> "Poly":
        if isinstance(other, int):
            other = Poly.const(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Poly | int") -> "Poly":
        if isinstance(other, int):
            other = Poly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other: int) -> "Poly":
        return (-self) + other

    def __mul__(self, other: "Poly | int") -> "Poly":
        if isinstance(other, int):
            if other == 0:
                return Poly(self.nvars)
            return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict[Exp, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly.one(self.nvars)
        for _ in range(k):
            out = out * self
        return out

    # -- inspection -----------------------------------------------------

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def sorted_terms(self) -> list[tuple[Exp, int]]:
        # graded, then lexicographic with a_1 highest
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def substitute_linear(self, images: Sequence[Sequence[int]]) -> "Poly":
        """Ring map sending a_j to the linear form with coordinates images[j]."""
        lin = [Poly.linear(v) for v in images]
        out = Poly(self.nvars)
        powers: dict[tuple[int, int], Poly] = {}
        for e, c in self.terms.items():
            term = Poly.const(self.nvars, c)
            for j, k in enumerate(e):
                if k:
                    p = powers.get((j, k))
                    if p is None:
                        p = powers[(j, k)] = lin[j] ** k
                    term = term * p
            out = out + term
        return out


def exact_div_linear(p: Poly, form: Sequence[int]) -> Poly | None:
    """Return q with q * form == p, or None when the form does not divide p.

    Division runs along the first coordinate k with a non-zero coefficient:
    the term of the remainder with the highest a_k power always comes from
    the a_k term of the form.
    """
    n = p.nvars
    if len(form) != n:
        raise ExactAlgebraError("rank mismatch")
    k = next((i for i, c in enumerate(form) if c), None)
    if k is None:
        raise ZeroDivisionError("division by the zero form")
    ck = form[k]
    others = [(i, c) for i, c in enumerate(form) if c and i != k]
    rem = dict(p.terms)
    quot: dict[Exp, int] = {}
    # order: a_k degree first, then the rest, so leading terms are stable
    def lead_key(e):
        return (e[k], e)

    while rem:
        e = max(rem, key=lead_key)
        c = rem[e]
        if e[k] == 0 or c % ck:
            return None
        qc = c // ck
        qe = e[:k] + (e[k] - 1,) + e[k + 1:]
        quot[qe] = quot.get(qe, 0) + qc
        del rem[e]
        for i, ci in others:
            te = list(qe)
            te[i] += 1
            te = tuple(te)
            v = rem.get(te, 0) - qc * ci
            if v:
                rem[te] = v
            else:
                rem.pop(te, None)
    return Poly(n, quot)


def canonical_form(form: Sequence[int]) -> tuple[tuple[int, ...], int, int]:
    """Split a linear form as sign * content * primitive form.

    The primitive part has coprime coordinates and a positive leading
    coordinate; returns (primitive, sign, content).
    """
    form = tuple(form)
    lead = next((c for c in form if c), 0)
    if lead == 0:
        raise ZeroDivisionError("zero linear form")
    g = math.gcd(*form)
    sign = -1 if lead < 0 else 1
    return tuple(sign * c // g for c in form), sign, g


def _content(p: Poly) -> int:
    return math.gcd(*p.terms.values()) if p.terms else 0


class LinFrac:
    """num / (scale * prod(form^mult)) with primitive forms and scale >= 1.

    Signs and integer contents are folded into ``num`` and ``scale``, and no
    form divides ``num``; the representation is therefore canonical and
    equality is structural.
    """

    __slots__ = ("num", "den", "scale")

    def __init__(
        self,
        num: Poly,
        den: Mapping[tuple[int, ...], int] | None = None,
        scale: int = 1,
        *,
        _normal=False,
    ):
        if scale == 0:
            raise ZeroDivisionError("zero scalar denominator")
        if scale < 0:
            num, scale = -num, -scale
        self.num = num
        self.den: dict[tuple[int, ...], int] = {}
        sign = 1
        for f, m in (den or {}).items():
            if m <= 0:
                if m < 0:
                    raise ExactAlgebraError("negative multiplicity")
                continue
            g, s, c = canonical_form(f)
            if s < 0 and m % 2:
                sign = -sign
            scale *= c**m
            self.den[g] = self.den.get(g, 0) + m
        if sign < 0:
            self.num = -self.num
        self.scale = scale
        if not _normal:
            self._normalize()
        self._reduce_scale()

    @classmethod
    def from_poly(cls, p: Poly) -> "LinFrac":
        return cls(p, None, _normal=True)

    @classmethod
    def const(cls, nvars: int, c: int) -> "LinFrac":
        return cls(Poly.const(nvars, c), None, _normal=True)

    @classmethod
    def inverse_product(cls, forms: Iterable[Sequence[int]], nvars: int) -> "LinFrac":
        """1 / prod(forms)."""
        den: dict = {}
        for f in forms:
            den[tuple(f)] = den.get(tuple(f), 0) + 1
        return cls(Poly.one(nvars), den)

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def _normalize(self) -> None:
        if not self.num:
            self.den = {}
            return
        for f in list(self.den):
            m = self.den[f]
            while m:
                q = exact_div_linear(self.num, f)
                if q is None:
                    break
                self.num = q
                m -= 1
            if m:
                self.den[f] = m
            else:
                del self.den[f]

    def _reduce_scale(self) -> None:
        if not self.num:
            self.den, self.scale = {}, 1
            return
        if self.scale == 1:
            return
        g = math.gcd(_content(self.num), self.scale)
        if g > 1:
            self.num = Poly(self.num.nvars, {e: c // g for e, c in self.num.terms.items()})
            self.scale //= g

    def normalize(self) -> "LinFrac":
        return LinFrac(self.num, self.den, self.scale)

    # -- protocol -------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.num)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Poly)):
            other = LinFrac.from_poly(other if isinstance(other, Poly) else Poly.const(self.nvars, other))
        if not isinstance(other, LinFrac):
            return NotImplemented
        return self.num == other.num and self.den == other.den and self.scale == other.scale

    def __hash__(self) -> int:
        return hash((self.num, frozenset(self.den.items()), self.scale))

    def __repr__(self) -> str:
        return f"LinFrac({self})"

    def __str__(self) -> str:
        return format_linfrac(self)

    @property
    def is_polynomial(self) -> bool:
        return not self.den and self.scale == 1

    def denominator_poly(self) -> Poly:
        """scale * prod(forms), as a polynomial."""
        out = Poly.const(self.nvars, self.scale)
        for f, m in self.den.items():
            out = out * Poly.linear(f) ** m
        return out

    def degree(self) -> int:
        """Polynomial degree minus the number of denominator factors."""
        return self.num.degree() - sum(self.den.values())

    def to_poly(self) -> Poly:
        if not self.is_polynomial:
            raise NotPolynomial(f"{self} is not a polynomial with integer coefficients")
        return self.num

    # -- field operations -----------------------------------------------

    def __add__(self, other: "LinFrac") -> "LinFrac":
        if not other.num:
            return self
        if not self.num:
            return other
        den = dict(self.den)
        for f, m in other.den.items():
            if den.get(f, 0) < m:
                den[f] = m
        scale = self.scale * other.scale // math.gcd(self.scale, other.scale)
        a = self.num * (scale // self.scale)
        for f, m in den.items():
            extra = m - self.den.get(f, 0)
            if extra:
                a = a * Poly.linear(f) ** extra
        b = other.num * (scale // other.scale)
        for f, m in den.items():
            extra = m - other.den.get(f, 0)
            if extra:
                b = b * Poly.linear(f) ** extra
        return LinFrac(a + b, den, scale)

    def __neg__(self) -> "LinFrac":
        return LinFrac(-self.num, self.den, self.scale, _normal=True)

    def __sub__(self, other: "LinFrac") -> "LinFrac":
        return self + (-other)

    def __mul__(self, other: "LinFrac | Poly | int") -> "LinFrac":
        if isinstance(other, int):
            if not other:
                return LinFrac.const(self.nvars, 0)
            # an integer can cancel against the scale but never against a form
            return LinFrac(self.num * other, self.den, self.scale, _normal=True)
        if isinstance(other, Poly):
            other = LinFrac.from_poly(other)
        if not self.num or not other.num:
            return LinFrac.const(self.nvars, 0)
        den = dict(self.den)
        for f, m in other.den.items():
            den[f] = den.get(f, 0) + m
        return LinFrac(self.num * other.num, den, self.scale * other.scale)

    __rmul__ = __mul__

    def div_by(self, other: "LinFrac") -> "LinFrac":
        """self / other, where other's numerator is a non-zero integer or an integer multiple of a linear form."""
        if not other.num:
            raise ZeroDivisionError("division by zero fraction")
        num = other.num
        new_den = dict(self.den)
        if num.is_constant():
            top = self.num
            scale = self.scale * num.constant_term()
        elif num.degree() == 1 and num.is_homogeneous():
            form = [0] * num.nvars
            for e, c in num.terms.items():
                form[e.index(1)] = c
            new_den[tuple(form)] = new_den.get(tuple(form), 0) + 1
            top, scale = self.num, self.scale
        else:
            raise DivisionByNonLinearProduct(f"pivot numerator {num} is not a linear product")
        return LinFrac(top * other.denominator_poly(), new_den, scale)

    def act(self, images: Sequence[Sequence[int]]) -> "LinFrac":
        """Apply the ring automorphism a_j -> images[j] to numerator and forms."""
        num = self.num.substitute_linear(images)
        den: dict = {}
        for f, m in self.den.items():
            img = [0] * len(f)
            for j, c in enumerate(f):
                if c:
                    for k, x in enumerate(images[j]):
                        img[k] += c * x
            den[tuple(img)] = den.get(tuple(img), 0) + m
        # a unimodular substitution keeps the fraction reduced
        return LinFrac(num, den, self.scale, _normal=True)


def specialize_zero(x: Poly | LinFrac) -> int:
    """Non-equivariant limit: the constant term of a polynomial."""
    if isinstance(x, LinFrac):
        x = x.to_poly()
    return x.constant_term()


# -- text forms -------------------------------------------------------------


def _monomial(e: Exp) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"a{i + 1}")
        elif k:
            parts.append(f"a{i + 1}^{k}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    out = []
    for idx, (e, c) in enumerate(p.sorted_terms()):
        mono = _monomial(e)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if idx == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


_TERM = re.compile(r"([+-]?)\s*(\d+)?\s*\*?\s*((?:a\d+(?:\^\d+)?\s*\*?\s*)*)")


def parse_poly(text: str, nvars: int) -> Poly:
    """Inverse of ``format_poly``; tolerant of spacing."""
    s = text.replace(" ", "")
    if s == "0":
        return Poly(nvars)
    if not s:
        raise ValueError("empty polynomial text")
    chunks = re.findall(r"[+-]?[^+-]+", s)
    if "".join(chunks) != s:
        raise ValueError(f"cannot parse polynomial {text!r}")
    out = Poly(nvars)
    for ch in chunks:
        sign = -1 if ch.startswith("-") else 1
        ch = ch.lstrip("+-")
        coeff = 1
        e = [0] * nvars
        for factor in ch.split("*"):
            if re.fullmatch(r"\d+", factor):
                coeff *= int(factor)
                continue
            m = re.fullmatch(r"a(\d+)(?:\^(\d+))?", factor)
            if not m:
                raise ValueError(f"bad factor {factor!r} in {text!r}")
            i = int(m.group(1))
            if not 1 <= i <= nvars:
                raise ValueError(f"variable a{i} out of range")
            e[i - 1] += int(m.group(2) or 1)
        out = out + Poly(nvars, {tuple(e): sign * coeff})
    return out


def format_linfrac(x: LinFrac) -> str:
    if x.is_polynomial:
        return format_poly(x.num)
    factors = [str(x.scale)] if x.scale != 1 else []
    for f in sorted(x.den, key=lambda f: tuple(-c for c in f)):
        body = f"({format_poly(Poly.linear(f))})"
        m = x.den[f]
        factors.append(body if m == 1 else f"{body}^{m}")
    return f"({format_poly(x.num)})/(" + "*".join(factors) + ")"


def parse_linfrac(text: str, nvars: int) -> LinFrac:
    s = text.strip()
    m = re.fullmatch(r"\((.*)\)/\((.*)\)", s)
    if not m:
        return LinFrac.from_poly(parse_poly(s, nvars))
    num = parse_poly(m.group(1), nvars)
    body = m.group(2).strip()
    scale = 1
    lead = re.match(r"(\d+)\*?", body)
    if lead:
        scale = int(lead.group(1))
        body = body[lead.end():]
    den: dict = {}
    for fm in re.finditer(r"\(([^()]*)\)(?:\^(\d+))?", body):
        p = parse_poly(fm.group(1), nvars)
        form = [0] * nvars
        for e, c in p.terms.items():
            if sum(e) != 1:
                raise ValueError(f"denominator factor {fm.group(1)!r} is not linear")
            form[e.index(1)] = c
        den[tuple(form)] = den.get(tuple(form), 0) + int(fm.group(2) or 1)
    return LinFrac(num, den, scale)


def rational_combination(vectors: Sequence[Poly], coeffs: Sequence[Fraction]) -> Poly:
    """sum c_k v_k with rational c_k; raises NotPolynomial if the sum is not integral."""
    if not vectors:
        raise ValueError("empty combination")
    acc: dict[Exp, Fraction] = {}
    for v, c in zip(vectors, coeffs):
        if not c:
            continue
        for e, x in v.terms.items():
            acc[e] = acc.get(e, Fraction(0)) + c * x
    out = {}
    for e, x in acc.items():
        if x.denominator != 1:
            raise NotPolynomial("non-integral coefficient in exact division")
        if x:
            out[e] = int(x)
    return Poly(vectors[0].nvars, out)
