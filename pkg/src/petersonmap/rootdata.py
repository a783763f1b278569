"""Finite root systems and Weyl groups in integer coordinates.

Roots are stored in simple-root coordinates and coweights in simple-coroot
coordinates.  The only bridge between the two is the Cartan matrix

    cartan[i][j] = <alpha_i, alpha_j^vee>,

so every pairing is an integer computation.  Simple roots are numbered as in
Bourbaki: B_n has alpha_n short, C_n has alpha_n long, F_4 has alpha_1,
alpha_2 long, G_2 has alpha_1 short and alpha_2 long (highest root
3 alpha_1 + 2 alpha_2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

Vec = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]

_MAX_RANK = 8
_MAX_WEYL_ORDER = 200_000


class RootDataError(ValueError):
    pass


def _identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(b[0])
    return tuple(
        tuple(sum(row[k] * b[k][j] for k in range(len(b))) for j in range(n))
        for row in a
    )


def _matvec(a: Matrix, v: Sequence[int]) -> Vec:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def _transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def _kac_cartan(type_label: str, rank: int) -> list[list[int]]:
    """Cartan matrix with entries A[i][j] = <alpha_i^vee, alpha_j>."""
    n = rank
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, ij=-1, ji=-1):
        a[i][j] = ij
        a[j][i] = ji

    if type_label == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif type_label == "B":
        for i in range(n - 2):
            link(i, i + 1)
        # alpha_{n-1} long, alpha_n short
        link(n - 2, n - 1, ij=-1, ji=-2)
    elif type_label == "C":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, ij=-2, ji=-1)
    elif type_label == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif type_label == "E":
        # Bourbaki: 1-3-4-5-6-7-8 chain with 2 attached to 4
        for i, j in [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]:
            if i < n and j < n:
                link(i, j)
        link(1, 3)
    elif type_label == "F":
        link(0, 1)
        link(1, 2, ij=-1, ji=-2)
        link(2, 3)
    elif type_label == "G":
        # alpha_1 short, alpha_2 long
        link(0, 1, ij=-3, ji=-1)
    return a


_VALID = {
    "A": lambda r: r >= 1,
    "B": lambda r: r >= 2,
    "C": lambda r: r >= 2,
    "D": lambda r: r >= 4,
    "E": lambda r: r in (6, 7, 8),
    "F": lambda r: r == 4,
    "G": lambda r: r == 2,
}

_DEFAULT_RANK = {"F": 4, "G": 2}


def default_rank(type_label: str) -> int | None:
    return _DEFAULT_RANK.get(type_label)


@dataclass(frozen=True)
class WeylElement:
    """A Weyl group element, canonically its integer action on coweights.

    ``root_action`` is the contragredient action on simple-root coordinates;
    it is carried along so that both actions are matrix-vector products.
    """

    action: Matrix
    root_action: Matrix = field(compare=False, repr=False)
    length: int = field(compare=False)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        raise TypeError("use RootSystem.mul, which recomputes the length")


@dataclass(frozen=True)
class ParabolicType:
    subset: frozenset[int] = frozenset()

    @classmethod
    def of(cls, indices: Iterable[int] = ()) -> "ParabolicType":
        return cls(frozenset(indices))

    def __iter__(self):
        return iter(sorted(self.subset))

    @property
    def is_borel(self) -> bool:
        return not self.subset


class RootSystem:
    """Cartan data, roots, coroots and the Weyl group of a simple type.

    Indices of simple roots are 1-based at the public surface (``s1``,
    ``alpha_1``) and 0-based in vector coordinates.
    """

    def __init__(self, type_label: str, rank: int):
        if type_label not in _VALID or not isinstance(rank, int):
            raise RootDataError(f"unknown type {type_label!r}")
        if not (1 <= rank <= _MAX_RANK) or not _VALID[type_label](rank):
            raise RootDataError(f"invalid type/rank combination {type_label}{rank}")
        self.type_label = type_label
        self.rank = rank
        kac = _kac_cartan(type_label, rank)
        self.cartan: Matrix = tuple(
            tuple(kac[j][i] for j in range(rank)) for i in range(rank)
        )
        self._half_norms = self._symmetrizer()
        self.positive_roots: tuple[Vec, ...] = self._close_roots()
        self.positive_coroots: tuple[Vec, ...] = tuple(
            self._coroot_of(a) for a in self.positive_roots
        )
        self._root_index = {a: k for k, a in enumerate(self.positive_roots)}
        self._inverses: dict[WeylElement, WeylElement] = {}
        self.highest_root: Vec = max(self.positive_roots, key=lambda a: (sum(a), a))

    def __repr__(self) -> str:
        return f"RootSystem({self.type_label!r}, {self.rank})"

    @property
    def label(self) -> str:
        return f"{self.type_label}{self.rank}"

    # -- construction -------------------------------------------------

    def _symmetrizer(self) -> tuple[int, ...]:
        # d_j = (alpha_j, alpha_j)/2 with the short roots normalised to 1;
        # cartan[i][j] * d_j is then symmetric.
        r = self.rank
        d = [0] * r
        d[0] = 1
        changed = True
        from fractions import Fraction

        q = [Fraction(0)] * r
        q[0] = Fraction(1)
        while changed:
            changed = False
            for i in range(r):
                for j in range(r):
                    if q[i] and not q[j] and self.cartan[i][j]:
                        # cartan[i][j] q_j = cartan[j][i] q_i
                        q[j] = q[i] * self.cartan[j][i] / self.cartan[i][j]
                        changed = True
        m = min(q)
        d = [x / m for x in q]
        assert all(x.denominator == 1 for x in d)
        return tuple(int(x) for x in d)

    def _close_roots(self) -> tuple[Vec, ...]:
        r = self.rank
        simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
        roots = set(simple)
        layer = list(simple)
        while layer:
            nxt = []
            for beta in layer:
                for i in range(r):
                    ai = simple[i]
                    if beta == ai:
                        continue
                    p = 0
                    probe = tuple(b - e for b, e in zip(beta, ai))
                    while probe in roots:
                        p += 1
                        probe = tuple(b - e for b, e in zip(probe, ai))
                    q = p - self.pair(beta, simple_coroot(r, i))
                    if q > 0:
                        up = tuple(b + e for b, e in zip(beta, ai))
                        if up not in roots:
                            roots.add(up)
                            nxt.append(up)
            layer = nxt
        return tuple(sorted(roots, key=lambda a: (sum(a), tuple(-x for x in a))))

    def _coroot_of(self, alpha: Vec) -> Vec:
        d = self._half_norms
        norm = sum(
            alpha[i] * alpha[j] * self.cartan[i][j] * d[j]
            for i in range(self.rank)
            for j in range(self.rank)
        )
        # alpha^vee = 2 alpha / (alpha, alpha); (alpha_i, alpha_i) = 2 d_i
        half = norm // 2
        out = []
        for i, c in enumerate(alpha):
            num = c * d[i]
            if num % half:
                raise AssertionError("non-integral coroot")
            out.append(num // half)
        return tuple(out)

    # -- pairings and roots --------------------------------------------

    def pair(self, alpha: Sequence[int], mu: Sequence[int]) -> int:
        """<alpha, mu> for a root-lattice vector and a coweight vector."""
        if len(alpha) != self.rank or len(mu) != self.rank:
            raise RootDataError("rank mismatch")
        return sum(
            a * self.cartan[i][j] * m
            for i, a in enumerate(alpha)
            if a
            for j, m in enumerate(mu)
            if m
        )

    @cached_property
    def roots(self) -> tuple[Vec, ...]:
        return self.positive_roots + tuple(neg(a) for a in self.positive_roots)

    def is_root(self, alpha: Vec) -> bool:
        return alpha in self._root_index or neg(alpha) in self._root_index

    def is_positive(self, alpha: Vec) -> bool:
        return alpha in self._root_index

    def coroot(self, alpha: Vec) -> Vec:
        if alpha in self._root_index:
            return self.positive_coroots[self._root_index[alpha]]
        return neg(self.positive_coroots[self._root_index[neg(alpha)]])

    def simple_root(self, i: int) -> Vec:
        return simple_coroot(self.rank, i - 1)

    def simple_coroot(self, i: int) -> Vec:
        return simple_coroot(self.rank, i - 1)

    def positive_roots_of(self, P: ParabolicType) -> tuple[Vec, ...]:
        """R_P^+: positive roots supported on the simple roots of P."""
        allowed = {i - 1 for i in P.subset}
        return tuple(
            a for a in self.positive_roots
            if all(c == 0 or k in allowed for k, c in enumerate(a))
        )

    def in_parabolic_span(self, alpha: Vec, P: ParabolicType) -> bool:
        allowed = {i - 1 for i in P.subset}
        return all(c == 0 or k in allowed for k, c in enumerate(alpha))

    # -- Weyl group ------------------------------------------------------

    @cached_property
    def identity(self) -> WeylElement:
        e = _identity(self.rank)
        return WeylElement(e, e, 0)

    def _make(self, action: Matrix, root_action: Matrix) -> WeylElement:
        length = sum(
            1 for a in self.positive_roots if not self.is_positive(_matvec(root_action, a))
        )
        return WeylElement(action, root_action, length)

    def reflection(self, alpha: Vec) -> WeylElement:
        """s_alpha: mu -> mu - <alpha, mu> alpha^vee, beta -> beta - <beta, alpha^vee> alpha."""
        r = self.rank
        av = self.coroot(alpha)
        cols = []
        for j in range(r):
            e = simple_coroot(r, j)
            k = self.pair(alpha, e)
            cols.append(tuple(x - k * y for x, y in zip(e, av)))
        action = _transpose(tuple(cols))
        rcols = []
        for j in range(r):
            e = simple_coroot(r, j)
            k = self.pair(e, av)
            rcols.append(tuple(x - k * y for x, y in zip(e, alpha)))
        return self._make(action, _transpose(tuple(rcols)))

    @cached_property
    def simple_reflections(self) -> tuple[WeylElement, ...]:
        return tuple(self.reflection(self.simple_root(i)) for i in range(1, self.rank + 1))

    def s(self, i: int) -> WeylElement:
        return self.simple_reflections[i - 1]

    def mul(self, x: WeylElement, y: WeylElement) -> WeylElement:
        return self._make(_matmul(x.action, y.action), _matmul(x.root_action, y.root_action))

    def inverse(self, x: WeylElement) -> WeylElement:
        hit = self._inverses.get(x)
        if hit is None:
            # Weyl matrices have finite order; walk the powers
            prev, cur = self.identity, x
            while cur != self.identity:
                prev, cur = cur, self.mul(cur, x)
            hit = self._inverses[x] = prev
        return hit

    def from_word(self, word: Iterable[int]) -> WeylElement:
        out = self.identity
        for i in word:
            out = self.mul(out, self.s(i))
        return out

    def act_coweight(self, w: WeylElement, mu: Sequence[int]) -> Vec:
        if len(mu) != self.rank:
            raise RootDataError("rank mismatch")
        return _matvec(w.action, mu)

    def act_root(self, w: WeylElement, alpha: Sequence[int]) -> Vec:
        if len(alpha) != self.rank:
            raise RootDataError("rank mismatch")
        return _matvec(w.root_action, alpha)

    def reduced_word(self, w: WeylElement) -> tuple[int, ...]:
        """Lexicographically least reduced word (1-based indices)."""
        word = []
        while w.length:
            for i in range(1, self.rank + 1):
                # i is a left descent iff w^{-1} alpha_i < 0
                y = self.mul(self.s(i), w)
                if y.length < w.length:
                    word.append(i)
                    w = y
                    break
        return tuple(word)

    @cached_property
    def weyl_group(self) -> tuple[WeylElement, ...]:
        seen = {self.identity}
        order = [self.identity]
        frontier = [self.identity]
        while frontier:
            nxt = []
            for w in frontier:
                for s in self.simple_reflections:
                    y = self.mul(w, s)
                    if y not in seen:
                        seen.add(y)
                        order.append(y)
                        nxt.append(y)
                        if len(seen) > _MAX_WEYL_ORDER:
                            raise RootDataError(f"Weyl group of {self.label} too large to enumerate")
            frontier = nxt
        return tuple(sorted(order, key=lambda w: (w.length, self.reduced_word(w))))

    @cached_property
    def longest_element(self) -> WeylElement:
        return max(self.weyl_group, key=lambda w: w.length)

    def is_min_coset_rep(self, w: WeylElement, P: ParabolicType) -> bool:
        return all(self.mul(w, self.s(i)).length > w.length for i in P.subset)

    def min_coset_rep(self, w: WeylElement, P: ParabolicType) -> WeylElement:
        """The minimal length element of wW_P, by stripping right descents in P."""
        changed = True
        while changed:
            changed = False
            for i in sorted(P.subset):
                y = self.mul(w, self.s(i))
                if y.length < w.length:
                    w, changed = y, True
        return w

    def enumerate_weyl(self, P: ParabolicType = ParabolicType()):
        """Return (W, W_P, W^P), each sorted by (length, reduced word)."""
        W = self.weyl_group
        WP = tuple(w for w in W if all(i in P.subset for i in self.reduced_word(w)))
        WPmin = tuple(w for w in W if self.is_min_coset_rep(w, P))
        return W, WP, WPmin

    def fingerprint(self) -> str:
        return self.label


def simple_coroot(rank: int, i0: int) -> Vec:
    return tuple(int(k == i0) for k in range(rank))


def neg(v: Sequence[int]) -> Vec:
    return tuple(-x for x in v)


def add(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(x + y for x, y in zip(u, v))


def sub(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(x - y for x, y in zip(u, v))


def scale(k: int, v: Sequence[int]) -> Vec:
    return tuple(k * x for x in v)


_CACHE: dict[tuple[str, int], RootSystem] = {}


def build_root_system(type_label: str, rank: int | None = None) -> RootSystem:
    if rank is None:
        rank = default_rank(type_label)
        if rank is None:
            raise RootDataError(f"rank required for type {type_label}")
    key = (type_label, rank)
    if key not in _CACHE:
        _CACHE[key] = RootSystem(type_label, rank)
    return _CACHE[key]


def parse_type(text: str) -> RootSystem:
    """'A2', 'G2', or a bare letter when the rank is implied."""
    text = text.strip()
    if not text or text[0] not in _VALID:
        raise RootDataError(f"bad type {text!r}")
    rest = text[1:]
    return build_root_system(text[0], int(rest) if rest else None)
