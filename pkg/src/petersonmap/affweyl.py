"""The affine Weyl group W_af = W x| Q^vee.

An element ``(w, lam)`` stands for w t_lam, acting on h by x -> w(x + lam).
The affine simple reflection s_0 is the reflection in the wall
alpha_0(x) = 1, i.e. s_0 = t_{alpha_0^vee} s_{alpha_0} = (s_{alpha_0}, -alpha_0^vee).

Three length computations live here: breadth-first word length, the
Iwahori-Matsumoto inversion count, and the alcove wall count restricted to
minimal coset representatives.  They are cross-checked in the tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .rootdata import RootSystem, Vec, WeylElement, add, neg

# enumeration caps: max length by rank
_BFS_CAPS = {1: 16, 2: 14, 3: 8}


class AffineWeylError(ValueError):
    pass


class EnumerationCapExceeded(AffineWeylError):
    pass


class NotCosetMinimal(AffineWeylError):
    pass


@dataclass(frozen=True)
class AffineWeylElement:
    w: WeylElement
    lam: Vec

    @property
    def key(self):
        return (self.w.action, self.lam)


class AffineWeylGroup:
    """Group law, lengths, words and enumeration over a fixed root system."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        r = rs.rank
        self.identity = AffineWeylElement(rs.identity, (0,) * r)
        theta = rs.highest_root
        s_theta = rs.reflection(theta)
        s0 = AffineWeylElement(s_theta, neg(rs.coroot(theta)))
        self.generators: tuple[AffineWeylElement, ...] = (s0,) + tuple(
            AffineWeylElement(s, (0,) * r) for s in rs.simple_reflections
        )
        self._length_cache: dict = {}
        self._coset_rep_cache: dict = {}

    def __repr__(self) -> str:
        return f"AffineWeylGroup({self.rs.label})"

    # -- group law -----------------------------------------------------

    def mul(self, x: AffineWeylElement, y: AffineWeylElement) -> AffineWeylElement:
        """(w1, l1)(w2, l2) = (w1 w2, w2^{-1}(l1) + l2)."""
        if len(x.lam) != len(y.lam):
            raise AffineWeylError("rank mismatch")
        rs = self.rs
        w2inv = rs.inverse(y.w)
        return AffineWeylElement(rs.mul(x.w, y.w), add(rs.act_coweight(w2inv, x.lam), y.lam))

    def inverse(self, x: AffineWeylElement) -> AffineWeylElement:
        # (w t_l)^{-1} = t_{-l} w^{-1} = w^{-1} t_{-w(l)}
        rs = self.rs
        return AffineWeylElement(rs.inverse(x.w), neg(rs.act_coweight(x.w, x.lam)))

    def act(self, x: AffineWeylElement, p: Sequence) -> tuple[Fraction, ...]:
        """x . p = w(p + lam) on a rational point in simple-coroot coordinates."""
        if len(p) != len(x.lam):
            raise AffineWeylError("rank mismatch")
        shifted = [Fraction(a) + b for a, b in zip(p, x.lam)]
        return tuple(sum(Fraction(c) * v for c, v in zip(row, shifted)) for row in x.w.action)

    def act_lattice(self, x: AffineWeylElement, mu: Vec) -> Vec:
        return self.rs.act_coweight(x.w, add(mu, x.lam))

    def center(self, x: AffineWeylElement) -> Vec:
        """x . 0 = w(lam); this labels the coset xW."""
        return self.rs.act_coweight(x.w, x.lam)

    def s(self, i: int) -> AffineWeylElement:
        return self.generators[i]

    def from_word(self, word: Sequence[int]) -> AffineWeylElement:
        out = self.identity
        for i in word:
            out = self.mul(out, self.generators[i])
        return out

    # -- lengths -------------------------------------------------------

    def length(self, x: AffineWeylElement) -> int:
        """Iwahori-Matsumoto count on x = t_mu w with mu = w(lam)."""
        key = x.key
        hit = self._length_cache.get(key)
        if hit is not None:
            return hit
        rs = self.rs
        mu = self.center(x)
        winv = rs.inverse(x.w)
        total = 0
        for alpha in rs.positive_roots:
            m = rs.pair(alpha, mu)
            if rs.is_positive(rs.act_root(winv, alpha)):
                total += abs(m)
            else:
                total += abs(m - 1)
        self._length_cache[key] = total
        return total

    length_im = length

    def length_minrep(self, x: AffineWeylElement) -> int:
        """Wall count between w(lam) and a small regular dominant point.

        Valid only on minimal coset representatives.  The limit of the
        auxiliary point to 0 is taken symbolically: a positive root counts
        floor(<alpha, mu> - eps) when <alpha, mu> >= 1, a negative root counts
        <alpha, mu> when <alpha, mu> >= 0.
        """
        if not self.is_coset_min(x):
            raise NotCosetMinimal("the wall-count formula needs a minimal coset representative")
        return sum(self.minrep_contributions(x).values())

    def minrep_contributions(self, x: AffineWeylElement) -> dict[Vec, int]:
        rs = self.rs
        mu = self.center(x)
        out = {}
        for alpha in rs.positive_roots:
            m = rs.pair(alpha, mu)
            if m >= 1:
                out[alpha] = m - 1
            # the negative root -alpha pairs to -m
            if -m >= 0 and m != 0:
                out[neg(alpha)] = -m
        return {a: c for a, c in out.items() if c}

    def is_coset_min(self, x: AffineWeylElement) -> bool:
        lx = self.length(x)
        return all(self.length(self.mul(x, g)) > lx for g in self.generators[1:])

    def coset_min_rep(self, mu: Vec) -> AffineWeylElement:
        """The minimal element of t_mu W, i.e. of {(w, w^{-1} mu)}."""
        hit = self._coset_rep_cache.get(mu)
        if hit is not None:
            return hit
        rs = self.rs
        best = None
        for w in rs.weyl_group:
            x = AffineWeylElement(w, rs.act_coweight(rs.inverse(w), mu))
            if best is None or self.length(x) < self.length(best):
                best = x
        self._coset_rep_cache[mu] = best
        return best

    def bfs_lengths(self, max_len: int) -> dict:
        """Word lengths of every element of length <= max_len, keyed by ``key``."""
        cap = _BFS_CAPS.get(self.rs.rank, 6)
        if max_len > cap:
            raise EnumerationCapExceeded(
                f"BFS length {max_len} exceeds the cap {cap} for rank {self.rs.rank}"
            )
        seen = {self.identity.key: 0}
        elements = {self.identity.key: self.identity}
        frontier = [self.identity]
        for depth in range(1, max_len + 1):
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = self.mul(x, g)
                    if y.key not in seen:
                        seen[y.key] = depth
                        elements[y.key] = y
                        nxt.append(y)
            frontier = nxt
        return {k: (elements[k], d) for k, d in seen.items()}

    # -- words ---------------------------------------------------------

    def reduced_word(self, x: AffineWeylElement) -> tuple[int, ...]:
        """Lexicographically least reduced word in the indices 0..r."""
        word = []
        n = self.length(x)
        while n:
            for i, g in enumerate(self.generators):
                y = self.mul(g, x)
                ly = self.length(y)
                if ly < n:
                    word.append(i)
                    x, n = y, ly
                    break
            else:  # pragma: no cover - lengths are consistent
                raise AffineWeylError("no descent found")
        return tuple(word)

    def is_reduced(self, word: Sequence[int]) -> bool:
        return self.length(self.from_word(word)) == len(word)

    def reduced_words(self, x: AffineWeylElement) -> list[tuple[int, ...]]:
        """All reduced words of x (exponential; meant for small lengths)."""
        n = self.length(x)
        if n == 0:
            return [()]
        out = []
        for i, g in enumerate(self.generators):
            y = self.mul(g, x)
            if self.length(y) < n:
                out.extend((i,) + rest for rest in self.reduced_words(y))
        return sorted(out)

    # -- enumeration ---------------------------------------------------

    def sort_key(self, x: AffineWeylElement):
        return (self.length(x), self.reduced_word(x))

    def enumerate_waf_minus(self, max_len: int) -> list[AffineWeylElement]:
        """All minimal coset representatives of W_af/W with length <= max_len.

        Grown by left multiplication: a left descent of an element of W_af^-
        leads to a shorter element of W_af^-, so every level is reached from
        the previous one.
        """
        if max_len < 0:
            raise AffineWeylError("max_len must be non-negative")
        cap = _BFS_CAPS.get(self.rs.rank, 6)
        if max_len > cap:
            raise EnumerationCapExceeded(
                f"length {max_len} exceeds the cap {cap} for rank {self.rs.rank}"
            )
        level = [self.identity]
        out = [self.identity]
        seen = {self.identity.key}
        for n in range(1, max_len + 1):
            nxt = []
            for x in level:
                for g in self.generators:
                    y = self.mul(g, x)
                    if y.key in seen or self.length(y) != n or not self.is_coset_min(y):
                        continue
                    seen.add(y.key)
                    nxt.append(y)
            level = nxt
            out.extend(nxt)
        return sorted(out, key=self.sort_key)

    def enumerate_all(self, max_len: int) -> list[AffineWeylElement]:
        table = self.bfs_lengths(max_len)
        return sorted((x for x, _ in table.values()), key=self.sort_key)

    # -- text syntax ---------------------------------------------------

    def format(self, x: AffineWeylElement) -> str:
        word = self.rs.reduced_word(x.w)
        w = "*".join(f"s{i}" for i in word) if word else "e"
        return f"w={w};lam=" + ",".join(str(c) for c in x.lam)

    def parse(self, text: str) -> AffineWeylElement:
        m = re.fullmatch(r"\s*w=([^;]*);\s*lam=([-0-9,\s]*)\s*", text)
        if not m:
            raise AffineWeylError(f"cannot parse element {text!r}")
        wtext, ltext = m.group(1).strip(), m.group(2)
        rs = self.rs
        if wtext in ("", "e", "1"):
            word = []
        else:
            word = []
            for tok in wtext.split("*"):
                tok = tok.strip()
                if not re.fullmatch(r"s[1-9][0-9]*", tok) or not 1 <= int(tok[1:]) <= rs.rank:
                    raise AffineWeylError(f"bad reflection {tok!r}")
                word.append(int(tok[1:]))
        lam = tuple(int(c) for c in ltext.split(",")) if ltext.strip() else ()
        if len(lam) != rs.rank:
            raise AffineWeylError(f"lam needs {rs.rank} coordinates")
        return AffineWeylElement(rs.from_word(word), lam)

    def parse_word(self, text: str) -> AffineWeylElement:
        """Affine words such as ``s0*s1`` or ``s0s1``; ``e`` is the identity."""
        text = text.strip()
        if text in ("", "e", "1"):
            return self.identity
        idx = [int(t) for t in re.findall(r"s(\d+)", text)]
        if not idx or any(i > self.rs.rank for i in idx):
            raise AffineWeylError(f"bad affine word {text!r}")
        return self.from_word(idx)


@lru_cache(maxsize=None)
def affine_weyl_group(rs: RootSystem) -> AffineWeylGroup:
    return AffineWeylGroup(rs)
