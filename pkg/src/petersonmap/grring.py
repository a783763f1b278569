"""Equivariant Pontryagin ring of the affine Grassmannian.

Affine Schubert classes are expanded in the fixed-point basis eta_mu by
summing 1/Euler over the torus-fixed points of a Bott-Samelson resolution.
The product is convolution on the eta side, and the change of basis back to
the xi side is a triangular elimination keyed by the coset centres.

Tangent weights of the Bott-Samelson variety at the fixed point given by
choices (e_1, ..., e_N): the k-th weight is (e_1 ... e_{k-1})(b_k), negated
when e_k is the reflection, where b_k is the weight of the one-dimensional
quotient of the k-th minimal parahoric by the Iwahori.  For index 0 that
quotient is z^{-1} g_{-alpha_0}, weight -alpha_0 once the loop variable is
set to zero; for index i >= 1 it is g_{alpha_i}.  Only the finite part of
each prefix acts on weights.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Sequence

from .affweyl import AffineWeylElement, AffineWeylGroup, affine_weyl_group
from .exactalg import LinFrac, NotPolynomial, Poly
from .rootdata import RootSystem, Vec, WeylElement, neg

EtaVector = dict  # Vec -> LinFrac
GrClassVector = dict  # AffineWeylElement -> LinFrac (or Poly once checked)


class GrRingError(ArithmeticError):
    pass


class NonReducedWord(GrRingError):
    pass


class ResidualNonzero(GrRingError):
    def __init__(self, message: str, residual=None, reason: str = "convention"):
        super().__init__(message)
        self.residual = residual
        self.reason = reason


@dataclass(frozen=True)
class BSDHFixedPoint:
    choice: tuple[int, ...]
    mu_gamma: Vec
    weights: tuple[Vec, ...]
    euler: LinFrac


def weyl_images(rs: RootSystem, w: WeylElement) -> tuple[Vec, ...]:
    """Images of the simple roots a_j under w, for acting on H_T(pt)."""
    return tuple(tuple(row[j] for row in w.root_action) for j in range(rs.rank))


class GrRing:
    """Structure constants of H^T(Gr_G) in the affine Schubert basis.

    ``zero_weight_sign`` selects the sign of the index-0 tangent weight
    (-1 gives -alpha_0).  Anything other than the default exists only so the
    convention check can show that the opposite choice breaks polynomiality.
    """

    def __init__(self, rs: RootSystem, zero_weight_sign: int = -1):
        self.rs = rs
        self.W: AffineWeylGroup = affine_weyl_group(rs)
        self.nvars = rs.rank
        theta = rs.highest_root
        self.base_weights: tuple[Vec, ...] = (
            tuple(zero_weight_sign * c for c in theta),
        ) + tuple(rs.simple_root(i) for i in range(1, rs.rank + 1))
        self._images = {}
        self._eta_cache: dict = {}
        self._lock = threading.Lock()

    # -- helpers -----------------------------------------------------------

    def _act_images(self, w: WeylElement):
        img = self._images.get(w)
        if img is None:
            img = self._images[w] = weyl_images(self.rs, w)
        return img

    def _act_root(self, w: WeylElement, alpha: Vec) -> Vec:
        return self.rs.act_root(w, alpha)

    def one(self) -> LinFrac:
        return LinFrac.const(self.nvars, 1)

    # -- fixed points ------------------------------------------------------

    def bsdh_fixed_points(self, word: Sequence[int]) -> list[BSDHFixedPoint]:
        """All 2^N torus-fixed points of the resolution for a reduced word."""
        W = self.W
        word = tuple(word)
        if not W.is_reduced(word):
            raise NonReducedWord(f"{word} is not reduced")
        rs = self.rs
        out = []
        zero = (0,) * rs.rank
        for choice in itertools.product((0, 1), repeat=len(word)):
            prefix = rs.identity
            weights = []
            elem = W.identity
            for bit, i in zip(choice, word):
                wt = self._act_root(prefix, self.base_weights[i])
                if bit:
                    wt = neg(wt)
                    g = W.generators[i]
                    elem = W.mul(elem, g)
                    prefix = rs.mul(prefix, g.w)
                weights.append(wt)
            mu = W.act_lattice(elem, zero)
            euler = LinFrac.inverse_product(weights, self.nvars)
            out.append(BSDHFixedPoint(choice, mu, tuple(weights), euler))
        return out

    def eta_expand_by_word(self, word: Sequence[int]) -> EtaVector:
        """Direct fixed-point sum for a given reduced word (the slow oracle)."""
        acc: dict[Vec, LinFrac] = {}
        for pt in self.bsdh_fixed_points(word):
            acc[pt.mu_gamma] = acc[pt.mu_gamma] + pt.euler if pt.mu_gamma in acc else pt.euler
        return {mu: c for mu, c in acc.items() if c}

    # -- eta expansion -----------------------------------------------------

    def reflect(self, i: int, v: EtaVector) -> EtaVector:
        """Push an eta-vector through s_i: eta_mu -> eta_{s_i mu}, coefficients by the finite part."""
        g = self.W.generators[i]
        img = self._act_images(g.w)
        return {self.W.act_lattice(g, mu): c.act(img) for mu, c in v.items()}

    def eta_expand(self, x: AffineWeylElement) -> EtaVector:
        """xi_x in the eta basis.

        Peeling the first letter of a reduced word x = s_i y gives the
        divided-difference recursion xi_x = (xi_y - s_i xi_y) / b_i, which
        sums the same fixed points as ``eta_expand_by_word``.
        """
        key = x.key
        hit = self._eta_cache.get(key)
        if hit is not None:
            return hit
        W = self.W
        if x.key == W.identity.key:
            out = {(0,) * self.rs.rank: self.one()}
        else:
            n = W.length(x)
            for i, g in enumerate(W.generators):
                y = W.mul(g, x)
                if W.length(y) < n:
                    break
            prev = self.eta_expand(y)
            moved = self.reflect(i, prev)
            inv_b = LinFrac.inverse_product([self.base_weights[i]], self.nvars)
            acc: dict[Vec, LinFrac] = {}
            for mu, c in prev.items():
                acc[mu] = c
            for mu, c in moved.items():
                acc[mu] = acc[mu] - c if mu in acc else -c
            out = {mu: c * inv_b for mu, c in acc.items() if c}
        with self._lock:
            self._eta_cache.setdefault(key, out)
        return out

    def diagonal(self, x: AffineWeylElement) -> LinFrac:
        return self.eta_expand(x)[self.W.center(x)]

    # -- products and change of basis --------------------------------------

    @staticmethod
    def pontryagin_eta(u: EtaVector, v: EtaVector) -> EtaVector:
        acc: dict[Vec, LinFrac] = {}
        for m1, c1 in u.items():
            for m2, c2 in v.items():
                if len(m1) != len(m2):
                    raise GrRingError("rank mismatch")
                nu = tuple(a + b for a, b in zip(m1, m2))
                term = c1 * c2
                acc[nu] = acc[nu] + term if nu in acc else term
        return {nu: c for nu, c in acc.items() if c}

    def eta_to_xi(self, v: EtaVector, search_bound: int = 40) -> GrClassVector:
        """Write v as a combination of eta_expand(z) over z in W_af^-."""
        W = self.W
        residual = {mu: c for mu, c in v.items() if c}
        out: dict[AffineWeylElement, LinFrac] = {}
        steps = 0
        while residual:
            best_len, best_mu = -1, None
            for mu in sorted(residual):
                ln = W.length(W.coset_min_rep(mu))
                if ln > best_len:
                    best_len, best_mu = ln, mu
            if best_len > search_bound:
                raise ResidualNonzero(
                    f"support point {best_mu} needs length {best_len} > bound {search_bound}",
                    residual, reason="bound",
                )
            z = W.coset_min_rep(best_mu)
            coeff = residual[best_mu].div_by(self.diagonal(z))
            if z in out:
                raise ResidualNonzero(
                    f"elimination revisited {W.format(z)}", residual, reason="convention"
                )
            out[z] = coeff
            for mu, c in self.eta_expand(z).items():
                new = residual[mu] - coeff * c if mu in residual else -(coeff * c)
                if new:
                    residual[mu] = new
                else:
                    residual.pop(mu, None)
            if best_mu in residual:
                raise ResidualNonzero(
                    f"pivot at {best_mu} did not clear", residual, reason="convention"
                )
            steps += 1
        return out

    def xi_to_eta(self, c: GrClassVector) -> EtaVector:
        acc: dict[Vec, LinFrac] = {}
        for z, coeff in c.items():
            if isinstance(coeff, Poly):
                coeff = LinFrac.from_poly(coeff)
            for mu, e in self.eta_expand(z).items():
                term = coeff * e
                acc[mu] = acc[mu] + term if mu in acc else term
        return {mu: x for mu, x in acc.items() if x}

    def product(self, u: AffineWeylElement, v: AffineWeylElement) -> dict[AffineWeylElement, Poly]:
        """Structure constants of xi_u . xi_v; every coefficient must be a polynomial."""
        for x in (u, v):
            if not self.W.is_coset_min(x):
                raise GrRingError(f"{self.W.format(x)} is not a minimal coset representative")
        prod = self.pontryagin_eta(self.eta_expand(u), self.eta_expand(v))
        bound = self.W.length(u) + self.W.length(v) + 2 * len(self.rs.positive_roots) + 4
        raw = self.eta_to_xi(prod, search_bound=bound)
        out = {}
        for z, c in raw.items():
            if not c.is_polynomial:
                raise NotPolynomial(
                    f"coefficient of {self.W.format(z)} in xi_{self.W.format(u)} . "
                    f"xi_{self.W.format(v)} is {c}"
                )
            out[z] = c.num
        return out

    gr_structure_constants = product

    def product_classes(self, a: dict, b: dict) -> dict[AffineWeylElement, Poly]:
        """Product of two xi-combinations with polynomial coefficients."""
        out: dict[AffineWeylElement, Poly] = {}
        for u, cu in a.items():
            for v, cv in b.items():
                for z, c in self.product(u, v).items():
                    term = cu * cv * c
                    out[z] = out[z] + term if z in out else term
        return {z: c for z, c in out.items() if c}


_RINGS: dict = {}
_RINGS_LOCK = threading.Lock()


def gr_ring(rs: RootSystem) -> GrRing:
    with _RINGS_LOCK:
        ring = _RINGS.get(rs.label)
        if ring is None:
            ring = _RINGS[rs.label] = GrRing(rs)
        return ring


CONVENTION = "gr:b0=-theta,bi=+alpha_i,delta=0,euler=prod(tangent)"


def check_conventions(max_len: int = 5) -> dict[str, bool]:
    """Rank-1 pinning: polynomial structure constants with non-negative limits.

    Returns the outcome for the adopted index-0 sign and for its opposite;
    only the adopted one should pass.
    """
    from .exactalg import specialize_zero
    from .rootdata import build_root_system

    rs = build_root_system("A", 1)
    result = {}
    for sign in (-1, 1):
        ring = GrRing(rs, zero_weight_sign=sign)
        elems = ring.W.enumerate_waf_minus(max_len)
        ok = True
        try:
            for u in elems:
                for v in elems:
                    if ring.W.length(u) + ring.W.length(v) > max_len:
                        continue
                    for z, c in ring.product(u, v).items():
                        if specialize_zero(c) < 0:
                            ok = False
        except (NotPolynomial, ResidualNonzero, GrRingError, ArithmeticError):
            ok = False
        result["adopted" if sign == -1 else "opposite"] = ok
    return result
