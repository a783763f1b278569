"""Equivariant quantum cohomology of G/P in the Schubert basis.

sigma_v is the class of the closure of B^- y_v.  Its restriction to a fixed
point y_u is computed by the subword formula over the positive-side inversion
roots of u, which already matches this convention: the diagonal value
sigma_v|_{y_v} is the product of the positive roots among the tangent weights
-v(R^+ minus R_P^+) at y_v, and no longest-element twist is needed.

Quantum multiplication is assembled from the equivariant quantum Chevalley
rule (multiplication by the divisor classes sigma_{s_i}) and associativity,
one length layer at a time.  Where divisor products do not span a layer the
layer is solved over the fraction field of H_T(pt) instead, using that the
divisor localizations separate the fixed points.  Quantum parameters are
indexed by the simple coroots outside P.
"""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .exactalg import LinFrac, NotPolynomial, Poly, exact_div_linear, rational_combination
from .rootdata import ParabolicType, RootSystem, Vec, WeylElement, add, neg

CurveClass = tuple[int, ...]
QKey = tuple[CurveClass, WeylElement]
QuantumClass = dict  # QKey -> Poly


class QHRingError(ArithmeticError):
    pass


class RecursionStuck(QHRingError):
    pass


class ResidualNonzero(QHRingError):
    pass


def qc_add(a: QuantumClass, b: QuantumClass, scale: Poly | int = 1) -> QuantumClass:
    out = dict(a)
    for k, c in b.items():
        term = c * scale
        v = out[k] + term if k in out else term
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def qc_shift(a: QuantumClass, beta: CurveClass) -> QuantumClass:
    return {(add(b, beta), w): c for (b, w), c in a.items()}


def qc_scale(a: QuantumClass, p: Poly | int) -> QuantumClass:
    out = {k: c * p for k, c in a.items()}
    return {k: c for k, c in out.items() if c}


class QHRing:
    def __init__(self, rs: RootSystem, P: ParabolicType = ParabolicType()):
        if not P.subset <= set(range(1, rs.rank + 1)):
            raise QHRingError(f"parabolic {sorted(P.subset)} not in 1..{rs.rank}")
        self.rs = rs
        self.P = P
        self.nvars = rs.rank
        self.free = tuple(i for i in range(1, rs.rank + 1) if i not in P.subset)
        _, _, self.WP = rs.enumerate_weyl(P)
        self._wp_set = set(self.WP)
        self.roots_out = tuple(a for a in rs.positive_roots if not rs.in_parabolic_span(a, P))
        self._loc_cache: dict = {}
        self._table: dict | None = None
        self._loc_mats = None
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"QHRing({self.rs.label}, P={sorted(self.P.subset)})"

    # -- curve classes -------------------------------------------------

    def curve_class_project(self, lam: Vec) -> CurveClass:
        return tuple(lam[i - 1] for i in self.free)

    def lift(self, beta: CurveClass) -> Vec:
        out = [0] * self.rs.rank
        for i, c in zip(self.free, beta):
            out[i - 1] = c
        return tuple(out)

    def c1_pairing(self, beta: CurveClass) -> int:
        lam = self.lift(beta)
        return sum(self.rs.pair(a, lam) for a in self.roots_out)

    @property
    def zero_class(self) -> CurveClass:
        return (0,) * len(self.free)

    # -- Schubert data -------------------------------------------------

    def min_rep(self, w: WeylElement) -> WeylElement:
        return self.rs.min_coset_rep(w, self.P)

    def basis(self, v: WeylElement, beta: CurveClass | None = None) -> QuantumClass:
        return {(beta or self.zero_class, v): Poly.one(self.nvars)}

    def omega_shift(self, i: int, v: WeylElement) -> Vec:
        """omega_i - v(omega_i) in root coordinates, telescoped over a reduced word of v."""
        rs = self.rs
        out = (0,) * rs.rank
        prefix = rs.identity
        for j in rs.reduced_word(v):
            if j == i:
                out = add(out, rs.act_root(prefix, rs.simple_root(i)))
            prefix = rs.mul(prefix, rs.s(j))
        return out

    def schubert_localization(self, v: WeylElement, u: WeylElement) -> Poly:
        """sigma_v restricted to y_u, by the subword formula on a reduced word of u."""
        if v not in self._wp_set or u not in self._wp_set:
            raise QHRingError("schubert_localization needs elements of W^P")
        key = (v, u)
        hit = self._loc_cache.get(key)
        if hit is not None:
            return hit
        rs = self.rs
        word = rs.reduced_word(u)
        roots = []
        prefix = rs.identity
        for j in word:
            roots.append(rs.act_root(prefix, rs.simple_root(j)))
            prefix = rs.mul(prefix, rs.s(j))
        total = Poly(self.nvars)
        k = v.length
        for pos in itertools.combinations(range(len(word)), k):
            if rs.from_word(word[p] for p in pos) != v:
                continue
            term = Poly.one(self.nvars)
            for p in pos:
                term = term * Poly.linear(roots[p])
            total = total + term
        self._loc_cache[key] = total
        return total

    def localization_vector(self, v: WeylElement) -> dict[WeylElement, Poly]:
        return {u: self.schubert_localization(v, u) for u in self.WP}

    def gkm_edge_ok(self, f: dict[WeylElement, Poly]) -> bool:
        """f(u) = f(s_alpha u) mod alpha along every T-curve of G/P."""
        rs = self.rs
        for u in self.WP:
            for alpha in rs.positive_roots:
                y = self.min_rep(rs.mul(rs.reflection(alpha), u))
                if y == u:
                    continue
                if exact_div_linear(f[u] - f[y], alpha) is None:
                    return False
        return True

    def gkm_classical_product(self, u: WeylElement, v: WeylElement) -> dict[WeylElement, Poly]:
        prod = {x: self.schubert_localization(u, x) * self.schubert_localization(v, x) for x in self.WP}
        out: dict[WeylElement, Poly] = {}
        for w in self.WP:  # increasing length: sigma_w vanishes below w
            r = prod[w]
            if not r:
                continue
            c = r
            for alpha_poly in self._diagonal_factors(w):
                c = exact_div_linear(c, alpha_poly)
                if c is None:
                    raise ResidualNonzero(f"residual at {self.rs.reduced_word(w)} not divisible")
            out[w] = c
            for x in self.WP:
                loc = self.schubert_localization(w, x)
                if loc:
                    prod[x] = prod[x] - c * loc
        if any(prod.values()):
            raise ResidualNonzero("classical product did not reduce to zero")
        return out

    def _diagonal_factors(self, w: WeylElement) -> list[Vec]:
        rs = self.rs
        word = rs.reduced_word(w)
        out = []
        prefix = rs.identity
        for j in word:
            out.append(rs.act_root(prefix, rs.simple_root(j)))
            prefix = rs.mul(prefix, rs.s(j))
        return out

    # -- Chevalley rule --------------------------------------------------

    @cached_property
    def equivariant_sign(self) -> int:
        return pinned_equivariant_sign()

    def chevalley_basis(self, i: int, v: WeylElement) -> QuantumClass:
        """sigma_{s_i} * sigma_v."""
        if i in self.P.subset or not 1 <= i <= self.rs.rank:
            raise QHRingError(f"index {i} is not a divisor index for P={sorted(self.P.subset)}")
        rs = self.rs
        out: QuantumClass = {}
        z = self.zero_class
        eq = self.omega_shift(i, v)
        if any(eq):
            out[(z, v)] = Poly.linear(eq) * self.equivariant_sign
        lv = v.length
        for alpha in self.roots_out:
            m = rs.coroot(alpha)[i - 1]
            if not m:
                continue
            y = rs.mul(v, rs.reflection(alpha))
            if y.length == lv + 1 and y in self._wp_set:
                key = (z, y)
                out[key] = out[key] + m if key in out else Poly.const(self.nvars, m)
            beta = self.curve_class_project(rs.coroot(alpha))
            ytil = self.min_rep(y)
            if ytil.length == lv + 1 - self.c1_pairing(beta):
                key = (beta, ytil)
                out[key] = out[key] + m if key in out else Poly.const(self.nvars, m)
        return {k: c for k, c in out.items() if c}

    def chevalley(self, i: int, c: QuantumClass) -> QuantumClass:
        out: QuantumClass = {}
        for (beta, v), p in c.items():
            out = qc_add(out, qc_shift(self.chevalley_basis(i, v), beta), p)
        return out

    # -- quantum products ------------------------------------------------

    def _solve_layer(self, k: int, known: dict) -> dict:
        """Products sigma_u * sigma_v for all u of length k, all v.

        Each divisor product sigma_{s_i} * sigma_{u'} with l(u') = k - 1 gives
        an integer combination of the unknown length-k products.  When those
        combinations do not span (e.g. Grassmannians, where H^2 does not
        generate), the layer is recovered from the divisor operators over the
        fraction field instead.
        """
        targets = [u for u in self.WP if u.length == k]
        rows = []
        for up in (u for u in self.WP if u.length == k - 1):
            for i in self.free:
                coeffs = [0] * len(targets)
                rest = {}
                for (beta, w), p in self.chevalley_basis(i, up).items():
                    if w.length == k and not any(beta):
                        if not p.is_constant():
                            raise QHRingError("non-constant classical Chevalley coefficient")
                        coeffs[targets.index(w)] += p.constant_term()
                    else:
                        rest[(beta, w)] = p
                rows.append((i, up, coeffs, rest))

        def rhs(i, up, rest, v):
            acc = self.chevalley(i, known[(up, v)])
            for (beta, w), p in rest.items():
                acc = qc_add(acc, qc_shift(known[(w, v)], beta), -p)
            return acc

        solved: dict = {}
        pick = _independent_rows([r[2] for r in rows], len(targets))
        if pick is None:
            for u in targets:
                for v, col in self.multiplication_by_localization(u).items():
                    solved[(u, v)] = col
        else:
            Ainv = _invert([[Fraction(rows[r][2][c]) for c in range(len(targets))] for r in pick])
            for v in self.WP:
                picked = [rhs(rows[r][0], rows[r][1], rows[r][3], v) for r in pick]
                keys = set().union(*picked)
                for col, u in enumerate(targets):
                    val = {}
                    for key in keys:
                        polys = [c.get(key, Poly(self.nvars)) for c in picked]
                        p = rational_combination(polys, Ainv[col])
                        if p:
                            val[key] = p
                    solved[(u, v)] = val
        # every row, not just the pivots, must be satisfied
        for v in self.WP:
            for i, up, coeffs, rest in rows:
                lhs: QuantumClass = {}
                for col, u in enumerate(targets):
                    if coeffs[col]:
                        lhs = qc_add(lhs, solved[(u, v)], coeffs[col])
                if lhs != rhs(i, up, rest, v):
                    raise ResidualNonzero(f"inconsistent Chevalley system at length {k}")
        return solved

    # -- fraction-field solve ------------------------------------------------

    def _localization_matrices(self):
        """E[a][v] = sigma_v|_{y_a} and its inverse, over the fraction field."""
        if self._loc_mats is None:
            rs = self.rs
            WP = self.WP
            n = len(WP)
            E = [[LinFrac.from_poly(self.schubert_localization(v, a)) for v in WP] for a in WP]
            inv_diag = []
            for a in WP:
                weights = [neg(rs.act_root(a, g)) for g in self.roots_out if not rs.is_positive(rs.act_root(a, g))]
                d = LinFrac.inverse_product(weights, self.nvars)
                if E[WP.index(a)][WP.index(a)] * d != LinFrac.const(self.nvars, 1):
                    raise QHRingError("diagonal localization is not the tangent-weight product")
                inv_diag.append(d)
            zero = LinFrac.const(self.nvars, 0)
            X = [[zero] * n for _ in range(n)]
            # E is lower triangular in the length order of WP
            for r in range(n):
                X[r][r] = inv_diag[r]
                for c in range(r):
                    acc = zero
                    for m in range(c, r):
                        if E[r][m] and X[m][c]:
                            acc = acc + E[r][m] * X[m][c]
                    X[r][c] = -(acc * inv_diag[r])
            self._loc_mats = (E, X)
        return self._loc_mats

    def _chevalley_parts(self, i: int) -> dict:
        """sigma_{s_i} * (.) split by q-degree: beta -> {(z, v): coefficient}."""
        parts: dict = {}
        for v in self.WP:
            for (beta, z), p in self.chevalley_basis(i, v).items():
                parts.setdefault(beta, {})[(z, v)] = p
        return parts

    def multiplication_by_localization(self, u: WeylElement) -> dict[WeylElement, QuantumClass]:
        """sigma_u * sigma_v for every v, without pivots.

        sigma_u * (.) is the unique operator N = sum_beta q^beta N_beta that
        commutes with every divisor operator and sends 1 to sigma_u.  N_0 is
        classical multiplication.  For beta > 0 the commutator with the
        classical divisor operator is known from lower degrees; in the
        fixed-point basis that operator is diagonal with entries
        sigma_{s_i}|_{y_a}, which separate points, so off-diagonal entries
        follow by one division each and the diagonal from N_beta(1) = 0.
        """
        WP = self.WP
        n = len(WP)
        idx = {w: k for k, w in enumerate(WP)}
        E, Einv = self._localization_matrices()
        zero = Poly(self.nvars)
        parts = {i: self._chevalley_parts(i) for i in self.free}
        d = {i: [self.schubert_localization(self.rs.s(i), a) for a in WP] for i in self.free}

        def matmul(A: dict, B: dict) -> dict:
            out: dict = {}
            for (z, y), p in A.items():
                for (y2, v), q in B.items():
                    if y2 == y:
                        key = (z, v)
                        val = out.get(key, zero) + p * q
                        if val:
                            out[key] = val
                        else:
                            out.pop(key, None)
            return out

        def sub(A: dict, B: dict) -> dict:
            out = dict(A)
            for k, q in B.items():
                val = out.get(k, zero) - q
                if val:
                    out[k] = val
                else:
                    out.pop(k, None)
            return out

        N0 = {}
        for v in WP:
            for z, p in self.gkm_classical_product(u, v).items():
                N0[(z, v)] = p
        N = {self.zero_class: N0}
        bound = u.length + max(w.length for w in WP)
        betas = [b for b in itertools.product(*[range(bound + 1)] * len(self.free))
                 if any(b) and self.c1_pairing(b) <= bound]
        betas.sort(key=lambda b: (self.c1_pairing(b), b))
        for beta in betas:
            R = {}
            for i in self.free:
                acc: dict = {}
                for b1, M in parts[i].items():
                    if not any(b1):
                        continue
                    rest = tuple(x - y for x, y in zip(beta, b1))
                    if any(x < 0 for x in rest) or rest not in N:
                        continue
                    acc = sub(acc, sub(matmul(M, N[rest]), matmul(N[rest], M)))
                R[i] = acc
            if not any(R.values()):
                continue
            # localize the right-hand sides: Rt = E R Einv
            Rt = {}
            for i, Ri in R.items():
                cols: dict = {}
                for (z, v), p in Ri.items():
                    cols.setdefault(idx[v], []).append((idx[z], p))
                tmp = [[LinFrac.const(self.nvars, 0)] * n for _ in range(n)]
                for c, entries in cols.items():
                    for a in range(n):
                        acc = LinFrac.const(self.nvars, 0)
                        for zr, p in entries:
                            if E[a][zr]:
                                acc = acc + E[a][zr] * p
                        tmp[a][c] = acc
                Rt[i] = [[sum_products(tmp[a], Einv, b, n, self.nvars) for b in range(n)] for a in range(n)]
            Nt = [[LinFrac.const(self.nvars, 0)] * n for _ in range(n)]
            for a in range(n):
                for b in range(n):
                    if a == b:
                        continue
                    i = next((i for i in self.free if d[i][a] != d[i][b]), None)
                    if i is None:
                        raise RecursionStuck("divisor localizations do not separate fixed points")
                    if Rt[i][a][b]:
                        Nt[a][b] = Rt[i][a][b].div_by(LinFrac.from_poly(d[i][a] - d[i][b]))
            for a in range(n):
                acc = LinFrac.const(self.nvars, 0)
                for b in range(n):
                    if b != a:
                        acc = acc + Nt[a][b]
                Nt[a][a] = -acc
            # back to the Schubert basis: N = Einv Nt E
            left = [[sum_products(Einv[z], Nt, a, n, self.nvars) for a in range(n)] for z in range(n)]
            Nb = {}
            for z in range(n):
                for v in range(n):
                    val = sum_products(left[z], E, v, n, self.nvars)
                    if val:
                        if not val.is_polynomial:
                            raise NotPolynomial(f"q^{beta} part of sigma_u * sigma_v is {val}")
                        Nb[(WP[z], WP[v])] = val.num
            e = self.rs.identity
            if any(v == e for (_, v) in Nb):
                raise ResidualNonzero(f"q^{beta} part does not fix the unit")
            for i in self.free:
                M0 = parts[i].get(self.zero_class, {})
                if sub(matmul(M0, Nb), matmul(Nb, M0)) != R[i]:
                    raise ResidualNonzero(f"q^{beta} part fails the commutator with divisor {i}")
            if Nb:
                N[beta] = Nb
        out: dict = {v: {} for v in WP}
        for beta, Nb in N.items():
            for (z, v), p in Nb.items():
                out[v][(beta, z)] = p
        return out

    def product_table(self) -> dict:
        with self._lock:
            if self._table is None:
                table = {(self.rs.identity, v): self.basis(v) for v in self.WP}
                top = max(u.length for u in self.WP)
                for k in range(1, top + 1):
                    table.update(self._solve_layer(k, table))
                self._table = table
            return self._table

    def quantum_product(self, u: WeylElement, v: WeylElement) -> QuantumClass:
        if u not in self._wp_set or v not in self._wp_set:
            raise QHRingError("quantum_product needs elements of W^P")
        return self.product_table()[(u, v)]

    def multiply(self, a: QuantumClass, b: QuantumClass) -> QuantumClass:
        out: QuantumClass = {}
        for (b1, u), p in a.items():
            for (b2, v), q in b.items():
                out = qc_add(out, qc_shift(self.quantum_product(u, v), add(b1, b2)), p * q)
        return out

    # -- text ------------------------------------------------------------

    def format_weyl(self, w: WeylElement) -> str:
        word = self.rs.reduced_word(w)
        return "*".join(f"s{i}" for i in word) if word else "e"

    def parse_weyl(self, text: str) -> WeylElement:
        text = text.strip()
        if text in ("", "e", "1"):
            return self.rs.identity
        import re

        idx = [int(t) for t in re.findall(r"s(\d+)", text)]
        if not idx or any(not 1 <= i <= self.rs.rank for i in idx):
            raise QHRingError(f"bad Weyl word {text!r}")
        return self.rs.from_word(idx)

    def format_class(self, c: QuantumClass) -> str:
        if not c:
            return "0"
        parts = []
        for (beta, w), p in sorted(c.items(), key=lambda kv: (kv[0][1].length, kv[0][0], self.rs.reduced_word(kv[0][1]))):
            q = "" if not any(beta) else "q^(" + ",".join(map(str, beta)) + ")*"
            parts.append(f"({p})*{q}sigma[{self.format_weyl(w)}]")
        return " + ".join(parts)


def sum_products(row: list, M: list, col: int, n: int, nvars: int) -> LinFrac:
    """sum_k row[k] * M[k][col] over LinFrac entries, skipping zeros."""
    acc = LinFrac.const(nvars, 0)
    for k in range(n):
        if row[k] and M[k][col]:
            acc = acc + row[k] * M[k][col]
    return acc


def _independent_rows(rows: list[list[int]], ncols: int) -> list[int] | None:
    """Indices of ncols rows forming an invertible matrix, scanning in order."""
    basis: list[tuple[int, list[Fraction]]] = []
    picked = []
    for idx, row in enumerate(rows):
        v = [Fraction(x) for x in row]
        for piv, b in basis:
            if v[piv]:
                f = v[piv] / b[piv]
                v = [x - f * y for x, y in zip(v, b)]
        piv = next((c for c, x in enumerate(v) if x), None)
        if piv is None:
            continue
        basis.append((piv, v))
        picked.append(idx)
        if len(picked) == ncols:
            return picked
    return picked if len(picked) == ncols else None


def _invert(A: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(A)
    M = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c])
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    # rows of the inverse are indexed by columns of A
    return [row[n:] for row in M]


_SIGN: list[int] = []


def pinned_equivariant_sign() -> int:
    """Sign of the equivariant Chevalley term, fixed by the rank-1 GKM product.

    Only one sign makes sigma_s * sigma_s agree classically with the
    localization computation on the projective line.
    """
    if _SIGN:
        return _SIGN[0]
    from .rootdata import build_root_system

    rs = build_root_system("A", 1)
    ring = QHRing.__new__(QHRing)
    QHRing.__init__(ring, rs, ParabolicType())
    s = rs.s(1)
    gkm = ring.gkm_classical_product(s, s)
    matches = []
    for sign in (1, -1):
        ring.__dict__["equivariant_sign"] = sign
        chev = ring.chevalley_basis(1, s)
        classical = {w: p for (beta, w), p in chev.items() if not any(beta)}
        if classical == gkm:
            matches.append(sign)
    if len(matches) != 1:
        raise QHRingError(f"equivariant Chevalley sign not pinned: {matches}")
    _SIGN.append(matches[0])
    return matches[0]


def convention() -> str:
    return f"qh:sigma=[B^- y_v],loc=subword(+),eqterm={pinned_equivariant_sign():+d}"


_RINGS: dict = {}
_RINGS_LOCK = threading.Lock()


def qh_ring(rs: RootSystem, P: ParabolicType = ParabolicType()) -> QHRing:
    key = (rs.label, P.subset)
    with _RINGS_LOCK:
        ring = _RINGS.get(key)
        if ring is None:
            ring = _RINGS[key] = QHRing(rs, P)
        return ring
