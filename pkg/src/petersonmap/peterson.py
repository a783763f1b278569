"""The Peterson map and the combinatorics behind its explicit form.

``phi`` sends xi_{w t_lam} to q^{lam + Q_P^vee} sigma_{w~} when w t_lam lies
in (W^P)_af, and to zero otherwise.  ``verify_homomorphism`` checks, pair by
pair, that phi carries the Pontryagin product to the quantum product, and
sweeps the supporting identities (condition equivalence, dimension count).
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable

from .affweyl import AffineWeylElement, AffineWeylGroup, affine_weyl_group
from .exactalg import Poly
from .grring import GrRing, gr_ring
from .qhring import CurveClass, QHRing, QuantumClass, qc_add, qc_shift, qh_ring
from .rootdata import ParabolicType, RootSystem, Vec, WeylElement, build_root_system, neg


class PetersonError(ValueError):
    pass


@dataclass(frozen=True)
class SectionData:
    mu: Vec
    v: WeylElement
    degrees: tuple[int, ...]
    curve_class: CurveClass


@dataclass
class VerifyReport:
    group_type: str
    rank: int
    parabolic: list[int]
    max_length: int
    pairs_checked: int = 0
    failures: list = field(default_factory=list)
    condition_equivalence_checked: int = 0
    condition_equivalence_failures: list = field(default_factory=list)
    dim_count_checked: int = 0
    dim_count_failures: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not (self.failures or self.condition_equivalence_failures or self.dim_count_failures)

    def to_dict(self, with_timing: bool = True) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        if not with_timing:
            d.pop("timing")
        return d


class PetersonMap:
    def __init__(self, rs: RootSystem, P: ParabolicType = ParabolicType()):
        self.rs = rs
        self.P = P
        self.W: AffineWeylGroup = affine_weyl_group(rs)
        self.gr: GrRing = gr_ring(rs)
        self.qh: QHRing = qh_ring(rs, P)
        self.RP = rs.positive_roots_of(P)

    # -- membership tests ------------------------------------------------

    def in_WP_af(self, x: AffineWeylElement) -> bool:
        rs = self.rs
        for alpha in self.RP:
            m = rs.pair(alpha, x.lam)
            if rs.is_positive(rs.act_root(x.w, alpha)):
                if m != 0:
                    return False
            elif m != -1:
                return False
        return True

    def condition_C(self, x: AffineWeylElement) -> bool:
        rs = self.rs
        mu = self.W.center(x)
        for beta in self.RP:
            alpha = neg(rs.act_root(x.w, beta))
            m = rs.pair(alpha, mu)
            if rs.is_positive(alpha):
                if m != 1:
                    return False
            elif m != 0:
                return False
        return True

    # -- the map -----------------------------------------------------------

    def phi_basis(self, x: AffineWeylElement) -> QuantumClass:
        if not self.W.is_coset_min(x):
            raise PetersonError(f"{self.W.format(x)} is not a minimal coset representative")
        if not self.in_WP_af(x):
            return {}
        beta = self.qh.curve_class_project(x.lam)
        return {(beta, self.rs.min_coset_rep(x.w, self.P)): Poly.one(self.rs.rank)}

    def phi(self, c: dict) -> QuantumClass:
        out: QuantumClass = {}
        for x, coeff in c.items():
            img = self.phi_basis(x)
            if img:
                out = qc_add(out, img, coeff)
        return out

    # -- sections and dimension count ------------------------------------

    def _root_class(self, alpha: Vec, v: WeylElement) -> int:
        """Sign of alpha(v.b) for b dominant with stabiliser W_P."""
        rs = self.rs
        beta = rs.act_root(rs.inverse(v), alpha)
        if rs.in_parabolic_span(beta, self.P):
            return 0
        return 1 if rs.is_positive(beta) else -1

    def section_degrees(self, mu: Vec, v: WeylElement) -> tuple[int, ...]:
        """-alpha(mu) over alpha in -v(R^+ minus R_P^+), in root enumeration order."""
        rs = self.rs
        out = []
        for gamma in self.qh.roots_out:
            alpha = neg(rs.act_root(v, gamma))
            out.append(-rs.pair(alpha, mu))
        return tuple(out)

    def section_class(self, mu: Vec, v: WeylElement) -> CurveClass:
        rs = self.rs
        return self.qh.curve_class_project(rs.act_coweight(rs.inverse(v), mu))

    def section_data(self, mu: Vec, v: WeylElement) -> SectionData:
        return SectionData(mu, v, self.section_degrees(mu, v), self.section_class(mu, v))

    def c1_term(self, x: AffineWeylElement, v: WeylElement) -> int:
        rs = self.rs
        mu = self.W.center(x)
        return -sum(rs.pair(a, mu) for a in rs.roots if self._root_class(a, v) < 0)

    def dim_count(self, x: AffineWeylElement, v: WeylElement) -> int:
        if v not in self.qh._wp_set:
            raise PetersonError("v must lie in W^P")
        return self.W.length_minrep(x) + v.length + self.c1_term(x, v)

    def dim_summands(self, x: AffineWeylElement, v: WeylElement) -> dict[Vec, int]:
        """(1 - A) floor(alpha(mu - a)) + B over roots with alpha(mu - a) > 0."""
        floors = self.W.minrep_contributions(x)
        rs = self.rs
        mu = self.W.center(x)
        out = {}
        for alpha in rs.roots:
            m = rs.pair(alpha, mu)
            positive = m >= 1 if rs.is_positive(alpha) else m >= 0
            if not positive:
                continue
            fl = floors.get(alpha, 0)
            sign = self._root_class(alpha, v)
            A = -sign
            B = 1 if sign > 0 else 0
            out[alpha] = (1 - A) * fl + B
        return out

    def in_coset(self, x: AffineWeylElement, v: WeylElement) -> bool:
        return self.rs.min_coset_rep(x.w, self.P) == v

    # -- verification ----------------------------------------------------

    def image_product(self, u: AffineWeylElement, v: AffineWeylElement) -> QuantumClass:
        """phi(xi_u) * phi(xi_v), computed entirely on the quantum side."""
        right: QuantumClass = {}
        for (b1, w1), c1 in self.phi_basis(u).items():
            for (b2, w2), c2 in self.phi_basis(v).items():
                prod = qc_shift(self.qh.quantum_product(w1, w2), tuple(a + b for a, b in zip(b1, b2)))
                right = qc_add(right, prod, c1 * c2)
        return right

    def check_pair(self, u: AffineWeylElement, v: AffineWeylElement, gr_constants=None):
        if gr_constants is None:
            gr_constants = self.gr.product(u, v)
        return self.phi(gr_constants), self.image_product(u, v)

    def describe(self, c: QuantumClass) -> str:
        return self.qh.format_class(c)


def specialize_class(c: dict) -> dict:
    """Drop the equivariant parameters from every coefficient."""
    out = {}
    for k, p in c.items():
        c0 = p.constant_term()
        if c0:
            out[k] = Poly.const(p.nvars, c0)
    return out


def _pair_worker(args):
    type_label, rank, parabolic, u_text, v_text, non_equivariant = args
    rs = build_root_system(type_label, rank)
    pm = PetersonMap(rs, ParabolicType.of(parabolic))
    u, v = pm.W.parse(u_text), pm.W.parse(v_text)
    left, right = pm.check_pair(u, v)
    if non_equivariant:
        left, right = specialize_class(left), specialize_class(right)
    if left == right:
        return None
    return (u_text, v_text, f"phi(xi_u.xi_v) = {pm.describe(left)} but phi(xi_u)*phi(xi_v) = {pm.describe(right)}")


def verify_homomorphism(
    rs: RootSystem,
    P: ParabolicType = ParabolicType(),
    max_length: int = 3,
    threads: int = 1,
    sweeps: bool = True,
    gr_table: dict | None = None,
    non_equivariant: bool = False,
) -> VerifyReport:
    """Check phi(xi_u . xi_v) = phi(xi_u) * phi(xi_v) over all pairs up to max_length.

    ``gr_table`` may supply precomputed Gr structure constants keyed by (u, v);
    missing keys mean a zero product.  With ``non_equivariant`` both sides are
    compared after setting the equivariant parameters to zero.
    """
    pm = PetersonMap(rs, P)
    W = pm.W
    report = VerifyReport(rs.type_label, rs.rank, sorted(P.subset), max_length)
    t0 = time.perf_counter()
    elems = W.enumerate_waf_minus(max_length)
    pm.qh.product_table()
    report.timing["setup"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    pairs = [(u, v) for u in elems for v in elems]
    if threads != 1 and gr_table is None:
        jobs = [
            (rs.type_label, rs.rank, sorted(P.subset), W.format(u), W.format(v), non_equivariant)
            for u, v in pairs
        ]
        with ProcessPoolExecutor(max_workers=threads or None) as pool:
            results = list(pool.map(_pair_worker, jobs, chunksize=4))
        for r in results:
            if r is not None:
                report.failures.append(list(r))
    else:
        for u, v in pairs:
            left, right = pm.check_pair(u, v, None if gr_table is None else gr_table.get((u, v), {}))
            if non_equivariant:
                left, right = specialize_class(left), specialize_class(right)
            if left != right:
                report.failures.append([
                    W.format(u), W.format(v),
                    f"phi(xi_u.xi_v) = {pm.describe(left)} but phi(xi_u)*phi(xi_v) = {pm.describe(right)}",
                ])
    report.pairs_checked = len(pairs)
    report.timing["homomorphism"] = time.perf_counter() - t0

    if sweeps:
        t0 = time.perf_counter()
        for x in W.enumerate_all(max_length):
            report.condition_equivalence_checked += 1
            if pm.condition_C(x) != pm.in_WP_af(x):
                report.condition_equivalence_failures.append(W.format(x))
        for x, v, problem in dim_count_sweep(pm, elems):
            report.dim_count_failures.append([W.format(x), pm.qh.format_weyl(v), problem])
        report.dim_count_checked = len(elems) * len(pm.qh.WP)
        report.timing["sweeps"] = time.perf_counter() - t0
    return report


def dim_count_sweep(pm: PetersonMap, elems: Iterable[AffineWeylElement]):
    """Yield (x, v, problem) for every violation of the dimension-count facts."""
    rs = pm.rs
    for x in elems:
        mu = pm.W.center(x)
        for v in pm.qh.WP:
            D = pm.dim_count(x, v)
            summands = pm.dim_summands(x, v)
            if any(s < 0 for s in summands.values()):
                yield x, v, "negative summand"
            if sum(summands.values()) != D:
                yield x, v, f"summands sum to {sum(summands.values())}, count is {D}"
            if D < 0:
                yield x, v, f"negative count {D}"
            if sum(pm.section_degrees(mu, v)) != pm.c1_term(x, v):
                yield x, v, "section degrees disagree with the c1 term"
            expected_zero = pm.in_coset(x, v) and pm.condition_C(x)
            if (D == 0) != expected_zero:
                yield x, v, f"count {D} but coset/condition test gives {expected_zero}"
            if D == 0 and pm.section_class(mu, v) != pm.qh.curve_class_project(x.lam):
                yield x, v, "section class differs from lam + Q_P"
