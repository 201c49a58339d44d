"""Lepage equivalents: Poincare-Cartan forms, the residual-operator
recurrence, and the closed Krupka-Betounes formulas (first and second order).

The recurrence is rho_1 = lambda - p_1 R(d lambda), then at each contact
degree q >= 2, rho_q = rho_{q-1} - p_q R(d rho_{q-1}) with the lower-degree
residual operator.

The eta decomposition feeding R is not unique for q >= 2 and the choice
matters.  At first order the canonical 1/k-contraction eta is the right
one: the chain then terminates on the Krupka-Betounes equivalent (in
particular the equivalent of a null Lagrangian comes out closed).  At
second order the canonical eta does not reproduce the known expansion;
there the eta family is built by provenance: a q-contact term of
d rho_{q-1} whose new contact factor (the one generated by differentiating
the coefficient) is first-order leads the decomposition when the remaining
factors still carry a first-order contact form, and every other term is
parked on an order-zero factor, where it cannot enter the residual.

Normalization of the closed formulas: sums here run over fully ordered
slot tuples.  A q-fold pure-contact correction built from a slot-symmetric
coefficient collapses q! equal orderings, so the familiar 1/q! (taken per
sorted slot tuple) becomes 1/(q!)^2 in the fully ordered sum; mixed sums
whose slots are distinguishable keep their literal weight.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import symexpr
from .forms import (Context, Form, ds_block, exterior_d, omega, p_k,
                    volume, wedge)
from .interior_euler import eta_decompose, interior_euler, residual_lower, residual_top
from .multiindex import tuple_multiplicity
from .symexpr import Scalar


class UnsupportedOrder(Exception):
    """Lagrangians above second order are out of scope."""


@dataclass
class Lagrangian:
    """A first- or second-order Lagrangian density over a bundle context."""

    ctx: Context
    order: int
    density: Scalar

    def __post_init__(self):
        if self.order not in (1, 2):
            raise UnsupportedOrder(f"order {self.order} not supported")
        if self.density.max_jet_order() > self.order:
            raise ValueError("density uses jet coordinates above the declared order")

    def form(self) -> Form:
        return volume(self.ctx).scale(self.density)

    # momentum-type coefficient functions, in the ordered-tuple convention
    def p1(self, sigma: int, i: int) -> Scalar:
        return symexpr.partial(self.density, ('y', sigma, (i,)))

    def p2(self, sigma: int, j: int, k: int) -> Scalar:
        key = tuple(sorted((j, k)))
        base = symexpr.partial(self.density, ('y', sigma, key))
        return base * Fraction(1, tuple_multiplicity(key))

    def f1(self, sigma: int, j: int) -> Scalar:
        """p^j - d_k p^{jk}: the corrected first momentum at second order."""
        val = self.p1(sigma, j)
        if self.order == 2:
            for k in range(1, self.ctx.n + 1):
                val = val - symexpr.total_derivative(self.p2(sigma, j, k), k)
        return val


@dataclass
class LepageChain:
    lagrangian: Lagrangian
    forms: list
    provenance: str  # 'recurrence' | 'closed-form'

    @property
    def terminal(self) -> Form:
        return self.forms[-1]


def generic_lagrangian(ctx: Context, order: int, name: str = "L") -> Lagrangian:
    """A Lagrangian with a fully generic opaque density."""
    return Lagrangian(ctx, order, symexpr.opaque(name, n=ctx.n, m=ctx.m, order=order))


# -- Poincare-Cartan -----------------------------------------------------------


def poincare_cartan_closed(lam: Lagrangian) -> Form:
    """The chart formulas: L ds + p^i w ds_i, plus second-order corrections."""
    ctx = lam.ctx
    out = lam.form()
    for sigma in range(1, ctx.m + 1):
        for j in range(1, ctx.n + 1):
            coeff = lam.f1(sigma, j)
            out = out + wedge(omega(ctx, sigma), ds_block(ctx, (j,))).scale(coeff)
            if lam.order == 2:
                for k in range(1, ctx.n + 1):
                    out = out + wedge(omega(ctx, sigma, k),
                                      ds_block(ctx, (j,))).scale(lam.p2(sigma, j, k))
    return out


def poincare_cartan(lam: Lagrangian) -> Form:
    """theta = lambda - p_1 R(d lambda), cross-checked against the chart form."""
    theta = lam.form() - p_k(residual_top(exterior_d(lam.form()), 1), 1)
    closed = poincare_cartan_closed(lam)
    if not (theta - closed).is_zero():
        raise AssertionError("residual route disagrees with the chart "
                             "Poincare-Cartan form; decomposition bug")
    return theta


# -- the recurrence -------------------------------------------------------------


def _provenance_eta(rho_prev: Form, q: int) -> dict:
    """Second-order eta family for p_q(d rho_prev); see the module docstring."""
    ctx = rho_prev.ctx
    etas: dict = {}

    def put(key, covs, coeff):
        extra = Form.from_terms(ctx, [(covs, coeff)])
        if extra.is_zero():
            return
        etas[key] = etas.get(key, Form.zero(ctx)) + extra

    for w, c in rho_prev.terms.items():
        if sum(1 for cov in w if cov[0] == 'w') != q - 1:
            continue
        for coord in sorted(symexpr.support_coords(c, ctx.n, ctx.m)):
            if coord[0] != 'y':
                continue
            dc = symexpr.partial(c, coord)
            if dc.is_zero():
                continue
            nu, K = coord[1], coord[2]
            seq = (('w', nu, K),) + w
            if len(K) == 1 and any(cov[0] == 'w' and len(cov[2]) >= 1 for cov in w):
                put((nu, K), seq[1:], dc)
                continue
            candidates = [(t, cov) for t, cov in enumerate(seq) if cov[0] == 'w']
            order0 = [t for t, cov in candidates if len(cov[2]) == 0]
            t = order0[0] if order0 else min(candidates, key=lambda tc: len(tc[1][2]))[0]
            cov = seq[t]
            put((cov[1], cov[2]), seq[:t] + seq[t + 1:],
                dc if t % 2 == 0 else Scalar.zero() - dc)
    return {k: v for k, v in etas.items() if not v.is_zero()}


def rossi_recurrence(lam: Lagrangian) -> LepageChain:
    """The full chain rho_1 .. rho_n of residual-operator corrections."""
    ctx = lam.ctx
    chain = [poincare_cartan(lam)]
    for q in range(2, ctx.n + 1):
        prev = chain[-1]
        diff = exterior_d(prev)
        if p_k(diff, q).is_zero():
            chain.append(prev)
            continue
        if lam.order == 1:
            dec = None
        else:
            etas = _provenance_eta(prev, q)
            if not etas:
                chain.append(prev)
                continue
            dec = eta_decompose(diff, q, etas=etas)
        correction = p_k(residual_lower(diff, q, q - 1, eta=dec), q)
        chain.append(prev - correction)
    return LepageChain(lam, chain, 'recurrence')


# -- closed forms ----------------------------------------------------------------


def krupka_betounes_first(lam: Lagrangian) -> Form:
    """First-order equivalent: pure-contact corrections from the L-Hessians."""
    if lam.order != 1:
        raise UnsupportedOrder("the first-order closed form needs order 1")
    ctx = lam.ctx
    out = lam.form()
    for q in range(1, ctx.n + 1):
        weight = Fraction(1, math.factorial(q) ** 2)
        for pairs in itertools.product(
                itertools.product(range(1, ctx.m + 1), range(1, ctx.n + 1)), repeat=q):
            coeff = lam.density
            for sigma, i in pairs:
                coeff = symexpr.partial(coeff, ('y', sigma, (i,)))
            if coeff.is_zero():
                continue
            base = ds_block(ctx, tuple(i for _, i in pairs))
            if base.is_zero():
                continue
            term = base
            for sigma, _ in reversed(pairs):
                term = wedge(omega(ctx, sigma), term)
            out = out + term.scale(coeff * weight)
    return out


def kb_second_order(lam: Lagrangian, variant: str = "plain") -> Form:
    """Second-order closed forms.

    The plain variant carries the mixed second-order momenta; the
    generalized variant adds the telescoped first-momentum partials and
    restricts to the first-order equivalent when the density has no
    second-order coordinates.
    """
    if lam.order != 2:
        raise UnsupportedOrder("the second-order closed forms need order 2")
    if variant not in ("plain", "generalized"):
        raise ValueError(f"unknown variant {variant!r}")
    ctx = lam.ctx
    n, m = ctx.n, ctx.m
    out = lam.form()
    for sigma in range(1, m + 1):
        for i in range(1, n + 1):
            out = out + wedge(omega(ctx, sigma), ds_block(ctx, (i,))).scale(lam.f1(sigma, i))
    # sum_q (1/q!) d^{q-1} p2 terms: q-1 plain contact factors and one w_j;
    # the distinguished w_j slot keeps the weight literal in the ordered sum
    for q in range(1, n + 1):
        weight = Fraction(1, math.factorial(q))
        for pairs in itertools.product(
                itertools.product(range(1, m + 1), range(1, n + 1)), repeat=q - 1):
            for sigma_q in range(1, m + 1):
                for i_q in range(1, n + 1):
                    for j in range(1, n + 1):
                        coeff = lam.p2(sigma_q, i_q, j)
                        for sigma, i in pairs:
                            coeff = symexpr.partial(coeff, ('y', sigma, (i,)))
                        if coeff.is_zero():
                            continue
                        base = ds_block(ctx, tuple(i for _, i in pairs) + (i_q,))
                        if base.is_zero():
                            continue
                        term = wedge(omega(ctx, sigma_q, j), base)
                        for sigma, _ in reversed(pairs):
                            term = wedge(omega(ctx, sigma), term)
                        out = out + term.scale(coeff * weight)
    if variant == "plain":
        return out
    # telescoped f-partials: q+1 plain contact slots, so the ordered sum
    # carries 1/((q+1)!)^2, which is what collapses onto the first-order
    # equivalent for a density without second-order coordinates
    for q in range(1, n):
        weight = Fraction(1, math.factorial(q + 1) ** 2)
        for pairs in itertools.product(
                itertools.product(range(1, m + 1), range(1, n + 1)), repeat=q):
            for sigma_last in range(1, m + 1):
                for i_last in range(1, n + 1):
                    coeff = lam.f1(sigma_last, i_last)
                    for sigma, i in pairs:
                        coeff = symexpr.partial(coeff, ('y', sigma, (i,)))
                    if coeff.is_zero():
                        continue
                    base = ds_block(ctx, tuple(i for _, i in pairs) + (i_last,))
                    if base.is_zero():
                        continue
                    term = wedge(omega(ctx, sigma_last), base)
                    for sigma, _ in reversed(pairs):
                        term = wedge(omega(ctx, sigma), term)
                    out = out + term.scale(coeff * weight)
    return out


# -- source forms -----------------------------------------------------------------


def euler_lagrange(lam: Lagrangian) -> Form:
    """The source form I(d lambda): omega^sigma ^ E_sigma(L) ds."""
    return interior_euler(exterior_d(lam.form()), 1)


@dataclass
class LepageReport:
    horizontal_ok: bool
    source_ok: bool
    horizontal_diff: Form
    source_diff: Form

    @property
    def ok(self) -> bool:
        return self.horizontal_ok and self.source_ok


def lepage_check(rho: Form, lam: Lagrangian) -> LepageReport:
    """Whether p_0(rho) is the Lagrangian and p_1(d rho) its source form."""
    hdiff = p_k(rho, 0) - lam.form()
    sdiff = p_k(exterior_d(rho), 1) - euler_lagrange(lam)
    return LepageReport(hdiff.is_zero(), sdiff.is_zero(), hdiff, sdiff)
