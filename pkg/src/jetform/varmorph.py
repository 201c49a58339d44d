"""Variational morphisms and their canonical splittings.

A morphism of codegree s and rank r is a coefficient family A^{i_1..i_s J}_sigma
pairing the r-jet of a vertical field:

    <V | J^r Xi> = [ sum over ordered blocks and multi-indices of
                     A^{i_1..i_s J}_sigma  d_J Xi^sigma ] x ds_{i_1..i_s}

Coefficients are stored per strictly increasing block (lookups for permuted
blocks are signed) and per exact rank-index string J.  Exact J keys matter:
the split-like volume part is not symmetric in its rank indices, so it
cannot live on sorted keys.  All stored values follow the ordered-tuple sum
convention above.

The fibered connection is fixed to the zero-coefficient one of the working
chart, so covariant derivatives are total derivatives throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import symexpr
from .forms import (Context, Form, as_ds_block, d_H, ds_block, omega, p_k,
                    wedge)
from .multiindex import perm_sign, sort_with_sign, tuple_multiplicity
from .symexpr import Scalar


class NotOneContact(Exception):
    """The form carries contact degree >= 2 and is not a morphism."""


class DegreeTooHigh(Exception):
    """The identification with morphisms holds up to (n+1)-forms only."""


class UnsupportedCase(Exception):
    """The requested (rank, codegree) splitting has no explicit formulas."""


def formal_field(ctx: Context, name: str = "Xi") -> dict:
    """A generic vertical field with purely formal total derivatives."""
    return {sigma: symexpr.opaque(name, (sigma,), n=ctx.n, m=ctx.m, order=-1)
            for sigma in range(1, ctx.m + 1)}


def vertical_field(ctx: Context, name: str = "Xi") -> dict:
    """A generic vertical field Xi^sigma(x, y); derivatives chain-expand."""
    return {sigma: symexpr.opaque(name, (sigma,), n=ctx.n, m=ctx.m, order=0)
            for sigma in range(1, ctx.m + 1)}


@dataclass
class VariationalMorphism:
    ctx: Context
    s: int
    coeffs: dict = field(default_factory=dict)  # (block, sigma, J) -> Scalar

    # -- storage -----------------------------------------------------------

    def set(self, block, sigma: int, J, value: Scalar) -> None:
        block = tuple(block)
        if tuple(sorted(block)) != block or len(set(block)) != len(block):
            raise ValueError("blocks are stored strictly increasing")
        key = (block, sigma, tuple(J))
        if value.is_zero():
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = value

    def add(self, block, sigma: int, J, value: Scalar) -> None:
        self.set(block, sigma, J, self.value(block, sigma, J) + value)

    def value(self, block, sigma: int, J) -> Scalar:
        """Signed coefficient lookup for an arbitrarily ordered block."""
        sblock, sign = sort_with_sign(block)
        if sign == 0:
            return Scalar.zero()
        v = self.coeffs.get((sblock, sigma, tuple(J)))
        if v is None:
            return Scalar.zero()
        return v if sign == 1 else -v

    @property
    def rank(self) -> int:
        return max((len(J) for _, _, J in self.coeffs), default=0)

    @property
    def order(self) -> int:
        return max((v.max_jet_order() for v in self.coeffs.values()), default=0)

    def __sub__(self, other: "VariationalMorphism") -> "VariationalMorphism":
        if self.s != other.s:
            raise ValueError("codegrees differ")
        out = VariationalMorphism(self.ctx, self.s, dict(self.coeffs))
        for (block, sigma, J), v in other.coeffs.items():
            out.add(block, sigma, J, -v)
        return out

    def __add__(self, other: "VariationalMorphism") -> "VariationalMorphism":
        if self.s != other.s:
            raise ValueError("codegrees differ")
        out = VariationalMorphism(self.ctx, self.s, dict(self.coeffs))
        for (block, sigma, J), v in other.coeffs.items():
            out.add(block, sigma, J, v)
        return out

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.coeffs.values())

    # -- pairing -----------------------------------------------------------

    def evaluate(self, xi: dict) -> Form:
        """<V | J^r Xi> as an (n-s)-horizontal form."""
        ctx = self.ctx
        sfact = math.factorial(self.s)
        cache: dict = {}  # total derivatives commute: one entry per sorted J
        out = Form.zero(ctx)
        for (block, sigma, J), v in self.coeffs.items():
            key = (sigma, tuple(sorted(J)))
            if key not in cache:
                cache[key] = symexpr.total_derivative_multi(xi[sigma], key[1])
            out = out + ds_block(ctx, block).scale(v * cache[key] * sfact)
        return out

    def antisym_value(self, positions_block, sigma: int, J) -> Scalar:
        """A^{[b_1..b_p] J}: normalized antisymmetrization of a mixed block.

        ``positions_block`` holds s block indices followed by extra indices
        drawn from the front of the rank string; the lookup reassembles each
        permutation into (block, J) form.
        """
        idxs = tuple(positions_block)
        p = len(idxs)
        total = Scalar.zero()
        for perm in itertools.permutations(range(p)):
            sign = perm_sign(perm)
            arranged = tuple(idxs[t] for t in perm)
            val = self.value(arranged[:self.s], sigma, arranged[self.s:] + tuple(J))
            total = total + val * Fraction(sign, math.factorial(p))
        return total


@dataclass
class SplitResult:
    volume: VariationalMorphism
    boundary: VariationalMorphism
    flavor: str  # 'canonical' | 'split-like'


# -- conversions with contact forms ------------------------------------------


def from_contact_form(rho: Form) -> VariationalMorphism:
    """Read a 1-contact (n-s)-horizontal form (degree <= n+1) as a morphism."""
    ctx = rho.ctx
    if rho.contact_degree() > 1:
        raise NotOneContact("form has contact components of degree >= 2")
    part = p_k(rho, 1)
    degs = {h + c for h, c in part.degrees()}
    if degs and max(degs) > ctx.n + 1:
        raise DegreeTooHigh("morphism identification holds up to (n+1)-forms")
    hdegs = {h for h, _ in part.degrees()}
    if len(hdegs) > 1:
        raise NotOneContact(f"mixed horizontal degrees {hdegs}")
    s = ctx.n - hdegs.pop() if hdegs else 0
    V = VariationalMorphism(ctx, s)
    sfact = math.factorial(s)
    # stored terms are dx-first; the coefficient family reads off the
    # omega-first arrangement omega^sigma_J ^ (A ds_block)
    reorder = (-1) ** (ctx.n - s)
    for w, c in part.terms.items():
        horiz = tuple(cov for cov in w if cov[0] == 'dx')
        [(sigma, J)] = [(cov[1], cov[2]) for cov in w if cov[0] == 'w']
        block, bsign = as_ds_block(ctx, horiz)
        base = c * Fraction(reorder * bsign, sfact * tuple_multiplicity(J))
        for Jord in set(itertools.permutations(J)):
            V.add(block, sigma, Jord, base)
    return V


def to_contact_form(V: VariationalMorphism, boundary_sign: bool = False) -> Form:
    """The 1-contact form associated with a morphism.

    With ``boundary_sign`` the coefficients enter with a minus sign, the
    convention under which Div(<T|J^{r-1}Xi>) = J^r Xi _| d_H of the result.
    """
    ctx = V.ctx
    sfact = math.factorial(V.s)
    flip = -1 if boundary_sign else 1
    out = Form.zero(ctx)
    for (block, sigma, J), v in V.coeffs.items():
        piece = wedge(omega(ctx, sigma, *J), ds_block(ctx, block))
        out = out + piece.scale(v * Fraction(flip * sfact))
    return out


def morphism_from_evaluation(rho: Form, s: int, family: str = "Xi") -> VariationalMorphism:
    """Recover the unique morphism whose pairing with a formal field is rho.

    ``rho`` must be (n-s)-horizontal and linear in the formal atoms of the
    named family, with derivatives encoded as formal x-partials.
    """
    ctx = rho.ctx
    V = VariationalMorphism(ctx, s)
    sfact = math.factorial(s)
    for w, c in rho.terms.items():
        if any(cov[0] == 'w' for cov in w):
            raise ValueError("evaluation forms are horizontal")
        block, bsign = as_ds_block(ctx, w)
        for atom, coeff in symexpr.collect_linear(c, family).items():
            if atom is None:
                if not coeff.is_zero():
                    raise ValueError("evaluation has a field-free part")
                continue
            sigma = atom[2][0]
            J = tuple(sorted(key[1] for key in atom[6]))
            if any(key[0] != 'x' for key in atom[6]):
                raise ValueError("expected formal total-derivative labels only")
            base = coeff * Fraction(bsign, sfact * tuple_multiplicity(J))
            for Jord in set(itertools.permutations(J)):
                V.add(block, sigma, Jord, base)
    return V


def divergence(Q: VariationalMorphism) -> VariationalMorphism:
    """Div of a rank-0 morphism: codegree drops by one, rank rises to <= 1.

    Realized through the associated form: pair with a formal field, apply
    the horizontal differential, and re-read the coefficients.
    """
    if Q.rank != 0:
        raise ValueError("divergence is defined for rank-0 morphisms")
    xi = formal_field(Q.ctx)
    return morphism_from_evaluation(d_H(Q.evaluate(xi)), Q.s - 1)


def div_evaluation(T: VariationalMorphism, xi: dict) -> Form:
    """Div(<T|J^{r-1}Xi>) as a form: d_H of the evaluation."""
    return d_H(T.evaluate(xi))


# -- codegree 0: canonical splitting ------------------------------------------


def split_codegree0(V: VariationalMorphism) -> SplitResult:
    """E and T with <V|J^r Xi> = <E|Xi> + Div(<T|J^{r-1}Xi>), codegree 0."""
    if V.s != 0:
        raise UnsupportedCase("codegree 0 splitting needs s = 0")
    ctx, r = V.ctx, V.rank
    n = ctx.n

    E = VariationalMorphism(ctx, 0)
    for sigma in range(1, ctx.m + 1):
        acc = Scalar.zero()
        for ell in range(r + 1):
            for J in itertools.product(range(1, n + 1), repeat=ell):
                val = V.value((), sigma, J)
                if not val.is_zero():
                    acc = acc + Fraction((-1) ** ell) * symexpr.total_derivative_multi(val, J)
        E.set((), sigma, (), acc)

    T = VariationalMorphism(ctx, 1)
    if r >= 1:
        levels: dict = {}
        for h in range(r - 1, -1, -1):
            level: dict = {}
            for sigma in range(1, ctx.m + 1):
                for i in range(1, n + 1):
                    for J in itertools.product(range(1, n + 1), repeat=h):
                        val = V.value((), sigma, (i,) + J)
                        if h < r - 1:
                            up = levels[h + 1]
                            for l in range(1, n + 1):
                                prev = up.get((l, sigma, (i,) + J), Scalar.zero())
                                val = val - symexpr.total_derivative(prev, l)
                        if not val.is_zero():
                            level[(i, sigma, J)] = val
            levels[h] = level
        for h, level in levels.items():
            for (i, sigma, J), val in level.items():
                T.set((i,), sigma, J, val)
    return SplitResult(E, T, 'canonical')


# -- codegree >= 1: the split-like algorithm ----------------------------------


def _that_family(V: VariationalMorphism) -> dict:
    """The iterated boundary coefficients of the split-like algorithm.

    Returns level -> {(block(s+1) strict, sigma, L) -> Scalar}; level h holds
    |L| = h, built top-down from the block-antisymmetrized coefficients.
    """
    ctx, s, r = V.ctx, V.s, V.rank
    n = ctx.n
    levels: dict = {}
    for h in range(r - 1, -1, -1):
        level: dict = {}
        for block in itertools.combinations(range(1, n + 1), s + 1):
            for sigma in range(1, ctx.m + 1):
                for L in itertools.product(range(1, n + 1), repeat=h):
                    val = V.antisym_value(block, sigma, L)
                    if h < r - 1:
                        up = levels[h + 1]
                        for k in range(1, n + 1):
                            prev = up.get((block, sigma, L + (k,)), Scalar.zero())
                            val = val - symexpr.total_derivative(prev, k)
                    if not val.is_zero():
                        level[(block, sigma, L)] = val
        levels[h] = level
    return levels


def _that_value(levels: dict, block, sigma: int, L) -> Scalar:
    """Signed lookup in the t-hat family for an arbitrarily ordered block."""
    sblock, sign = sort_with_sign(block)
    if sign == 0:
        return Scalar.zero()
    val = levels.get(len(L), {}).get((sblock, sigma, tuple(L)), Scalar.zero())
    return val if sign == 1 else -val


def split_like(V: VariationalMorphism) -> SplitResult:
    """The canonical-splitting-like decomposition for codegree s >= 1.

    The boundary coefficients follow the iterative antisymmetrized
    recurrence; the volume part subtracts them rank by rank and is in
    general neither symmetric in its rank indices nor reduced.
    """
    if V.s < 1:
        raise UnsupportedCase("split_like needs codegree s >= 1")
    ctx, s, r = V.ctx, V.s, V.rank
    n = ctx.n
    levels = _that_family(V)

    T = VariationalMorphism(ctx, s + 1)
    w = Fraction(1, s + 1)
    for level in levels.values():
        for (block, sigma, L), val in level.items():
            T.set(block, sigma, L, val * w)

    E = VariationalMorphism(ctx, s)
    for block in itertools.combinations(range(1, n + 1), s):
        for sigma in range(1, ctx.m + 1):
            for h in range(r + 1):
                for J in itertools.product(range(1, n + 1), repeat=h):
                    val = V.value(block, sigma, J)
                    if h == 0:
                        for i in range(1, n + 1):
                            val = val - symexpr.total_derivative(
                                _that_value(levels, block + (i,), sigma, ()), i)
                    elif h == r:
                        val = val - _that_value(levels, block + (J[0],), sigma, J[1:])
                    else:
                        for i in range(1, n + 1):
                            val = val - symexpr.total_derivative(
                                _that_value(levels, block + (i,), sigma, J), i)
                        val = val - _that_value(levels, block + (J[0],), sigma, J[1:])
                    if not val.is_zero():
                        E.set(block, sigma, J, val)
    return SplitResult(E, T, 'split-like')


# -- explicit canonical splittings for higher codegree -------------------------


def split_canonical_codegree_s(V: VariationalMorphism) -> SplitResult:
    """The connection-based canonical splitting, in the two explicit cases.

    Rank 1 (any codegree s < n) and the rank-2, codegree-1 case carry
    explicit coefficient formulas; elsewhere the algorithm is out of scope.
    The volume part is reduced: antisymmetrizing any coefficient over the
    block plus the first rank index gives zero.
    """
    ctx, s, r = V.ctx, V.s, V.rank
    n = ctx.n
    if r == 0:
        return SplitResult(V, VariationalMorphism(ctx, s + 1), 'canonical')
    if r == 1:
        E = VariationalMorphism(ctx, s)
        for block in itertools.combinations(range(1, n + 1), s):
            for sigma in range(1, ctx.m + 1):
                val = V.value(block, sigma, ())
                for k in range(1, n + 1):
                    val = val - symexpr.total_derivative(
                        V.antisym_value(block + (k,), sigma, ()), k)
                E.set(block, sigma, (), val)
                for j in range(1, n + 1):
                    vj = V.value(block, sigma, (j,)) - V.antisym_value(block + (j,), sigma, ())
                    E.set(block, sigma, (j,), vj)
        T = VariationalMorphism(ctx, s + 1)
        w = Fraction(1, s + 1)
        for block in itertools.combinations(range(1, n + 1), s + 1):
            for sigma in range(1, ctx.m + 1):
                T.set(block, sigma, (), V.antisym_value(block, sigma, ()) * w)
        return SplitResult(E, T, 'canonical')
    if r == 2 and s == 1:
        return _split_canonical_r2_s1(V)
    raise UnsupportedCase(f"no explicit canonical splitting for rank {r}, codegree {s}")


def _split_canonical_r2_s1(V: VariationalMorphism) -> SplitResult:
    ctx = V.ctx
    n, m = ctx.n, ctx.m
    d = symexpr.total_derivative

    def sym2(i, sigma, j1):
        return (V.value((i,), sigma, (j1,)) + V.value((j1,), sigma, (i,))) * Fraction(1, 2)

    def sym2_tail(i, sigma, j1, a):
        return (V.value((i,), sigma, (j1, a)) + V.value((j1,), sigma, (i, a))) * Fraction(1, 2)

    def sym3(i, sigma, j1, j2):
        total = Scalar.zero()
        for p in itertools.permutations((i, j1, j2)):
            total = total + V.value((p[0],), sigma, (p[1], p[2]))
        return total * Fraction(1, 6)

    def anti2(i, a, sigma, tail):
        return (V.value((i,), sigma, (a,) + tail) - V.value((a,), sigma, (i,) + tail)) \
            * Fraction(1, 2)

    E = VariationalMorphism(ctx, 1)
    for i in range(1, n + 1):
        for sigma in range(1, m + 1):
            # the +2/3 sign on the second-derivative term is pinned by the
            # splitting identity <V|Xi> = <E|Xi> + Div(<T|Xi>) together with
            # the boundary part below; a -2/3 breaks it
            val = V.value((i,), sigma, ())
            for a in range(1, n + 1):
                val = val - d(anti2(i, a, sigma, ()), a)
            for a in range(1, n + 1):
                for b in range(1, n + 1):
                    val = val + Fraction(2, 3) * d(d(anti2(i, b, sigma, (a,)), a), b)
            E.set((i,), sigma, (), val)
            for j1 in range(1, n + 1):
                val = sym2(i, sigma, j1)
                for a in range(1, n + 1):
                    val = val + Fraction(2, 3) * d(V.value((a,), sigma, (i, j1)), a)
                    val = val - Fraction(2, 3) * d(sym2_tail(i, sigma, j1, a), a)
                E.set((i,), sigma, (j1,), val)
                for j2 in range(1, n + 1):
                    E.set((i,), sigma, (j1, j2), sym3(i, sigma, j1, j2))

    T = VariationalMorphism(ctx, 2)
    for block in itertools.combinations(range(1, n + 1), 2):
        i1, i2 = block
        for sigma in range(1, m + 1):
            val = anti2(i1, i2, sigma, ())
            for a in range(1, n + 1):
                val = val - Fraction(2, 3) * d(anti2(i1, i2, sigma, (a,)), a)
            T.set(block, sigma, (), val * Fraction(1, 2))
            for j in range(1, n + 1):
                T.set(block, sigma, (j,), anti2(i1, i2, sigma, (j,)) * Fraction(2, 3))
    return SplitResult(E, T, 'canonical')


def is_reduced(V: VariationalMorphism) -> bool:
    """Whether every term vanishes under block + first-rank-index antisymmetrization."""
    ctx = V.ctx
    n = ctx.n
    ranks = {len(J) for _, _, J in V.coeffs}
    for h in sorted(ranks):
        if h == 0:
            continue
        for block in itertools.combinations(range(1, n + 1), V.s):
            for sigma in range(1, ctx.m + 1):
                for J in itertools.product(range(1, n + 1), repeat=h):
                    if not V.antisym_value(block + (J[0],), sigma, J[1:]).is_zero():
                        return False
    return True


# -- the discrepancy of the two codegree-1 splittings --------------------------


def alpha_discrepancy(V: VariationalMorphism):
    """alpha with T' = T + alpha and E' = E - D(alpha), for rank 2, codegree 1.

    Returns (alpha, Dalpha); Dalpha is the unique rank-2 morphism whose
    pairing with J^2 Xi is Div(<alpha|J^1 Xi>).
    """
    if V.s != 1 or V.rank != 2:
        raise UnsupportedCase("the discrepancy is computed for rank 2, codegree 1")
    like = split_like(V)
    canon = split_canonical_codegree_s(V)
    alpha = like.boundary - canon.boundary
    xi = formal_field(V.ctx)
    dalpha = morphism_from_evaluation(d_H(alpha.evaluate(xi)), V.s)
    return alpha, dalpha
