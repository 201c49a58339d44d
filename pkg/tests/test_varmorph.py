import itertools
import random
from fractions import Fraction

import pytest

from jetform import symexpr as se
from jetform.forms import (Context, contract_prolonged, d_H, ds_block, dx,
                           omega, p_k, volume, wedge)
from jetform.interior_euler import interior_euler, residual_top
from jetform.randomgen import generic_morphism, rand_morphism
from jetform.symexpr import Scalar
from jetform.varmorph import (NotOneContact, UnsupportedCase,
                              VariationalMorphism, alpha_discrepancy,
                              divergence, formal_field, from_contact_form,
                              is_reduced, morphism_from_evaluation,
                              split_canonical_codegree_s, split_codegree0,
                              split_like, to_contact_form, vertical_field)


# -- the form <-> morphism correspondence ------------------------------------------

def test_from_contact_form_simple():
    ctx = Context(n=2, m=1)
    V = from_contact_form(wedge(omega(ctx, 1), volume(ctx)))
    assert V.s == 0
    assert V.value((), 1, ()) == Scalar.one()


def test_from_contact_form_reads_first_order_coefficient():
    ctx = Context(n=1, m=1)
    rho = wedge(omega(ctx, 1, 1), dx(ctx, 1)).scale(se.y(1, 1))
    V = from_contact_form(rho)
    assert V.s == 0
    assert V.value((), 1, (1,)) == se.y(1, 1)


def test_from_contact_form_rejects_two_contact():
    ctx = Context(n=2, m=2)
    rho = wedge(omega(ctx, 1), omega(ctx, 2))
    with pytest.raises(NotOneContact):
        from_contact_form(rho)


def test_roundtrip_and_evaluation_contract():
    rng = random.Random(31)
    for (n, m, s, r) in [(1, 1, 0, 2), (2, 2, 0, 1), (2, 1, 1, 1), (3, 2, 1, 2)]:
        ctx = Context(n=n, m=m)
        V = rand_morphism(rng, ctx, s, r)
        rho = to_contact_form(V)
        xi = vertical_field(ctx)
        # <V|J^r Xi> = J^r Xi _| p_1 rho
        assert V.evaluate(xi) == contract_prolonged(p_k(rho, 1), xi)
        V2 = from_contact_form(rho)
        assert V2.evaluate(xi) == V.evaluate(xi)


def test_form_level_roundtrip_recovers_p1():
    from jetform.randomgen import rand_form
    rng = random.Random(38)
    for (n, m, s) in [(2, 1, 0), (2, 2, 1), (3, 1, 1)]:
        ctx = Context(n=n, m=m)
        rho = rand_form(rng, ctx, n - s, 1, 2)
        assert to_contact_form(from_contact_form(rho)) == p_k(rho, 1)


def test_evaluation_identity_with_polynomial_field():
    # splitting identities hold for concrete polynomial sections too
    rng = random.Random(39)
    ctx = Context(n=2, m=2)
    from jetform.randomgen import rand_scalar
    xi = {sigma: rand_scalar(rng, ctx, 0, degree=2, terms=2)
          for sigma in range(1, 3)}
    V0 = rand_morphism(rng, ctx, 0, 2)
    res0 = split_codegree0(V0)
    assert V0.evaluate(xi) == res0.volume.evaluate(xi) + d_H(res0.boundary.evaluate(xi))
    V1 = rand_morphism(rng, ctx, 1, 2)
    res1 = split_like(V1)
    assert V1.evaluate(xi) == res1.volume.evaluate(xi) + d_H(res1.boundary.evaluate(xi))
    canon = split_canonical_codegree_s(V1)
    assert V1.evaluate(xi) == canon.volume.evaluate(xi) + d_H(canon.boundary.evaluate(xi))


def test_boundary_sign_convention():
    ctx = Context(n=2, m=1)
    T = VariationalMorphism(ctx, 1)
    T.set((1,), 1, (), Scalar.one())
    rt = to_contact_form(T, boundary_sign=True)
    assert rt == wedge(omega(ctx, 1), ds_block(ctx, (1,))).scale(-1)


def test_prop_boundary_div_correspondence():
    # Div(<T|J^{r-1}Xi>) = J^r Xi _| d_H of the minus-signed associated form
    rng = random.Random(32)
    ctx = Context(n=2, m=2)
    T = rand_morphism(rng, ctx, 1, 1)
    xi = vertical_field(ctx)
    lhs = d_H(T.evaluate(xi))
    rt = to_contact_form(T, boundary_sign=True)
    rhs = contract_prolonged(d_H(rt), xi)
    assert (lhs - rhs).is_zero()


def test_zero_morphism_is_zero_form():
    ctx = Context(n=2, m=1)
    assert to_contact_form(VariationalMorphism(ctx, 1)).is_zero()


# -- codegree 0 --------------------------------------------------------------------

def test_split0_rank0_trivial():
    ctx = Context(n=2, m=1)
    V = VariationalMorphism(ctx, 0)
    V.set((), 1, (), se.y(1))
    res = split_codegree0(V)
    assert res.volume.coeffs == V.coeffs
    assert res.boundary.is_zero()


def test_split0_rank1_and_rank2_coefficients():
    ctx = Context(n=2, m=1)
    V = generic_morphism(ctx, 0, 2)
    res = split_codegree0(V)
    d = se.total_derivative
    # E = A - d_j A^j + d_jk A^jk
    expect = V.value((), 1, ())
    for j in range(1, 3):
        expect = expect - d(V.value((), 1, (j,)), j)
    for j in range(1, 3):
        for k in range(1, 3):
            expect = expect + d(d(V.value((), 1, (j, k)), k), j)
    assert res.volume.value((), 1, ()) == expect
    # t^{ij} = A^{ij}; t^i = A^i - d_l t^{li}
    for i in range(1, 3):
        for j in range(1, 3):
            assert res.boundary.value((i,), 1, (j,)) == V.value((), 1, (i, j))
        expect_t = V.value((), 1, (i,))
        for l in range(1, 3):
            expect_t = expect_t - d(V.value((), 1, (l, i)), l)
        assert res.boundary.value((i,), 1, ()) == expect_t


def test_split0_evaluation_and_prop_volume():
    rng = random.Random(33)
    for (n, m, r) in [(1, 1, 2), (2, 2, 1), (2, 1, 2)]:
        ctx = Context(n=n, m=m)
        V = rand_morphism(rng, ctx, 0, r)
        res = split_codegree0(V)
        xi = vertical_field(ctx)
        lhs = V.evaluate(xi)
        assert lhs == res.volume.evaluate(xi) + d_H(res.boundary.evaluate(xi))
        rho = to_contact_form(V)
        assert res.volume.evaluate(xi) == contract_prolonged(interior_euler(rho, 1), xi)
        assert d_H(res.boundary.evaluate(xi)) == \
            contract_prolonged(d_H(residual_top(rho, 1)), xi)


def test_split0_requires_codegree_zero():
    ctx = Context(n=2, m=1)
    with pytest.raises(UnsupportedCase):
        split_codegree0(generic_morphism(ctx, 1, 1))


# -- split-like --------------------------------------------------------------------

def test_split_like_evaluation_identity():
    for (n, m, s, r) in [(2, 1, 1, 1), (3, 1, 1, 2), (2, 2, 1, 2), (3, 1, 2, 1)]:
        ctx = Context(n=n, m=m)
        V = generic_morphism(ctx, s, r)
        res = split_like(V)
        xi = formal_field(ctx)
        assert (V.evaluate(xi)
                - res.volume.evaluate(xi) - d_H(res.boundary.evaluate(xi))).is_zero()


def test_split_like_r1_closed_formulas():
    # E': (A^B - d_k A^{[Bk]}) and (A^{Bj} - A^{[Bj]}); T': 1/(s+1) A^{[Bi]}
    ctx = Context(n=3, m=1)
    V = generic_morphism(ctx, 1, 1)
    res = split_like(V)
    d = se.total_derivative
    for i in range(1, 4):
        expect0 = V.value((i,), 1, ())
        for k in range(1, 4):
            expect0 = expect0 - d(V.antisym_value((i, k), 1, ()), k)
        assert res.volume.value((i,), 1, ()) == expect0
        for j in range(1, 4):
            expect1 = V.value((i,), 1, (j,)) - V.antisym_value((i, j), 1, ())
            assert res.volume.value((i,), 1, (j,)) == expect1
    for block in itertools.combinations(range(1, 4), 2):
        assert res.boundary.value(block, 1, ()) == \
            V.antisym_value(block, 1, ()) * Fraction(1, 2)


def test_split_like_antisymmetric_input_has_no_middle_corrections():
    # fully block-antisymmetric rank-1 input: E' loses its rank-1 part
    ctx = Context(n=3, m=1)
    V = VariationalMorphism(ctx, 1)
    base = {}
    for i in range(1, 4):
        for j in range(1, 4):
            key = tuple(sorted((i, j)))
            if i == j:
                continue
            if key not in base:
                base[key] = se.opaque("C", key, n=3, m=1, order=-1)
            V.set((i,), 1, (j,), base[key] if (i, j) == key else -base[key])
    res = split_like(V)
    for i in range(1, 4):
        for j in range(1, 4):
            assert res.volume.value((i,), 1, (j,)).is_zero()


def test_split_like_r2_s1_volume_display():
    # E' = (A^i - d_a A^{[ia]} + d_b d_a A^{[ib]a}) w
    #    + (A^{ij1} - d_a A^{[ia]j1} - A^{[ij1]} + d_a A^{[ij1]a}) w_{j1}
    #    + (A^{ij1j2} - A^{[ij1]j2}) w_{j1j2},  all against ds_i
    ctx = Context(n=2, m=1)
    V = generic_morphism(ctx, 1, 2)
    res = split_like(V)
    d = se.total_derivative
    for i in range(1, 3):
        expect = V.value((i,), 1, ())
        for a in range(1, 3):
            expect = expect - d(V.antisym_value((i, a), 1, ()), a)
        for a in range(1, 3):
            for b in range(1, 3):
                expect = expect + d(d(V.antisym_value((i, b), 1, (a,)), a), b)
        assert res.volume.value((i,), 1, ()) == expect
        for j1 in range(1, 3):
            expect = V.value((i,), 1, (j1,)) - V.antisym_value((i, j1), 1, ())
            for a in range(1, 3):
                expect = expect - d(V.antisym_value((i, a), 1, (j1,)), a)
                expect = expect + d(V.antisym_value((i, j1), 1, (a,)), a)
            assert res.volume.value((i,), 1, (j1,)) == expect
            for j2 in range(1, 3):
                expect = V.value((i,), 1, (j1, j2)) - V.antisym_value((i, j1), 1, (j2,))
                assert res.volume.value((i,), 1, (j1, j2)) == expect


def test_split_like_agrees_with_form_level_split():
    # the morphism-level split-like volume/boundary pair corresponds to the
    # source + middle / boundary pieces of the form-level decomposition
    rng = random.Random(40)
    from jetform.interior_euler import split_lower
    for (n, m, s, r) in [(2, 1, 1, 1), (2, 2, 1, 2), (3, 1, 1, 2), (3, 1, 2, 1)]:
        ctx = Context(n=n, m=m)
        V = rand_morphism(rng, ctx, s, r)
        rho = to_contact_form(V)
        source, middle, boundary = split_lower(rho, s)
        res = split_like(V)
        xi = vertical_field(ctx)
        assert res.volume.evaluate(xi) == contract_prolonged(source + middle, xi)
        assert d_H(res.boundary.evaluate(xi)) == contract_prolonged(boundary, xi)


# -- Prop r=1 ----------------------------------------------------------------------

def test_prop_r1_splittings_coincide():
    rng = random.Random(34)
    for (n, m, s) in [(2, 1, 1), (3, 2, 1), (3, 1, 2)]:
        ctx = Context(n=n, m=m)
        for V in [generic_morphism(ctx, s, 1), rand_morphism(rng, ctx, s, 1)]:
            like = split_like(V)
            canon = split_canonical_codegree_s(V)
            assert (like.volume - canon.volume).is_zero()
            assert (like.boundary - canon.boundary).is_zero()


# -- canonical r=2, s=1 --------------------------------------------------------------

def test_splittfati_identity_and_displayed_coefficients():
    ctx = Context(n=2, m=1)
    V = generic_morphism(ctx, 1, 2)
    canon = split_canonical_codegree_s(V)
    xi = formal_field(ctx)
    assert (V.evaluate(xi) - canon.volume.evaluate(xi)
            - d_H(canon.boundary.evaluate(xi))).is_zero()
    d = se.total_derivative
    # T: 1/2 (A^{[i1i2]} - 2/3 d_a A^{[i1i2]a}) and 1/2 * 4/3 A^{[i1i2]j}
    for block in itertools.combinations(range(1, 3), 2):
        expect0 = V.antisym_value(block, 1, ())
        for a in range(1, 3):
            expect0 = expect0 - Fraction(2, 3) * d(V.antisym_value(block, 1, (a,)), a)
        assert canon.boundary.value(block, 1, ()) == expect0 * Fraction(1, 2)
        for j in range(1, 3):
            assert canon.boundary.value(block, 1, (j,)) == \
                V.antisym_value(block, 1, (j,)) * Fraction(2, 3)
    # E rank-2 term: the full symmetrization A^{(i j1 j2)}
    for i in range(1, 3):
        for j1 in range(1, 3):
            for j2 in range(1, 3):
                total = Scalar.zero()
                for p in itertools.permutations((i, j1, j2)):
                    total = total + V.value((p[0],), 1, (p[1], p[2]))
                assert canon.volume.value((i,), 1, (j1, j2)) == total * Fraction(1, 6)
    # E is reduced, T is reduced
    assert is_reduced(canon.volume)
    assert is_reduced(canon.boundary)


def test_splittfati_symmetric_input_kills_boundary_rank1():
    ctx = Context(n=2, m=1)
    V = VariationalMorphism(ctx, 1)
    for i in range(1, 3):
        for Js in itertools.product(range(1, 3), repeat=2):
            key = tuple(sorted((i,) + Js))
            V.set((i,), 1, Js, se.opaque("S", key, n=2, m=1, order=-1))
    canon = split_canonical_codegree_s(V)
    for block in itertools.combinations(range(1, 3), 2):
        for j in range(1, 3):
            assert canon.boundary.value(block, 1, (j,)).is_zero()


def test_canonical_unsupported_cases():
    ctx = Context(n=3, m=1)
    with pytest.raises(UnsupportedCase):
        split_canonical_codegree_s(generic_morphism(ctx, 2, 2))
    with pytest.raises(UnsupportedCase):
        split_canonical_codegree_s(generic_morphism(ctx, 1, 3))


# -- divergence -----------------------------------------------------------------------

def test_divergence_constant_coefficients():
    ctx = Context(n=2, m=1)
    Q = VariationalMorphism(ctx, 1)
    Q.set((1,), 1, (), se.x(2))  # depends on base only
    D = divergence(Q)
    assert D.s == 0
    xi = formal_field(ctx)
    assert D.evaluate(xi) == d_H(Q.evaluate(xi))


def test_divergence_squared_through_forms_is_zero():
    rng = random.Random(35)
    ctx = Context(n=3, m=2)
    Q = rand_morphism(rng, ctx, 2, 0)
    xi = formal_field(ctx)
    once = d_H(Q.evaluate(xi))
    assert d_H(once).is_zero()


def test_divergence_requires_rank0():
    ctx = Context(n=2, m=1)
    with pytest.raises(ValueError):
        divergence(generic_morphism(ctx, 1, 1))


def test_morphism_from_evaluation_roundtrip():
    rng = random.Random(36)
    ctx = Context(n=2, m=2)
    V = rand_morphism(rng, ctx, 1, 2)
    xi = formal_field(ctx)
    V2 = morphism_from_evaluation(V.evaluate(xi), 1)
    assert V2.evaluate(xi) == V.evaluate(xi)


# -- Prop Da ----------------------------------------------------------------------------

def test_alpha_displayed_coefficients_and_lepage_identities():
    rng = random.Random(37)
    for (n, m) in [(2, 1), (3, 2), (2, 2)]:
        ctx = Context(n=n, m=m)
        for V in [generic_morphism(ctx, 1, 2, order=-1),
                  rand_morphism(rng, ctx, 1, 2)]:
            like = split_like(V)
            canon = split_canonical_codegree_s(V)
            alpha, dalpha = alpha_discrepancy(V)
            xi = formal_field(ctx)
            # eq:Lepage
            assert (like.boundary - (canon.boundary + alpha)).is_zero()
            assert (like.volume.evaluate(xi)
                    - canon.volume.evaluate(xi) + dalpha.evaluate(xi)).is_zero()
            # displayed alpha: -1/6 d_a A^{[i1i2]a} and -1/6 A^{[i1i2]a}
            for block in itertools.combinations(range(1, n + 1), 2):
                for sigma in range(1, m + 1):
                    acc = Scalar.zero()
                    for a in range(1, n + 1):
                        acc = acc + se.total_derivative(
                            V.antisym_value(block, sigma, (a,)), a)
                    assert alpha.value(block, sigma, ()) == acc * Fraction(-1, 6)
                    for a in range(1, n + 1):
                        assert alpha.value(block, sigma, (a,)) == \
                            V.antisym_value(block, sigma, (a,)) * Fraction(-1, 6)
            # -D(alpha) leading coefficient: 1/3 d_b d_a A^{[ib]a}
            for i in range(1, n + 1):
                for sigma in range(1, m + 1):
                    acc = Scalar.zero()
                    for a in range(1, n + 1):
                        for b in range(1, n + 1):
                            acc = acc + se.total_derivative(se.total_derivative(
                                V.antisym_value((i, b), sigma, (a,)), a), b)
                    assert dalpha.value((i,), sigma, ()) == acc * Fraction(-1, 3)


def test_alpha_vanishes_for_fully_symmetric_coefficients():
    ctx = Context(n=2, m=1)
    V = VariationalMorphism(ctx, 1)
    for i in range(1, 3):
        for h in range(3):
            for Js in itertools.product(range(1, 3), repeat=h):
                key = tuple(sorted((i,) + Js))
                V.add((i,), 1, Js, se.opaque("S", (h,) + key, n=2, m=1, order=-1))
    alpha, dalpha = alpha_discrepancy(V)
    assert alpha.is_zero()
    assert dalpha.is_zero()


def test_alpha_requires_rank2_codegree1():
    ctx = Context(n=2, m=1)
    with pytest.raises(UnsupportedCase):
        alpha_discrepancy(generic_morphism(ctx, 0, 2))
