import random
from fractions import Fraction

import pytest

from jetform import symexpr as se
from jetform.forms import (Context, ds_block, dx, exterior_d, omega, p_k,
                           volume, wedge, wedge_all)
from jetform.lepage import (Lagrangian, UnsupportedOrder, euler_lagrange,
                            generic_lagrangian, kb_second_order,
                            krupka_betounes_first, lepage_check,
                            poincare_cartan, rossi_recurrence)
from jetform.randomgen import rand_density
from jetform.symexpr import Scalar

CTX21 = Context(n=2, m=1)
CTX22 = Context(n=2, m=2)
CTX11 = Context(n=1, m=1)


def dirichlet():
    return Lagrangian(CTX21, 1, se.rational(1, 2) * (se.y(1, 1) ** 2 + se.y(1, 2) ** 2))


def null_lagrangian():
    return Lagrangian(CTX22, 1, se.y(1, 1) * se.y(2, 2) - se.y(1, 2) * se.y(2, 1))


def beam():
    return Lagrangian(CTX11, 2, se.rational(1, 2) * se.y(1, 1, 1) ** 2)


# -- Lagrangian type ---------------------------------------------------------------

def test_order_validation():
    with pytest.raises(UnsupportedOrder):
        Lagrangian(CTX11, 3, se.y(1))
    with pytest.raises(ValueError):
        Lagrangian(CTX11, 1, se.y(1, 1, 1))


# -- Poincare-Cartan ----------------------------------------------------------------

def test_pc_free_particle():
    lam = Lagrangian(CTX11, 1, se.rational(1, 2) * se.y(1, 1) ** 2)
    theta = poincare_cartan(lam)
    assert theta == lam.form() + omega(CTX11, 1).scale(se.y(1, 1))


def test_pc_dirichlet():
    lam = dirichlet()
    theta = poincare_cartan(lam)
    expect = lam.form() \
        + wedge(omega(CTX21, 1), ds_block(CTX21, (1,))).scale(se.y(1, 1)) \
        + wedge(omega(CTX21, 1), ds_block(CTX21, (2,))).scale(se.y(1, 2))
    assert theta == expect


def test_pc_second_order_beam():
    theta = poincare_cartan(beam())
    expect = beam().form() + omega(CTX11, 1).scale(-se.y(1, 1, 1, 1)) \
        + omega(CTX11, 1, 1).scale(se.y(1, 1, 1))
    assert theta == expect


def test_pc_closed_form_agrees_generic():
    for (n, m, order) in [(2, 2, 1), (2, 1, 2), (3, 1, 2)]:
        lam = generic_lagrangian(Context(n=n, m=m), order)
        poincare_cartan(lam)  # raises internally on mismatch with chart form


# -- Euler-Lagrange -------------------------------------------------------------------

def test_el_dirichlet():
    got = euler_lagrange(dirichlet())
    expect = wedge(omega(CTX21, 1), volume(CTX21)).scale(
        Scalar.zero() - se.y(1, 1, 1) - se.y(1, 2, 2))
    assert got == expect


def test_el_beam():
    got = euler_lagrange(beam())
    assert got == wedge(omega(CTX11, 1), dx(CTX11, 1)).scale(se.y(1, 1, 1, 1, 1))


def test_el_null_lagrangian_vanishes():
    assert euler_lagrange(null_lagrangian()).is_zero()


def test_el_total_divergence_invariance():
    # adding d_H of a horizontal (n-1)-form leaves the source form unchanged
    rng = random.Random(41)
    lam = dirichlet()
    from jetform.forms import d_H
    from jetform.randomgen import rand_scalar
    corr = d_H(ds_block(CTX21, (1,)).scale(rand_scalar(rng, CTX21, 0, degree=2)))
    [(w, c)] = corr.terms.items()
    lam2 = Lagrangian(CTX21, 1, lam.density + c)
    assert euler_lagrange(lam2) == euler_lagrange(lam)


# -- the recurrence -------------------------------------------------------------------

def test_chain_for_mechanics_is_theta_only():
    lam = Lagrangian(CTX11, 1, se.y(1, 1) ** 2)
    chain = rossi_recurrence(lam)
    assert len(chain.forms) == 1
    assert chain.terminal == poincare_cartan(lam)


def test_chain_stabilizes_for_single_field():
    # m = 1, first order: the 2-contact correction dies on a repeated field
    lam = dirichlet()
    chain = rossi_recurrence(lam)
    assert len(chain.forms) == 2
    assert chain.forms[1] == chain.forms[0]


def test_null_lagrangian_rho2_is_closed():
    chain = rossi_recurrence(null_lagrangian())
    rho2 = chain.terminal
    assert rho2 == krupka_betounes_first(null_lagrangian())
    assert exterior_d(rho2).is_zero()
    assert rho2 == poincare_cartan(null_lagrangian()) + wedge(omega(CTX22, 1), omega(CTX22, 2))


def test_chain_invariants_randomized():
    rng = random.Random(42)
    for (n, m) in [(2, 2), (3, 2)]:
        ctx = Context(n=n, m=m)
        lam = Lagrangian(ctx, 1, rand_density(rng, ctx, 1))
        chain = rossi_recurrence(lam)
        assert len(chain.forms) == n
        for rho in chain.forms:
            assert p_k(rho, 0) == lam.form()            # h(rho_q) = lambda
        for q in range(1, len(chain.forms)):
            for j in range(q):                          # lower grades frozen
                assert p_k(chain.forms[q], j) == p_k(chain.forms[q - 1], j)


def test_kb_first_matches_recurrence():
    rng = random.Random(43)
    for (n, m) in [(2, 1), (2, 2), (3, 2)]:
        ctx = Context(n=n, m=m)
        for _ in range(2):
            lam = Lagrangian(ctx, 1, rand_density(rng, ctx, 1))
            assert rossi_recurrence(lam).terminal == krupka_betounes_first(lam)


def test_kb_first_generic_density():
    for (n, m) in [(2, 2), (3, 1)]:
        lam = generic_lagrangian(Context(n=n, m=m), 1)
        assert rossi_recurrence(lam).terminal == krupka_betounes_first(lam)


def test_kb_first_without_velocities_is_lambda():
    lam = Lagrangian(CTX22, 1, se.x(1) * se.y(1) ** 2)
    assert krupka_betounes_first(lam) == lam.form()


def test_kb_first_equals_theta_for_single_field():
    lam = dirichlet()
    assert krupka_betounes_first(lam) == poincare_cartan(lam)


# -- second order ------------------------------------------------------------------------

def displayed_rho2(lam):
    ctx = lam.ctx
    n, m = ctx.n, ctx.m
    expect = lam.form()
    for sig in range(1, m + 1):
        for i in range(1, n + 1):
            expect = expect + wedge(omega(ctx, sig), ds_block(ctx, (i,))).scale(lam.f1(sig, i))
            for j in range(1, n + 1):
                expect = expect + wedge(omega(ctx, sig, j),
                                        ds_block(ctx, (i,))).scale(lam.p2(sig, i, j))
    for s1 in range(1, m + 1):
        for i1 in range(1, n + 1):
            for s2 in range(1, m + 1):
                for i2 in range(1, n + 1):
                    for j2 in range(1, n + 1):
                        c = se.partial(lam.p2(s2, i2, j2), ('y', s1, (i1,)))
                        term = wedge_all(omega(ctx, s1), omega(ctx, s2, j2),
                                         ds_block(ctx, (i1, i2)))
                        expect = expect + term.scale(c * Fraction(1, 2))
    return expect


def test_rho2_matches_displayed_formula():
    for (n, m) in [(2, 1), (2, 2), (3, 1)]:
        lam = generic_lagrangian(Context(n=n, m=m), 2)
        chain = rossi_recurrence(lam)
        assert chain.forms[1] == displayed_rho2(lam)


def test_kb_second_plain_matches_recurrence():
    rng = random.Random(44)
    for (n, m) in [(2, 1), (2, 2)]:
        ctx = Context(n=n, m=m)
        lam = generic_lagrangian(ctx, 2)
        assert rossi_recurrence(lam).terminal == kb_second_order(lam, "plain")
        lamr = Lagrangian(ctx, 2, rand_density(rng, ctx, 2))
        assert rossi_recurrence(lamr).terminal == kb_second_order(lamr, "plain")
    ctx = Context(n=3, m=2)
    dens = se.y(1, 1, 1) * se.y(2, 2) * se.y(1, 3) + se.y(2, 1, 2) * se.y(1, 2) \
        + se.y(1, 2, 3) * se.y(2, 3) * se.y(2, 1)
    lam = Lagrangian(ctx, 2, dens)
    assert rossi_recurrence(lam).terminal == kb_second_order(lam, "plain")


def test_kb_second_generalized_reduces_to_first_order():
    rng = random.Random(45)
    for (n, m) in [(2, 2), (3, 2), (3, 3)]:
        ctx = Context(n=n, m=m)
        d1 = rand_density(rng, ctx, 1)
        assert kb_second_order(Lagrangian(ctx, 2, d1), "generalized") == \
            krupka_betounes_first(Lagrangian(ctx, 1, d1))
    lam1 = generic_lagrangian(CTX22, 1)
    assert kb_second_order(Lagrangian(CTX22, 2, lam1.density), "generalized") == \
        krupka_betounes_first(lam1)


def test_kb_second_n1_both_variants_are_theta():
    lam = beam()
    theta = poincare_cartan(lam)
    assert kb_second_order(lam, "plain") == theta
    assert kb_second_order(lam, "generalized") == theta


def test_kb_second_biharmonic_has_theta_shape_only():
    # L = 1/2 (u_11 + u_22)^2 has no first-order coordinates: the mixed
    # q = 2 coefficient vanishes and only theta-type terms remain
    lam = Lagrangian(CTX21, 2, se.rational(1, 2) * (se.y(1, 1, 1) + se.y(1, 2, 2)) ** 2)
    rho = kb_second_order(lam, "plain")
    assert rho == poincare_cartan(lam)


def test_kb_second_rejects_wrong_order():
    with pytest.raises(UnsupportedOrder):
        kb_second_order(dirichlet(), "plain")
    with pytest.raises(UnsupportedOrder):
        krupka_betounes_first(beam())
    with pytest.raises(ValueError):
        kb_second_order(beam(), "fancy")


# -- lepage_check ---------------------------------------------------------------------

def test_lepage_check_passes_for_equivalents():
    lam = dirichlet()
    for rho in [poincare_cartan(lam), krupka_betounes_first(lam)]:
        rep = lepage_check(rho, lam)
        assert rep.ok
    lam2 = null_lagrangian()
    assert lepage_check(krupka_betounes_first(lam2), lam2).ok
    lam3 = beam()
    assert lepage_check(kb_second_order(lam3, "plain"), lam3).ok


def test_lepage_check_fails_for_bare_lambda():
    lam = dirichlet()
    rep = lepage_check(lam.form(), lam)
    assert rep.horizontal_ok
    assert not rep.source_ok
    assert not rep.source_diff.is_zero()
