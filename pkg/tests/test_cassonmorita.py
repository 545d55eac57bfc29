"""Linking-symbol algebra, Morita's twist value, the reduction, evaluation."""

import random

import pytest

from bcjcalc import surface as sf
from bcjcalc.bcjmap import sigma_separating
from bcjcalc.boolring import BoolPoly, bar, evaluate
from bcjcalc.cassonmorita import (
    CMPoly,
    LinkingMatrix,
    cm_generator,
    cmpoly_from_json,
    cmpoly_to_json,
    epsilon,
    mu,
    mu_quadratic_exhaustive,
    n_symbols,
    rho_separating,
    selflink_eval,
    verify_diagrams,
)
from bcjcalc.errors import ConsistencyError, GenusMismatchError
from bcjcalc.surface import ZHClass, ZSubsurfaceBasis, random_z_symplectic_basis


def sym(g, p, q, coeff=1):
    return CMPoly.symbol(g, p, q, coeff)


def random_zclass(g, rng, bound=2):
    return ZHClass(g, tuple(rng.randint(-bound, bound) for _ in range(2 * g)))


class TestCMPoly:
    def test_symbol_count_formula(self):
        for g in range(1, 6):
            n = 2 * g
            count = n + n * (n - 1) // 2
            assert n_symbols(g) == count == 2 * g * g + g

    def test_normal_form_rejects_disorder(self):
        with pytest.raises(ValueError):
            CMPoly.symbol(2, 3, 1)

    def test_mul_identity_and_zero(self):
        g = 2
        x = sym(g, 0, 2) + CMPoly.const(g, 3)
        assert x * CMPoly.one(g) == x
        assert x + (-x) == CMPoly.zero(g)

    def test_squares_do_not_collapse(self):
        g = 1
        laa = sym(g, 0, 0)
        sq = laa * laa
        assert sq.terms == {((0, 0), (0, 0)): 1}
        assert sq != laa

    def test_commutative_associative(self):
        rng = random.Random(1)
        g = 2
        for _ in range(50):
            def rp():
                acc = CMPoly.const(g, rng.randint(-2, 2))
                for _ in range(rng.randint(0, 3)):
                    p = rng.randint(0, 3)
                    q = rng.randint(p, 3)
                    acc = acc + sym(g, p, q, rng.randint(-2, 2))
                return acc

            x, y, z = rp(), rp(), rp()
            assert x * y == y * x
            assert (x * y) * z == x * (y * z)
            assert x * (y + z) == x * y + x * z

    def test_big_coefficients(self):
        g = 1
        x = sym(g, 0, 1, 10**15)
        assert (x * x).terms[((0, 1), (0, 1))] == 10**30

    def test_render(self):
        g = 1
        x = -sym(g, 0, 0) * sym(g, 1, 1) + sym(g, 0, 1) * sym(g, 0, 1) + sym(g, 0, 1)
        assert str(x) == "l(a1,b1) - l(a1,a1)*l(b1,b1) + l(a1,b1)^2"

    def test_genus_mismatch(self):
        with pytest.raises(GenusMismatchError):
            CMPoly.one(1) + CMPoly.one(2)


class TestCMGenerator:
    def test_swap_creates_constant(self):
        g = 1
        got = cm_generator(sf.zb(g, 1), sf.za(g, 1))
        assert got == sym(g, 0, 1) + CMPoly.one(g)

    def test_bilinear(self):
        g = 2
        got = cm_generator(sf.za(g, 1) + sf.za(g, 2), sf.zb(g, 1))
        assert got == sym(g, 0, 2) + sym(g, 1, 2)

    def test_quadratic_expansion(self):
        g = 1
        u = ZHClass(g, (1, 1))
        got = cm_generator(u, u)
        want = sym(g, 0, 0) + sym(g, 1, 1) + sym(g, 0, 1, 2) + CMPoly.one(g)
        assert got == want

    def test_swap_relation_confluent(self):
        # expanding l(u,v) and l(v,u) + u.v gives identical normal forms
        rng = random.Random(2)
        for _ in range(300):
            g = rng.randint(1, 3)
            u, v = random_zclass(g, rng), random_zclass(g, rng)
            lhs = cm_generator(v, u)
            rhs = cm_generator(u, v) + CMPoly.const(g, sf.intersect(u, v))
            assert lhs == rhs

    def test_basis_pairs_exhaustive(self):
        g = 2
        for p in range(2 * g):
            for q in range(2 * g):
                ep = ZHClass(g, tuple(1 if k == p else 0 for k in range(2 * g)))
                eq = ZHClass(g, tuple(1 if k == q else 0 for k in range(2 * g)))
                got = cm_generator(ep, eq)
                if p <= q:
                    assert got == sym(g, p, q)
                else:
                    pairing = 1 if p == q + g else 0
                    assert got == sym(g, q, p) + CMPoly.const(g, pairing)


class TestRho:
    def test_genus_one_worked(self):
        g = 1
        basis = ZSubsurfaceBasis.standard(g, [1])
        got = rho_separating(basis)
        want = -(sym(g, 0, 0) * sym(g, 1, 1)) + sym(g, 0, 1) * sym(g, 0, 1) + sym(g, 0, 1)
        assert got == want

    def test_empty_basis(self):
        assert rho_separating(ZSubsurfaceBasis(2, ())) == CMPoly.zero(2)

    def test_cross_terms_even(self):
        # the i<j sum enters with an explicit factor of 2: strip the i-terms
        # and everything left must have even coefficients
        rng = random.Random(3)
        g = 3
        for _ in range(20):
            basis = random_z_symplectic_basis(g, 2, rng, [1, 3])
            full = rho_separating(basis)
            diag = CMPoly.zero(g)
            for A, B in basis.pairs:
                diag = diag - (
                    cm_generator(A, A) * cm_generator(B, B)
                    - cm_generator(A, B) * cm_generator(B, A)
                )
            rest = full - diag
            assert all(c % 2 == 0 for c in rest.terms.values())

    def test_invalid_basis_rejected(self):
        from bcjcalc.errors import BasisError

        bad = ZSubsurfaceBasis(1, ((sf.za(1, 1), sf.za(1, 1)),))
        with pytest.raises(BasisError):
            rho_separating(bad)


class TestMu:
    def test_table_values(self):
        g = 2
        assert mu(sym(g, 0, 0)) == BoolPoly.variable(g, 0)      # l(a1,a1) -> abar1
        assert mu(sym(g, 2, 2)) == BoolPoly.variable(g, 2)      # l(b1,b1) -> bbar1
        assert mu(sym(g, 0, 3)) == BoolPoly.zero(g)             # l(a1,b2) -> 0
        assert mu(sym(g, 0, 1)) == BoolPoly.zero(g)             # l(a1,a2) -> 0
        assert mu(sym(g, 2, 3)) == BoolPoly.zero(g)             # l(b1,b2) -> 0

    def test_swap_symbol_reduces_to_one(self):
        g = 2
        assert mu(cm_generator(sf.zb(g, 1), sf.za(g, 1))) == BoolPoly.one(g)

    def test_even_coefficients_die(self):
        g = 1
        assert mu(sym(g, 0, 0, 2)) == BoolPoly.zero(g)
        assert mu(CMPoly.const(g, 4)) == BoolPoly.zero(g)

    def test_is_ring_hom(self):
        rng = random.Random(4)
        g = 2
        for _ in range(100):
            def rp():
                acc = CMPoly.const(g, rng.randint(-2, 2))
                for _ in range(rng.randint(0, 3)):
                    p = rng.randint(0, 3)
                    q = rng.randint(p, 3)
                    acc = acc + sym(g, p, q, rng.randint(-2, 2))
                return acc

            x, y = rp(), rp()
            assert mu(x + y) == mu(x) + mu(y)
            assert mu(x * y) == mu(x) * mu(y)

    def test_quadratic_identity_exhaustive_small(self):
        assert mu_quadratic_exhaustive(1) == []
        assert mu_quadratic_exhaustive(2) == []

    def test_mixed_product_vanishes(self):
        # mu kills l(A,B) l(B,A) whenever A.B = 1
        rng = random.Random(5)
        g = 2
        count = 0
        while count < 50:
            A, B = random_zclass(g, rng), random_zclass(g, rng)
            if sf.intersect(A, B) != 1:
                continue
            count += 1
            assert mu(cm_generator(A, B) * cm_generator(B, A)) == BoolPoly.zero(g)

    def test_triangle_on_worked_example(self):
        g = 1
        rho = rho_separating(ZSubsurfaceBasis.standard(g, [1]))
        assert mu(rho) == BoolPoly(g, {0b11})
        assert mu(rho) == sigma_separating(sf.SubsurfaceBasis.standard(g, [1]))

    def test_b2_surjectivity_through_simple_monomials(self):
        # 1, the diagonal symbols, and their products hit every basis monomial
        from bcjcalc.boolring import b2_basis

        g = 3
        basis = b2_basis(g)
        images = {mu(CMPoly.one(g))}
        for k in range(2 * g):
            images.add(mu(sym(g, k, k)))
            for l in range(2 * g):
                images.add(mu(sym(g, k, k) * sym(g, l, l)))
        got_masks = set()
        for p in images:
            if len(p.masks) == 1:
                got_masks |= p.masks
        assert got_masks == {m.mask for m in basis.monomials}


class TestLinkingMatrix:
    def test_standard_model_valid(self):
        L = LinkingMatrix.standard_model(2)
        assert L.entry(2, 0) == 1  # lk(b1, a1+) = 1
        assert L.entry(0, 2) == 0

    def test_invalid_named_entry(self):
        rows = [[0, 0], [0, 0]]  # misses L[b1][a1] - L[a1][b1] = 1
        with pytest.raises(ConsistencyError) as err:
            LinkingMatrix.from_rows(1, rows)
        assert "a1" in str(err.value) and "b1" in str(err.value)

    def test_random_valid(self):
        rng = random.Random(6)
        for g in (1, 2, 3):
            for _ in range(20):
                LinkingMatrix.random_valid(g, rng)  # constructor validates

    def test_epsilon_is_ring_hom(self):
        rng = random.Random(7)
        g = 2
        L = LinkingMatrix.random_valid(g, rng)
        for _ in range(50):
            def rp():
                acc = CMPoly.const(g, rng.randint(-2, 2))
                for _ in range(rng.randint(0, 3)):
                    p = rng.randint(0, 3)
                    q = rng.randint(p, 3)
                    acc = acc + sym(g, p, q, rng.randint(-2, 2))
                return acc

            x, y = rp(), rp()
            assert epsilon(L, x * y) == epsilon(L, x) * epsilon(L, y)
            assert epsilon(L, x + y) == epsilon(L, x) + epsilon(L, y)

    def test_epsilon_respects_swap_relation(self):
        rng = random.Random(8)
        for g in (1, 2):
            L = LinkingMatrix.random_valid(g, rng)
            for p in range(2 * g):
                for q in range(2 * g):
                    ep = ZHClass(g, tuple(1 if k == p else 0 for k in range(2 * g)))
                    eq = ZHClass(g, tuple(1 if k == q else 0 for k in range(2 * g)))
                    lhs = epsilon(L, cm_generator(eq, ep))
                    rhs = epsilon(L, cm_generator(ep, eq)) + sf.intersect(ep, eq)
                    assert lhs == rhs

    def test_epsilon_standard_on_rho(self):
        g = 1
        rho = rho_separating(ZSubsurfaceBasis.standard(g, [1]))
        assert epsilon(LinkingMatrix.standard_model(g), rho) == 0

    def test_selflink_eval_is_quadratic_form(self):
        rng = random.Random(9)
        g = 2
        for _ in range(10):
            L = LinkingMatrix.random_valid(g, rng)
            for bits in range(1 << (2 * g)):
                u = sf.HClass(g, bits)
                coords = [(bits >> k) & 1 for k in range(2 * g)]
                quad = 0
                for p in range(2 * g):
                    for q in range(2 * g):
                        quad += coords[p] * L.entry(p, q) * coords[q]
                assert selflink_eval(L, bar(u)) == quad % 2

    def test_json_roundtrip(self):
        L = LinkingMatrix.standard_model(2)
        assert LinkingMatrix.from_json(L.to_json()) == L


class TestDiagrams:
    def test_verify_passes_g2(self):
        report = verify_diagrams(2, 120, seed=7)
        assert report["all_passed"], report

    def test_verify_passes_g1(self):
        report = verify_diagrams(1, 60, seed=8)
        assert report["all_passed"], report

    def test_triangle_direct(self):
        rng = random.Random(10)
        for g in (1, 2, 3):
            for _ in range(40):
                h = rng.randint(1, min(g, 3))
                handles = sorted(rng.sample(range(1, g + 1), h))
                zbasis = random_z_symplectic_basis(g, h, rng, handles)
                assert mu(rho_separating(zbasis)) == sigma_separating(zbasis.mod2())

    def test_right_square_direct(self):
        rng = random.Random(11)
        g = 2
        for _ in range(60):
            zbasis = random_z_symplectic_basis(g, rng.randint(1, 2), rng)
            L = LinkingMatrix.random_valid(g, rng)
            assert epsilon(L, rho_separating(zbasis)) & 1 == selflink_eval(
                L, sigma_separating(zbasis.mod2())
            )

    def test_right_square_fails_on_off_diagonal_generator(self):
        # documents why commutativity is only claimed on im(rho) and l(u,u):
        # an off-diagonal symbol with odd value breaks it
        g = 1
        rows = [[0, 1], [2, 0]]  # L[a1][b1] = 1 (odd), constraint holds: 2-1=1
        L = LinkingMatrix.from_rows(g, rows)
        x = sym(g, 0, 1)  # l(a1, b1)
        assert epsilon(L, x) & 1 == 1
        assert evaluate(mu(x), L.omega()) == 0


class TestCMJson:
    def test_roundtrip(self):
        g = 2
        x = rho_separating(ZSubsurfaceBasis.standard(g, [1, 2]))
        assert cmpoly_from_json(g, cmpoly_to_json(x)) == x
