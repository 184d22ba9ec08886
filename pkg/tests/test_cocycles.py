import math
from fractions import Fraction

import pytest

from bernlab.bump import BumpCocycle, build_special
from bernlab.cocycles import (
    cocycle_coeff,
    norm_sq,
    norm_sq_bruteforce,
    support_elements,
)
from bernlab.folner import build_folner, enum_z
from bernlab.groups import FreeGroup, Integers, ball, inv, mul, parse_element
from bernlab.marginals import (
    ActionSpec,
    DecreasingSequence,
    SpecError,
    SpecialCocycle,
    WSplit,
    ZSequence,
    make_folner_family,
)

F2 = FreeGroup(2)


def w(text):
    return parse_element(F2, text)


def wsplit_spec(p_a="3/5", p_b="2/5", p_w="1/2"):
    return ActionSpec(F2, WSplit(Fraction(p_a), Fraction(p_b), Fraction(p_w)),
                      delta=Fraction(1, 3))


def zseq_spec(m=1):
    seq = DecreasingSequence("inv_sqrt", scale=Fraction(1, 6))
    return ActionSpec(Integers(), ZSequence(Fraction(1, 2), 1, seq),
                      multiplicity=m, delta=Fraction(1, 3))


class TestCoefficients:
    def test_generator_deltas(self):
        spec = wsplit_spec()
        assert cocycle_coeff(spec, w("a"), w("a")) == Fraction(1, 10)
        assert cocycle_coeff(spec, w("b"), w("b")) == Fraction(-1, 10)
        assert cocycle_coeff(spec, w("a"), w("b")) == 0

    def test_identity_element(self):
        spec = wsplit_spec()
        for h in ball(F2, 2):
            assert cocycle_coeff(spec, w("e"), h) == 0

    def test_cocycle_identity(self):
        # c_{gh}(x) = c_g(x) + c_h(g^-1 x), exact rationals; the lhs goes
        # through the reduced product word (the full grid runs in the
        # acceptance suite)
        spec = wsplit_spec()
        small = list(ball(F2, 2))
        grid = list(ball(F2, 4))
        for g in small:
            gi = inv(g)
            for h in small:
                gh = mul(g, h)
                for x in grid:
                    lhs = cocycle_coeff(spec, gh, x)
                    rhs = cocycle_coeff(spec, g, x) + cocycle_coeff(
                        spec, h, mul(gi, x))
                    assert lhs == rhs


class TestWSplitNorm:
    def test_spot_values(self):
        spec = wsplit_spec()
        assert norm_sq(spec, w("a")).exact == Fraction(1, 100)
        assert norm_sq(spec, w("a b^-1 a")).exact == Fraction(5, 100)
        assert norm_sq(spec, w("a b^-1")).exact == Fraction(4, 100)
        assert norm_sq(spec, w("e")).exact == 0

    def test_oracle_spot(self):
        spec = wsplit_spec()
        assert norm_sq_bruteforce(spec, w("a b^-1"), 4).exact == Fraction(1, 25)

    def test_512_variant_against_oracle(self):
        spec = wsplit_spec(p_b="5/12")
        for g in ball(F2, 3):
            assert norm_sq(spec, g).exact == norm_sq_bruteforce(spec, g, 3).exact

    def test_multiplicity_scales(self):
        s1, s5 = wsplit_spec(), ActionSpec(
            F2, WSplit(Fraction(3, 5), Fraction(2, 5), Fraction(1, 2)),
            multiplicity=5, delta=Fraction(1, 3))
        g = w("a b^-1 a")
        assert norm_sq(s5, g).exact == 5 * norm_sq(s1, g).exact

    def test_inverse_symmetry(self):
        spec = wsplit_spec()
        for g in ball(F2, 5):
            assert norm_sq(spec, g).exact == norm_sq(spec, inv(g)).exact


class TestZSequenceNorm:
    def test_k1_bracket(self):
        nv = norm_sq(zseq_spec(), 1, tol=1e-9)
        assert 1 / 36 <= nv.upper and nv.lower <= 1 / 18

    def test_sandwich(self):
        # sum_{n<k} a_n^2 <= ||c_k||^2 <= 2 sum_{n<k} a_n^2
        spec = zseq_spec()
        for k in (1, 2, 5, 17, 100, 1000):
            lo = sum((1 / 36) / (j + 1) for j in range(k))
            nv = norm_sq(spec, k, tol=1e-6)
            assert nv.upper >= lo * (1 - 1e-12)
            assert nv.lower <= 2 * lo * (1 + 1e-12)

    def test_oracle_agreement(self):
        spec = zseq_spec()
        for k in (1, 3, 10, 25):
            nv = norm_sq(spec, k, tol=1e-6)
            ov = norm_sq_bruteforce(spec, k, 400)
            assert abs(nv.value - ov.value) <= nv.err + ov.err + 1e-12

    def test_inverse_symmetry(self):
        spec = zseq_spec()
        for k in range(1, 51):
            a, b = norm_sq(spec, k, tol=1e-6), norm_sq(spec, -k, tol=1e-6)
            assert abs(a.value - b.value) <= a.err + b.err + 1e-12

    def test_bad_tol(self):
        with pytest.raises(SpecError):
            norm_sq(zseq_spec(), 3, tol=0.0)


class TestBumpCocycle:
    def test_bump_layout(self):
        bc = BumpCocycle(1)
        # delta = 1/144: a_n = ceil(n^2/144) stays 1 until n = 13
        bc.ensure_bumps(20)
        assert list(bc._a[:5]) == [1, 1, 1, 1, 1]
        assert bc._a[13] == 2
        assert bc.h_exact(0) == 0
        assert bc.h_exact(1) == 1
        assert bc.h_exact(2) == 0
        assert bc.h_exact(3) == 1

    def test_gamma_lower_bound(self):
        for D in (Fraction(1, 2), Fraction(1), Fraction(36)):
            bc = build_special(D)
            for k in (1, 2, 7, 32, 128):
                lo, hi = bc.gamma_norm_sq_bounds(k)
                assert lo >= float(D) * k ** 1.5
                assert hi >= lo

    def test_gamma_pointwise_oracle(self):
        bc = BumpCocycle(Fraction(1, 2))
        for k in (1, 3, 10):
            lo, hi = bc.gamma_norm_sq_bounds(k)
            n_bumps = bc.default_bumps(k)
            bc.ensure_bumps(n_bumps)
            end = int(bc._b[n_bumps])
            brute = sum(
                (float(bc.h_exact(n)) - float(bc.h_exact(n - k))) ** 2
                for n in range(1, end)
            )
            assert lo <= brute * (1 + 1e-9) + 1e-12
            assert brute <= hi


@pytest.fixture(scope="module")
def spec():
    fam = SpecialCocycle(Fraction(1), Fraction(1, 2), Fraction(1, 4))
    return ActionSpec(F2, fam.with_cocycle(), delta=Fraction(1, 4))


class TestSpecialNorm:
    def test_oracle_agreement(self, spec):
        for text in ("a", "b^-1", "a b^-1", "a^2 b^-3", "a b a^-1"):
            g = w(text)
            nv = norm_sq(spec, g)
            ov = norm_sq_bruteforce(spec, g, 3000)
            assert abs(nv.value - ov.value) <= nv.err + ov.err

    def test_linear_growth(self, spec):
        from bernlab.groups import word_length

        D = float(spec.family.D)
        for g in ball(F2, 4):
            L = word_length(g)
            if L:
                assert norm_sq(spec, g).lower >= (D / 16) * L * (1 - 1e-9)


@pytest.fixture(scope="module")
def fc():
    return build_folner(lambda k: math.log(1.0 + k), horizon=128, delta=0.5)


class TestFolner:
    def test_norm_below_phi(self, fc):
        for k in range(1, 129):
            assert math.sqrt(fc.norm_sq_closed(enum_z(k))) <= math.log(1 + k)

    def test_conditions(self, fc):
        rep = fc.conditions_report()
        assert rep["sum_condition"] and rep["symmetric_difference_condition"]

    def test_f_codomain(self, fc):
        assert all(0 < v < 0.5 for v in fc.values[1:])
        assert fc.f(0) == 0.0
        assert fc.f(fc.starts[0]) == fc.values[1]

    def test_closed_vs_oracle(self):
        fam = make_folner_family(phi_kind="sqrt_log", phi_scale=Fraction(1, 16),
                                 horizon=64, offset=Fraction(1, 2), delta_f=1 / 6)
        spec = ActionSpec(Integers(), fam, delta=Fraction(1, 3))
        for s in (1, 2, 7, 40, 150, 260):
            nv = norm_sq(spec, s)
            ov = norm_sq_bruteforce(spec, s, max(s, 8))
            assert abs(nv.value - ov.value) <= nv.err + ov.err + 1e-12


class TestSupport:
    def test_wsplit_support_covers_cocycle(self):
        spec = wsplit_spec()
        g = w("a b^-1")
        supp = set(support_elements(spec, g, 0))
        for h in ball(F2, 4):
            if cocycle_coeff(spec, g, h) != 0:
                assert h in supp

    def test_no_duplicates(self):
        fam = SpecialCocycle(Fraction(1), Fraction(1, 2), Fraction(1, 4))
        spec = ActionSpec(F2, fam.with_cocycle(), delta=Fraction(1, 4))
        pts = list(support_elements(spec, w("a b"), 50))
        assert len(pts) == len(set(pts))

    def test_radius_too_small(self):
        with pytest.raises(SpecError):
            norm_sq_bruteforce(wsplit_spec(), w("a b a"), 2)
