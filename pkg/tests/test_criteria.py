import math
from fractions import Fraction

import pytest

from bernlab.cli import preset
from bernlab.criteria import (
    auto_kappa,
    classify_conservativity,
    criterion_partial_sums,
    hellinger_product,
    kappa0,
    kesten_norm,
    mc_omega,
    negsq_product,
    nonamenability_check,
    rn_sample,
    verify_certificate,
    witness_partial_sum,
)
from bernlab.cocycles import norm_sq
from bernlab.groups import parse_element
from bernlab.marginals import SpecError


def g_of(spec, text):
    return parse_element(spec.group, text)


class TestThreshold:
    def test_kappa0_value(self):
        assert kappa0(Fraction(1, 3)) == Fraction(63, 4)
        assert float(kappa0(Fraction(1, 3))) == 15.75
        assert auto_kappa(Fraction(1, 3)) == 16

    def test_kappa0_half(self):
        assert kappa0(Fraction(1, 2)) == 12

    def test_bad_delta(self):
        with pytest.raises(SpecError):
            kappa0(Fraction(2, 3))


class TestVerdicts:
    def test_wsplit_m1_not_dissipative(self):
        v = classify_conservativity(preset("f2-wsplit"))
        assert v.verdict != "Dissipative"
        assert verify_certificate(v)

    def test_wsplit_m220_dissipative(self):
        v = classify_conservativity(preset("f2-wsplit", power=220))
        assert v.verdict == "Dissipative"
        assert v.evidence["rho"] == pytest.approx(3 * math.exp(-1.1))
        assert verify_certificate(v)

    def test_zseq_m1_conservative(self):
        v = classify_conservativity(preset("explicit-z-sqrt6"))
        assert v.verdict == "Conservative"
        assert v.evidence["exponent"] == pytest.approx(8 / 9)
        assert verify_certificate(v)

    def test_zseq_m73_dissipative(self):
        v = classify_conservativity(preset("explicit-z-sqrt6", power=73))
        assert v.verdict == "Dissipative"
        assert v.evidence["exponent"] == pytest.approx(73 / 72)
        assert verify_certificate(v)

    def test_special_d36_dissipative(self):
        v = classify_conservativity(preset("f2-dissipative(36)"))
        assert v.verdict == "Dissipative"
        assert v.evidence["rho"] < 1

    def test_explicit_z_conservative(self):
        v = classify_conservativity(preset("explicit-z"))
        assert v.verdict == "Conservative"

    def test_folner_conservative(self):
        v = classify_conservativity(preset("folner-z"))
        assert v.verdict == "Conservative"
        assert v.evidence["exponent"] <= 1.0

    def test_pmp_conservative(self):
        from bernlab.groups import FreeGroup
        from bernlab.marginals import ActionSpec, WSplit

        spec = ActionSpec(FreeGroup(2),
                          WSplit(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
                          delta=Fraction(1, 3))
        v = classify_conservativity(spec)
        assert v.verdict == "Conservative"
        assert v.evidence["witness"] == "identity-cocycle"


class TestWitness:
    def test_q_exceeds_one(self):
        fam = preset("f2-wsplit").family
        total = witness_partial_sum(fam, 16.0, 1, levels=3, n_terms=60)
        assert total > 1e3

    def test_partial_sums_monotone(self):
        rows = criterion_partial_sums(preset("f2-wsplit"), 16.0, 3)
        lows = [r["lower"] for r in rows]
        assert lows == sorted(lows)
        assert all(r["lower"] <= r["upper"] for r in rows)


class TestIntegralProducts:
    def test_hellinger_generator(self):
        spec = preset("f2-wsplit")
        hv = hellinger_product(spec, g_of(spec, "a"))
        exact = math.sqrt(0.3) + math.sqrt(0.2)
        assert hv.value == pytest.approx(exact, abs=1e-12)
        assert hv.err < 1e-9

    def test_identity_element(self):
        spec = preset("f2-wsplit")
        assert hellinger_product(spec, g_of(spec, "e")).exact == 1
        assert negsq_product(spec, g_of(spec, "e")).exact == 1

    def test_sandwich_wsplit(self):
        spec = preset("f2-wsplit")
        k0 = float(kappa0(spec.delta))
        for text in ("a", "b^-1", "a b^-1", "a^2 b"):
            g = g_of(spec, text)
            nv, hv, pv = norm_sq(spec, g), hellinger_product(spec, g), \
                negsq_product(spec, g)
            assert hv.upper >= math.exp(-0.6 * nv.upper) * (1 - 1e-12)
            assert hv.lower <= math.exp(-0.5 * nv.lower) * (1 + 1e-12)
            assert pv.lower <= math.exp(k0 * nv.upper) * (1 + 1e-12)

    def test_kesten(self):
        assert kesten_norm(2) == pytest.approx(2 * math.sqrt(3))
        with pytest.raises(SpecError):
            kesten_norm(1)

    def test_nonamenability(self):
        rep = nonamenability_check(preset("f2-wsplit"))
        assert rep["nonamenable"]
        assert rep["sum_lower"] > rep["kesten_norm"]
        assert len(rep["per_generator"]) == 4


class TestMonteCarlo:
    def test_deterministic(self):
        spec = preset("f2-wsplit")
        g = g_of(spec, "a b")
        r1 = mc_omega(spec, g, radius=4, samples=2000, seed=11)
        r2 = mc_omega(spec, g, radius=4, samples=2000, seed=11)
        assert r1 == r2
        r3 = mc_omega(spec, g, radius=4, samples=2000, seed=12)
        assert r3 != r1

    def test_mean_omega_near_one(self):
        spec = preset("f2-wsplit")
        r = mc_omega(spec, g_of(spec, "a"), radius=2, samples=20000, seed=3)
        assert abs(r["mean_omega"] - 1.0) <= 4 * r["se_omega"]

    def test_window_too_small(self):
        spec = preset("f2-wsplit")
        with pytest.raises(SpecError):
            mc_omega(spec, g_of(spec, "a b a"), radius=1, samples=1000, seed=0)
        with pytest.raises(SpecError):
            mc_omega(spec, g_of(spec, "a"), radius=2, samples=10, seed=0)

    def test_rn_sample(self):
        spec = preset("f2-wsplit")
        s = rn_sample(spec, g_of(spec, "a"), radius=2, seed=9)
        assert s.omega > 0
        assert len(s.window) == len(s.configuration)
