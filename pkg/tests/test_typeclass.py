from fractions import Fraction

import pytest

from bernlab.exact import LogValue
from bernlab.marginals import SpecError, measures_from_ab, measures_from_lambda
from bernlab.typeclass import (
    plain_type,
    ratio_group,
    sd_generators,
    stable_params,
    stable_type_set,
)


class TestRatioGroup:
    def test_trivial(self):
        assert ratio_group([1, 1]).kind == "trivial"

    def test_cyclic(self):
        rg = ratio_group(["3/2", "9/4"])
        assert rg.kind == "cyclic"
        assert rg.generator == Fraction(2, 3)  # canonicalized below 1

    def test_cyclic_with_inverse(self):
        rg = ratio_group(["1/2", "2", "8"])
        assert rg.kind == "cyclic" and rg.generator == Fraction(1, 2)

    def test_dense(self):
        assert ratio_group(["6/5", "4/5"]).kind == "dense"
        rg = ratio_group(["3/2", "7/5"])
        assert rg.kind == "dense"
        assert set(rg.basis) == {Fraction(2, 3), Fraction(5, 7)}

    def test_rejects_nonpositive(self):
        with pytest.raises(SpecError):
            ratio_group(["-1"])


class TestPlainType:
    def test_pmp(self):
        mu = measures_from_lambda(Fraction(1, 3))[0]
        assert plain_type(mu, mu).kind == "II1"

    def test_lambda_half(self):
        mu0, mu1 = measures_from_lambda(Fraction(1, 2))
        t = plain_type(mu0, mu1)
        assert t.kind == "III_lambda"
        assert t.lam_base == Fraction(1, 2)

    def test_dense_three_point(self):
        mu0, mu1 = measures_from_atomic()
        assert plain_type(mu0, mu1).kind == "III1"

    def test_swap_symmetry(self):
        cases = [
            measures_from_lambda(Fraction(1, 2)),
            measures_from_lambda(Fraction(2, 5)),
            measures_from_ab(LogValue(Fraction(2)), LogValue(Fraction(3, 2))),
            measures_from_atomic(),
        ]
        for mu0, mu1 in cases:
            assert plain_type(mu0, mu1) == plain_type(mu1, mu0)
            sp, sq = stable_params(mu0, mu1), stable_params(mu1, mu0)
            assert sp.L == sq.L and sp.k1 == sq.k1 and sp.a == sq.a


def measures_from_atomic():
    from bernlab.marginals import measures_from_atomic_eta

    return measures_from_atomic_eta([(Fraction(1, 2), 1), (Fraction(1, 3), 1)])


class TestStable:
    def test_lambda_half_params(self):
        mu0, mu1 = measures_from_lambda(Fraction(1, 2))
        sp = stable_params(mu0, mu1)
        assert sp.L.kind == "cyclic" and sp.L.generator == Fraction(1, 4)
        assert sp.a.arg == Fraction(4)   # a = log 4
        assert sp.b.arg == Fraction(2)   # b = log 2
        assert sp.k1 == 2

    def test_ab_roundtrip(self):
        mu0, mu1 = measures_from_ab(LogValue(Fraction(2)),
                                    LogValue(Fraction(3, 2)))
        sp = stable_params(mu0, mu1)
        assert sp.a.arg == Fraction(2)
        assert sp.b.arg == Fraction(3, 2)
        assert sp.k1 is None  # infinite order

    def test_type_set_k1_two(self):
        mu0, mu1 = measures_from_lambda(Fraction(1, 2))
        st = stable_type_set(stable_params(mu0, mu1))
        lams = sorted(t.lam for t in st["types"])
        assert lams == [0.25, 0.5]

    def test_type_set_infinite(self):
        mu0, mu1 = measures_from_ab(LogValue(Fraction(2)),
                                    LogValue(Fraction(3, 2)))
        st = stable_type_set(stable_params(mu0, mu1))
        kinds = [t.kind for t in st["types"]]
        assert kinds[0] == "III1" and kinds.count("III_lambda") == 10

    def test_pmp_stable(self):
        mu = measures_from_lambda(Fraction(1, 3))[0]
        st = stable_type_set(stable_params(mu, mu))
        assert [t.kind for t in st["types"]] == ["II1"]


class TestSdGenerators:
    def test_cyclic(self):
        mu0, mu1 = measures_from_lambda(Fraction(1, 2))
        assert sd_generators(mu0, mu1) == [Fraction(1, 2)]

    def test_pmp_empty(self):
        mu = measures_from_lambda(Fraction(1, 3))[0]
        assert sd_generators(mu, mu) == []

    def test_requires_exact(self):
        from bernlab.marginals import BaseMeasure

        mu = BaseMeasure((0.5, 0.5))
        with pytest.raises(SpecError):
            plain_type(mu, mu)
