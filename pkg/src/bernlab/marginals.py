"""Action descriptions: group, marginal family, multiplicity, and builders.

An ActionSpec fixes a shift action on a product of two-point (or small finite)
base measures indexed by the group, through a function F assigning the
marginal mass of 0 to each index. Families are declarative and immutable;
samplers derive independent substreams from (seed, window digest).
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .bump import BumpCocycle
from .exact import LogValue, format_fraction, parse_fraction
from .folner import FolnerCocycle, build_folner
from .groups import (
    Element,
    FreeGroup,
    Group,
    Integers,
    e_class,
    pi_a,
    pi_b,
    w_class,
)

__all__ = [
    "BaseMeasure",
    "DecreasingSequence",
    "ZSequence",
    "WSplit",
    "FreeProductW",
    "FolnerInduced",
    "SpecialCocycle",
    "ActionSpec",
    "IndexPoint",
    "SpecError",
    "f_value",
    "base_measure",
    "check_nonsingular_hypotheses",
    "sample_window",
    "measures_from_lambda",
    "measures_from_ab",
    "measures_from_atomic_eta",
    "spec_to_json",
    "spec_from_json",
]


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class BaseMeasure:
    """Probability vector on a finite base space of size >= 2."""

    probs: tuple

    def __post_init__(self):
        if len(self.probs) < 2:
            raise SpecError("base space must have at least 2 points")
        exact = all(isinstance(p, (Fraction, int)) for p in self.probs)
        probs = tuple(Fraction(p) for p in self.probs) if exact else tuple(
            float(p) for p in self.probs
        )
        object.__setattr__(self, "probs", probs)
        for p in probs:
            if not (0 < p < 1):
                raise SpecError(f"marginal mass {p} outside (0,1)")
        total = sum(probs)
        if exact:
            if total != 1:
                raise SpecError(f"masses sum to {total}, expected 1")
        elif abs(total - 1.0) > 1e-12:
            raise SpecError(f"masses sum to {total}, expected 1")

    @property
    def exact(self) -> bool:
        return isinstance(self.probs[0], Fraction)

    def t_values(self, other: "BaseMeasure") -> tuple:
        if len(self.probs) != len(other.probs):
            raise SpecError("measures live on different base sizes")
        return tuple(q / p for p, q in zip(self.probs, other.probs))


@dataclass(frozen=True)
class DecreasingSequence:
    """a_0 >= a_1 >= ... > 0 given by a closed form or an explicit list."""

    kind: str  # inv_sqrt | inv_sqrt_log | explicit
    scale: Optional[Fraction] = None
    n0: int = 2
    explicit: tuple = ()

    def a(self, j: int) -> float:
        if j < 0:
            raise SpecError("sequence index must be >= 0")
        if self.kind == "inv_sqrt":
            return float(self.scale) / math.sqrt(j + 1)
        if self.kind == "inv_sqrt_log":
            x = j + self.n0
            return 1.0 / math.sqrt(x * math.log(x))
        if self.kind == "explicit":
            return float(self.explicit[min(j, len(self.explicit) - 1)])
        raise SpecError(f"unknown sequence kind {self.kind!r}")

    def values(self, J: int) -> np.ndarray:
        j = np.arange(J, dtype=np.float64)
        if self.kind == "inv_sqrt":
            return float(self.scale) / np.sqrt(j + 1.0)
        if self.kind == "inv_sqrt_log":
            x = j + self.n0
            return 1.0 / np.sqrt(x * np.log(x))
        if self.kind == "explicit":
            idx = np.minimum(j.astype(np.int64), len(self.explicit) - 1)
            return np.array([float(self.explicit[i]) for i in idx])
        raise SpecError(f"unknown sequence kind {self.kind!r}")


@dataclass(frozen=True)
class ZSequence:
    """F(n) = lam + a_{n - n0} for n >= n0, lam otherwise."""

    lam: Fraction
    n0: int
    seq: DecreasingSequence


@dataclass(frozen=True)
class WSplit:
    """F constant on the three last-letter classes of F2."""

    p_a: Fraction
    p_b: Fraction
    p_w: Fraction


@dataclass(frozen=True)
class FreeProductW:
    """mu_g = mu1 on words ending in a strictly positive power of the
    distinguished generator, mu0 elsewhere."""

    mu0: BaseMeasure
    mu1: BaseMeasure
    distinguished: int = 1


@dataclass(frozen=True)
class FolnerInduced:
    """Marginal mu_k(0) = F(k) + offset for a Folner-interval cocycle on Z."""

    phi_kind: str  # log | sqrt_log
    phi_scale: Fraction
    horizon: int
    offset: Fraction
    cocycle: FolnerCocycle = field(compare=False, repr=False, default=None)

    def phi(self, k: int) -> float:
        if self.phi_kind == "log":
            return math.log(1.0 + k)
        if self.phi_kind == "sqrt_log":
            return math.sqrt(float(self.phi_scale) * math.log(1.0 + k))
        raise SpecError(f"unknown phi kind {self.phi_kind!r}")


def make_folner_family(
    phi_kind: str = "log",
    phi_scale=Fraction(1),
    horizon: int = 256,
    offset=Fraction(1, 2),
    delta_f: float = 0.5,
) -> FolnerInduced:
    fam = FolnerInduced(phi_kind, parse_fraction(phi_scale), horizon, parse_fraction(offset))
    coc = build_folner(fam.phi, horizon=horizon, delta=delta_f)
    object.__setattr__(fam, "cocycle", coc)
    return fam


@dataclass(frozen=True)
class SpecialCocycle:
    """F(g) = base +/- scale * H(pi(g)) via the bounded oscillating H."""

    D: Fraction
    base: Fraction
    scale: Fraction
    bc: BumpCocycle = field(compare=False, repr=False, default=None)

    def with_cocycle(self) -> "SpecialCocycle":
        if self.bc is None:
            object.__setattr__(self, "bc", BumpCocycle(self.D))
        return self


MarginalFamily = Union[ZSequence, WSplit, FreeProductW, FolnerInduced, SpecialCocycle]


@dataclass(frozen=True)
class IndexPoint:
    elem: Element
    copy: int = 1


@dataclass(frozen=True)
class ActionSpec:
    group: Group
    family: MarginalFamily
    multiplicity: int = 1
    delta: Fraction = Fraction(1, 3)

    def __post_init__(self):
        if self.multiplicity < 1:
            raise SpecError("multiplicity must be >= 1")
        delta = parse_fraction(self.delta)
        if not (0 < delta <= Fraction(1, 2)):
            raise SpecError(f"delta must lie in (0, 1/2], got {delta}")
        object.__setattr__(self, "delta", delta)
        self._validate_range()

    def _validate_range(self):
        lo, hi = self.delta, 1 - self.delta
        fam = self.family

        def check(v, what):
            if not (lo <= v <= hi):
                raise SpecError(f"{what} = {v} leaves [{lo}, {hi}]")

        if isinstance(fam, WSplit):
            if not isinstance(self.group, FreeGroup) or self.group.rank != 2:
                raise SpecError("WSplit requires the rank-2 free group")
            for name, p in (("p_a", fam.p_a), ("p_b", fam.p_b), ("p_w", fam.p_w)):
                check(p, name)
        elif isinstance(fam, ZSequence):
            if not isinstance(self.group, Integers):
                raise SpecError("ZSequence requires the integer group")
            check(fam.lam, "lambda")
            check(Fraction(fam.lam) + Fraction(fam.seq.a(0)).limit_denominator(10**9),
                  "lambda + a_0")
        elif isinstance(fam, FreeProductW):
            if not isinstance(self.group, FreeGroup):
                raise SpecError("FreeProductW requires a free group")
            for mu in (fam.mu0, fam.mu1):
                for p in mu.probs:
                    check(p, "base mass")
        elif isinstance(fam, FolnerInduced):
            if not isinstance(self.group, Integers):
                raise SpecError("FolnerInduced requires the integer group")
            fmax = max(fam.cocycle.values)
            check(fam.offset, "offset")
            check(Fraction(fam.offset) + Fraction(fmax).limit_denominator(10**9),
                  "offset + max F")
        elif isinstance(fam, SpecialCocycle):
            if not isinstance(self.group, FreeGroup) or self.group.rank != 2:
                raise SpecError("SpecialCocycle requires the rank-2 free group")
            check(fam.base - fam.scale, "base - scale")
            check(fam.base + fam.scale, "base + scale")
        else:
            raise SpecError(f"unknown family {type(fam).__name__}")


def _elem_of(i) -> Element:
    return i.elem if isinstance(i, IndexPoint) else i


def f_value(spec: ActionSpec, i):
    """F at an index point; copies of a diagonal power share F."""
    g = _elem_of(i)
    if isinstance(i, IndexPoint) and not (1 <= i.copy <= spec.multiplicity):
        raise SpecError(f"copy {i.copy} out of range for multiplicity {spec.multiplicity}")
    fam = spec.family
    if isinstance(fam, WSplit):
        cls = w_class(g)
        return {"W_a": fam.p_a, "W_b": fam.p_b, "W": fam.p_w}[cls]
    if isinstance(fam, ZSequence):
        if not isinstance(g, int):
            raise SpecError("ZSequence index must be an integer")
        if g < fam.n0:
            return float(fam.lam)
        return float(fam.lam) + fam.seq.a(g - fam.n0)
    if isinstance(fam, FreeProductW):
        from .groups import w_last_positive

        mu = fam.mu1 if w_last_positive(g, fam.distinguished) else fam.mu0
        return mu.probs[0]
    if isinstance(fam, FolnerInduced):
        return float(fam.offset) + fam.cocycle.f(g)
    if isinstance(fam, SpecialCocycle):
        fam.with_cocycle()
        cls = e_class(g)
        if cls == "e":
            return fam.base
        if cls == "E_a":
            return fam.base + fam.scale * fam.bc.h_exact(pi_a(g))
        return fam.base - fam.scale * fam.bc.h_exact(pi_b(g))
    raise SpecError(f"unknown family {type(fam).__name__}")


def base_measure(spec: ActionSpec, i) -> BaseMeasure:
    fam = spec.family
    if isinstance(fam, FreeProductW):
        from .groups import w_last_positive

        g = _elem_of(i)
        return fam.mu1 if w_last_positive(g, fam.distinguished) else fam.mu0
    p = f_value(spec, i)
    if isinstance(p, Fraction):
        return BaseMeasure((p, 1 - p))
    return BaseMeasure((p, 1.0 - p))


def check_nonsingular_hypotheses(spec: ActionSpec, probes, radius: int) -> dict:
    """Report-only hypothesis check: square-summability of F(g.) - F(.) per
    probe, plus the observed approach of F to its limit on the sphere."""
    from . import groups

    report = {"probes": [], "radius": radius}
    for g in probes:
        partial = 0.0
        for h in groups.ball(spec.group, radius):
            d = float(f_value(spec, groups.mul(g, h))) - float(f_value(spec, h))
            partial += d * d
        entry = {"g": groups.format_element(g), "partial_sum": partial, "tail_bound": None}
        fam = spec.family
        if isinstance(fam, WSplit) and radius >= groups.word_length(g):
            entry["tail_bound"] = 0.0
        if isinstance(fam, ZSequence) and isinstance(g, int) and g != 0:
            k = abs(g)
            J = max(radius - fam.n0, 0)
            entry["tail_bound"] = float(np.sum(fam.seq.values(J + k)[J:] ** 2))
        report["probes"].append(entry)
    fam = spec.family
    lam = None
    if isinstance(fam, ZSequence):
        lam = float(fam.lam)
    elif isinstance(fam, FolnerInduced):
        lam = float(fam.offset)
    if lam is not None:
        sup = 0.0
        for h in groups.sphere(spec.group, radius):
            sup = max(sup, abs(float(f_value(spec, h)) - lam))
        report["sup_deviation_on_sphere"] = sup
        report["limit_value"] = lam
    return report


def _window_rng(seed: int, window) -> np.random.Generator:
    from . import groups

    digest = hashlib.sha256(
        repr([groups.format_element(_elem_of(i)) for i in window]).encode()
    ).digest()
    key = int.from_bytes(digest[:8], "big")
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), key]))


def sample_window(spec: ActionSpec, window, seed: int) -> dict:
    """One product-measure configuration over the window, keyed by index."""
    rng = _window_rng(seed, window)
    out = {}
    for i in window:
        mu = base_measure(spec, i)
        probs = [float(p) for p in mu.probs]
        u = rng.random()
        acc, x = 0.0, len(probs) - 1
        for j, p in enumerate(probs):
            acc += p
            if u < acc:
                x = j
                break
        out[i] = x
    return out


# --- measure builders --------------------------------------------------------

def measures_from_lambda(lam) -> tuple:
    lam = parse_fraction(lam)
    if not (0 < lam < 1):
        raise SpecError(f"lambda must lie in (0,1), got {lam}")
    mu0 = BaseMeasure((1 / (1 + lam), lam / (1 + lam)))
    mu1 = BaseMeasure((lam / (1 + lam), 1 / (1 + lam)))
    return mu0, mu1


def measures_from_ab(a, b) -> tuple:
    """Two-point measures with T(0) = e^b, T(1) = e^{b-a}; three-point
    measures with T-range {1, e^a, e^{-a}} when b = 0.

    Pass LogValue arguments to stay exact; floats yield approximate measures.
    """
    if isinstance(a, LogValue) and isinstance(b, (LogValue, int)):
        ea = a.arg
        eb = b.arg if isinstance(b, LogValue) else Fraction(1)
        if ea <= 1:
            raise SpecError("need a > 0")
        if not (1 <= eb < ea):
            raise SpecError("need 0 <= b < a")
        if eb == 1:
            x = 1 / (2 * (ea + 1))
            mu0 = BaseMeasure((Fraction(1, 2), x, ea * x))
            mu1 = BaseMeasure((Fraction(1, 2), ea * x, x))
        else:
            m0 = (ea / eb - 1) / (ea - 1)
            mu0 = BaseMeasure((m0, 1 - m0))
            mu1 = BaseMeasure((eb * m0, 1 - eb * m0))
        ts = mu0.t_values(mu1)
        if eb == 1:
            assert set(ts) == {1, ea, 1 / ea}
        else:
            assert ts == (eb, eb / ea)
        return mu0, mu1
    af, bf = float(a), float(b)
    if af <= 0 or not (0 <= bf < af):
        raise SpecError("need a > 0 and 0 <= b < a")
    return measures_from_ab(
        LogValue(Fraction(math.exp(af)).limit_denominator(10**9)),
        LogValue(Fraction(math.exp(bf)).limit_denominator(10**9)),
    )


def measures_from_atomic_eta(atoms) -> tuple:
    """Base space {(t_n,0),(t_n,1)} with T(t_n,0) = t_n and T(t_n,1) = 1/t_n."""
    atoms = [(parse_fraction(t), parse_fraction(w)) for t, w in atoms]
    if not atoms:
        raise SpecError("need at least one atom")
    ts = [t for t, _ in atoms]
    if len(set(ts)) != len(ts):
        raise SpecError("duplicate atoms")
    for t, w in atoms:
        if not (0 < t < 1):
            raise SpecError(f"atom {t} outside (0,1)")
        if w <= 0:
            raise SpecError("weights must be positive")
    kappa = sum(w * (1 + t) for t, w in atoms)
    mu0, mu1 = [], []
    for t, w in atoms:
        mu0.extend([w / kappa, w * t / kappa])
        mu1.extend([w * t / kappa, w / kappa])
    return BaseMeasure(tuple(mu0)), BaseMeasure(tuple(mu1))


# --- serialization -----------------------------------------------------------

def _frac_str(q) -> str:
    return format_fraction(Fraction(q))


def spec_to_json(spec: ActionSpec) -> dict:
    if isinstance(spec.group, FreeGroup):
        group = {"type": "free", "rank": spec.group.rank}
    else:
        group = {"type": "integers"}
    fam = spec.family
    if isinstance(fam, WSplit):
        family = {
            "kind": "wsplit",
            "p_a": _frac_str(fam.p_a),
            "p_b": _frac_str(fam.p_b),
            "p_w": _frac_str(fam.p_w),
        }
    elif isinstance(fam, ZSequence):
        seq = {"kind": fam.seq.kind}
        if fam.seq.kind == "inv_sqrt":
            seq["scale"] = _frac_str(fam.seq.scale)
        elif fam.seq.kind == "inv_sqrt_log":
            seq["n0"] = fam.seq.n0
        else:
            seq["values"] = [_frac_str(v) for v in fam.seq.explicit]
        family = {"kind": "zsequence", "lambda": _frac_str(fam.lam), "n0": fam.n0,
                  "sequence": seq}
    elif isinstance(fam, FreeProductW):
        family = {
            "kind": "free_product_w",
            "mu0": [_frac_str(p) for p in fam.mu0.probs],
            "mu1": [_frac_str(p) for p in fam.mu1.probs],
            "distinguished": fam.distinguished,
        }
    elif isinstance(fam, FolnerInduced):
        family = {
            "kind": "folner",
            "phi": {"kind": fam.phi_kind, "scale": _frac_str(fam.phi_scale)},
            "horizon": fam.horizon,
            "offset": _frac_str(fam.offset),
        }
    elif isinstance(fam, SpecialCocycle):
        family = {
            "kind": "special",
            "D": _frac_str(fam.D),
            "base": _frac_str(fam.base),
            "scale": _frac_str(fam.scale),
        }
    else:
        raise SpecError(f"unknown family {type(fam).__name__}")
    return {
        "group": group,
        "multiplicity": spec.multiplicity,
        "delta": _frac_str(spec.delta),
        "family": family,
    }


def spec_from_json(data) -> ActionSpec:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        gspec = data["group"]
        if gspec["type"] == "free":
            group: Group = FreeGroup(int(gspec["rank"]))
        elif gspec["type"] == "integers":
            group = Integers()
        else:
            raise SpecError(f"unknown group type {gspec['type']!r}")
        fspec = data["family"]
        kind = fspec["kind"]
        if kind == "wsplit":
            fam: MarginalFamily = WSplit(
                parse_fraction(fspec["p_a"]),
                parse_fraction(fspec["p_b"]),
                parse_fraction(fspec["p_w"]),
            )
        elif kind == "zsequence":
            sq = fspec["sequence"]
            if sq["kind"] == "inv_sqrt":
                seq = DecreasingSequence("inv_sqrt", scale=parse_fraction(sq["scale"]))
            elif sq["kind"] == "inv_sqrt_log":
                seq = DecreasingSequence("inv_sqrt_log", n0=int(sq["n0"]))
            elif sq["kind"] == "explicit":
                seq = DecreasingSequence(
                    "explicit",
                    explicit=tuple(parse_fraction(v) for v in sq["values"]),
                )
            else:
                raise SpecError(f"unknown sequence kind {sq['kind']!r}")
            fam = ZSequence(parse_fraction(fspec["lambda"]), int(fspec["n0"]), seq)
        elif kind == "free_product_w":
            fam = FreeProductW(
                BaseMeasure(tuple(parse_fraction(p) for p in fspec["mu0"])),
                BaseMeasure(tuple(parse_fraction(p) for p in fspec["mu1"])),
                int(fspec.get("distinguished", 1)),
            )
        elif kind == "folner":
            fam = make_folner_family(
                phi_kind=fspec["phi"]["kind"],
                phi_scale=parse_fraction(fspec["phi"].get("scale", "1")),
                horizon=int(fspec["horizon"]),
                offset=parse_fraction(fspec["offset"]),
            )
        elif kind == "special":
            fam = SpecialCocycle(
                parse_fraction(fspec["D"]),
                parse_fraction(fspec["base"]),
                parse_fraction(fspec["scale"]),
            ).with_cocycle()
        else:
            raise SpecError(f"unknown family kind {kind!r}")
        return ActionSpec(
            group=group,
            family=fam,
            multiplicity=int(data.get("multiplicity", 1)),
            delta=parse_fraction(data.get("delta", "1/3")),
        )
    except KeyError as exc:
        raise SpecError(f"missing field {exc} in spec JSON") from exc
