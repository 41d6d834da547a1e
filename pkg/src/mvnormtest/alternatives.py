"""Samplers for the null and alternative distributions of the power study.

Labels follow the notation of the usual power tables, written in plain text
or LaTeX-ish form, e.g. ``NMix(0.3,1,0.25)``, ``NMix(0.5,0,B2)``,
``t3(0,I2)``, ``C^2(0,1)``, ``P_VII^3(10)``, ``S3(Exp(1))``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .sample import Sample

FAMILIES = (
    "Normal",
    "NMix1",
    "NMixD",
    "StudentT_uni",
    "MultiT",
    "Uniform",
    "ChiSq",
    "Beta",
    "Gamma",
    "Gumbel",
    "Weibull",
    "LogNormal",
    "IIDMarginal",
    "Spherical",
)
MARGINALS = ("Cauchy", "Logistic", "Gamma", "PearsonVII")
RADIALS = ("Exp", "Beta", "ChiSq")

GRAMMAR = """\
supported labels (d = dimension, x = number):
  N(0,1)  Nd(0,Id)                      standard normal
  NMix(p,mu,sigma)                      (1-p) N(0,1) + p N(mu,sigma^2)
  NMix(p,mu,Id)  NMix(p,mu,Bd)          (1-p) N_d(0,I) + p N_d(mu*1, I or B_d)
  tnu  tnu(0,Id)                        Student t / multivariate t
  U(-sqrt3,sqrt3)  U(x,x)               uniform
  chi2_nu  B(x,x)  Gamma(shape,rate)  Gum(loc,scale)  W(scale,shape)  LN(mu,sigma)
  C^d(0,1)  L^d(0,1)  Gamma^d(shape,rate)  P_VII^d(theta)   iid marginals
  S^d(Exp(x))  S^d(B(x,x))  S^d(chi2_nu)                    spherical, radius law"""


class AlternativeParseError(ValueError):
    def __init__(self, label: str) -> None:
        super().__init__(f"cannot parse alternative {label!r}\n{GRAMMAR}")


@dataclass(frozen=True)
class AlternativeSpec:
    family: str
    d: int
    params: dict[str, Any] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.d < 1:
            raise ValueError("d must be positive")
        _validate(self)

    def to_dict(self) -> dict:
        return {"family": self.family, "d": self.d, "params": dict(self.params), "label": self.label}

    @classmethod
    def from_dict(cls, data: dict) -> AlternativeSpec:
        return cls(family=data["family"], d=int(data["d"]), params=dict(data["params"]), label=data.get("label", ""))


def _validate(spec: AlternativeSpec) -> None:
    p = spec.params
    positive = {
        "MultiT": ("nu",),
        "StudentT_uni": ("nu",),
        "ChiSq": ("nu",),
        "Beta": ("alpha", "beta"),
        "Gamma": ("shape", "rate"),
        "Gumbel": ("scale",),
        "Weibull": ("scale", "shape"),
        "LogNormal": ("sigma",),
        "NMix1": ("sigma",),
    }.get(spec.family, ())
    for key in positive:
        if not p[key] > 0:
            raise ValueError(f"{spec.family} parameter {key} must be positive, got {p[key]}")
    if spec.family in ("NMix1", "NMixD") and not 0 < p["p"] < 1:
        raise ValueError(f"mixture weight must lie in (0, 1), got {p['p']}")
    if spec.family == "Uniform" and not p["low"] < p["high"]:
        raise ValueError("uniform bounds must satisfy low < high")
    if spec.family == "IIDMarginal":
        if p["marginal"] not in MARGINALS:
            raise ValueError(f"unknown marginal {p['marginal']!r}")
        if p["marginal"] == "PearsonVII" and not p["theta"] > 0.5:
            raise ValueError("Pearson VII exponent must exceed 1/2")
    if spec.family == "Spherical" and p["radial"] not in RADIALS:
        raise ValueError(f"unknown radial law {p['radial']!r}")


_NUM = r"([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)"
_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")


def _clean(label: str) -> str:
    s = label.strip()
    s = s.replace("√", "sqrt").replace("Γ", "Gamma").replace("χ", "chi")
    # unicode superscripts denote the dimension exponent
    s = re.sub(r"([⁰¹²³⁴⁵⁶⁷⁸⁹]+)", lambda m: "^" + m.group(1).translate(_SUPERSCRIPTS), s)
    for token in ("$", "\\mathcal", "\\mbox", "\\rm", "\\", "{", "}", " "):
        s = s.replace(token, "")
    s = s.replace("mathcal", "").replace("mbox", "")
    s = re.sub(r"(?<![A-Za-z])rm(?=[A-Z])", "", s)
    return s


def _f(x: str) -> float:
    return float(x)


def _dim(*candidates: str | None) -> int | None:
    dims = {int(c) for c in candidates if c}
    if len(dims) > 1:
        raise ValueError(f"inconsistent dimensions {sorted(dims)}")
    return dims.pop() if dims else None


def parse_alternative(label: str, d: int | None = None) -> AlternativeSpec:
    """Parse a table label into an :class:`AlternativeSpec`.

    ``d`` supplies the dimension for labels that do not carry one (e.g. a
    univariate family, which then must have ``d`` equal to 1 or None).
    """
    s = _clean(label)

    def build(family: str, dim: int | None, **params: Any) -> AlternativeSpec:
        dim = _dim(str(dim) if dim else None, str(d) if d else None) or 1
        return AlternativeSpec(family=family, d=dim, params=params, label=label)

    def univariate(family: str, **params: Any) -> AlternativeSpec:
        if d not in (None, 1):
            raise ValueError(f"{label!r} is univariate but d={d} was requested")
        return build(family, 1, **params)

    m = re.fullmatch(r"N_?\^?(\d*)\(0,(?:1|I_?(\d+))\)", s)
    if m:
        return build("Normal", _dim(m.group(1), m.group(2)))

    m = re.fullmatch(rf"NMix\({_NUM},{_NUM},([IB])_?(\d+)\)", s)
    if m:
        p, mu, kind, dim = _f(m.group(1)), _f(m.group(2)), m.group(3), int(m.group(4))
        return build("NMixD", dim, p=p, mu=mu, cov="identity" if kind == "I" else "B")
    m = re.fullmatch(rf"NMix\({_NUM},{_NUM},{_NUM}\)", s)
    if m:
        # third entry is the standard deviation of the second component
        return univariate("NMix1", p=_f(m.group(1)), mu=_f(m.group(2)), sigma=_f(m.group(3)))

    m = re.fullmatch(rf"t_?{_NUM}\(0,I_?(\d+)\)", s)
    if m:
        return build("MultiT", int(m.group(2)), nu=_f(m.group(1)))
    m = re.fullmatch(rf"t_?{_NUM}", s)
    if m:
        return univariate("StudentT_uni", nu=_f(m.group(1)))

    m = re.fullmatch(r"U\(-sqrt\(?3\)?,sqrt\(?3\)?\)", s)
    if m:
        return univariate("Uniform", low=-math.sqrt(3), high=math.sqrt(3))
    m = re.fullmatch(rf"U\({_NUM},{_NUM}\)", s)
    if m:
        return univariate("Uniform", low=_f(m.group(1)), high=_f(m.group(2)))

    m = re.fullmatch(rf"(?:chi\^?2_?|ChiSq\(){_NUM}\)?", s)
    if m:
        return univariate("ChiSq", nu=_f(m.group(1)))
    m = re.fullmatch(rf"B\({_NUM},{_NUM}\)", s)
    if m:
        return univariate("Beta", alpha=_f(m.group(1)), beta=_f(m.group(2)))
    m = re.fullmatch(rf"Gamma\({_NUM},{_NUM}\)", s)
    if m:
        return univariate("Gamma", shape=_f(m.group(1)), rate=_f(m.group(2)))
    m = re.fullmatch(rf"Gum\({_NUM},{_NUM}\)", s)
    if m:
        return univariate("Gumbel", loc=_f(m.group(1)), scale=_f(m.group(2)))
    m = re.fullmatch(rf"W\({_NUM},{_NUM}\)", s)
    if m:
        return univariate("Weibull", scale=_f(m.group(1)), shape=_f(m.group(2)))
    m = re.fullmatch(rf"LN\({_NUM},{_NUM}\)", s)
    if m:
        return univariate("LogNormal", mu=_f(m.group(1)), sigma=_f(m.group(2)))

    m = re.fullmatch(rf"C\^?(\d+)\({_NUM},{_NUM}\)", s)
    if m:
        return build("IIDMarginal", int(m.group(1)), marginal="Cauchy", loc=_f(m.group(2)), scale=_f(m.group(3)))
    m = re.fullmatch(rf"L\^?(\d+)\({_NUM},{_NUM}\)", s)
    if m:
        return build("IIDMarginal", int(m.group(1)), marginal="Logistic", loc=_f(m.group(2)), scale=_f(m.group(3)))
    m = re.fullmatch(rf"Gamma\^?(\d+)\({_NUM},{_NUM}\)", s)
    if m:
        return build("IIDMarginal", int(m.group(1)), marginal="Gamma", shape=_f(m.group(2)), rate=_f(m.group(3)))
    m = re.fullmatch(rf"P_?VII\^?(\d+)\({_NUM}\)", s)
    if m:
        return build("IIDMarginal", int(m.group(1)), marginal="PearsonVII", theta=_f(m.group(2)))

    m = re.fullmatch(r"S\^?(\d+)\((.+)\)", s)
    if m:
        dim, inner = int(m.group(1)), m.group(2)
        r = re.fullmatch(rf"Exp\({_NUM}\)", inner)
        if r:
            return build("Spherical", dim, radial="Exp", rate=_f(r.group(1)))
        r = re.fullmatch(rf"B\({_NUM},{_NUM}\)", inner)
        if r:
            return build("Spherical", dim, radial="Beta", alpha=_f(r.group(1)), beta=_f(r.group(2)))
        r = re.fullmatch(rf"(?:chi\^?2_?|ChiSq\(){_NUM}\)?", inner)
        if r:
            return build("Spherical", dim, radial="ChiSq", nu=_f(r.group(1)))

    raise AlternativeParseError(label)


def b_matrix(d: int, rho: float = 0.9) -> np.ndarray:
    """Unit diagonal, constant off-diagonal ``rho``."""
    return np.full((d, d), rho) + (1 - rho) * np.eye(d)


def _uniform_sphere(rng: np.random.Generator, shape: tuple[int, ...], d: int) -> np.ndarray:
    z = rng.standard_normal(shape + (d,))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def _radii(spec: AlternativeSpec, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    p = spec.params
    if p["radial"] == "Exp":
        return rng.exponential(1.0 / p["rate"], shape)
    if p["radial"] == "Beta":
        return rng.beta(p["alpha"], p["beta"], shape)
    return rng.chisquare(p["nu"], shape)


def _marginal(spec: AlternativeSpec, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    p = spec.params
    kind = p["marginal"]
    if kind == "Cauchy":
        return p["loc"] + p["scale"] * rng.standard_cauchy(shape)
    if kind == "Logistic":
        return rng.logistic(p["loc"], p["scale"], shape)
    if kind == "Gamma":
        return rng.gamma(p["shape"], 1.0 / p["rate"], shape)
    # density proportional to (1 + x^2)^(-theta): a t_nu draw scaled by 1/sqrt(nu), nu = 2 theta - 1
    nu = 2 * p["theta"] - 1
    return rng.standard_t(nu, shape) / math.sqrt(nu)


def draw(spec: AlternativeSpec, rng: np.random.Generator, n: int, reps: int = 1) -> np.ndarray:
    """``reps`` independent samples of size ``n``, shape ``(reps, n, d)``."""
    d = spec.d
    p = spec.params
    shape = (reps, n)
    fam = spec.family

    if fam == "Normal":
        return rng.standard_normal(shape + (d,))
    if fam == "NMix1":
        z = rng.standard_normal(shape)
        pick = rng.random(shape) < p["p"]
        return np.where(pick, p["mu"] + p["sigma"] * z, z)[..., None]
    if fam == "NMixD":
        z = rng.standard_normal(shape + (d,))
        pick = rng.random(shape) < p["p"]
        cov = np.eye(d) if p["cov"] == "identity" else b_matrix(d)
        chol = np.linalg.cholesky(cov)
        other = p["mu"] + z @ chol.T
        return np.where(pick[..., None], other, z)
    if fam in ("MultiT", "StudentT_uni"):
        z = rng.standard_normal(shape + (d,))
        w = rng.chisquare(p["nu"], shape)
        return z / np.sqrt(w / p["nu"])[..., None]
    if fam == "IIDMarginal":
        return _marginal(spec, rng, shape + (d,))
    if fam == "Spherical":
        return _radii(spec, rng, shape)[..., None] * _uniform_sphere(rng, shape, d)

    if fam == "Uniform":
        x = rng.uniform(p["low"], p["high"], shape)
    elif fam == "ChiSq":
        x = rng.chisquare(p["nu"], shape)
    elif fam == "Beta":
        x = rng.beta(p["alpha"], p["beta"], shape)
    elif fam == "Gamma":
        x = rng.gamma(p["shape"], 1.0 / p["rate"], shape)
    elif fam == "Gumbel":
        x = rng.gumbel(p["loc"], p["scale"], shape)
    elif fam == "Weibull":
        x = p["scale"] * rng.weibull(p["shape"], shape)
    elif fam == "LogNormal":
        x = rng.lognormal(p["mu"], p["sigma"], shape)
    else:  # pragma: no cover - guarded by FAMILIES
        raise ValueError(fam)
    return x[..., None]


def sample(spec: AlternativeSpec, n: int, seed: int) -> Sample:
    if n < spec.d + 1:
        raise ValueError(f"n must be at least d + 1 = {spec.d + 1}")
    rng = np.random.default_rng(seed)
    return Sample(draw(spec, rng, n)[0], source=f"{spec.label or spec.family} seed={seed}")
