"""Trigonometry of the model surfaces S^2_k.

All triangle formulas go through the versine form of the law of cosines,

    f_k(c) = f_k(|a - b|) + sn_k(a) sn_k(b) (1 - cos theta),

which has no cancellation at small angles or small k and is exact at the
degenerate angles 0 and pi. Angles are radians in [0, pi].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

__all__ = [
    "DomainError",
    "Kappa",
    "ModelTriple",
    "ExpansionCoefficients",
    "as_kappa",
    "sn",
    "cs",
    "fk",
    "fk_inverse",
    "model_functions",
    "model_side",
    "model_angle",
    "model_versine",
    "side_from_versine",
    "comparison_point_distance",
    "expansion_coefficients",
]

EPS = 2.220446049250313e-16
SERIES_CUTOFF = 1e-8  # |k| rho^2 below this -> Taylor series
CLAMP = 1e-12  # cosine excursion tolerated as rounding
DIAMETER_MARGIN = 1e-9  # relative margin below pi/sqrt(k)


class DomainError(ValueError):
    """Input outside the domain of a model-space operation."""


@dataclass(frozen=True)
class Kappa:
    """Curvature ``k`` of the model surface S^2_k."""

    k: float

    def __post_init__(self):
        if not math.isfinite(self.k):
            raise DomainError(f"curvature must be finite, got {self.k!r}")

    @property
    def diameter(self) -> float:
        """pi/sqrt(k) for k > 0, infinity otherwise."""
        if self.k > 0:
            return math.pi / math.sqrt(self.k)
        return math.inf

    @property
    def length_bound(self) -> float:
        """Largest admissible length (diameter minus the safety margin)."""
        d = self.diameter
        return d * (1.0 - DIAMETER_MARGIN) if math.isfinite(d) else math.inf

    def admits(self, *lengths: float) -> bool:
        bound = self.length_bound
        return all(x < bound for x in lengths)

    def check(self, *lengths: float) -> None:
        if not self.admits(*lengths):
            raise DomainError(
                f"lengths {lengths} violate the diameter bound pi/sqrt(k)={self.diameter:.12g}"
            )

    def __float__(self) -> float:
        return float(self.k)


KappaLike = Union[Kappa, float, int]


def as_kappa(kappa: KappaLike) -> Kappa:
    return kappa if isinstance(kappa, Kappa) else Kappa(float(kappa))


class ModelTriple(NamedTuple):
    sn: float
    ct: Optional[float]  # None at rho = 0
    f: float


class ExpansionCoefficients(NamedTuple):
    """Second-order expansions in |qs| of the distance and of f_k(distance)."""

    c0: float
    c1: float
    c2: float
    f0: float
    f1: float
    f2: float

    def distance(self, t: float) -> float:
        return self.c0 + self.c1 * t + self.c2 * t * t

    def energy(self, t: float) -> float:
        return self.f0 + self.f1 * t + self.f2 * t * t


def sn(k: float, rho: float) -> float:
    if abs(k) * rho * rho < SERIES_CUTOFF:
        return rho * (1.0 - k * rho * rho / 6.0)
    if k > 0:
        r = math.sqrt(k)
        return math.sin(r * rho) / r
    r = math.sqrt(-k)
    return math.sinh(r * rho) / r


def cs(k: float, rho: float) -> float:
    """Derivative of sn_k."""
    if abs(k) * rho * rho < SERIES_CUTOFF:
        return 1.0 - k * rho * rho / 2.0
    if k > 0:
        return math.cos(math.sqrt(k) * rho)
    return math.cosh(math.sqrt(-k) * rho)


def fk(k: float, rho: float) -> float:
    if abs(k) * rho * rho < SERIES_CUTOFF:
        return 0.5 * rho * rho * (1.0 - k * rho * rho / 12.0)
    if k > 0:
        r = math.sqrt(k)
        return 2.0 * math.sin(0.5 * r * rho) ** 2 / k
    r = math.sqrt(-k)
    return 2.0 * math.sinh(0.5 * r * rho) ** 2 / -k


def fk_inverse(k: float, y: float) -> float:
    """Inverse of f_k on [0, diameter)."""
    if y < 0:
        if y > -CLAMP:
            return 0.0
        raise DomainError(f"f_k value {y} is negative")
    if abs(k) * y < 0.5 * SERIES_CUTOFF:
        return math.sqrt(2.0 * y) * (1.0 + k * y / 12.0)
    if k > 0:
        s = k * y / 2.0
        if s >= 1.0:
            raise DomainError("f_k value reaches the model diameter")
        return 2.0 * math.asin(math.sqrt(s)) / math.sqrt(k)
    return 2.0 * math.asinh(math.sqrt(-k * y / 2.0)) / math.sqrt(-k)


def model_functions(kappa: KappaLike, rho: float) -> ModelTriple:
    """Return (sn_k, ct_k, f_k) at ``rho``."""
    kap = as_kappa(kappa)
    if rho < 0 or not math.isfinite(rho):
        raise DomainError(f"rho must be a nonnegative finite length, got {rho}")
    kap.check(rho)
    s = sn(kap.k, rho)
    ct = None if rho == 0 else cs(kap.k, rho) / s
    return ModelTriple(s, ct, fk(kap.k, rho))


def _check_lengths(kap: Kappa, *lengths: float) -> None:
    for x in lengths:
        if x < 0 or not math.isfinite(x):
            raise DomainError(f"lengths must be nonnegative and finite, got {x}")
    kap.check(*lengths)


def side_from_versine(kappa: KappaLike, a: float, b: float, versine: float) -> float:
    """Third side opposite an angle given by ``versine = 1 - cos(angle)``."""
    kap = as_kappa(kappa)
    k = kap.k
    y = fk(k, abs(a - b)) + sn(k, a) * sn(k, b) * versine
    c = fk_inverse(k, y)
    if not kap.admits(c):
        raise DomainError("model triangle side reaches the model diameter")
    return c


def model_side(kappa: KappaLike, a: float, b: float, theta: float) -> float:
    """Side opposite the angle ``theta`` between sides ``a`` and ``b`` in S^2_k."""
    kap = as_kappa(kappa)
    _check_lengths(kap, a, b)
    if not 0.0 <= theta <= math.pi + 1e-15:
        raise DomainError(f"angle must lie in [0, pi], got {theta}")
    return side_from_versine(kap, a, b, 2.0 * math.sin(0.5 * theta) ** 2)


def excursion_allowance(k: float, a: float, b: float, c: float, rtol: float = 0.0) -> float:
    """Cosine excursion attributable to rounding of the inputs (relative error ``rtol``)."""
    err = (rtol + 4 * EPS) * (sn(k, c) * c + sn(k, a + b) * (a + b))
    return CLAMP + 4.0 * err / (sn(k, a) * sn(k, b))


def model_versine(kappa: KappaLike, a: float, b: float, c: float, rtol: float = 0.0) -> float:
    """``1 - cos`` of the model angle between sides a and b with opposite side c."""
    kap = as_kappa(kappa)
    _check_lengths(kap, a, b, c)
    if a == 0 or b == 0:
        raise DomainError("angle undefined when an adjacent side vanishes")
    k = kap.k
    if k > 0 and a + b + c >= 2 * kap.diameter:
        raise DomainError("perimeter too large for a comparison triangle in S^2_k")
    sa, sb = sn(k, a), sn(k, b)
    x = (fk(k, c) - fk(k, abs(a - b))) / (sa * sb)
    if 0.0 <= x <= 2.0:
        return x
    excess = -x if x < 0 else x - 2.0
    if excess <= excursion_allowance(k, a, b, c, rtol):
        return min(max(x, 0.0), 2.0)
    raise DomainError(f"sides ({a}, {b}, {c}) violate the triangle inequality in S^2_k")


def versine_to_angle(x: float) -> float:
    return 2.0 * math.asin(math.sqrt(min(max(x, 0.0), 2.0) / 2.0))


def model_angle(kappa: KappaLike, a: float, b: float, c: float) -> float:
    """Angle between sides ``a`` and ``b`` of the S^2_k triangle with third side ``c``."""
    return versine_to_angle(model_versine(kappa, a, b, c))


def comparison_point_distance(
    kappa: KappaLike, pq: float, pr: float, qr: float, t: float
) -> float:
    """Distance from the comparison point of p to the point at arc length t on [qr]."""
    kap = as_kappa(kappa)
    _check_lengths(kap, pq, pr, qr, t)
    if t > qr * (1 + 1e-12) + 1e-15:
        raise DomainError(f"t={t} exceeds |qr|={qr}")
    if t == 0:
        return pq
    if pq == 0:
        return t
    x = model_versine(kap, pq, qr, pr)
    return side_from_versine(kap, pq, t, x)


def expansion_coefficients(kappa: KappaLike, a: float, theta: float) -> ExpansionCoefficients:
    """Coefficients of |ps| and f_k(|ps|) to second order in |qs| at |pq| = a."""
    kap = as_kappa(kappa)
    if a <= 0:
        raise DomainError("expansion requires |pq| > 0 (ct_k is singular at 0)")
    triple = model_functions(kap, a)
    c = math.cos(theta)
    s2 = math.sin(theta) ** 2
    return ExpansionCoefficients(
        c0=a,
        c1=-c,
        c2=0.5 * triple.ct * s2,
        f0=triple.f,
        f1=-triple.sn * c,
        f2=0.5 * (1.0 - kap.k * triple.f),
    )
