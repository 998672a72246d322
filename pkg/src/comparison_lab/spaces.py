"""Concrete intrinsic metric spaces.

Analytic kinds have closed-form distances and geodesics; graph kinds use the
shortest-path metric on a weighted graph. Every space exposes the same
surface: ``distance``, ``geodesic``/``geodesics``, ``sample``,
``boundary_points`` and ``on_boundary``.

Coordinates per kind (``SpacePoint.coords``):

=============== ==========================================
plane           (x, y)
half_plane      (x, y), y >= 0, boundary y = 0
flat_disk       (x, y), x^2 + y^2 <= R^2, boundary the rim
segment         (x,), 0 <= x <= L, boundary {0, L}
sphere          (rho, phi): distance from the north pole, azimuth
spherical_cap   (rho, phi) with rho <= polar radius, boundary the rim
flat_cone       (r, phi), 0 <= phi < total angle
k_pod           (ray, r), ray in 0..m-1, boundary the ray ends
graph           (vertex,)
=============== ==========================================
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .modelspace import DomainError

__all__ = [
    "SpaceSpecError",
    "UnsupportedOperation",
    "SpacePoint",
    "GeodesicPath",
    "BoundaryCurve",
    "MetricSpace",
    "Plane",
    "HalfPlane",
    "FlatDisk",
    "Segment",
    "Sphere",
    "SphericalCap",
    "FlatCone",
    "KPod",
    "GraphSpace",
    "build_space",
    "subdivide",
    "boundary_points",
    "k_pod_graph",
    "sample_triples",
    "point_from_json",
]

TWO_PI = 2.0 * math.pi


class SpaceSpecError(ValueError):
    """Invalid space specification."""


class UnsupportedOperation(TypeError):
    pass


@dataclass(frozen=True, order=True)
class SpacePoint:
    coords: tuple
    side: int = 0  # 0 = base copy, 1 = mirror copy (doubled spaces only)

    def with_side(self, side: int) -> "SpacePoint":
        return SpacePoint(self.coords, side)

    def to_json(self) -> dict:
        return {"coords": [c if isinstance(c, int) else float(c) for c in self.coords], "side": self.side}


def point_from_json(obj) -> SpacePoint:
    if isinstance(obj, dict):
        coords = obj["coords"]
        side = int(obj.get("side", 0))
    else:
        coords, side = obj, 0
    return SpacePoint(tuple(coords), side)


def P(*coords, side: int = 0) -> SpacePoint:
    """Shorthand constructor."""
    return SpacePoint(tuple(coords), side)


class GeodesicPath:
    """Arc-length parameterized minimal geodesic.

    ``locate(t)`` returns ``(t_actual, point)``; analytic paths reproduce t
    exactly, graph paths snap to the nearest vertex on the path.
    """

    def __init__(
        self,
        start: SpacePoint,
        end: SpacePoint,
        length: float,
        locate: Callable[[float], tuple],
        knots: Optional[np.ndarray] = None,
        singular: Sequence[float] = (),
        step: Optional[float] = None,
        exceptional: Sequence[float] = (),
    ):
        self.start = start
        self.end = end
        self.length = float(length)
        self._locate = locate
        self.knots = None if knots is None else np.asarray(knots, dtype=float)
        self.singular = tuple(float(s) for s in singular)
        # parameters where only the Dini gate applies (e.g. boundary crossings)
        self.exceptional = tuple(float(s) for s in exceptional)
        n = max(1, math.ceil(self.length / step - 1e-9)) if step else 64
        if self.knots is not None:
            self.params = self.knots.copy()
        else:
            self.params = np.linspace(0.0, self.length, n + 1)
        self._points = None

    @property
    def points(self) -> list:
        if self._points is None:
            self._points = [self._locate(t)[1] for t in self.params]
        return self._points

    @property
    def discrete(self) -> bool:
        return self.knots is not None

    def point_at(self, t: float) -> tuple:
        if t < -1e-12 * max(1.0, self.length) or t > self.length * (1 + 1e-12) + 1e-15:
            raise DomainError(f"parameter {t} outside [0, {self.length}]")
        return self._locate(min(max(t, 0.0), self.length))

    def reversed(self) -> "GeodesicPath":
        L = self.length

        def locate(t):
            ta, p = self._locate(L - t)
            return L - ta, p

        knots = None if self.knots is None else (L - self.knots)[::-1]
        return GeodesicPath(self.end, self.start, L, locate, knots,
                            [L - s for s in self.singular][::-1],
                            exceptional=[L - s for s in self.exceptional][::-1])

    def restrict(self, a: float, b: float) -> "GeodesicPath":
        """Sub-path from gamma(a) to gamma(b), a < b."""
        if not 0 <= a < b <= self.length * (1 + 1e-12):
            raise DomainError(f"bad restriction [{a}, {b}] of a path of length {self.length}")
        knots = None
        if self.knots is not None:
            a = float(self.point_at(a)[0])
            b = float(self.point_at(b)[0])
            sel = self.knots[(self.knots >= a - 1e-12) & (self.knots <= b + 1e-12)]
            knots = sel - a
        length = b - a

        def locate(t):
            ta, p = self._locate(a + t)
            return ta - a, p

        start = self._locate(a)[1]
        end = self._locate(b)[1]
        singular = [s - a for s in self.singular if a < s < b]
        exceptional = [s - a for s in self.exceptional if a < s < b]
        return GeodesicPath(start, end, length, locate, knots, singular, exceptional=exceptional)

    def __repr__(self):
        return f"GeodesicPath({self.start} -> {self.end}, length={self.length:.6g})"


def concat_paths(first: GeodesicPath, second: GeodesicPath, junction_singular=True,
                 junction_exceptional=False) -> GeodesicPath:
    L1 = first.length

    def locate(t):
        if t <= L1:
            return first._locate(t)
        ta, p = second._locate(t - L1)
        return ta + L1, p

    knots = None
    if first.knots is not None and second.knots is not None:
        knots = np.concatenate([first.knots, second.knots[1:] + L1])
    singular = list(first.singular) + ([L1] if junction_singular and 0 < L1 < L1 + second.length else [])
    singular += [s + L1 for s in second.singular]
    exceptional = list(first.exceptional) + ([L1] if junction_exceptional else [])
    exceptional += [s + L1 for s in second.exceptional]
    return GeodesicPath(first.start, second.end, L1 + second.length, locate, knots, singular,
                        exceptional=exceptional)


@dataclass
class BoundaryCurve:
    """A parameterized piece of boundary used by the doubling minimization."""

    lo: float
    hi: float
    periodic: bool
    point: Callable[[float], SpacePoint]
    distances: Callable[[SpacePoint, np.ndarray], np.ndarray]
    speed: float  # arc length per unit parameter


class MetricSpace:
    """Common interface of every catalog space."""

    kind = "abstract"
    distance_rtol = 4e-16
    floor = 0.0  # smallest meaningful geodesic scale
    dimension = 2

    # -- required per kind
    def distance(self, x: SpacePoint, y: SpacePoint) -> float:
        raise NotImplementedError

    def geodesics(self, x: SpacePoint, y: SpacePoint, step: Optional[float] = None) -> list:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> list:
        raise NotImplementedError

    def validate(self, x: SpacePoint) -> SpacePoint:
        return x

    def to_spec(self) -> dict:
        raise NotImplementedError

    # -- shared
    def geodesic(self, x: SpacePoint, y: SpacePoint, step: Optional[float] = None) -> GeodesicPath:
        """Deterministic choice among the minimal geodesics from x to y."""
        return self.geodesics(x, y, step)[0]

    def boundary_points(self, n: int) -> list:
        return []

    def on_boundary(self, x: SpacePoint) -> bool:
        return False

    def boundary_candidates(self, x: SpacePoint, y: SpacePoint):
        """Discrete boundary points and boundary curves to minimize over."""
        return [], []

    @property
    def has_boundary(self) -> bool:
        return bool(self.boundary_points(8))

    def convention_notes(self, kappa: float) -> list:
        return []

    def _require_distinct(self, x, y):
        if self.distance(x, y) == 0.0:
            raise DomainError("geodesic requested between coincident points")

    def __repr__(self):
        return f"{type(self).__name__}({self.to_spec()['params']})"


def _positive(name, value):
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise SpaceSpecError(f"{name} must be a positive finite number, got {value}")
    return value


def _linear_path(x: SpacePoint, y: SpacePoint, step, make) -> GeodesicPath:
    a = np.asarray(x.coords, dtype=float)
    b = np.asarray(y.coords, dtype=float)
    L = float(np.linalg.norm(b - a))

    def locate(t):
        return t, make(a + (b - a) * (t / L))

    return GeodesicPath(x, y, L, locate, step=step)


# ---------------------------------------------------------------- flat kinds


class Plane(MetricSpace):
    kind = "plane"

    def __init__(self, extent: float = 1.0):
        self.extent = _positive("extent", extent)

    def validate(self, x):
        if len(x.coords) != 2 or x.side != 0:
            raise DomainError(f"plane point needs (x, y): {x}")
        return x

    def distance(self, x, y):
        self.validate(x), self.validate(y)
        return math.hypot(x.coords[0] - y.coords[0], x.coords[1] - y.coords[1])

    def geodesics(self, x, y, step=None):
        self._require_distinct(x, y)
        return [_linear_path(x, y, step, lambda c: SpacePoint((float(c[0]), float(c[1]))))]

    def sample(self, rng, n):
        xy = rng.uniform(-self.extent, self.extent, size=(n, 2))
        return [SpacePoint((float(a), float(b))) for a, b in xy]

    def to_spec(self):
        return {"kind": self.kind, "params": {"extent": self.extent}}


class HalfPlane(Plane):
    kind = "half_plane"

    def validate(self, x):
        super().validate(x)
        if x.coords[1] < 0:
            raise DomainError(f"half-plane point below the boundary line: {x}")
        return x

    def sample(self, rng, n):
        xs = rng.uniform(-self.extent, self.extent, size=n)
        ys = rng.uniform(0.0, self.extent, size=n)
        return [SpacePoint((float(a), float(b))) for a, b in zip(xs, ys)]

    def boundary_points(self, n):
        return [SpacePoint((float(z), 0.0)) for z in np.linspace(-self.extent, self.extent, n)]

    def on_boundary(self, x):
        return x.coords[1] == 0.0

    def boundary_candidates(self, x, y):
        lo, hi = sorted((x.coords[0], y.coords[0]))
        if hi - lo < 1e-15:
            return [SpacePoint((lo, 0.0))], []

        def dists(p, zs):
            return np.hypot(zs - p.coords[0], p.coords[1])

        curve = BoundaryCurve(lo, hi, False, lambda z: SpacePoint((float(z), 0.0)), dists, 1.0)
        return [], [curve]


class FlatDisk(Plane):
    kind = "flat_disk"

    def __init__(self, radius: float = 1.0):
        self.radius = _positive("radius", radius)
        self.extent = self.radius

    def validate(self, x):
        super().validate(x)
        if math.hypot(*x.coords) > self.radius * (1 + 1e-12):
            raise DomainError(f"point outside the disk: {x}")
        return x

    def sample(self, rng, n):
        r = self.radius * np.sqrt(rng.uniform(size=n))
        a = rng.uniform(0, TWO_PI, size=n)
        return [SpacePoint((float(ri * math.cos(ai)), float(ri * math.sin(ai)))) for ri, ai in zip(r, a)]

    def rim(self, phi: float) -> SpacePoint:
        return SpacePoint((self.radius * math.cos(phi), self.radius * math.sin(phi)))

    def boundary_points(self, n):
        return [self.rim(TWO_PI * i / n) for i in range(n)]

    def on_boundary(self, x):
        return abs(math.hypot(*x.coords) - self.radius) <= 1e-12 * self.radius

    def boundary_candidates(self, x, y):
        R = self.radius

        def dists(p, phis):
            return np.hypot(R * np.cos(phis) - p.coords[0], R * np.sin(phis) - p.coords[1])

        return [], [BoundaryCurve(0.0, TWO_PI, True, self.rim, dists, R)]

    def to_spec(self):
        return {"kind": self.kind, "params": {"radius": self.radius}}


class Segment(MetricSpace):
    kind = "segment"
    dimension = 1

    def __init__(self, length: float = 1.0):
        self.length = _positive("length", length)

    def validate(self, x):
        if len(x.coords) != 1 or not -1e-12 <= x.coords[0] <= self.length * (1 + 1e-12):
            raise DomainError(f"segment point outside [0, {self.length}]: {x}")
        return x

    def distance(self, x, y):
        self.validate(x), self.validate(y)
        return abs(x.coords[0] - y.coords[0])

    def geodesics(self, x, y, step=None):
        self._require_distinct(x, y)
        a, b = x.coords[0], y.coords[0]
        L = abs(b - a)
        sgn = 1.0 if b > a else -1.0
        return [GeodesicPath(x, y, L, lambda t: (t, SpacePoint((a + sgn * t,))), step=step)]

    def sample(self, rng, n):
        return [SpacePoint((float(v),)) for v in rng.uniform(0, self.length, size=n)]

    def boundary_points(self, n):
        if n < 1:
            return []
        pts = [SpacePoint((0.0,)), SpacePoint((self.length,))]
        return pts[: max(1, min(n, 2))] if n < 2 else pts

    def on_boundary(self, x):
        return x.coords[0] == 0.0 or x.coords[0] == self.length

    def boundary_candidates(self, x, y):
        return self.boundary_points(2), []

    def convention_notes(self, kappa):
        if kappa > 0 and self.length > math.pi / math.sqrt(kappa):
            return [f"1-dimensional space longer than pi/sqrt(k) = {math.pi / math.sqrt(kappa):.6g}; "
                    "intervals are conventionally limited to that length under curvature >= k"]
        return []

    def to_spec(self):
        return {"kind": self.kind, "params": {"length": self.length}}


# ---------------------------------------------------------------- spherical kinds


class Sphere(MetricSpace):
    """Round sphere of curvature k; coordinates (rho, phi) with rho the
    distance from the north pole."""

    kind = "sphere"
    distance_rtol = 1e-15

    def __init__(self, k: float = 1.0):
        self.k = _positive("k", k)
        self.scale = math.sqrt(self.k)
        self.rho_max = math.pi / self.scale

    def validate(self, x):
        if len(x.coords) != 2 or x.side != 0:
            raise DomainError(f"sphere point needs (rho, phi): {x}")
        if not -1e-12 <= x.coords[0] <= self.rho_max * (1 + 1e-12):
            raise DomainError(f"polar distance out of range: {x}")
        return x

    def unit(self, x) -> np.ndarray:
        th = self.scale * x.coords[0]
        ph = x.coords[1]
        s = math.sin(th)
        return np.array([s * math.cos(ph), s * math.sin(ph), math.cos(th)])

    def from_unit(self, u) -> SpacePoint:
        rho = math.atan2(math.hypot(u[0], u[1]), u[2]) / self.scale
        phi = math.atan2(u[1], u[0]) % TWO_PI if math.hypot(u[0], u[1]) > 1e-300 else 0.0
        return SpacePoint((rho, phi))

    @staticmethod
    def _angle(u, v) -> float:
        return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))

    def distance(self, x, y):
        self.validate(x), self.validate(y)
        return self._angle(self.unit(x), self.unit(y)) / self.scale

    def geodesics(self, x, y, step=None):
        self._require_distinct(x, y)
        u, v = self.unit(x), self.unit(y)
        omega = self._angle(u, v)
        if omega > math.pi * (1 - 1e-12):
            raise DomainError("antipodal points have no unique minimal geodesic")
        w = v - np.dot(u, v) * u
        w /= np.linalg.norm(w)
        L = omega / self.scale

        def locate(t):
            a = self.scale * t
            return t, self.from_unit(math.cos(a) * u + math.sin(a) * w)

        return [GeodesicPath(x, y, L, locate, step=step)]

    def sample(self, rng, n):
        z = rng.uniform(-1, 1, size=n)
        ph = rng.uniform(0, TWO_PI, size=n)
        return [SpacePoint((float(math.acos(zi) / self.scale), float(pi))) for zi, pi in zip(z, ph)]

    def to_spec(self):
        return {"kind": self.kind, "params": {"k": self.k}}


class SphericalCap(Sphere):
    """Closed cap of polar radius ``polar_radius`` around the north pole of
    the sphere of curvature k. Caps up to the hemisphere are convex, so the
    intrinsic distance is the ambient one."""

    kind = "spherical_cap"

    def __init__(self, k: float = 1.0, polar_radius: float = math.pi / 2):
        super().__init__(k)
        self.polar_radius = _positive("polar_radius", polar_radius)
        if self.polar_radius * self.scale > math.pi / 2 * (1 + 1e-12):
            raise SpaceSpecError("caps larger than a hemisphere are not convex")

    def validate(self, x):
        super().validate(x)
        if x.coords[0] > self.polar_radius * (1 + 1e-12):
            raise DomainError(f"point outside the cap: {x}")
        return x

    def sample(self, rng, n):
        zmin = math.cos(self.scale * self.polar_radius)
        z = rng.uniform(zmin, 1, size=n)
        ph = rng.uniform(0, TWO_PI, size=n)
        return [SpacePoint((float(math.acos(zi) / self.scale), float(pi))) for zi, pi in zip(z, ph)]

    def rim(self, phi: float) -> SpacePoint:
        return SpacePoint((self.polar_radius, float(phi) % TWO_PI))

    def boundary_points(self, n):
        return [self.rim(TWO_PI * i / n) for i in range(n)]

    def on_boundary(self, x):
        return abs(x.coords[0] - self.polar_radius) <= 1e-12 * self.polar_radius

    def boundary_candidates(self, x, y):
        th = self.scale * self.polar_radius
        s, c = math.sin(th), math.cos(th)
        sc = self.scale

        def dists(p, phis):
            u = self.unit(p)
            dots = s * (u[0] * np.cos(phis) + u[1] * np.sin(phis)) + c * u[2]
            cr = np.sqrt(np.maximum(0.0, 1.0 - dots * dots))
            # atan2 form keeps accuracy near 0 and pi
            vx, vy, vz = s * np.cos(phis), s * np.sin(phis), np.full_like(phis, c)
            cx = u[1] * vz - u[2] * vy
            cy = u[2] * vx - u[0] * vz
            cz = u[0] * vy - u[1] * vx
            cr = np.sqrt(cx * cx + cy * cy + cz * cz)
            return np.arctan2(cr, dots) / sc

        return [], [BoundaryCurve(0.0, TWO_PI, True, self.rim, dists, s / sc)]

    def to_spec(self):
        return {"kind": self.kind, "params": {"k": self.k, "polar_radius": self.polar_radius}}


# ---------------------------------------------------------------- singular kinds


class FlatCone(MetricSpace):
    """Flat cone of total angle ``total_angle`` with apex at r = 0.

    Distances follow the unrolling rule: angular gap g = the shorter way
    around; g < pi gives the planar law of cosines, g >= pi forces the
    geodesic through the apex.
    """

    kind = "flat_cone"

    def __init__(self, total_angle: float, radius: float = 1.0):
        self.total_angle = _positive("total_angle", total_angle)
        self.radius = _positive("radius", radius)

    def validate(self, x):
        if len(x.coords) != 2 or x.side != 0 or x.coords[0] < 0:
            raise DomainError(f"cone point needs (r >= 0, phi): {x}")
        return x

    def _gaps(self, x, y):
        g = (y.coords[1] - x.coords[1]) % self.total_angle
        return g, self.total_angle - g

    def distance(self, x, y):
        self.validate(x), self.validate(y)
        r1, r2 = x.coords[0], y.coords[0]
        # order-free gap keeps the distance exactly symmetric
        g = abs(y.coords[1] - x.coords[1]) % self.total_angle
        gap = min(g, self.total_angle - g)
        if gap >= math.pi:
            return r1 + r2
        return math.sqrt((r1 - r2) ** 2 + 4.0 * (r1 * r2) * math.sin(0.5 * gap) ** 2)

    def passes_apex(self, x, y) -> bool:
        return x.coords[0] == 0 or y.coords[0] == 0 or min(self._gaps(x, y)) >= math.pi

    def geodesics(self, x, y, step=None):
        self._require_distinct(x, y)
        r1, phi1 = x.coords
        r2, phi2 = y.coords
        if self.passes_apex(x, y):
            L = r1 + r2

            def locate(t):
                if t <= r1:
                    return t, SpacePoint((r1 - t, phi1 if r1 - t > 0 else 0.0))
                return t, SpacePoint((t - r1, phi2))

            sing = [r1] if 0 < r1 < L else []
            return [GeodesicPath(x, y, L, locate, singular=sing, step=step)]
        g_plus, g_minus = self._gaps(x, y)
        gap = min(g_plus, g_minus)
        L = self.distance(x, y)
        dirs = []
        if g_plus < math.pi and g_plus <= gap + 1e-14:
            dirs.append((1.0, g_plus))
        if g_minus < math.pi and g_minus <= gap + 1e-14:
            dirs.append((-1.0, g_minus))
        paths = []
        for sgn, g in dirs:
            p1 = np.array([r2 * math.cos(g), r2 * math.sin(g)])
            p0 = np.array([r1, 0.0])

            def locate(t, p0=p0, p1=p1, sgn=sgn):
                q = p0 + (p1 - p0) * (t / L)
                rho = math.hypot(q[0], q[1])
                alpha = math.atan2(q[1], q[0])
                return t, SpacePoint((rho, (phi1 + sgn * alpha) % self.total_angle))

            paths.append(GeodesicPath(x, y, L, locate, step=step))
        return paths

    def sample(self, rng, n):
        r = self.radius * np.sqrt(rng.uniform(size=n))
        phi = rng.uniform(0, self.total_angle, size=n)
        return [SpacePoint((float(a), float(b))) for a, b in zip(r, phi)]

    def to_spec(self):
        return {"kind": self.kind, "params": {"total_angle": self.total_angle, "radius": self.radius}}


class KPod(MetricSpace):
    """m rays of length ``length`` glued at a common point (a tripod for m = 3)."""

    kind = "k_pod"
    dimension = 1

    def __init__(self, m: int = 3, length: float = 1.0):
        if int(m) != m or m < 2:
            raise SpaceSpecError(f"k_pod needs m >= 2 rays, got {m}")
        self.m = int(m)
        self.length = _positive("length", length)

    def validate(self, x):
        if len(x.coords) != 2 or x.side != 0:
            raise DomainError(f"k_pod point needs (ray, r): {x}")
        ray, r = x.coords
        if int(ray) != ray or not 0 <= ray < self.m or not -1e-12 <= r <= self.length * (1 + 1e-12):
            raise DomainError(f"k_pod point out of range: {x}")
        return x

    def distance(self, x, y):
        self.validate(x), self.validate(y)
        (i, a), (j, b) = x.coords, y.coords
        if i == j or a == 0 or b == 0:
            return abs(a - b) if i == j else a + b
        return a + b

    def geodesics(self, x, y, step=None):
        self._require_distinct(x, y)
        (i, a), (j, b) = x.coords, y.coords
        if i == j or a == 0 or b == 0:
            ray = i if a > 0 else j
            sgn = 1.0 if b > a else -1.0
            L = abs(b - a)
            return [GeodesicPath(x, y, L, lambda t: (t, SpacePoint((ray, a + sgn * t))), step=step)]
        L = a + b

        def locate(t):
            if t <= a:
                return t, SpacePoint((i, a - t))
            return t, SpacePoint((j, t - a))

        return [GeodesicPath(x, y, L, locate, singular=[a], step=step)]

    def sample(self, rng, n):
        rays = rng.integers(0, self.m, size=n)
        rs = rng.uniform(0, self.length, size=n)
        return [SpacePoint((int(i), float(r))) for i, r in zip(rays, rs)]

    def boundary_points(self, n):
        return [SpacePoint((i, self.length)) for i in range(self.m)]

    def on_boundary(self, x):
        return x.coords[1] == self.length

    def boundary_candidates(self, x, y):
        return self.boundary_points(self.m), []

    def to_spec(self):
        return {"kind": self.kind, "params": {"m": self.m, "length": self.length}}


# ---------------------------------------------------------------- graphs


class GraphSpace(MetricSpace):
    """Shortest-path metric on a connected graph with positive edge weights.

    Points are vertices. Distances come from single-source Dijkstra runs
    (compiled kernel when available), cached per source.
    """

    kind = "graph"
    dimension = 1

    def __init__(self, n_vertices: int, edges, boundary=(), original_vertices: Optional[int] = None,
                 requested_pitch: Optional[float] = None, cache_size: int = 4096):
        n = int(n_vertices)
        if n < 1:
            raise SpaceSpecError("graph needs at least one vertex")
        edges = [(int(u), int(v), float(w)) for u, v, w in edges]
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise SpaceSpecError(f"edge ({u}, {v}) references a missing vertex")
            if not w > 0 or not math.isfinite(w):
                raise SpaceSpecError(f"edge ({u}, {v}) has nonpositive weight {w}")
            if u == v:
                raise SpaceSpecError(f"self-loop at vertex {u}")
        self.n = n
        self.edges = edges
        self.boundary = tuple(sorted(set(int(b) for b in boundary)))
        for b in self.boundary:
            if not 0 <= b < n:
                raise SpaceSpecError(f"boundary vertex {b} does not exist")
        self.original_vertices = n if original_vertices is None else original_vertices
        self.requested_pitch = requested_pitch
        src = np.array([e[0] for e in edges] + [e[1] for e in edges], dtype=np.int64)
        dst = np.array([e[1] for e in edges] + [e[0] for e in edges], dtype=np.int64)
        wts = np.array([e[2] for e in edges] * 2, dtype=float)
        order = np.lexsort((dst, src))
        self.indices = dst[order]
        self.weights = wts[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, src + 1, 1)
        self.indptr = np.cumsum(self.indptr)
        self.degree = np.diff(self.indptr)
        self._weight = {}
        for u, v, w in edges:
            key = (min(u, v), max(u, v))
            self._weight[key] = min(w, self._weight.get(key, math.inf))
        self.pitch = max(self._weight.values()) if self._weight else 0.0
        self.floor = 4.0 * self.pitch
        self.distance_rtol = 64 * 2.2e-16 * max(1, len(edges))
        self._sssp = lru_cache(maxsize=cache_size)(self._sssp_uncached)
        if n > 1 and not np.all(np.isfinite(self._sssp(0)[0])):
            raise SpaceSpecError("graph is disconnected")

    def _sssp_uncached(self, source: int):
        return _kernels.dijkstra(self.indptr, self.indices, self.weights, source)

    def edge_weight(self, u, v) -> float:
        return self._weight[(min(u, v), max(u, v))]

    def validate(self, x):
        if len(x.coords) != 1 or int(x.coords[0]) != x.coords[0] or not 0 <= x.coords[0] < self.n:
            raise DomainError(f"graph point must be a vertex id: {x}")
        return x

    def distance(self, x, y):
        self.validate(x), self.validate(y)
        u, v = int(x.coords[0]), int(y.coords[0])
        s, t = min(u, v), max(u, v)
        return float(self._sssp(s)[0][t])

    def distances_from(self, x) -> np.ndarray:
        return self._sssp(int(x.coords[0]))[0]

    def _vertex_path(self, u, v):
        s, t = min(u, v), max(u, v)
        pred = self._sssp(s)[1]
        path = [t]
        while path[-1] != s:
            path.append(int(pred[path[-1]]))
        path.reverse()
        return path if s == u else path[::-1]

    def _all_vertex_paths(self, u, v, cap):
        s, t = min(u, v), max(u, v)
        dist = self._sssp(s)[0]
        tol = 1e-12 * max(1.0, dist[t])
        out = []

        def back(node, acc):
            if len(out) >= cap:
                return
            if node == s:
                out.append([s] + acc[::-1])
                return
            nbrs = self.indices[self.indptr[node]:self.indptr[node + 1]]
            ws = self.weights[self.indptr[node]:self.indptr[node + 1]]
            for w_, nb in sorted(zip(ws, nbrs), key=lambda z: z[1]):
                if abs(dist[nb] + w_ - dist[node]) <= tol and dist[nb] < dist[node]:
                    back(int(nb), acc + [node])

        back(t, [])
        return out if s == u else [p[::-1] for p in out]

    def _path_from_vertices(self, verts) -> GeodesicPath:
        knots = [0.0]
        for a, b in zip(verts[:-1], verts[1:]):
            knots.append(knots[-1] + self.edge_weight(a, b))
        knots = np.array(knots)
        pts = [SpacePoint((int(v),)) for v in verts]

        def locate(t):
            i = int(np.argmin(np.abs(knots - t)))
            return float(knots[i]), pts[i]

        singular = [float(knots[i]) for i in range(1, len(verts) - 1)
                    if verts[i] < self.original_vertices and self.degree[verts[i]] >= 3]
        return GeodesicPath(pts[0], pts[-1], float(knots[-1]), locate, knots=knots, singular=singular)

    def geodesics(self, x, y, step=None, cap: int = 16):
        self._require_distinct(x, y)
        u, v = int(x.coords[0]), int(y.coords[0])
        first = self._vertex_path(u, v)
        rest = [p for p in self._all_vertex_paths(u, v, cap) if p != first]
        return [self._path_from_vertices(p) for p in [first] + rest[: cap - 1]]

    def sample(self, rng, n):
        return [SpacePoint((int(v),)) for v in rng.integers(0, self.n, size=n)]

    def boundary_points(self, n):
        return [SpacePoint((b,)) for b in self.boundary]

    def on_boundary(self, x):
        return int(x.coords[0]) in set(self.boundary)

    def to_spec(self):
        spec = {"kind": self.kind,
                "params": {"n_vertices": self.n, "edges": [[u, v, w] for u, v, w in self.edges]},
                "boundary": list(self.boundary)}
        return spec


def subdivide(space: MetricSpace, h: float) -> GraphSpace:
    """Split every edge into equal pieces of length <= h.

    Original vertex ids are kept; new vertices are appended. Subdivision
    points on edges joining two boundary vertices join the boundary.
    """
    if not isinstance(space, GraphSpace):
        raise UnsupportedOperation(f"subdivide needs a graph space, got {space.kind}")
    h = _positive("h", h)
    n = space.n
    new_edges = []
    boundary = set(space.boundary)
    for u, v, w in space.edges:
        m = max(1, math.ceil(w / h - 1e-12))
        piece = w / m
        chain = [u] + list(range(n, n + m - 1)) + [v]
        if u in space.boundary and v in space.boundary:
            boundary.update(range(n, n + m - 1))
        n += m - 1
        new_edges.extend((a, b, piece) for a, b in zip(chain[:-1], chain[1:]))
    return GraphSpace(n, new_edges, sorted(boundary), original_vertices=space.original_vertices,
                      requested_pitch=h)


def k_pod_graph(m: int, length: float, h: Optional[float] = None) -> GraphSpace:
    """Star graph version of the k-pod: vertex 0 is the center, vertex i the end of ray i-1."""
    g = GraphSpace(m + 1, [(0, i, length) for i in range(1, m + 1)], boundary=range(1, m + 1))
    return subdivide(g, h) if h else g


def boundary_points(space: MetricSpace, n: int) -> list:
    return space.boundary_points(n)


def sample_triples(space: MetricSpace, n: int, rng: np.random.Generator,
                   radius: Optional[float] = None, max_tries: int = 200) -> list:
    """Random (p, q, r) with q != r; p and r within ``radius`` of q when given."""
    triples = []
    while len(triples) < n:
        q = space.sample(rng, 1)[0]
        picked = []
        for _ in range(max_tries):
            cand = space.sample(rng, 1)[0]
            if radius is None or space.distance(q, cand) <= radius:
                picked.append(cand)
                if len(picked) == 2:
                    break
        if len(picked) < 2:
            continue
        p, r = picked
        if space.distance(q, r) == 0.0:
            continue
        triples.append((p, q, r))
    return triples


# ---------------------------------------------------------------- construction

_ANALYTIC = {
    "plane": (Plane, {"extent": 1.0}),
    "half_plane": (HalfPlane, {"extent": 1.0}),
    "flat_disk": (FlatDisk, {"radius": 1.0}),
    "segment": (Segment, {"length": 1.0}),
    "sphere": (Sphere, {"k": 1.0}),
    "spherical_cap": (SphericalCap, {"k": 1.0, "polar_radius": math.pi / 2}),
    "flat_cone": (FlatCone, {"total_angle": None, "radius": 1.0}),
    "k_pod": (KPod, {"m": 3, "length": 1.0}),
}

CATALOG = sorted(list(_ANALYTIC) + ["graph", "double"])


def build_space(spec: dict) -> MetricSpace:
    """Construct a space from its JSON-style specification.

    ``{"kind": ..., "params": {...}, "boundary": [...]}``; doubled spaces use
    ``{"kind": "double", "base": {...}, "n_b": 256}``.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SpaceSpecError("space specification needs a 'kind'")
    kind = spec["kind"]
    params = dict(spec.get("params", {}))
    if kind == "double":
        from .doubling import double_space

        if "base" not in spec:
            raise SpaceSpecError("double needs a 'base' specification")
        return double_space(build_space(spec["base"]), int(spec.get("n_b", 256)))
    if kind == "graph":
        try:
            n = params["n_vertices"]
            edges = params["edges"]
        except KeyError as exc:
            raise SpaceSpecError(f"graph needs {exc.args[0]!r}") from None
        g = GraphSpace(n, edges, spec.get("boundary", params.get("boundary", ())))
        if params.get("subdivide"):
            g = subdivide(g, params["subdivide"])
        return g
    if kind not in _ANALYTIC:
        raise SpaceSpecError(f"unknown space kind {kind!r}; known: {', '.join(CATALOG)}")
    cls, defaults = _ANALYTIC[kind]
    unknown = set(params) - set(defaults)
    if unknown:
        raise SpaceSpecError(f"unknown parameters for {kind}: {sorted(unknown)}")
    merged = {**defaults, **params}
    missing = [k for k, v in merged.items() if v is None]
    if missing:
        raise SpaceSpecError(f"{kind} needs parameters {missing}")
    return cls(**merged)
