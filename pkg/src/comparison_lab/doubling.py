"""Doubling D(X): two copies of X glued along the declared boundary.

Same-side distances are base distances; a boundary point belongs to both
copies. Cross-side distances are min over boundary points z of
|xz| + |zy|: exact over boundary vertices for graph bases, and for
analytic bases a coarse scan over ``n_b`` samples per boundary curve, three
rounds of 10x local refinement around every Lipschitz-admissible candidate
and a final bounded Brent polish.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .conditions import (
    check_angle_additivity,
    check_condition_1,
    check_condition_B,
    _instances,
)
from .modelspace import DomainError
from .reporting import CheckConfig, CheckReport, combine_verdicts, jsonable, merge_reports
from .spaces import (
    GeodesicPath,
    GraphSpace,
    MetricSpace,
    SpacePoint,
    SpaceSpecError,
    concat_paths,
    sample_triples,
)

__all__ = [
    "CrossWitness",
    "CrossingReport",
    "DoubledSpace",
    "double_space",
    "crossing_count",
    "check_doubling_theorem",
]

REFINE_ROUNDS = 3
REFINE_FACTOR = 10


@dataclass(frozen=True)
class CrossWitness:
    """Result of a cross-side minimization."""

    distance: float
    z: SpacePoint
    bound: float  # discretization bound of the minimization (0 for exact)
    near_ties: tuple = ()  # other near-minimal boundary points


@dataclass
class CrossingReport:
    count: int
    params: list = field(default_factory=list)
    boundary_segments: list = field(default_factory=list)


def _runs(mask: np.ndarray, periodic: bool) -> list:
    """Maximal runs of True as (start, stop) index pairs (stop exclusive,
    may exceed len for a run that wraps around)."""
    n = len(mask)
    idx = np.flatnonzero(mask)
    if len(idx) == 0:
        return []
    runs = []
    start = prev = idx[0]
    for i in idx[1:]:
        if i != prev + 1:
            runs.append((start, prev + 1))
            start = i
        prev = i
    runs.append((start, prev + 1))
    if periodic and len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n:
        first = runs.pop(0)
        s, e = runs.pop()
        runs.append((s, n + first[1]))
    return runs


class DoubledSpace(MetricSpace):
    kind = "double"

    def __init__(self, base: MetricSpace, n_b: int = 256):
        if isinstance(base, DoubledSpace):
            raise SpaceSpecError("doubling a doubled space is not supported")
        if not base.boundary_points(8):
            raise SpaceSpecError(f"{base.kind} has no declared boundary; nothing to glue along")
        self.base = base
        self.n_b = int(n_b)
        self.dimension = base.dimension
        self.floor = base.floor
        self.graph = isinstance(base, GraphSpace)
        self.distance_rtol = base.distance_rtol if self.graph else max(base.distance_rtol, 1e-14)
        self._cache = {}
        if self.graph:
            self._bverts = np.array(base.boundary, dtype=np.int64)

    # ---- points
    def validate(self, x: SpacePoint) -> SpacePoint:
        if x.side not in (0, 1):
            raise DomainError(f"side tag must be 0 (base) or 1 (mirror): {x}")
        self.base.validate(SpacePoint(x.coords))
        return x

    def _b(self, x: SpacePoint) -> SpacePoint:
        return SpacePoint(x.coords)

    def same_side(self, x, y) -> bool:
        return x.side == y.side or self.base.on_boundary(self._b(x)) or self.base.on_boundary(self._b(y))

    # ---- metric
    def distance(self, x, y):
        self.validate(x), self.validate(y)
        if self.same_side(x, y):
            return self.base.distance(self._b(x), self._b(y))
        return self.cross(x, y).distance

    def cross(self, x, y) -> CrossWitness:
        """Minimization over the boundary for an (unordered) cross-side pair."""
        bx, by = self._b(x), self._b(y)
        key = (bx, by) if bx <= by else (by, bx)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cross_graph(*key) if self.graph else self._cross_analytic(*key)
            if len(self._cache) > 200000:
                self._cache.clear()
            self._cache[key] = hit
        return hit

    def _cross_graph(self, bx, by) -> CrossWitness:
        dx = self.base.distances_from(bx)[self._bverts]
        dy = self.base.distances_from(by)[self._bverts]
        tot = dx + dy
        j = int(np.argmin(tot))
        ties = tuple(SpacePoint((int(self._bverts[i]),)) for i in np.flatnonzero(tot == tot[j]) if i != j)
        return CrossWitness(float(tot[j]), SpacePoint((int(self._bverts[j]),)), 0.0, ties)

    def _cross_analytic(self, bx, by) -> CrossWitness:
        base = self.base
        points, curves = base.boundary_candidates(bx, by)
        best = (math.inf, None, 0.0)
        cands = []
        for z in points:
            v = base.distance(bx, z) + base.distance(z, by)
            cands.append((v, z, 0.0))
        for curve in curves:
            cands.extend(self._curve_min(bx, by, curve))
        if not cands:
            raise DomainError("no boundary candidates")
        cands.sort(key=lambda c: (c[0], c[1]))
        best = cands[0]
        bound = max(c[2] for c in cands[:1])
        ties = tuple(c[1] for c in cands[1:] if c[0] - best[0] <= max(bound, 1e-12 * max(best[0], 1.0))
                     and base.distance(c[1], best[1]) > 1e-6)
        return CrossWitness(float(best[0]), best[1], float(bound), ties)

    def _curve_min(self, bx, by, curve) -> list:
        lo, hi = curve.lo, curve.hi
        if hi - lo <= 0:
            z = curve.point(lo)
            return [(self.base.distance(bx, z) + self.base.distance(z, by), z, 0.0)]
        n = self.n_b
        if curve.periodic:
            params = lo + (hi - lo) * np.arange(n) / n
        else:
            params = np.linspace(lo, hi, n)
        spacing = (hi - lo) / n if curve.periodic else (hi - lo) / (n - 1)

        def total(ps):
            return curve.distances(bx, ps) + curve.distances(by, ps)

        vals = total(params)
        windows = self._candidate_windows(params, vals, spacing, curve)
        for _ in range(REFINE_ROUNDS):
            new = []
            spacing /= REFINE_FACTOR
            for a, b in windows:
                m = max(3, int(round((b - a) / spacing)) + 1)
                ps = np.linspace(a, b, m)
                if not curve.periodic:
                    ps = np.clip(ps, lo, hi)
                v = total(ps)
                new.extend(self._candidate_windows(ps, v, (b - a) / (m - 1), curve, wrap=False))
            windows = self._merge(new)
        out = []
        for a, b in windows:
            ps = np.linspace(a, b, 5)
            v = total(ps)
            j = int(np.argmin(v))
            lo_b, hi_b = ps[max(j - 1, 0)], ps[min(j + 1, 4)]
            if not curve.periodic:
                lo_b, hi_b = max(lo_b, lo), min(hi_b, hi)
            zbest, vbest = ps[j], v[j]
            if hi_b > lo_b:
                res = minimize_scalar(lambda s: float(total(np.array([s]))[0]), bounds=(lo_b, hi_b),
                                      method="bounded", options={"xatol": 1e-12 * max(1.0, abs(hi - lo))})
                if res.fun < vbest:
                    zbest, vbest = float(res.x), float(res.fun)
            arc = spacing * curve.speed
            if curve.periodic:
                zbest = lo + (zbest - lo) % (hi - lo)
            out.append((float(vbest), curve.point(float(zbest)), arc))
        return out

    @staticmethod
    def _merge(windows):
        windows = sorted(windows)
        out = []
        for a, b in windows:
            if out and a <= out[-1][1]:
                out[-1] = (out[-1][0], max(out[-1][1], b))
            else:
                out.append((a, b))
        return out

    def _candidate_windows(self, params, vals, spacing, curve, wrap=True):
        """Parameter windows that may contain the global minimum.

        |xz| + |zy| is 2-Lipschitz in arc length, so the minimizer lies
        within half a spacing of a sample whose value is at most
        min + spacing * speed.
        """
        thresh = vals.min() + spacing * curve.speed * (1 + 1e-9) + 1e-15
        mask = vals <= thresh
        n = len(params)
        wins = []
        for s, e in _runs(mask, curve.periodic and wrap):
            a = params[s] - spacing
            b = params[(e - 1) % n] + spacing + (curve.hi - curve.lo if e > n else 0.0)
            wins.append((a, b))
        return self._merge(wins)

    # ---- geodesics
    def geodesics(self, x, y, step=None):
        self._require_distinct(x, y)
        bx, by = self._b(x), self._b(y)
        if self.same_side(x, y):
            side = x.side if not self.base.on_boundary(bx) else y.side
            d = self.base.distance(bx, by)
            detour = self.cross(x, SpacePoint(y.coords, 1 - x.side)).distance
            if detour < d * (1 - 1e-12):
                raise DomainError("a cross-and-return path beats the base geodesic")
            return [self._tag(p, side) for p in self.base.geodesics(bx, by, step)]
        w = self.cross(x, y)
        paths = [self._cross_path(x, y, w.z, step)]
        for z in w.near_ties:
            try:
                paths.append(self._cross_path(x, y, z, step))
            except DomainError:
                pass
        return paths

    def _tag(self, path: GeodesicPath, side: int) -> GeodesicPath:
        def locate(t, _path=path):
            ta, pt = _path._locate(t)
            return ta, SpacePoint(pt.coords, side)

        return GeodesicPath(SpacePoint(path.start.coords, side), SpacePoint(path.end.coords, side),
                            path.length, locate, path.knots, path.singular,
                            exceptional=path.exceptional)

    def _cross_path(self, x, y, z, step) -> GeodesicPath:
        bx, by = self._b(x), self._b(y)
        legs = []
        if self.base.distance(bx, z) > 0:
            legs.append(self._tag(self.base.geodesic(bx, z, step), x.side))
        if self.base.distance(z, by) > 0:
            legs.append(self._tag(self.base.geodesic(z, by, step), y.side))
        if len(legs) == 1:
            return legs[0]
        return concat_paths(legs[0], legs[1], junction_singular=True, junction_exceptional=True)

    # ---- sampling
    def sample(self, rng, n):
        pts = self.base.sample(rng, n)
        sides = rng.integers(0, 2, size=n)
        return [SpacePoint(p.coords, int(s)) for p, s in zip(pts, sides)]

    def boundary_points(self, n):
        return []

    def glued_graph(self) -> GraphSpace:
        """Explicit glued graph: mirror vertices are appended, boundary vertices shared."""
        if not self.graph:
            raise TypeError("glued graph only exists for graph bases")
        base = self.base
        bset = set(base.boundary)
        mirror = {}
        nxt = base.n
        for v in range(base.n):
            if v in bset:
                mirror[v] = v
            else:
                mirror[v] = nxt
                nxt += 1
        edges = list(base.edges) + [(mirror[u], mirror[v], w) for u, v, w in base.edges]
        g = GraphSpace(nxt, edges, ())
        g.mirror = mirror
        return g

    def to_spec(self):
        return {"kind": "double", "base": self.base.to_spec(), "n_b": self.n_b}

    def convention_notes(self, kappa):
        return self.base.convention_notes(kappa)


def double_space(base: MetricSpace, n_b: int = 256) -> DoubledSpace:
    return DoubledSpace(base, n_b)


def crossing_count(dspace: DoubledSpace, path: GeodesicPath, step: Optional[float] = None) -> CrossingReport:
    """Side changes along a path, ignoring points on the base boundary.

    Runs of two or more consecutive boundary samples are reported as
    boundary segments.
    """
    base = dspace.base
    if step is not None and not path.discrete:
        n = max(2, math.ceil(path.length / step))
        params = np.linspace(0, path.length, n + 1)
        pts = [path.point_at(float(t))[1] for t in params]
    else:
        params, pts = path.params, path.points
    last_side, last_t = None, None
    count, where = 0, []
    segments = []
    run_start = None
    prev_t = None
    for t, pt in zip(params, pts):
        on_b = base.on_boundary(SpacePoint(pt.coords))
        if on_b:
            if run_start is None:
                run_start = t
            prev_t = t
            continue
        if run_start is not None and prev_t is not None and prev_t > run_start:
            segments.append((float(run_start), float(prev_t)))
        run_start = None
        if last_side is not None and pt.side != last_side:
            count += 1
            junction = [e for e in path.exceptional if last_t <= e <= t]
            where.append(float(junction[0]) if junction else float(0.5 * (last_t + t)))
        last_side, last_t = pt.side, t
    if run_start is not None and prev_t is not None and prev_t > run_start:
        segments.append((float(run_start), float(prev_t)))
    return CrossingReport(count, where, segments)


def _classify(dspace, p, q, r) -> str:
    sides = set()
    for x in (p, q, r):
        if not dspace.base.on_boundary(SpacePoint(x.coords)):
            sides.add(x.side)
    if len(sides) <= 1:
        return "same_side"
    qs = {x.side for x in (q, r) if not dspace.base.on_boundary(SpacePoint(x.coords))}
    return "cross_side" if len(qs) == 2 else "straddling"


def check_doubling_theorem(base: MetricSpace, config: CheckConfig, triples=None) -> CheckReport:
    """Audit the base, then run condition 1, angle additivity and condition B
    on D(base) over triples stratified into same-side, cross-side and
    straddling classes. Boundary crossings are exceptional parameters
    (Dini gate)."""
    cond = "doubling_theorem"
    notes = []
    rng = np.random.default_rng(config.seed)
    audit_triples = sample_triples(base, min(config.samples, 200), rng, config.neighborhood_radius)
    audit = check_condition_1(base, config, audit_triples)
    gigo = audit.verdict == "fail"
    if gigo:
        notes.append("base space fails condition 1 at this kappa: conclusions on D(X) are garbage-in")
    dspace = double_space(base, config.n_b)
    if triples is None:
        triples = sample_triples(dspace, config.samples, rng, config.neighborhood_radius)
    triples = list(triples)
    classes = [_classify(dspace, *t) for t in triples]
    by_class = {c: [t for t, k in zip(triples, classes) if k == c] for c in ("same_side", "cross_side", "straddling")}

    class_reports = {name: check_condition_1(dspace, config, subset)
                     for name, subset in by_class.items() if subset}
    c1 = _combine_classes(class_reports, config)
    add_reports, b_reports = [], []
    max_cross = 0
    flagged = 0
    for p, q, r, path in _instances(dspace, triples):
        if not dspace.same_side(q, r):
            max_cross = max(max_cross, crossing_count(dspace, path).count)
            flagged += len(dspace.cross(q, r).near_ties) > 0
        L = path.length
        t0s = sorted({L / 2, *(e for e in path.exceptional if 0 < e < L)})
        for t0 in t0s:
            add_reports.append(check_angle_additivity(dspace, config, p, path, t0))
        b_reports.append(check_condition_B(dspace, config, p, path))
    add = merge_reports("angle_additivity", add_reports, config)
    bb = merge_reports("condition_B", b_reports, config)
    parts = {"condition_1": c1, "angle_additivity": add, "condition_B": bb}
    verdict = combine_verdicts([r.verdict for r in parts.values()])
    if max_cross > 1:
        verdict = "fail"
        notes.append(f"a cross-side geodesic crossed the boundary {max_cross} times")
    if flagged:
        notes.append(f"{flagged} cross-side pairs with near-minimal alternative crossings (within the "
                     "discretization bound)")
    class_margins = {name: {"count": len(by_class[name]),
                            "verdict": class_reports[name].verdict if name in class_reports else None,
                            "worst_margin": class_reports[name].worst_margin if name in class_reports else None}
                     for name in by_class}
    witnesses = []
    for name, rep in parts.items():
        for w in rep.witnesses:
            w.info = {**w.info, "component": name}
            witnesses.append(w)
    margins = [r.worst_margin for r in parts.values() if r.worst_margin is not None]
    stats = {
        "base_audit": {"verdict": audit.verdict, "worst_margin": audit.worst_margin},
        "gigo": gigo,
        "components": {k: {"verdict": v.verdict, "worst_margin": v.worst_margin, "counts": v.stats.get("counts")}
                       for k, v in parts.items()},
        "classes": class_margins,
        "max_crossings": max_cross,
        "tightest": c1.stats.get("tightest", []),
        "n_b": config.n_b,
        "triples": len(triples),
    }
    curves = c1.curves
    return CheckReport(cond, verdict, witnesses[:100], max(margins) if margins else None, curves,
                       jsonable(stats), config.to_json(), notes + c1.notes, None)


def _combine_classes(class_reports: dict, config: CheckConfig) -> CheckReport:
    reps = list(class_reports.values())
    margins = [r.worst_margin for r in reps if r.worst_margin is not None]
    tight = []
    witnesses = []
    notes = []
    for name, r in class_reports.items():
        tight.extend({**t, "class": name} for t in r.stats.get("tightest", []))
        witnesses.extend(r.witnesses)
        notes.extend(n for n in r.notes if n not in notes)
    tight.sort(key=lambda t: -t["margin"])
    worst = max(margins) if margins else None
    best = max(reps, key=lambda r: r.worst_margin if r.worst_margin is not None else -math.inf) if reps else None
    counts = {}
    for r in reps:
        for k, v in r.stats.get("counts", {}).items():
            counts[k] = counts.get(k, 0) + v
    return CheckReport("condition_1", combine_verdicts([r.verdict for r in reps]), witnesses, worst,
                       best.curves if best else {}, {"counts": counts, "tightest": tight[:5]},
                       config.to_json(), notes)
