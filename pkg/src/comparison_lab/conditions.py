"""Discrete checkers for the comparison conditions.

Every checker works on a base point p and a minimal geodesic gamma from q
toward r, samples gamma on the configured scale ladder and compares the
space against the model surface S^2_k. Comparisons are made with the
versine x = 1 - cos(angle), which stays accurate at the degenerate angles
0 and pi. Margins are signed so that a positive margin is a violation; an
instance passes when its margin is <= ``config.tol``.

``direction='upper'`` flips every inequality (curvature bounded above).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .modelspace import DomainError, model_angle, model_versine, versine_to_angle
from .reporting import CheckConfig, CheckReport, ConfigError, Witness, jsonable, merge_reports
from .spaces import GeodesicPath, MetricSpace, SpacePoint, sample_triples

__all__ = [
    "CheckConfig",
    "CheckReport",
    "ConfigError",
    "Witness",
    "UpperAngleEstimate",
    "LadderSample",
    "CONDITION_IDS",
    "comparison_angle",
    "ladder_samples",
    "upper_angle",
    "check_condition_1",
    "check_condition_2_monotone",
    "check_condition_A",
    "check_condition_B",
    "check_condition_B_uniform",
    "check_condition_B_doubleprime",
    "check_angle_additivity",
    "check_condition_C",
    "dyadic_family",
    "run_condition",
]

CONDITION_IDS = (
    "condition_1",
    "condition_2",
    "condition_A",
    "condition_B",
    "condition_B_uniform",
    "condition_B_doubleprime",
    "angle_additivity",
    "condition_C",
    "condition_C_full",
    "geodesic_energy",
    "comparison_gap",
    "doubling_theorem",
)


def comparison_angle(space: MetricSpace, kappa, p: SpacePoint, q: SpacePoint, r: SpacePoint) -> float:
    """Angle at q of the model triangle with the side lengths of (p, q, r)."""
    pq, qr, pr = space.distance(p, q), space.distance(q, r), space.distance(p, r)
    if pq == 0 or qr == 0:
        raise DomainError("comparison angle needs p != q and r != q")
    return model_angle(kappa, pq, qr, pr)


@dataclass
class LadderSample:
    """|p gamma(t)| and model versines on the usable scales (descending)."""

    a: float
    t: np.ndarray
    ps: np.ndarray
    x: np.ndarray
    points: list


@dataclass
class UpperAngleEstimate:
    """Windowed estimate of limsup (liminf for ``upper``) of comparison angles."""

    value: float
    versine: float
    scales: np.ndarray
    angles: np.ndarray
    versines: np.ndarray
    window: np.ndarray
    monotone: bool
    extrapolated: float
    conclusive: bool

    def to_json(self) -> dict:
        return jsonable({"value": self.value, "versine": self.versine, "scales": self.scales,
                         "angles": self.angles, "window": self.window, "monotone": self.monotone,
                         "extrapolated": self.extrapolated, "conclusive": self.conclusive})


def _realize(path: GeodesicPath, params, floor: float = 0.0):
    """Points at the requested parameters; graph paths snap to vertices.
    Keeps unique actual parameters > 0 and >= floor, in the given order."""
    ts, pts, seen = [], [], set()
    for t in params:
        if t > path.length * (1 + 1e-12):
            continue
        ta, s = path.point_at(float(t))
        if ta <= 0 or ta < floor * (1 - 1e-12) or ta in seen:
            continue
        seen.add(ta)
        ts.append(ta)
        pts.append(s)
    return np.array(ts, dtype=float), pts


def _check_diameter(config: CheckConfig, *lengths):
    kap = config.kap
    kap.check(*lengths)


def ladder_samples(space: MetricSpace, config: CheckConfig, p: SpacePoint, path: GeodesicPath,
                   params=None) -> LadderSample:
    q = path.start
    a = space.distance(p, q)
    if a == 0:
        raise DomainError("p coincides with the start of the geodesic")
    if params is None:
        params = config.ladder(path.length)
    t, pts = _realize(path, params, space.floor)
    ps = np.array([space.distance(p, s) for s in pts])
    k = config.kappa
    if len(t):
        _check_diameter(config, a, float(t.max()), float(ps.max()))
        if k > 0 and np.any(a + t + ps >= 2 * config.kap.diameter):
            raise DomainError("perimeter too large for a comparison triangle in S^2_k")
        x = _kernels.versine_batch(k, np.full_like(t, a), t, ps, space.distance_rtol)
        if np.any(np.isnan(x)):
            j = int(np.flatnonzero(np.isnan(x))[0])
            raise DomainError(f"sides ({a}, {t[j]}, {ps[j]}) violate the triangle inequality")
    else:
        x = np.empty(0)
    return LadderSample(a, t, ps, x, pts)


def _angles(x):
    return np.array([versine_to_angle(v) for v in x])


def _estimate(config: CheckConfig, t, x) -> UpperAngleEstimate:
    w = min(config.window, len(t))
    conclusive = len(t) >= config.window
    if len(t) == 0:
        nan = math.nan
        return UpperAngleEstimate(nan, nan, t, np.empty(0), x, t, False, nan, False)
    ang = _angles(x)
    wt, wx = t[-w:], x[-w:]
    j = int(np.argmax(wx)) if config.lower else int(np.argmin(wx))
    xv = float(wx[j])
    # non-increasing in t (lower) means non-decreasing as t shrinks
    d = np.diff(x)  # x[j+1] (smaller t) - x[j]
    monotone = bool(np.all(d >= -config.tol)) if config.lower else bool(np.all(d <= config.tol))
    wa = ang[-w:]
    extrap = float(np.polyfit(wt, wa, 1)[1]) if w >= 2 and np.ptp(wt) > 0 else float(wa[-1])
    return UpperAngleEstimate(versine_to_angle(xv), xv, t, ang, x, wt, monotone, extrap, conclusive)


def upper_angle(space: MetricSpace, config: CheckConfig, p: SpacePoint, path: GeodesicPath) -> UpperAngleEstimate:
    """Max (lower direction) / min (upper direction) of the comparison angles
    over the finest ``config.window`` usable ladder scales."""
    ls = ladder_samples(space, config, p, path)
    return _estimate(config, ls.t, ls.x)


# ---------------------------------------------------------------- report helpers


def _pts(p, path, s=None) -> dict:
    d = {"p": p.to_json(), "q": path.start.to_json(), "r": path.end.to_json()}
    if s is not None:
        d["s"] = s.to_json()
    return d


def _inconclusive(cond, config, space, p, path, note, stats=None) -> CheckReport:
    return CheckReport(cond, "inconclusive", [], None, {},
                       jsonable({"points": _pts(p, path), **(stats or {})}), config.to_json(),
                       [note] + space.convention_notes(config.kappa), "scales")


def _single(cond, config, space, p, path, margins, t, lhs, rhs, curves, stats, pts=None, info=None,
            phase=None) -> CheckReport:
    margins = np.asarray(margins, dtype=float)
    if len(margins) == 0:
        return _inconclusive(cond, config, space, p, path, "no usable scale", stats)
    j = int(np.nanargmax(margins))
    worst = float(margins[j])
    witnesses = []
    if worst > config.tol:
        s = pts[j] if pts is not None else None
        witnesses.append(Witness(0, _pts(p, path, s), float(t[j]), float(lhs[j]), float(rhs[j]), worst,
                                 {"singular": list(path.singular), **(info or {})}))
    verdict = "fail" if witnesses else "pass"
    stats = {"points": _pts(p, path), "worst_scale": float(t[j]), **(stats or {})}
    return CheckReport(cond, verdict, witnesses, worst, curves, jsonable(stats), config.to_json(),
                       space.convention_notes(config.kappa), phase)


def _window_guard(cond, config, space, p, path, est: UpperAngleEstimate):
    if not est.conclusive:
        return _inconclusive(cond, config, space, p, path,
                             f"only {len(est.scales)} usable scales above the discretization floor "
                             f"(window {config.window})", {"usable_scales": len(est.scales)})
    return None


# ---------------------------------------------------------------- condition (1)


def _condition_1_instance(space, config, p, q, r, path, index=0) -> CheckReport:
    cond = "condition_1"
    kap = config.kap
    k = kap.k
    a = space.distance(p, q)
    c = space.distance(p, r)
    L = path.length
    try:
        kap.check(a, c, L)
        if k > 0 and a + c + L >= 2 * kap.diameter:
            raise DomainError("perimeter too large for a comparison triangle in S^2_k")
        params = list(config.ladder(L)) + [L * i / config.sweep for i in range(1, config.sweep + 1)]
        t, pts = _realize(path, sorted(set(params)))
        ps = np.array([space.distance(p, s) for s in pts])
        if a == 0:
            model = t.copy()
        else:
            x = model_versine(kap, a, L, c, space.distance_rtol)
            model = _kernels.side_from_versine_batch(k, np.full_like(t, a), t, np.full_like(t, x))
    except DomainError as exc:
        return _inconclusive(cond, config, space, p, path, f"instance skipped: {exc}")
    margins = model - ps if config.lower else ps - model
    rows = [(float(ti), float(m), config.tol) for ti, m in zip(t, margins)]
    return _single(cond, config, space, p, path, margins, t, ps, model, {"margin": rows},
                   {"pq": a, "pr": c, "qr": L}, pts)


def check_condition_1(space: MetricSpace, config: CheckConfig, triples: Sequence) -> CheckReport:
    """|ps| >= |p~s~| for every sampled s on every enumerated [qr] (<= for upper)."""
    reports = []
    for p, q, r in triples:
        if space.distance(q, r) == 0:
            continue
        for path in space.geodesics(q, r):
            reports.append(_condition_1_instance(space, config, p, q, r, path))
    return merge_reports("condition_1", reports, config, extra_notes=_run_notes(space, config))


# ---------------------------------------------------------------- per-geodesic conditions


def check_condition_2_monotone(space, config, p, path) -> CheckReport:
    """Comparison angle at q non-increasing in |qs| (non-decreasing for upper)."""
    cond = "condition_2"
    L = path.length
    params = sorted(set(list(config.ladder(L)) + [L * i / config.sweep for i in range(1, config.sweep + 1)]),
                    reverse=True)
    try:
        ls = ladder_samples(space, config, p, path, params)
    except DomainError as exc:
        return _inconclusive(cond, config, space, p, path, f"instance skipped: {exc}")
    if len(ls.t) < 2:
        return _inconclusive(cond, config, space, p, path, "fewer than two usable scales")
    # ascending t
    order = np.argsort(ls.t)
    t, x = ls.t[order], ls.x[order]
    pts = [ls.points[i] for i in order]
    # running extreme over smaller scales
    ref = np.minimum.accumulate(x) if config.lower else np.maximum.accumulate(x)
    margins = (x[1:] - ref[:-1]) if config.lower else (ref[:-1] - x[1:])
    ang = _angles(x)
    bound = _angles(ref)
    rows = [(float(a), float(b), float(c)) for a, b, c in zip(t, ang, bound)]
    return _single(cond, config, space, p, path, margins, t[1:], x[1:], ref[:-1], {"angle": rows},
                   {"versine_units": True}, pts[1:])


def check_condition_A(space, config, p, path, r_full: Optional[SpacePoint] = None) -> CheckReport:
    """Windowed limsup of (|ps| - |p~s~|)/|qs| >= -epsilon, comparison point
    from the full triangle (|pq|, |pr|, |qr|)."""
    cond = "condition_A"
    kap = config.kap
    try:
        ls = ladder_samples(space, config, p, path)
        est = _estimate(config, ls.t, ls.x)
        r = path.end if r_full is None else r_full
        c = space.distance(p, r)
        L = path.length
        kap.check(c, L)
        x = model_versine(kap, ls.a, L, c, space.distance_rtol)
        model = _kernels.side_from_versine_batch(kap.k, np.full_like(ls.t, ls.a), ls.t, np.full_like(ls.t, x))
    except DomainError as exc:
        return _inconclusive(cond, config, space, p, path, f"instance skipped: {exc}")
    guard = _window_guard(cond, config, space, p, path, est)
    if guard:
        return guard
    d = (ls.ps - model) / ls.t
    w = config.window
    wd = d[-w:]
    if config.lower:
        j = int(np.argmax(wd))
        margin = -float(wd[j]) - config.epsilon
    else:
        j = int(np.argmin(wd))
        margin = float(wd[j]) - config.epsilon
    jj = len(d) - w + j
    rows = [(float(ti), float(di), -config.epsilon if config.lower else config.epsilon)
            for ti, di in zip(ls.t, d)]
    return _single(cond, config, space, p, path, [margin], [ls.t[jj]], [d[jj]],
                   [-config.epsilon if config.lower else config.epsilon], {"quotient": rows},
                   {"window_quotients": wd}, [ls.points[jj]])


def _residuals(config, est: UpperAngleEstimate, x):
    return x - est.versine if config.lower else est.versine - x


def check_condition_B(space, config, p, path) -> CheckReport:
    """Uniform layer: for scales t <= delta, x(t) - x(upper angle) <= epsilon.

    The least-squares slope of the residual over the finest window is
    reported as the refinement layer but does not affect the verdict.
    """
    cond = "condition_B"
    try:
        ls = ladder_samples(space, config, p, path)
    except DomainError as exc:
        return _inconclusive(cond, config, space, p, path, f"instance skipped: {exc}")
    est = _estimate(config, ls.t, ls.x)
    guard = _window_guard(cond, config, space, p, path, est)
    if guard:
        return guard
    res = _residuals(config, est, ls.x)
    delta = config.delta if config.delta is not None else math.inf
    sel = ls.t <= delta * (1 + 1e-12)
    w = config.window
    slope = float(np.polyfit(ls.t[-w:], res[-w:], 1)[0]) if w >= 2 else 0.0
    rows = [(float(ti), float(ri), config.epsilon) for ti, ri in zip(ls.t, res)]
    stats = {"upper_angle": est.value, "residual_slope": slope, "delta": config.delta,
             "monotone": est.monotone, "extrapolated_angle": est.extrapolated}
    if not np.any(sel):
        return _inconclusive(cond, config, space, p, path, "no ladder scale below delta", stats)
    idx = np.flatnonzero(sel)
    margins = res[idx] - config.epsilon
    return _single(cond, config, space, p, path, margins, ls.t[idx], res[idx],
                   np.full(len(idx), config.epsilon), {"residual": rows}, stats,
                   [ls.points[i] for i in idx], {"layer": "uniform"})


def check_condition_B_doubleprime(space, config, p, path) -> CheckReport:
    """Angle form: angle(t) <= upper angle + epsilon for t <= delta."""
    cond = "condition_B_doubleprime"
    try:
        ls = ladder_samples(space, config, p, path)
    except DomainError as exc:
        return _inconclusive(cond, config, space, p, path, f"instance skipped: {exc}")
    est = _estimate(config, ls.t, ls.x)
    guard = _window_guard(cond, config, space, p, path, est)
    if guard:
        return guard
    ang = est.angles
    res = ang - est.value if config.lower else est.value - ang
    delta = config.delta if config.delta is not None else math.inf
    idx = np.flatnonzero(ls.t <= delta * (1 + 1e-12))
    rows = [(float(ti), float(ri), config.epsilon) for ti, ri in zip(ls.t, res)]
    if len(idx) == 0:
        return _inconclusive(cond, config, space, p, path, "no ladder scale below delta")
    return _single(cond, config, space, p, path, res[idx] - config.epsilon, ls.t[idx], res[idx],
                   np.full(len(idx), config.epsilon), {"angle_residual": rows},
                   {"upper_angle": est.value}, [ls.points[i] for i in idx])


def check_condition_B_uniform(space, config, family: Sequence) -> CheckReport:
    """Shared-delta test of condition B over a family of (p, geodesic) pairs.

    Candidate deltas are the ladder scales above the finest window (the
    window itself defines the limit angle). Each member records its finest
    violating scale; a candidate is admissible when every member's finest
    violation lies above it.
    """
    cond = "condition_B_uniform"
    if not family:
        return CheckReport(cond, "inconclusive", [], None, {}, {}, config.to_json(), ["empty family"])
    t_max = config.t_max if config.t_max is not None else min(path.length for _, path in family)
    cfg = config.replace(t_max=t_max)
    ladder = cfg.ladder(t_max)
    candidates = ladder[: max(0, len(ladder) - cfg.window)]
    members = []
    witnesses = []
    skipped = 0
    for i, (p, path) in enumerate(family):
        try:
            ls = ladder_samples(space, cfg, p, path)
        except DomainError:
            skipped += 1
            continue
        est = _estimate(cfg, ls.t, ls.x)
        if not est.conclusive:
            skipped += 1
            continue
        res = _residuals(cfg, est, ls.x)
        bad = np.flatnonzero(res - cfg.epsilon > cfg.tol)
        finest = None
        if len(bad):
            j = int(bad[np.argmin(ls.t[bad])])
            finest = float(ls.t[j])
            witnesses.append(Witness(i, _pts(p, path, ls.points[j]), finest, float(res[j]), cfg.epsilon,
                                     float(res[j] - cfg.epsilon),
                                     {"upper_angle": est.value, "singular": list(path.singular)}))
        members.append({"index": i, "finest_violation": finest, "upper_angle": est.value,
                        "q": path.start.to_json()})
    if not members:
        return CheckReport(cond, "inconclusive", [], None, {}, {"skipped": skipped}, cfg.to_json(),
                           ["no family member had enough usable scales"])
    scan = []
    admissible = None
    for d in candidates:
        failing = [m["index"] for m in members
                   if m["finest_violation"] is not None and m["finest_violation"] <= d * (1 + 1e-12)]
        scan.append((float(d), float(len(failing)), 0.0))
        if not failing and admissible is None:
            admissible = float(d)
    worst = max((w.margin for w in witnesses), default=-math.inf)
    verdict = "pass" if admissible is not None else "fail"
    if not len(candidates):
        verdict = "inconclusive"
    out_w = [] if verdict == "pass" else witnesses
    stats = {"delta": admissible, "candidates": list(map(float, candidates)), "members": members,
             "skipped": skipped}
    return CheckReport(cond, verdict, out_w, worst if witnesses else None, {"delta_scan": scan},
                       jsonable(stats), cfg.to_json(), _run_notes(space, cfg), "uniform")


def _dini_gate(space, config, p, path, t0) -> CheckReport:
    from .supportsense import SampledFunction, dini_gate

    cond = "angle_additivity"
    room = min(t0, path.length - t0)
    scales = np.array([s for s in config.ladder(room) if s <= room * (1 + 1e-12) and s >= space.floor])
    if len(scales) < 2:
        return _inconclusive(cond, config, space, p, path, "no usable scale for the Dini gate")
    realized = [path.point_at(float(t)) for t in np.concatenate([t0 - scales, [t0], t0 + scales])]
    tt = np.array([ta for ta, _ in realized])
    order = np.argsort(tt, kind="stable")
    tt = tt[order]
    keep = np.concatenate([[True], np.diff(tt) > 0])
    ff = np.array([space.distance(p, realized[i][1]) for i in order])[keep]
    tt = tt[keep]
    t0a = float(path.point_at(t0)[0])
    if len(tt) < 3:
        return _inconclusive(cond, config, space, p, path, "no usable scale for the Dini gate")
    f = SampledFunction(tt, ff)
    margin, dp, gap = dini_gate(f, t0a, scales, config.window, config.corner_tol, config.direction)
    lhs, rhs = (dp.plus_max, dp.minus_min) if config.lower else (dp.plus_min, dp.minus_max)
    return _single(cond, config, space, p, path, [margin], [t0a], [lhs], [rhs], {},
                   {"t0": t0a, "gate": "dini", "slope_gap": gap, "minus_min": dp.minus_min,
                    "plus_max": dp.plus_max}, [path.point_at(t0a)[1]], {"gate": "dini", "t0": t0a}, phase="dini")


def check_angle_additivity(space, config, p, path, t0: float) -> CheckReport:
    """Forward + backward upper angles at gamma(t0) <= pi (>= pi for upper).

    Margin in cosine form: -(cos forward + cos backward). At a declared
    exceptional parameter the Dini gate f'_{+,max} <= f'_{-,min} on
    f = |p gamma| is tested instead.
    """
    cond = "angle_additivity"
    L = path.length
    if not 0 < t0 < L:
        raise DomainError(f"t0={t0} must be interior to (0, {L})")
    if any(abs(t0 - e) <= 1e-9 * L for e in path.exceptional):
        return _dini_gate(space, config, p, path, t0)
    t0 = float(path.point_at(t0)[0])
    if not 0 < t0 < L:
        return _inconclusive(cond, config, space, p, path, "t0 snapped to an endpoint")
    fwd = path.restrict(t0, L)
    back = path.restrict(0.0, t0).reversed()
    try:
        ef = upper_angle(space, config, p, fwd)
        eb = upper_angle(space, config, p, back)
    except DomainError as exc:
        return _inconclusive(cond, config, space, p, path, f"instance skipped: {exc}")
    if not (ef.conclusive and eb.conclusive):
        return _inconclusive(cond, config, space, p, path, "not enough usable scales on both sides",
                             {"t0": t0})
    total = ef.value + eb.value
    if config.lower:
        margin = ef.versine + eb.versine - 2.0
    else:
        margin = 2.0 - ef.versine - eb.versine
    curves = {"forward": [(float(t), float(a), math.pi) for t, a in zip(ef.scales, ef.angles)],
              "backward": [(float(t), float(a), math.pi) for t, a in zip(eb.scales, eb.angles)]}
    return _single(cond, config, space, p, path, [margin], [t0], [total], [math.pi], curves,
                   {"t0": t0, "angle_sum": total, "forward": ef.value, "backward": eb.value},
                   [fwd.start], {"angle_sum": total})


def check_condition_C(space, config, p, path, full_range: bool = False) -> CheckReport:
    """Hinge comparison with the upper angle standing in for the angle at q.

    e(t) = |p gamma(t)| - model_side(k, |pq|, t, upper angle). Default:
    windowed max of e/t <= epsilon. ``full_range``: e <= tol on ladder and sweep.
    """
    cond = "condition_C_full" if full_range else "condition_C"
    k = config.kappa
    try:
        ls = ladder_samples(space, config, p, path)
        est = _estimate(config, ls.t, ls.x)
        guard = _window_guard(cond, config, space, p, path, est)
        if guard:
            return guard
        if full_range:
            L = path.length
            params = sorted(set(list(config.ladder(L)) + [L * i / config.sweep for i in range(1, config.sweep + 1)]),
                            reverse=True)
            t, pts = _realize(path, params)
            ps = np.array([space.distance(p, s) for s in pts])
        else:
            t, pts, ps = ls.t, ls.points, ls.ps
        model = _kernels.side_from_versine_batch(k, np.full_like(t, ls.a), t, np.full_like(t, est.versine))
        if np.any(np.isnan(model)):
            raise DomainError("model hinge reaches the diameter")
    except DomainError as exc:
        return _inconclusive(cond, config, space, p, path, f"instance skipped: {exc}")
    e = ps - model
    if not config.lower:
        e = -e
    stats = {"upper_angle": est.value}
    if full_range:
        rows = [(float(a), float(b), config.tol) for a, b in zip(t, e)]
        return _single(cond, config, space, p, path, e, t, ps, model, {"excess": rows}, stats, pts)
    q = e / t
    w = config.window
    wq = q[-w:]
    j = int(np.argmax(wq))
    jj = len(q) - w + j
    rows = [(float(a), float(b), config.epsilon) for a, b in zip(t, q)]
    return _single(cond, config, space, p, path, [wq[j] - config.epsilon], [t[jj]], [q[jj]],
                   [config.epsilon], {"excess_ratio": rows}, stats, [pts[jj]])


# ---------------------------------------------------------------- runner


def _run_notes(space, config) -> list:
    notes = list(space.convention_notes(config.kappa))
    if config.neighborhood_radius is not None:
        notes.append(f"neighborhood radius {config.neighborhood_radius:g} stands in for a small neighborhood; "
                     "its adequacy is heuristic")
    return notes


def dyadic_family(space, path: GeodesicPath, p: SpacePoint, count: int = 8) -> list:
    """Base points approaching the first singular point of ``path`` (or its
    start) at dyadic distances, each with the geodesic onward to the end."""
    anchor = path.singular[0] if path.singular else 0.0
    fam = []
    for i in range(1, count + 1):
        t = anchor - anchor * 2.0 ** -i if anchor > 0 else path.length * 2.0 ** -i
        ta = float(path.point_at(t)[0])
        if not 0 <= ta < path.length:
            continue
        sub = path.restrict(ta, path.length) if ta > 0 else path
        if sub.length <= 0 or space.distance(p, sub.start) == 0:
            continue
        fam.append((p, sub))
    return fam


def _sample(space, config, triples):
    if triples is not None:
        return list(triples)
    rng = np.random.default_rng(config.seed)
    return sample_triples(space, config.samples, rng, config.neighborhood_radius)


def _instances(space, triples):
    for p, q, r in triples:
        if space.distance(q, r) == 0:
            continue
        try:
            paths = space.geodesics(q, r)
        except DomainError:
            continue
        for path in paths:
            yield p, q, r, path


def run_condition(space: MetricSpace, condition: str, config: CheckConfig, triples=None) -> CheckReport:
    """Run one condition over sampled (or given) triples (p, q, r), quantifying
    over every enumerated geodesic [qr]."""
    if condition not in CONDITION_IDS:
        raise ConfigError(f"unknown condition id {condition!r}")
    if condition == "doubling_theorem":
        from .doubling import DoubledSpace, check_doubling_theorem

        base = space.base if isinstance(space, DoubledSpace) else space
        return check_doubling_theorem(base, config, triples=triples)
    triples = _sample(space, config, triples)
    if condition == "condition_1":
        return check_condition_1(space, config, triples)
    from . import supportsense

    single = {
        "condition_2": check_condition_2_monotone,
        "condition_A": check_condition_A,
        "condition_B": check_condition_B,
        "condition_B_doubleprime": check_condition_B_doubleprime,
        "condition_C": check_condition_C,
        "condition_C_full": lambda s, c, p, g: check_condition_C(s, c, p, g, full_range=True),
        "geodesic_energy": supportsense.geodesic_energy_check,
        "comparison_gap": supportsense.comparison_gap_check,
    }
    reports = []
    for p, q, r, path in _instances(space, triples):
        if condition in single:
            reports.append(single[condition](space, config, p, path))
        elif condition == "angle_additivity":
            L = path.length
            t0s = sorted({L / 2, *(s for s in path.singular if 0 < s < L),
                          *(e for e in path.exceptional if 0 < e < L)})
            for t0 in t0s:
                reports.append(check_angle_additivity(space, config, p, path, t0))
        elif condition == "condition_B_uniform":
            fam = dyadic_family(space, path, p)
            if fam:
                reports.append(check_condition_B_uniform(space, config, fam))
    return merge_reports(condition, reports, config, extra_notes=_run_notes(space, config))
