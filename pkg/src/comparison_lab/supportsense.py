"""Support-sense second derivatives, Dini derivatives and barrier checks.

"f'' <= B in the support sense at t" is read through the symmetric second
difference (f(t+tau) + f(t-tau) - 2 f(t)) / tau^2: the upper estimate is the
max over the finest window of a dyadic tau ladder, the lower estimate the
min. Off-grid values are linearly interpolated.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from ._pykernels import _fk as fk_array
from ._pykernels import _sn as sn_array
from .modelspace import DomainError, as_kappa, model_versine
from .reporting import CheckConfig, CheckReport, Witness, jsonable

__all__ = [
    "SampledFunction",
    "SupportBoundEstimate",
    "DiniPair",
    "default_scales",
    "support_second_bound",
    "dini_derivatives",
    "classify_corner",
    "verify_barrier",
    "sturm_ratio_check",
    "geodesic_energy_check",
    "comparison_gap_check",
    "sublemma_check",
    "dini_gate",
    "energy_profile",
]

MAX_CURVE_ROWS = 513


@dataclass
class SampledFunction:
    """Values of a function of one variable on a strictly increasing grid.

    ``exceptional`` holds interior grid parameters where only the Dini gate
    is applied.
    """

    t: np.ndarray
    f: np.ndarray
    exceptional: tuple = ()

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.f = np.asarray(self.f, dtype=float)
        if self.t.ndim != 1 or self.t.shape != self.f.shape or len(self.t) < 3:
            raise ValueError("grid and values must be 1-d arrays of equal length >= 3")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(self.f)) or not np.all(np.isfinite(self.t)):
            raise ValueError("grid and values must be finite")
        snapped = []
        for e in self.exceptional:
            i = self.index(e)
            if i == 0 or i == len(self.t) - 1:
                raise ValueError(f"exceptional point {e} is not interior")
            snapped.append(float(self.t[i]))
        self.exceptional = tuple(sorted(set(snapped)))

    @classmethod
    def from_callable(cls, fn: Callable, a: float, b: float, n: int = 4096, exceptional=()):
        t = np.linspace(a, b, n + 1)
        return cls(t, np.asarray(fn(t), dtype=float), tuple(exceptional))

    @property
    def span(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def pitch(self) -> float:
        return float(np.max(np.diff(self.t)))

    def index(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.t - t)))
        if abs(self.t[i] - t) > 1e-9 * max(self.span, 1e-300):
            raise DomainError(f"{t} is not a grid point")
        return i

    def __call__(self, t):
        return np.interp(t, self.t, self.f)

    def exceptional_mask(self) -> np.ndarray:
        mask = np.zeros(len(self.t), dtype=bool)
        for e in self.exceptional:
            mask[self.index(e)] = True
        return mask

    def to_csv(self, path) -> None:
        mask = self.exceptional_mask()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "f", "marker"])
            for ti, fi, m in zip(self.t, self.f, mask):
                w.writerow([repr(float(ti)), repr(float(fi)), int(m)])

    @classmethod
    def from_csv(cls, path) -> "SampledFunction":
        ts, fs, ex = [], [], []
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        start = 1 if rows and rows[0] and rows[0][0].strip().lower() == "t" else 0
        for row in rows[start:]:
            if not row:
                continue
            ts.append(float(row[0]))
            fs.append(float(row[1]))
            if len(row) > 2 and row[2].strip() not in ("", "0"):
                ex.append(float(row[0]))
        return cls(np.array(ts), np.array(fs), tuple(ex))


@dataclass
class SupportBoundEstimate:
    t: float
    side: str
    scales: np.ndarray
    values: np.ndarray
    estimate: float
    corner: Optional[str] = None
    conclusive: bool = True


@dataclass
class DiniPair:
    t: float
    scales: np.ndarray
    backward: np.ndarray
    forward: np.ndarray
    minus_min: float
    plus_max: float
    minus_max: float
    plus_min: float


def default_scales(f: SampledFunction, t: Optional[float] = None) -> np.ndarray:
    """tau ladder from span/4 halving down to 4 grid pitches (fitted inside the grid at t)."""
    top = f.span / 4.0
    floor = 4.0 * f.pitch
    n = max(0, int(math.floor(math.log2(top / floor) + 1e-9))) + 1 if top >= floor else 0
    scales = top * 2.0 ** -np.arange(n)
    if t is not None:
        room = min(t - f.t[0], f.t[-1] - t) * (1 + 1e-12)
        scales = scales[scales <= room]
    return scales


def _interior_check(f: SampledFunction, t: float) -> None:
    if not f.t[0] < t < f.t[-1]:
        raise DomainError(f"t={t} is not an interior point of [{f.t[0]}, {f.t[-1]}]")


def _richardson(q_coarse, q_fine, tau_coarse, tau_fine):
    return (tau_coarse * q_fine - tau_fine * q_coarse) / (tau_coarse - tau_fine)


def _raw_corner_gaps(f: SampledFunction, centers: np.ndarray, scales: np.ndarray) -> np.ndarray:
    back, fwd = _kernels.one_sided_quotients(f.t, f.f, centers, scales)
    out = np.full(len(centers), np.nan)
    if len(scales) < 2:
        return out
    fin = np.isfinite(back) & np.isfinite(fwd)
    col = np.arange(len(scales))
    j2 = np.where(fin, col, -1).max(axis=1)
    j1 = np.where(fin & (col < j2[:, None]), col, -1).max(axis=1)
    ok = j1 >= 0
    r = np.flatnonzero(ok)
    j1, j2 = j1[ok], j2[ok]
    t1, t2 = scales[j1], scales[j2]
    b = _richardson(back[r, j1], back[r, j2], t1, t2)
    fw = _richardson(fwd[r, j1], fwd[r, j2], t1, t2)
    # a genuine corner shows at the finest scale too; a corner just
    # outside that scale only contaminates the extrapolation
    ext, raw = fw - b, fwd[r, j2] - back[r, j2]
    out[r] = np.where(ext * raw > 0, np.sign(ext) * np.minimum(np.abs(ext), np.abs(raw)), 0.0)
    return out


def _corner_gaps(f: SampledFunction, centers: np.ndarray, scales: np.ndarray) -> np.ndarray:
    """Extrapolated (forward - backward) slope gap at each center, using the
    two finest finite scales, shrunk to the raw finest-scale gap when that
    is smaller; NaN where fewer than two scales are usable.

    Grid points within the finest scale of a stronger same-sign gap are
    shadows of that corner and get gap 0.
    """
    centers = np.asarray(centers, dtype=float)
    gaps = _raw_corner_gaps(f, centers, scales)
    if len(scales) < 2 or not np.any(np.abs(np.nan_to_num(gaps)) > 0):
        return gaps
    reach = int(math.ceil(float(np.min(scales)) / f.pitch - 1e-9))
    pos = np.clip(np.searchsorted(f.t, centers), 1, len(f.t) - 2)
    shadow = np.zeros(len(centers), dtype=bool)
    for i in range(1, reach + 1):
        for sgn in (-1, 1):
            nb = np.clip(pos + sgn * i, 1, len(f.t) - 2)
            g = _raw_corner_gaps(f, f.t[nb], scales)
            shadow |= (np.sign(g) == np.sign(gaps)) & (np.abs(g) > np.abs(gaps) * (1 + 1e-9))
    return np.where(shadow, 0.0, gaps)


def _classify(gap: float, corner_tol: float) -> Optional[str]:
    if not np.isfinite(gap):
        return None
    if gap > corner_tol:
        return "convex"
    if gap < -corner_tol:
        return "concave"
    return None


def classify_corner(f: SampledFunction, t: float, scales=None, corner_tol: float = 1e-3) -> Optional[str]:
    """'convex', 'concave' or None from the extrapolated one-sided slopes at t."""
    _interior_check(f, t)
    scales = default_scales(f, t) if scales is None else np.asarray(scales, dtype=float)
    return _classify(_corner_gaps(f, np.array([t]), scales)[0], corner_tol)


def _window_reduce(values: np.ndarray, window: int, side: str) -> np.ndarray:
    """Max (upper) / min (lower) over the finest ``window`` finite columns."""
    out = np.full(values.shape[0], np.nan)
    fin = np.isfinite(values)
    for i in range(values.shape[0]):
        cols = np.flatnonzero(fin[i])[-window:]
        if len(cols):
            v = values[i, cols]
            out[i] = v.max() if side == "upper" else v.min()
    return out


def _grid_estimates(f: SampledFunction, centers: np.ndarray, side: str, window: int,
                    corner_tol: float, scales=None):
    scales = default_scales(f) if scales is None else np.asarray(scales, dtype=float)
    if len(scales) == 0:
        nan = np.full(len(centers), np.nan)
        return scales, np.empty((len(centers), 0)), nan, [None] * len(centers)
    values = _kernels.second_differences(f.t, f.f, centers, scales)
    est = _window_reduce(values, window, side)
    corners = [_classify(g, corner_tol) for g in _corner_gaps(f, centers, scales)]
    for i, c in enumerate(corners):
        if c == "convex" and side == "upper":
            est[i] = math.inf
        elif c == "concave" and side == "lower":
            est[i] = -math.inf
    return scales, values, est, corners


def support_second_bound(f: SampledFunction, t: float, side: str = "upper", scales=None,
                         window: int = 4, corner_tol: float = 1e-3) -> SupportBoundEstimate:
    """Windowed support-sense bound on f''(t).

    A convex corner has no finite upper bound (+inf); a concave corner has
    no finite lower bound (-inf).
    """
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    _interior_check(f, t)
    scales = default_scales(f, t) if scales is None else np.asarray(scales, dtype=float)
    if len(scales) == 0:
        return SupportBoundEstimate(t, side, scales, np.empty(0), math.nan, None, False)
    _, values, est, corners = _grid_estimates(f, np.array([float(t)]), side, window, corner_tol, scales)
    return SupportBoundEstimate(t, side, scales, values[0], float(est[0]), corners[0], True)


def dini_derivatives(f: SampledFunction, t: float, scales=None, window: int = 4) -> DiniPair:
    """Windowed liminf/limsup of the one-sided difference quotients at t."""
    _interior_check(f, t)
    scales = default_scales(f, t) if scales is None else np.asarray(scales, dtype=float)
    if len(scales) == 0:
        raise DomainError("no usable scale at this point (grid too coarse)")
    back, fwd = _kernels.one_sided_quotients(f.t, f.f, np.array([float(t)]), scales)
    back, fwd = back[0], fwd[0]
    fin = np.isfinite(back) & np.isfinite(fwd)
    cols = np.flatnonzero(fin)[-window:]
    if len(cols) == 0:
        raise DomainError("no usable scale at this point")
    b, w = back[cols], fwd[cols]
    return DiniPair(t, scales, back, fwd, float(b.min()), float(w.max()), float(b.max()), float(w.min()))


def dini_gate(f: SampledFunction, t: float, scales=None, window: int = 4, corner_tol: float = 1e-3,
              direction: str = "lower"):
    """Gate at an exceptional point: f'_{+,max} <= f'_{-,min} (lower) or
    f'_{+,min} >= f'_{-,max} (upper).

    The one-sided slopes are Richardson-extrapolated from the two finest
    scales, so smooth points give a gap of O(tau^2) instead of O(tau); a gap
    beyond ``corner_tol`` is a corner. Returns (margin, DiniPair, gap).
    """
    dp = dini_derivatives(f, t, scales, window)
    sc = dp.scales
    gap = _corner_gaps(f, np.array([float(t)]), sc)[0]
    if not np.isfinite(gap):
        gap = (dp.plus_max - dp.minus_min) if direction == "lower" else (dp.plus_min - dp.minus_max)
    margin = gap - corner_tol if direction == "lower" else -gap - corner_tol
    return float(margin), dp, float(gap)


def sublemma_check(f: SampledFunction, t0: float, approach=None, window: int = 4) -> dict:
    """Compare liminf over left-approaching t of f'_{+,max}(t) with f'_{-,min}(t0).

    Forward quotients at an approach point t only use scales <= (t0 - t)/2.
    Returns the two sides and ``margin = liminf - minus_min`` (<= tol holds).
    """
    _interior_check(f, t0)
    pitch = f.pitch
    if approach is None:
        room = t0 - f.t[0]
        # half-octave steps keep several approach points near t0 on coarse grids
        approach = [d for d in room / 4.0 * 2.0 ** (-0.5 * np.arange(80)) if d >= 8 * pitch]
    rhs = dini_derivatives(f, t0, window=window).minus_min
    plus = []
    for d in approach:
        t = t0 - d
        sc = [s for s in default_scales(f, t) if s <= d / 2.0 * (1 + 1e-12)]
        if not sc:
            continue
        plus.append((d, dini_derivatives(f, t, np.array(sc), window).plus_max))
    if not plus:
        raise DomainError("no approach point with usable scales")
    finest = [v for _, v in plus[-window:]]
    lhs = min(finest)
    return {"t0": t0, "liminf_plus_max": lhs, "minus_min": rhs, "margin": lhs - rhs,
            "approach": [(d, v) for d, v in plus]}


def _downsample(rows: list) -> list:
    if len(rows) <= MAX_CURVE_ROWS:
        return rows
    idx = np.unique(np.linspace(0, len(rows) - 1, MAX_CURVE_ROWS).round().astype(int))
    return [rows[i] for i in idx]


def _gate_report(condition, reason, config=None, stats=None) -> CheckReport:
    return CheckReport(condition=condition, verdict="inconclusive", phase="gate",
                       stats={"rejected": True, **(stats or {})},
                       config=config or {}, notes=[f"hypothesis rejected: {reason}"])


def _check_interior(f: SampledFunction, kf_shift: np.ndarray, rhs: float, side: str,
                    window: int, corner_tol: float, slack: float, tol: float):
    """Shared phase: support estimate + shift compared to rhs at interior
    points outside the exceptional set; Dini gate on exceptional points.

    side 'upper' asserts est + shift <= rhs, side 'lower' asserts >= rhs.
    Returns (margins, est, corners, centers_idx, dini_rows).
    """
    idx = np.arange(1, len(f.t) - 1)
    mask = f.exceptional_mask()[idx]
    centers = f.t[idx]
    scales, _, est, corners = _grid_estimates(f, centers, side, window, corner_tol)
    lhs = est + kf_shift[idx]
    margins = (lhs - rhs if side == "upper" else rhs - lhs) - slack
    margins[mask] = np.nan
    dini_rows = []
    for i in np.flatnonzero(mask):
        m, dp, _ = dini_gate(f, centers[i], window=window, corner_tol=corner_tol,
                             direction="lower" if side == "upper" else "upper")
        dini_rows.append((float(centers[i]), dp, m))
    return idx, centers, lhs, margins, corners, dini_rows


def verify_barrier(f: SampledFunction, kappa, direction: str = "lower", l: Optional[float] = None,
                   tol: float = 1e-7, support_tol: float = 1e-4, corner_tol: float = 1e-3,
                   window: int = 4) -> CheckReport:
    """Barrier comparison: f'' + k f <= 0 (support sense) on (0, l) with
    nonnegative endpoint values forces f >= 0; ``direction='upper'`` flips
    every inequality.

    Phase "gate" rejects l >= pi/sqrt(k) (k > 0) and endpoint values of the
    wrong sign; phase "hypothesis" audits the differential inequality;
    phase "conclusion" checks the sign of f.
    """
    kap = as_kappa(kappa)
    k = kap.k
    lower = direction == "lower"
    cond = "barrier"
    cfg = {"kappa": k, "direction": direction, "tol": tol, "support_tol": support_tol,
           "corner_tol": corner_tol, "window": window}
    l = f.span if l is None else float(l)
    if abs(l - f.span) > 1e-9 * max(l, 1.0):
        raise DomainError(f"l={l} does not match the grid span {f.span}")
    if k > 0 and not l < math.pi / math.sqrt(k):
        return _gate_report(cond, f"l = {l:.12g} is not below pi/sqrt(k) = {math.pi / math.sqrt(k):.12g}",
                            cfg, {"l": l})
    ends = (float(f.f[0]), float(f.f[-1]))
    if (lower and min(ends) < -tol) or (not lower and max(ends) > tol):
        return _gate_report(cond, f"endpoint values {ends} have the wrong sign", cfg, {"endpoints": ends})

    idx, centers, lhs, margins, corners, dini_rows = _check_interior(
        f, k * f.f, 0.0, "upper" if lower else "lower", window, corner_tol, support_tol, tol)
    witnesses = []
    usable = np.isfinite(margins) | np.isinf(margins)
    worst_h = -math.inf
    if np.any(usable):
        j = int(np.nanargmax(np.where(usable, margins, -np.inf)))
        worst_h = float(margins[j])
        if worst_h > tol:
            witnesses.append(Witness(0, {"t": float(centers[j])}, None, float(lhs[j]), 0.0, worst_h,
                                     {"corner": corners[j], "phase": "hypothesis"}))
    for t0, dp, m in dini_rows:
        worst_h = max(worst_h, m)
        if m > tol:
            witnesses.append(Witness(0, {"t": t0}, None, dp.plus_max if lower else dp.plus_min,
                                     dp.minus_min if lower else dp.minus_max, m,
                                     {"phase": "hypothesis", "gate": "dini"}))
    concl = -float(f.f.min()) if lower else float(f.f.max())
    stats = {"l": l, "pitch": f.pitch, "checked_points": int(np.sum(np.isfinite(margins))),
             "skipped_points": int(np.sum(np.isnan(margins))) - len(dini_rows),
             "exceptional": list(f.exceptional), "hypothesis_margin": worst_h,
             "conclusion_margin": concl, "corners": sorted({c for c in corners if c})}
    rows = _downsample([(float(c), float(v), 0.0) for c, v in zip(centers, lhs)])
    curves = {"support": rows}
    if worst_h > tol:
        verdict, phase = "fail", "hypothesis"
    elif concl > tol:
        verdict, phase = "fail", "conclusion"
        witnesses.append(Witness(0, {"t": float(f.t[np.argmin(f.f) if lower else np.argmax(f.f)])}, None,
                                 -concl if lower else concl, 0.0, concl, {"phase": "conclusion"}))
    elif stats["checked_points"] == 0 and not dini_rows:
        verdict, phase = "inconclusive", "hypothesis"
    else:
        verdict, phase = "pass", "conclusion"
    return CheckReport(cond, verdict, witnesses, max(worst_h, concl), curves, jsonable(stats), cfg, [], phase)


def sturm_ratio_check(f: SampledFunction, kappa, l: Optional[float] = None, tol: float = 1e-7,
                      support_tol: float = 1e-4, corner_tol: float = 1e-3) -> CheckReport:
    """Discrete z = f' sn_k - f sn_k' must be non-increasing and <= 0, which
    makes f / sn_k non-increasing. Corners make the pathway inconclusive."""
    kap = as_kappa(kappa)
    k = kap.k
    cond = "sturm_ratio"
    cfg = {"kappa": k, "tol": tol, "support_tol": support_tol, "corner_tol": corner_tol}
    l = f.span if l is None else float(l)
    if k > 0 and not l < math.pi / math.sqrt(k):
        return _gate_report(cond, f"l = {l:.12g} is not below pi/sqrt(k)", cfg, {"l": l})
    idx = np.arange(1, len(f.t) - 1)
    gaps = _corner_gaps(f, f.t[idx], default_scales(f))
    bad = np.flatnonzero(np.abs(np.nan_to_num(gaps)) > corner_tol)
    if len(bad):
        return CheckReport(cond, "inconclusive", [], None, {}, {"corner_at": float(f.t[idx[bad[0]]])}, cfg,
                           ["corner detected; use verify_barrier for non-smooth input"], "gate")
    s = f.t - f.t[0]
    fp = np.gradient(f.f, f.t, edge_order=2)
    sn = sn_array(k, s)
    snp = np.cos(math.sqrt(k) * s) if k > 0 else (np.cosh(math.sqrt(-k) * s) if k < 0 else np.ones_like(s))
    z = fp * sn - f.f * snp
    slack = tol + support_tol
    inc = np.diff(z)
    m_mono = float(inc.max())
    m_sign = float(z.max())
    margin = max(m_mono - support_tol, m_sign - support_tol)
    witnesses = []
    if m_mono > slack:
        j = int(np.argmax(inc))
        witnesses.append(Witness(0, {"t": float(f.t[j + 1])}, None, float(z[j + 1]), float(z[j]), m_mono,
                                 {"test": "monotone"}))
    if m_sign > slack:
        j = int(np.argmax(z))
        witnesses.append(Witness(0, {"t": float(f.t[j])}, None, float(z[j]), 0.0, m_sign, {"test": "sign"}))
    verdict = "fail" if witnesses else "pass"
    rows = _downsample([(float(a), float(b), 0.0) for a, b in zip(f.t, z)])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(sn != 0, f.f / sn, np.nan)
    stats = {"z_max": m_sign, "z_increase_max": m_mono, "pitch": f.pitch,
             "ratio_increase_max": float(np.nanmax(np.diff(ratio[1:]))) if len(ratio) > 2 else 0.0}
    return CheckReport(cond, verdict, witnesses, margin, {"z": rows}, jsonable(stats), cfg, [], "conclusion")


# ---------------------------------------------------------------- geodesic pipelines


def _path_grid(space, config: CheckConfig, path):
    if path.discrete:
        return path.knots.copy(), [path.point_at(float(t))[1] for t in path.knots]
    n = 2 ** config.grid_exponent
    t = np.linspace(0.0, path.length, n + 1)
    return t, [path.point_at(float(ti))[1] for ti in t]


def energy_profile(space, config: CheckConfig, p, path) -> SampledFunction:
    """g(t) = f_k(|p gamma(t)|) on the check grid of the geodesic."""
    t, pts = _path_grid(space, config, path)
    d = np.array([space.distance(p, s) for s in pts])
    config.kap.check(*d)
    return SampledFunction(t, fk_array(config.kappa, d), tuple(e for e in path.exceptional if 0 < e < path.length))


def _pts_json(p, path):
    return {"p": p.to_json(), "q": path.start.to_json(), "r": path.end.to_json()}


def geodesic_energy_check(space, config: CheckConfig, p, path) -> CheckReport:
    """g'' + k g <= 1 in the support sense along the geodesic (>= 1 for the upper direction)."""
    cond = "geodesic_energy"
    k = config.kappa
    try:
        g = energy_profile(space, config, p, path)
    except DomainError as exc:
        return _gate_report(cond, str(exc), config.to_json())
    side = "upper" if config.lower else "lower"
    idx, centers, lhs, margins, corners, dini_rows = _check_interior(
        g, k * g.f, 1.0, side, config.window, config.corner_tol, config.support_tol, config.tol)
    finite = lhs[np.isfinite(margins)]
    worst = -math.inf
    witnesses = []
    if np.any(~np.isnan(margins)):
        j = int(np.nanargmax(margins))
        worst = float(margins[j])
        if worst > config.tol:
            witnesses.append(Witness(0, {**_pts_json(p, path), "s": path.point_at(float(centers[j]))[1].to_json()},
                                     float(centers[j]), float(lhs[j]), 1.0, worst,
                                     {"corner": corners[j], "singular": list(path.singular)}))
    for t0, dp, m in dini_rows:
        worst = max(worst, m)
        if m > config.tol:
            witnesses.append(Witness(0, _pts_json(p, path), t0, dp.plus_max, dp.minus_min, m, {"gate": "dini"}))
    checked = int(np.sum(~np.isnan(margins)))
    verdict = "inconclusive" if checked == 0 and not dini_rows else ("fail" if witnesses else "pass")
    stats = {"points": _pts_json(p, path), "length": path.length, "pitch": g.pitch, "checked_points": checked,
             "lhs_max": float(np.max(finite)) if len(finite) else None,
             "lhs_min": float(np.min(finite)) if len(finite) else None,
             "corners": [(float(c), corners[i]) for i, c in enumerate(centers) if corners[i]][:20]}
    rows = _downsample([(float(c), float(v), 1.0) for c, v in zip(centers, lhs)])
    return CheckReport(cond, verdict, witnesses, worst if worst > -math.inf else None, {"energy": rows},
                       jsonable(stats), config.to_json(), space.convention_notes(k), "hypothesis")


def comparison_gap_check(space, config: CheckConfig, p, path) -> CheckReport:
    """g - g~ against the model function g~(t) = f_k(|p~ gamma~(t)|) built from
    (|p gamma(0)|, |p gamma(mu)|, mu): endpoint match, model identity
    g~'' + k g~ = 1, and the sign of the gap."""
    cond = "comparison_gap"
    kap = config.kap
    k = kap.k
    mu = path.length
    if k > 0 and not mu < math.pi / math.sqrt(k):
        return _gate_report(cond, f"mu = {mu:.12g} is not below pi/sqrt(k)", config.to_json())
    try:
        g = energy_profile(space, config, p, path)
        a = space.distance(p, path.start)
        b = space.distance(p, path.end)
        if a == 0:
            model = g.t.copy()
        else:
            x = model_versine(kap, a, mu, b, space.distance_rtol)
            model = _kernels.side_from_versine_batch(k, np.full_like(g.t, a), g.t, np.full_like(g.t, x))
    except DomainError as exc:
        return _gate_report(cond, str(exc), config.to_json())
    gt = fk_array(k, model)
    gap = g.f - gt
    end_err = max(abs(gap[0]), abs(gap[-1]))
    # model identity at the finest scale of the ladder
    model_f = SampledFunction(g.t, gt)
    sc = default_scales(model_f)
    ident = np.nan
    if len(sc):
        inner = g.t[1:-1]
        sd = _kernels.second_differences(g.t, gt, inner, sc[-1:])[:, 0]
        ok = np.isfinite(sd)
        if np.any(ok):
            ident = float(np.max(np.abs(sd[ok] + k * gt[1:-1][ok] - 1.0)))
    if config.lower:
        j = int(np.argmin(gap))
        margin = -float(gap[j])
    else:
        j = int(np.argmax(gap))
        margin = float(gap[j])
    witnesses = []
    phase = "conclusion"
    if end_err > config.tol:
        witnesses.append(Witness(0, _pts_json(p, path), 0.0, float(g.f[0]), float(gt[0]), end_err,
                                 {"test": "endpoints"}))
        phase = "endpoints"
    if np.isfinite(ident) and ident > config.support_tol:
        witnesses.append(Witness(0, _pts_json(p, path), float(sc[-1]), ident, 0.0, ident,
                                 {"test": "model_identity"}))
        phase = "model_identity"
    if margin > config.tol:
        witnesses.append(Witness(0, {**_pts_json(p, path), "s": path.point_at(float(g.t[j]))[1].to_json()},
                                 float(g.t[j]), float(g.f[j]), float(gt[j]), margin, {"test": "gap"}))
    verdict = "fail" if witnesses else "pass"
    stats = {"points": _pts_json(p, path), "mu": mu, "endpoint_error": end_err, "model_identity_error": ident,
             "gap_min": float(gap.min()), "gap_min_at": float(g.t[int(np.argmin(gap))]),
             "gap_max": float(gap.max()), "pitch": g.pitch}
    rows = _downsample([(float(a), float(b), 0.0) for a, b in zip(g.t, gap)])
    return CheckReport(cond, verdict, witnesses, max(margin, end_err), {"gap": rows}, jsonable(stats),
                       config.to_json(), space.convention_notes(k), phase)
