"""Check configuration and report types shared by all checkers."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .modelspace import Kappa

__all__ = ["ConfigError", "CheckConfig", "Witness", "CheckReport", "merge_reports", "jsonable"]

VERDICTS = ("pass", "fail", "inconclusive")


class ConfigError(ValueError):
    """Invalid check configuration."""


@dataclass(frozen=True)
class CheckConfig:
    """Scales, tolerances and sampling parameters of a check.

    The scale ladder is ``t_max * 2**-j`` for ``j = 0..n_scales`` unless
    explicit ``scales`` are given; ``t_max=None`` means the geodesic length.
    """

    kappa: float = 0.0
    direction: str = "lower"
    t_max: Optional[float] = None
    n_scales: int = 12
    scales: Optional[tuple] = None
    epsilon: float = 0.1
    delta: Optional[float] = None
    tol: float = 1e-7
    samples: int = 100
    neighborhood_radius: Optional[float] = None
    sweep: int = 64
    window: int = 4
    support_tol: float = 1e-4
    corner_tol: float = 1e-3
    seed: int = 0
    n_b: int = 256
    grid_exponent: int = 12

    def __post_init__(self):
        if self.direction not in ("lower", "upper"):
            raise ConfigError(f"direction must be 'lower' or 'upper', got {self.direction!r}")
        if not math.isfinite(self.kappa):
            raise ConfigError("kappa must be finite")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if self.delta is not None and not self.delta > 0:
            raise ConfigError("delta must be positive")
        if self.t_max is not None and not self.t_max > 0:
            raise ConfigError("t_max must be positive")
        if self.tol < 0 or self.support_tol < 0 or self.corner_tol <= 0:
            raise ConfigError("tolerances must be nonnegative")
        if self.n_scales < 1 or self.window < 1 or self.sweep < 0 or self.samples < 0:
            raise ConfigError("n_scales and window must be >= 1, sweep and samples >= 0")
        if self.grid_exponent < 3 or self.n_b < 4:
            raise ConfigError("grid_exponent must be >= 3 and n_b >= 4")
        if self.scales is not None:
            s = np.asarray(self.scales, dtype=float)
            if s.ndim != 1 or len(s) == 0 or np.any(s <= 0) or np.any(np.diff(s) >= 0):
                raise ConfigError("explicit scales must be positive and strictly decreasing")
            object.__setattr__(self, "scales", tuple(float(v) for v in s))

    @property
    def kap(self) -> Kappa:
        return Kappa(self.kappa)

    @property
    def lower(self) -> bool:
        return self.direction == "lower"

    def ladder(self, length: float) -> np.ndarray:
        if self.scales is not None:
            return np.array(self.scales)
        t_max = self.t_max if self.t_max is not None else length
        return t_max * 2.0 ** -np.arange(self.n_scales + 1)

    def replace(self, **changes) -> "CheckConfig":
        data = asdict(self)
        data.update(changes)
        return CheckConfig(**data)

    def to_json(self) -> dict:
        d = asdict(self)
        if d["scales"] is not None:
            d["scales"] = list(d["scales"])
        return d


@dataclass
class Witness:
    """A checked instance: its points, the scale where it was tightest, the
    two sides of the tested inequality and the margin (positive = violated)."""

    index: int
    points: dict
    scale: Optional[float]
    lhs: float
    rhs: float
    margin: float
    info: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return jsonable(asdict(self))


@dataclass
class CheckReport:
    condition: str
    verdict: str
    witnesses: list = field(default_factory=list)
    worst_margin: Optional[float] = None
    curves: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    phase: Optional[str] = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"

    def to_json(self) -> dict:
        return jsonable({
            "condition": self.condition,
            "verdict": self.verdict,
            "phase": self.phase,
            "worst_margin": self.worst_margin,
            "witnesses": [w.to_json() if isinstance(w, Witness) else w for w in self.witnesses],
            "curves": {k: [list(r) for r in rows] for k, rows in self.curves.items()},
            "stats": self.stats,
            "config": self.config,
            "notes": list(self.notes),
        })

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def jsonable(obj):
    """Recursively convert to plain JSON types; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    return obj


def combine_verdicts(verdicts: Sequence[str]) -> str:
    """Any fail wins; all inconclusive (or nothing) is inconclusive; else pass."""
    if any(v == "fail" for v in verdicts):
        return "fail"
    if not verdicts or all(v == "inconclusive" for v in verdicts):
        return "inconclusive"
    return "pass"


def merge_reports(condition: str, reports: Sequence[CheckReport], config: Optional[CheckConfig] = None,
                  max_witnesses: int = 100, keep_tightest: int = 5, extra_notes=()) -> CheckReport:
    """Aggregate per-instance reports in enumeration order."""
    verdict = combine_verdicts([r.verdict for r in reports])
    margins = [r.worst_margin for r in reports if r.worst_margin is not None]
    worst = max(margins) if margins else None
    witnesses = []
    failing = []
    for i, r in enumerate(reports):
        if r.verdict == "fail":
            failing.append(i)
            for w in r.witnesses:
                w = Witness(**{**asdict(w), "index": i}) if isinstance(w, Witness) else w
                witnesses.append(w)
    n_wit = len(witnesses)
    witnesses = witnesses[:max_witnesses]
    order = sorted((i for i, r in enumerate(reports) if r.worst_margin is not None),
                   key=lambda i: (-reports[i].worst_margin, i))
    tightest = []
    for i in order[:keep_tightest]:
        r = reports[i]
        pts = r.stats.get("points")
        tightest.append({"instance": i, "margin": r.worst_margin, "points": pts, "verdict": r.verdict})
    counts = {v: sum(r.verdict == v for r in reports) for v in VERDICTS}
    curves = {}
    if order:
        curves = reports[order[0]].curves
    notes = []
    for r in reports:
        for n in r.notes:
            if n not in notes:
                notes.append(n)
    notes.extend(n for n in extra_notes if n not in notes)
    if n_wit > max_witnesses:
        notes.append(f"{n_wit} witnesses, first {max_witnesses} emitted")
    phases = [r.phase for r in reports if r.verdict == "fail" and r.phase]
    return CheckReport(
        condition=condition,
        verdict=verdict,
        witnesses=witnesses,
        worst_margin=worst,
        curves=curves,
        stats={"instances": len(reports), "counts": counts, "failing_instances": failing[:max_witnesses],
               "tightest": tightest},
        config=config.to_json() if config is not None else {},
        notes=notes,
        phase=phases[0] if phases else None,
    )
