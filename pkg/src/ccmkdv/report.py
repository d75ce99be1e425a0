"""Residual reports shared by all verification routines."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np


@dataclass(frozen=True)
class ResidualReport:
    """Worst-case residual of one identity over a set of points.

    ``relative`` is the verdict quantity.  For identities between exponential
    sums it is the worst pointwise ratio of residual to the largest single
    term at that point, and ``normalization`` is that largest term at the
    worst point.  For field equations it is ``max_abs / normalization``.
    """

    tag: str
    points: int
    max_abs: float
    normalization: float
    relative: float
    worst_point: tuple[float, float]
    skipped: int = 0
    note: str = ""
    extra: dict = field(default_factory=dict)

    def passed(self, threshold: float) -> bool:
        return bool(np.isfinite(self.relative) and self.relative < threshold)

    def to_json(self) -> dict:
        """Plain-JSON dict; non-finite numbers become ``None``."""
        d = asdict(self)
        out = {
            "suite": d.pop("tag"),
            "points": d.pop("points"),
            "max_abs": d.pop("max_abs"),
            "normalization": d.pop("normalization"),
            "relative": d.pop("relative"),
            "worst_point": {"x": self.worst_point[0], "t": self.worst_point[1]},
        }
        d.pop("worst_point")
        if self.skipped:
            out["skipped"] = self.skipped
        if self.note:
            out["note"] = self.note
        if self.extra:
            out["extra"] = self.extra
        return _finite(out)


def _finite(obj):
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def pointwise_report(tag, x, t, residual, scale, *, log_unscale=None, skipped=0, note=""):
    """Report from per-point residuals and per-point term scales.

    ``residual`` and ``scale`` may share a per-point factor ``exp(-log_unscale)``
    from exponential centering; it cancels in the ratio and is restored for
    the absolute figures.
    """
    residual = np.abs(np.asarray(residual)).reshape(-1)
    scale = np.asarray(scale, dtype=np.float64).reshape(-1)
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    if residual.size == 0:
        return ResidualReport(tag, 0, 0.0, 0.0, 0.0, (float("nan"), float("nan")), skipped, note)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.where(scale > 0, residual / scale, np.where(residual > 0, np.inf, 0.0))
        unscale = np.ones_like(scale) if log_unscale is None else np.exp(np.asarray(log_unscale).reshape(-1))
        absr = residual * unscale
    w = int(np.argmax(ratio))
    return ResidualReport(tag, int(residual.size), float(absr.max()), float(scale[w] * unscale[w]),
                          float(ratio[w]), (float(x[w]), float(t[w])), skipped, note)


def global_report(tag, x, t, residual, normalization, *, skipped=0, note=""):
    """Report with one normalization shared by all points."""
    residual = np.abs(np.asarray(residual))
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    if residual.size == 0:
        return ResidualReport(tag, 0, 0.0, float(normalization), 0.0, (float("nan"), float("nan")), skipped, note)
    w = int(np.argmax(residual))
    mx = float(residual[w])
    rel = mx / normalization if normalization > 0 else (0.0 if mx == 0 else float("inf"))
    return ResidualReport(tag, int(residual.size), mx, float(normalization), float(rel),
                          (float(x[w]), float(t[w])), skipped, note)
