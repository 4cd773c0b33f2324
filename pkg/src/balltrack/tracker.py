"""End-to-end tracking with a matched-filter detector.

The detector is a zero-normalized cross-correlation against a disk
template.  It is deliberately not a learned model: it exists so the
extraction operators, the physics refinement, the losses and the metric
protocol can run end to end without any training.  Heatmaps are produced
at full resolution and average-pooled to the 112 and 56 grids, mirroring a
three-scale pyramid.

Per 3-frame window and per scale, three position estimates are extracted:
B (differentiable expectation operator for that scale), H (hard argmax) and
P (physics-refined B), plus velocities and bounce indicators from the
physics window.  Metrics are mean L1 errors in full-resolution image
coordinates; each frame's prediction is taken from the window in which it
is the center frame (sequence endpoints use the only covering window).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from .heatmaps import expectation_for_scale, hard_argmax
from .physics import WindowPrediction, physics_refine_window, to_frame_units, window_arrays
from .sim import SimConfig, Trajectory
from .video import VideoSequence

__all__ = [
    "MetricTable",
    "METRICS",
    "disk_template",
    "ncc_heatmap",
    "downscale_heatmap",
    "track_sequence",
    "evaluate",
    "evaluate_sequences",
    "metrics_to_csv",
    "metrics_from_csv",
]

SCALES = (56, 112, 224)
METRICS = tuple(
    [f"{m}{s}" for m in ("B", "H", "P") for s in SCALES]
    + [f"V{s}" for s in SCALES]
    + [f"bounce{s}" for s in SCALES]
)

@dataclass
class MetricTable:
    """Mean metric values plus the per-sequence breakdown behind them."""

    values: dict[str, float]
    per_sequence: dict[str, np.ndarray] = field(default_factory=dict)

    def median(self, metric: str) -> float:
        return float(np.median(self.per_sequence[metric]))


def disk_template(radius: float) -> np.ndarray:
    """Zero-mean filled-disk template on a (2r+3)^2 grid."""
    if radius < 1:
        raise ValueError("template radius must be >= 1")
    size = 2 * int(round(radius)) + 3
    c = (size - 1) / 2.0
    ii = np.arange(size, dtype=float)[:, None]
    jj = np.arange(size, dtype=float)[None, :]
    disk = ((jj - c) ** 2 + (ii - c) ** 2 <= radius * radius).astype(float)
    return disk - disk.mean()


def ncc_heatmap(frame: np.ndarray, template: np.ndarray) -> np.ndarray:
    """Zero-normalized cross-correlation heatmap, negatives suppressed.

    Border pixels whose template window would leave the frame are zero, as
    are windows with (near-)zero variance.
    """
    frame = np.asarray(frame, dtype=np.float64)
    t0 = template - template.mean()
    t_norm = np.sqrt(np.sum(t0 * t0))
    n = template.size

    flipped = t0[::-1, ::-1]
    num = fftconvolve(frame, flipped, mode="same")
    ones = np.ones_like(template)
    s1 = fftconvolve(frame, ones, mode="same")
    s2 = fftconvolve(frame * frame, ones, mode="same")
    var = np.maximum(s2 - s1 * s1 / n, 0.0)
    den = t_norm * np.sqrt(var)

    # windows with no meaningful structure (near-zero variance, absolutely
    # or relative to the liveliest window) would normalize rounding residue
    # up to O(1) correlations; treat them as empty instead
    cutoff = max(1e-9, 1e-4 * float(den.max()))
    out = np.where(den > cutoff, num / (den + 1e-12), 0.0)
    margin = template.shape[0] // 2
    out[:margin, :] = 0.0
    out[-margin:, :] = 0.0
    out[:, :margin] = 0.0
    out[:, -margin:] = 0.0
    return np.maximum(out, 0.0)


def downscale_heatmap(hm224: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Average-pool a full-resolution heatmap to the 112 and 56 grids."""
    h, w = hm224.shape
    hm112 = hm224.reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))
    hm56 = hm224.reshape(h // 4, 4, w // 4, 4).mean(axis=(1, 3))
    return hm112, hm56


def _detector_frames(frames: np.ndarray, temporal_mean: bool) -> np.ndarray:
    """Frames fed to the correlator.

    With ``temporal_mean`` each frame has the mean of its 3-frame
    neighborhood subtracted and is then rectified.  The noise background is
    static, so the subtraction cancels it exactly; rectification drops the
    negative imprints of the neighboring frames' ball (which would otherwise
    correlate positively with the template ring and drag global centroids).
    """
    work = np.asarray(frames, dtype=np.float64)
    if not temporal_mean:
        return work
    out = np.empty_like(work)
    n = len(work)
    for t in range(n):
        lo, hi = max(0, t - 1), min(n, t + 2)
        out[t] = np.maximum(work[t] - work[lo:hi].mean(axis=0), 0.0)
    return out


def track_sequence(video: VideoSequence, cfg: SimConfig,
                   temporal_mean: bool = False) -> dict[int, list[WindowPrediction]]:
    """Track one sequence; returns per-scale window predictions.

    Windows are independent of each other: each one sees only its own three
    frames, so there is no rollout and no error accumulation.
    """
    n_frames = len(video.frames)
    if n_frames < 3:
        raise ValueError("tracking needs at least 3 frames")
    if cfg.image_size % 4 != 0:
        raise ValueError("the heatmap pyramid needs an image size divisible by 4")

    template = disk_template(cfg.radius_px)
    params = to_frame_units(cfg)
    work = _detector_frames(video.frames, temporal_mean)

    heatmaps = {s: [] for s in SCALES}
    for t in range(n_frames):
        hm224 = ncc_heatmap(work[t], template)
        hm112, hm56 = downscale_heatmap(hm224)
        heatmaps[224].append(hm224)
        heatmaps[112].append(hm112)
        heatmaps[56].append(hm56)

    # per-frame landmarks at every scale, in heatmap coordinates
    soft = {s: [expectation_for_scale(s)(hm) for hm in heatmaps[s]] for s in SCALES}
    hard = {s: [hard_argmax(hm) for hm in heatmaps[s]] for s in SCALES}

    predictions: dict[int, list[WindowPrediction]] = {s: [] for s in SCALES}
    for t in range(1, n_frames - 1):
        for s in SCALES:
            a = 224 // s
            p_b = a * np.array([soft[s][u] for u in (t - 1, t, t + 1)], dtype=float)
            p_h = a * np.array([hard[s][u] for u in (t - 1, t, t + 1)], dtype=float)
            win = physics_refine_window(tuple(map(tuple, p_b)), params)
            pos, vel, flags = window_arrays(win)
            predictions[s].append(
                WindowPrediction(scale=s, p_bilinear=p_b, p_argmax=p_h,
                                 p_physics=pos, v=vel, b=flags)
            )
    return predictions


def _per_frame(windows: list[WindowPrediction], attr: str, n_frames: int) -> np.ndarray:
    """Assemble per-frame values using the middle-frame convention."""
    sample = getattr(windows[0], attr)
    out = np.empty((n_frames,) + sample.shape[1:], dtype=sample.dtype)
    out[0] = getattr(windows[0], attr)[0]
    out[n_frames - 1] = getattr(windows[-1], attr)[2]
    for t in range(1, n_frames - 1):
        out[t] = getattr(windows[t - 1], attr)[1]
    return out


def evaluate(predictions: dict[int, list[WindowPrediction]], gt: Trajectory) -> dict[str, float]:
    """Per-sequence mean metrics (L1 position/velocity, bounce mismatch)."""
    n_frames = len(gt)
    if any(len(w) != n_frames - 2 for w in predictions.values()):
        raise ValueError("window count does not match trajectory length")

    out: dict[str, float] = {}
    for s, windows in predictions.items():
        for name, attr in (("B", "p_bilinear"), ("H", "p_argmax"), ("P", "p_physics")):
            pred = _per_frame(windows, attr, n_frames)
            out[f"{name}{s}"] = float(np.mean(np.sum(np.abs(pred - gt.positions_px), axis=1)))
        v_pred = _per_frame(windows, "v", n_frames)
        out[f"V{s}"] = float(np.mean(np.sum(np.abs(v_pred - gt.velocities_fu), axis=1)))
        b_pred = _per_frame(windows, "b", n_frames)
        out[f"bounce{s}"] = float(np.mean(b_pred != gt.bounce_flags))
    return out


def evaluate_sequences(per_sequence_metrics: list[dict[str, float]]) -> MetricTable:
    """Aggregate per-sequence metrics: mean over sequences, keep breakdown."""
    per_seq = {m: np.array([d[m] for d in per_sequence_metrics]) for m in METRICS}
    values = {m: float(per_seq[m].mean()) for m in METRICS}
    return MetricTable(values=values, per_sequence=per_seq)


def metrics_to_csv(table: MetricTable, config_label: str, replicate: int) -> str:
    """Render the metric table as ``config,replicate,metric,value`` rows."""
    buf = StringIO()
    buf.write("config,replicate,metric,value\n")
    for metric in METRICS:
        buf.write(f"{config_label},{replicate},{metric},{table.values[metric]:.17g}\n")
    return buf.getvalue()


def metrics_from_csv(text: str) -> list[tuple[str, int, str, float]]:
    """Parse rows written by :func:`metrics_to_csv` (or compatible files)."""
    rows = []
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].strip().lower() != "config,replicate,metric,value":
        raise ValueError("results CSV must start with 'config,replicate,metric,value'")
    for ln in lines[1:]:
        config, replicate, metric, val = ln.split(",")
        rows.append((config, int(replicate), metric, float(val)))
    return rows


def save_metrics(path, table: MetricTable, config_label: str, replicate: int) -> None:
    Path(path).write_text(metrics_to_csv(table, config_label, replicate))
