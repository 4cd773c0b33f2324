"""Loss functions for heatmap tracking with physics constraints.

The family covers image reconstruction (pixel BCE and a Gaussian-masked
variant focused near the ball), focal heatmap supervision, and the two
physics losses: an unsupervised consistency term comparing landmarks to
their physics-refined counterparts, and a supervised term comparing physics
outputs to simulator ground truth.  Physics losses are typically ramped in
over the first epochs; ``ramp_weight`` gives the schedule.

All losses accept duals (see :mod:`balltrack.autodiff`) wherever the
quantity is differentiable, and every loss is zero on its exact-match input
(up to the focal clamping tolerance).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .physics import FrameUnitParams, physics_refine_window

__all__ = [
    "LossWeights",
    "LossComponents",
    "bce_reconstruction",
    "cone_loss",
    "focal_heatmap_loss",
    "physics_consistency_loss",
    "physics_supervised_loss",
    "ramp_weight",
    "total_loss",
]

_FOCAL_CLAMP = 1e-6


@dataclass(frozen=True)
class LossWeights:
    """Ramp schedules for the physics losses and the bounce term weight."""

    consistency_w_min: float = 0.01
    consistency_ramp_epochs: int = 10
    supervised_w_min: float = 0.001
    supervised_ramp_epochs: int = 20
    bounce_weight: float = 0.01

    def __post_init__(self):
        for w in (self.consistency_w_min, self.supervised_w_min):
            if not 0.0 < w <= 1.0:
                raise ValueError("ramp floor must lie in (0, 1]")
        for t in (self.consistency_ramp_epochs, self.supervised_ramp_epochs):
            if t < 1:
                raise ValueError("ramp length must be >= 1 epoch")


@dataclass
class LossComponents:
    """Per-term values feeding the total; inactive terms stay at zero."""

    reconstruction: float = 0.0
    cone: float = 0.0
    heatmap: float = 0.0
    physics_consistency: float = 0.0
    physics_supervised: float = 0.0


def _check_shapes(a, b, name):
    if np.shape(ad.value(a)) != np.shape(ad.value(b)):
        raise ValueError(f"{name}: shape mismatch {np.shape(ad.value(a))} vs {np.shape(ad.value(b))}")


def bce_reconstruction(logits, target):
    """Mean binary cross-entropy with the prediction in logit space.

    Uses the max/softplus form, stable for large |logit|.
    """
    _check_shapes(logits, target, "bce_reconstruction")
    return ad.amean(ad.relu(logits) - logits * target + ad.softplus(-ad.absolute(logits)))


def cone_mask(shape, center, radius_px: float) -> np.ndarray:
    """Unit-peak Gaussian mask with sigma = 3 * ball radius."""
    sigma = 3.0 * radius_px
    cx, cy = float(center[0]), float(center[1])
    ii = np.arange(shape[0], dtype=float)[:, None]
    jj = np.arange(shape[1], dtype=float)[None, :]
    return np.exp(-((jj - cx) ** 2 + (ii - cy) ** 2) / (2.0 * sigma * sigma))


def cone_loss(recon, target, center, radius_px: float):
    """Mean absolute error weighted by a Gaussian mask around the ball.

    ``center`` is the predicted ball location when unsupervised, the ground
    truth when supervision is available; either way it is treated as a
    constant (no derivative is taken through the mask).
    """
    _check_shapes(recon, target, "cone_loss")
    mask = cone_mask(np.shape(ad.value(recon)), center, radius_px)
    return ad.amean(ad.absolute(recon - target) * mask)


def focal_heatmap_loss(hm, target):
    """Focal loss that sharpens heatmap peaks and suppresses background.

    Positive pixels are those with target > 0.5; the loss is normalized by
    their count (floored at one for empty targets).  Predictions are clamped
    to [1e-6, 1 - 1e-6] before the logs.
    """
    h = ad.clip(hm, _FOCAL_CLAMP, 1.0 - _FOCAL_CLAMP)
    target = np.asarray(target, dtype=float)
    positive = target > 0.5
    n_pos = max(int(np.count_nonzero(positive)), 1)

    pos_term = ad.where(positive, (1.0 - h) ** 2 * ad.log(h), 0.0 * h)
    neg_term = (1.0 - target) ** 4 * h * h * ad.log(1.0 - h)
    return -(ad.asum(pos_term) + ad.asum(neg_term)) / n_pos


def _l1(a, b):
    return ad.absolute(a - b)


def physics_consistency_loss(landmarks, params: FrameUnitParams, scale_factor: float,
                             last_frame_only: bool = False):
    """Unsupervised physics loss: landmarks vs. their refined counterparts.

    ``landmarks`` are three (x, y) pairs in heatmap coordinates;
    ``scale_factor`` maps them to image coordinates (4, 2 or 1 for the 56,
    112 and 224 grids).  The loss is the L1 gap between the scaled landmarks
    and the physics-refined window, averaged over the window frames; with
    ``last_frame_only`` just the final frame contributes, a cheaper variant
    that skips the frames the integrator interpolates exactly.
    """
    scaled = tuple((scale_factor * p[0], scale_factor * p[1]) for p in landmarks)
    refined = physics_refine_window(scaled, params)
    frames = (2,) if last_frame_only else (0, 1, 2)
    total = 0.0
    for t in frames:
        total = total + _l1(refined.positions[t][0], scaled[t][0]) + _l1(
            refined.positions[t][1], scaled[t][1]
        )
    return total / len(frames)


def physics_supervised_loss(window, gt_positions, gt_velocities, gt_bounces,
                            bounce_weight: float = 0.01, bounce_bce: bool = False):
    """Supervised physics loss against simulator ground truth.

    Position and velocity terms are mean absolute errors over all window
    entries and coordinates; the bounce term compares indicators as 0/1
    values, either as a weighted L1 (default) or as a clamped BCE.
    """
    gt_positions = np.asarray(gt_positions, dtype=float)
    gt_velocities = np.asarray(gt_velocities, dtype=float)
    gt_bounces = np.asarray(gt_bounces, dtype=float)

    pos = 0.0
    vel = 0.0
    for t in range(3):
        for c in range(2):
            pos = pos + _l1(window.positions[t][c], gt_positions[t, c])
            vel = vel + _l1(window.velocities[t][c], gt_velocities[t, c])
    pos = pos / 6.0
    vel = vel / 6.0

    b_pred = np.array([1.0 if flag else 0.0 for flag in window.bounced])
    if bounce_bce:
        p = np.clip(b_pred, _FOCAL_CLAMP, 1.0 - _FOCAL_CLAMP)
        bounce = float(np.mean(-(gt_bounces * np.log(p) + (1.0 - gt_bounces) * np.log(1.0 - p))))
    else:
        bounce = float(np.mean(np.abs(b_pred - gt_bounces)))
    return pos + vel + bounce_weight * bounce


def ramp_weight(epoch: int, w_min: float, ramp_epochs: int) -> float:
    """Linear ramp from w_min to 1 over the first ``ramp_epochs`` epochs."""
    if epoch < 0:
        raise ValueError("epoch must be non-negative")
    return w_min + (1.0 - w_min) * min(1.0, epoch / ramp_epochs)


def total_loss(components: LossComponents, epoch: int, weights: LossWeights = LossWeights()):
    """Ramped sum of all loss terms; inactive components contribute zero."""
    w_cons = ramp_weight(epoch, weights.consistency_w_min, weights.consistency_ramp_epochs)
    w_sup = ramp_weight(epoch, weights.supervised_w_min, weights.supervised_ramp_epochs)
    return (
        components.reconstruction
        + components.cone
        + components.heatmap
        + w_cons * components.physics_consistency
        + w_sup * components.physics_supervised
    )
