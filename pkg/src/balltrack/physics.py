"""Differentiable ballistic model over 3-frame windows, in frame units.

Frame units measure time in frames (dt = 1) and length in pixels, which
keeps velocities O(10) instead of amplifying position error by 1/dt when
differencing.  Gravity converts as g_frame = (g / S) * dt^2; for the default
setup that is 0.7848 px/frame^2, giving a per-frame free-fall displacement
of 0.3924 px and velocity change of 0.7848 px/frame.

Given three landmark positions (t-1, t, t+1) the model estimates the
velocity by forward difference, advances twice with a velocity-Verlet step
that mirrors wall overshoots and rescales the reflected velocity component
by -e, and records per-step bounce indicators.  Windows with no detected
bounce are replaced by the exact constant-gravity parabola through the two
endpoint landmarks.  Every branch selects by value, so derivatives follow
the branch actually taken; all outputs are differentiable in the input
landmarks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .sim import SimConfig

__all__ = [
    "FrameUnitParams",
    "PhysicsWindow",
    "WindowPrediction",
    "to_frame_units",
    "init_velocity",
    "verlet_step_with_bounce",
    "smooth_correction",
    "physics_refine_window",
]


@dataclass(frozen=True)
class FrameUnitParams:
    """Constants of the ballistic model in frame units."""

    g_frame: float          # px/frame^2
    restitution: float
    x_min: float            # valid region for the ball center [px]
    x_max: float
    y_min: float
    y_max: float
    v_max_frame: float      # px/frame


@dataclass
class PhysicsWindow:
    """Physics outputs for one 3-frame window (frame-unit px, px/frame).

    positions/velocities are 3-tuples of (x, y) pairs; bounced[0] is always
    False because no step precedes the first frame.
    """

    positions: tuple
    velocities: tuple
    bounced: tuple


@dataclass
class WindowPrediction:
    """All per-window tracker outputs at one scale, in image coordinates."""

    scale: int
    p_bilinear: np.ndarray   # (3, 2)
    p_argmax: np.ndarray     # (3, 2)
    p_physics: np.ndarray    # (3, 2)
    v: np.ndarray            # (3, 2) px/frame
    b: np.ndarray            # (3,) bool


def to_frame_units(cfg: SimConfig) -> FrameUnitParams:
    """Convert a physical configuration to frame units."""
    g_frame = (cfg.gravity / cfg.scale) * cfg.dt * cfg.dt
    return FrameUnitParams(
        g_frame=g_frame,
        restitution=cfg.restitution,
        x_min=cfg.center_min_px,
        x_max=cfg.center_max_px,
        y_min=cfg.center_min_px,
        y_max=cfg.center_max_px,
        v_max_frame=cfg.v_max * cfg.dt / cfg.scale,
    )


def init_velocity(p_prev, p_cur):
    """Forward difference over the first two frames (dt = 1).

    Deliberately independent of the third frame so that bounce detection in
    the subsequent integration is not contaminated by it.
    """
    return p_cur[0] - p_prev[0], p_cur[1] - p_prev[1]


def _mirror(raw, v, lo, hi, e):
    """Value-select reflection: mirror position overshoot, scale v by -e."""
    low = ad.value(raw) < lo
    high = ad.value(raw) > hi
    bounced = bool(low or high)
    if low:
        return 2.0 * lo - raw, -e * v, bounced
    if high:
        return 2.0 * hi - raw, -e * v, bounced
    return raw, v, bounced


def _clamp(p, lo, hi):
    if ad.value(p) < lo:
        return lo + 0.0 * p
    if ad.value(p) > hi:
        return hi + 0.0 * p
    return p


def verlet_step_with_bounce(p, v, params: FrameUnitParams):
    """One velocity-Verlet step with reflection and boundary clamping.

    The vertical reflection applies to the half-step velocity
    ``vy + g/2``; the second half-kick is added afterwards.  Horizontal
    motion has no acceleration, so its reflection uses the full-step
    velocity.  Returns (position, velocity, (bounced_x, bounced_y)).
    """
    g, e = params.g_frame, params.restitution
    x, y = p
    vx, vy = v

    x_raw = x + vx
    y_raw = y + vy + 0.5 * g
    vy_half = vy + 0.5 * g

    x_new, vx_new, bx = _mirror(x_raw, vx, params.x_min, params.x_max, e)
    y_new, vy_half, by = _mirror(y_raw, vy_half, params.y_min, params.y_max, e)
    vy_new = vy_half + 0.5 * g

    x_new = _clamp(x_new, params.x_min, params.x_max)
    y_new = _clamp(y_new, params.y_min, params.y_max)
    return (x_new, y_new), (vx_new, vy_new), (bx, by)


def smooth_correction(p_tm1, p_tp1, params: FrameUnitParams):
    """Exact constant-gravity parabola through the two endpoint landmarks.

    The middle landmark is deliberately ignored: the central velocity fixes
    the parabola, which makes three exact ballistic samples a fixed point
    of the window refinement.
    """
    g = params.g_frame
    vx = (p_tp1[0] - p_tm1[0]) * 0.5
    v_mid_y = (p_tp1[1] - p_tm1[1]) * 0.5
    vy0 = v_mid_y - g  # left-edge vertical velocity

    x0, y0 = p_tm1
    positions = (
        (x0, y0),
        (x0 + vx, y0 + vy0 + 0.5 * g),
        (x0 + 2.0 * vx, y0 + 2.0 * vy0 + 2.0 * g),
    )
    velocities = ((vx, vy0), (vx, vy0 + g), (vx, vy0 + 2.0 * g))
    return positions, velocities


def physics_refine_window(landmarks, params: FrameUnitParams) -> PhysicsWindow:
    """Refine three landmark positions into a physically consistent window.

    ``landmarks`` is a sequence of three (x, y) pairs in image-scale pixel
    coordinates (floats or duals).  The first position passes through
    unchanged; the other two come from the integrator, or from the exact
    parabola when neither step detected a bounce.
    """
    p0 = (landmarks[0][0], landmarks[0][1])
    p1_in = (landmarks[1][0], landmarks[1][1])
    p2_in = (landmarks[2][0], landmarks[2][1])

    v0 = init_velocity(p0, p1_in)
    p1, v1, (bx1, by1) = verlet_step_with_bounce(p0, v0, params)
    p2, v2, (bx2, by2) = verlet_step_with_bounce(p1, v1, params)
    b1 = bx1 or by1
    b2 = bx2 or by2

    if b1 or b2:
        positions = (p0, p1, p2)
        velocities = (v0, v1, v2)
    else:
        positions, velocities = smooth_correction(p0, p2_in, params)

    positions = tuple(
        (
            _clamp(px, params.x_min, params.x_max),
            _clamp(py, params.y_min, params.y_max),
        )
        for px, py in positions
    )
    return PhysicsWindow(positions=positions, velocities=velocities, bounced=(False, b1, b2))


def window_arrays(win: PhysicsWindow):
    """Plain float arrays (positions (3,2), velocities (3,2), flags (3,))."""
    pos = np.array([[ad.value(c) for c in p] for p in win.positions], dtype=float)
    vel = np.array([[ad.value(c) for c in v] for v in win.velocities], dtype=float)
    flags = np.array(win.bounced, dtype=bool)
    return pos, vel, flags
