"""Frame rendering, static-noise backgrounds, and dataset persistence.

A sequence is a stack of frames: a filled circle (intensity 1) drawn over a
zero background plus one static Gaussian noise image shared by every frame
of that sequence.  Frames are float32 and left unclamped; clamping to a
display range is a presentation concern, not a data one.

On disk a dataset is one directory per noise level:

    meta.json            all simulation parameters + format version
    <split>_frames.bin   one tensor record, float32 (N, T, H, W)
    <split>_truth.bin    three records: positions f64 (N,T,2),
                         velocities f64 (N,T,2), bounce flags u8 (N,T)

A tensor record is ``b"PITD"``, u32 version, u32 ndims, ndims x u64 shape,
then the row-major little-endian payload.  Element type is fixed by the
record's position in the file, listed above.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rng import RandomStream
from .sim import SimConfig, Trajectory, simulate_trajectory

__all__ = [
    "VideoSequence",
    "DatasetError",
    "FormatVersionError",
    "TruncatedFileError",
    "ShapeMismatchError",
    "render_frame",
    "make_noise_image",
    "generate_sequence",
    "generate_split",
    "write_dataset",
    "read_dataset",
    "read_manifest",
    "SPLITS",
]

MAGIC = b"PITD"
FORMAT_VERSION = 1
SPLITS = ("train", "val", "test")


class DatasetError(Exception):
    """Base class for dataset persistence failures."""


class FormatVersionError(DatasetError):
    pass


class TruncatedFileError(DatasetError):
    pass


class ShapeMismatchError(DatasetError):
    pass


@dataclass
class VideoSequence:
    """Rendered frames (T, H, W) float32 plus the generating ground truth."""

    frames: np.ndarray
    trajectory: Trajectory
    noise_image: np.ndarray | None = None


def render_frame(center_px, cfg: SimConfig) -> np.ndarray:
    """Binary ball frame: pixel (i, j) is 1 iff (j-x)^2 + (i-y)^2 <= r^2.

    The threshold is evaluated at integer pixel centers with a sub-pixel
    circle center; no anti-aliasing.
    """
    h = w = cfg.image_size
    x, y = float(center_px[0]), float(center_px[1])
    r = cfg.radius_px
    frame = np.zeros((h, w), dtype=np.float32)
    # only the bounding box of the disk needs testing
    i0, i1 = max(0, int(np.floor(y - r))), min(h - 1, int(np.ceil(y + r)))
    j0, j1 = max(0, int(np.floor(x - r))), min(w - 1, int(np.ceil(x + r)))
    ii = np.arange(i0, i1 + 1, dtype=np.float64)[:, None]
    jj = np.arange(j0, j1 + 1, dtype=np.float64)[None, :]
    inside = (jj - x) ** 2 + (ii - y) ** 2 <= r * r
    frame[i0 : i1 + 1, j0 : j1 + 1] = inside.astype(np.float32)
    return frame


def make_noise_image(cfg: SimConfig, rng: RandomStream) -> np.ndarray:
    """One (H, W) image of i.i.d. N(0, sigma^2) samples, float32."""
    h = w = cfg.image_size
    if cfg.noise_sigma == 0.0:
        return np.zeros((h, w), dtype=np.float32)
    samples = rng.normal(h * w, sigma=cfg.noise_sigma)
    return samples.reshape(h, w).astype(np.float32)


def generate_sequence(cfg: SimConfig, rng: RandomStream) -> VideoSequence:
    """Simulate one trajectory and render it over a static noise background."""
    trajectory = simulate_trajectory(cfg, rng.spawn("trajectory"))
    noise = make_noise_image(cfg, rng.spawn("noise"))
    frames = np.empty((cfg.frames_per_video, cfg.image_size, cfg.image_size), dtype=np.float32)
    for t in range(cfg.frames_per_video):
        frames[t] = render_frame(trajectory.positions_px[t], cfg) + noise
    return VideoSequence(frames=frames, trajectory=trajectory, noise_image=noise)


def split_stream(cfg: SimConfig, split: str, index: int) -> RandomStream:
    """Stream owned by one (split, sequence) cell; disjoint across splits."""
    return RandomStream.from_seed(cfg.seed, "dataset", split, index)


def generate_split(cfg: SimConfig, split: str, n: int | None = None) -> list[VideoSequence]:
    if n is None:
        n = {"train": cfg.n_train, "val": cfg.n_val, "test": cfg.n_test}[split]
    return [generate_sequence(cfg, split_stream(cfg, split, i)) for i in range(n)]


# ---- binary tensor records ----------------------------------------------


def _write_record(fh, array: np.ndarray, dtype: str) -> None:
    data = np.ascontiguousarray(array.astype(dtype))
    fh.write(MAGIC)
    fh.write(struct.pack("<II", FORMAT_VERSION, data.ndim))
    fh.write(struct.pack(f"<{data.ndim}Q", *data.shape))
    fh.write(data.tobytes())


def _read_record(fh, dtype: str, path) -> np.ndarray:
    head = fh.read(12)
    if len(head) < 12:
        raise TruncatedFileError(f"{path}: truncated record header")
    if head[:4] != MAGIC:
        raise FormatVersionError(f"{path}: bad magic {head[:4]!r}")
    version, ndim = struct.unpack("<II", head[4:12])
    if version != FORMAT_VERSION:
        raise FormatVersionError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    raw_shape = fh.read(8 * ndim)
    if len(raw_shape) < 8 * ndim:
        raise TruncatedFileError(f"{path}: truncated shape header")
    shape = struct.unpack(f"<{ndim}Q", raw_shape)
    count = int(np.prod(shape)) if ndim else 1
    payload = fh.read(count * np.dtype(dtype).itemsize)
    if len(payload) < count * np.dtype(dtype).itemsize:
        raise TruncatedFileError(f"{path}: truncated payload")
    return np.frombuffer(payload, dtype=dtype).reshape(shape).copy()


def _config_dict(cfg: SimConfig) -> dict:
    return {
        "image_size": cfg.image_size,
        "scale": cfg.scale,
        "dt": cfg.dt,
        "gravity": cfg.gravity,
        "restitution": cfg.restitution,
        "radius_px": cfg.radius_px,
        "v_max": cfg.v_max,
        "frames_per_video": cfg.frames_per_video,
        "noise_sigma": cfg.noise_sigma,
        "n_train": cfg.n_train,
        "n_val": cfg.n_val,
        "n_test": cfg.n_test,
        "seed": cfg.seed,
    }


def write_dataset(path, split: str, sequences: list[VideoSequence], cfg: SimConfig) -> None:
    """Persist one split; the manifest is (re)written with every call."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)

    frames = np.stack([seq.frames for seq in sequences])
    positions = np.stack([seq.trajectory.positions_px for seq in sequences])
    velocities = np.stack([seq.trajectory.velocities_fu for seq in sequences])
    bounces = np.stack([seq.trajectory.bounce_flags for seq in sequences])

    with open(path / f"{split}_frames.bin", "wb") as fh:
        _write_record(fh, frames, "<f4")
    with open(path / f"{split}_truth.bin", "wb") as fh:
        _write_record(fh, positions, "<f8")
        _write_record(fh, velocities, "<f8")
        _write_record(fh, bounces.astype(np.uint8), "<u1")

    manifest_path = path / "meta.json"
    manifest = {"format_version": FORMAT_VERSION, "config": _config_dict(cfg), "splits": {}}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        if manifest.get("format_version") != FORMAT_VERSION:
            raise FormatVersionError(f"{manifest_path}: incompatible manifest version")
        if manifest.get("config") != _config_dict(cfg):
            raise DatasetError(
                f"{path}: directory already holds a dataset with a different "
                "configuration; splits of one dataset must share it"
            )
    manifest["format_version"] = FORMAT_VERSION
    manifest["config"] = _config_dict(cfg)
    manifest.setdefault("splits", {})[split] = len(sequences)
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_manifest(path) -> dict:
    manifest_path = Path(path) / "meta.json"
    if not manifest_path.exists():
        raise DatasetError(f"{manifest_path}: no manifest found")
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("format_version") != FORMAT_VERSION:
        raise FormatVersionError(f"{manifest_path}: incompatible manifest version")
    return manifest


def read_dataset(path, split: str) -> tuple[list[VideoSequence], SimConfig]:
    """Load one split; inverse of :func:`write_dataset` (noise not stored)."""
    path = Path(path)
    manifest = read_manifest(path)
    cfg = SimConfig(**manifest["config"])

    with open(path / f"{split}_frames.bin", "rb") as fh:
        frames = _read_record(fh, "<f4", path / f"{split}_frames.bin")
    truth_path = path / f"{split}_truth.bin"
    with open(truth_path, "rb") as fh:
        positions = _read_record(fh, "<f8", truth_path)
        velocities = _read_record(fh, "<f8", truth_path)
        bounces = _read_record(fh, "<u1", truth_path)

    n = manifest["splits"].get(split)
    if n is not None and frames.shape[0] != n:
        raise ShapeMismatchError(f"{path}: manifest lists {n} sequences, file has {frames.shape[0]}")
    if frames.ndim != 4 or positions.shape[-1] != 2 or velocities.shape[-1] != 2:
        raise ShapeMismatchError(f"{path}: unexpected record ranks in dataset files")
    if not (frames.shape[0] == positions.shape[0] == velocities.shape[0] == bounces.shape[0]):
        raise ShapeMismatchError(f"{path}: frames/truth sequence counts differ")
    if not (frames.shape[1] == positions.shape[1] == velocities.shape[1] == bounces.shape[1]):
        raise ShapeMismatchError(f"{path}: frames/truth frame counts differ")
    if frames.shape[2:] != (cfg.image_size, cfg.image_size):
        raise ShapeMismatchError(f"{path}: frame shape {frames.shape[2:]} != config image size")

    sequences = []
    for i in range(frames.shape[0]):
        traj = Trajectory(
            positions_px=positions[i],
            velocities_fu=velocities[i],
            bounce_flags=bounces[i].astype(bool),
        )
        sequences.append(VideoSequence(frames=frames[i], trajectory=traj))
    return sequences, cfg
