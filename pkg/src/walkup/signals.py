"""The six per-item motion signals built from landmark sequences.

Per frame:

* finger taps        A1 = angle(index_tip - wrist, thumb_tip - wrist)
* hand movement      D2 = mean distance of tips 8/12/16/20 to the wrist
* alternating hands  A3 = angle of (thumb_tip - pinky_tip) to the horizontal
* leg agility        A5 = angle at the hip between hip->knee and hip->shoulder
* foot taps          A6 = angle at the ankle between ankle->knee and ankle->foot tip

Tremor (T4) is windowed: every present landmark's x(t), y(t) is high-pass
filtered (zero-phase, second-order Butterworth run forward-backward) and the
window is flagged 1 iff any landmark's filtered displacement RMS exceeds the
threshold.

Frames where a required landmark is missing (below the visibility threshold)
or geometrically degenerate become gaps: the frame is skipped in that
channel's series.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.signal import butter, filtfilt

from . import core
from .core import (
    Channel,
    HandPose,
    LandmarkFrame,
    LandmarkSequence,
    Side,
    SignalSeries,
    UpdrsItem,
)
from .errors import DegenerateVector, MissingLandmark, SequenceTooShort
from .kinematics import Plane, angle_between, angle_to_horizontal, distance, vector_between

__all__ = [
    "TremorConfig",
    "finger_taps_signal",
    "hand_movement_signal",
    "alternating_hands_signal",
    "tremor_signal",
    "leg_agility_signal",
    "foot_taps_signal",
    "build_all",
    "signal_csv",
]


@dataclass(frozen=True)
class TremorConfig:
    """Operationalizes the "large movement" tremor criterion."""

    highpass_cutoff_hz: float = 2.0
    rms_threshold: float = 0.005  # normalized units, per-window displacement RMS
    window_s: float = 1.0
    overlap: float = 0.5

    def __post_init__(self):
        if not self.highpass_cutoff_hz > 0:
            raise ValueError("highpass_cutoff_hz must be positive")
        if not self.rms_threshold > 0:
            raise ValueError("rms_threshold must be positive")
        if not self.window_s > 0:
            raise ValueError("window_s must be positive")
        if not 0.0 <= self.overlap < 1.0:
            raise ValueError("overlap must lie in [0, 1)")


def _channel(side: Side) -> Channel:
    return Channel.LEFT if side is Side.LEFT else Channel.RIGHT


def _per_frame_signal(
    seq: LandmarkSequence,
    item: UpdrsItem,
    channel: Channel,
    frame_value: Callable[[LandmarkFrame], Optional[float]],
) -> SignalSeries:
    values: list[float] = []
    times: list[float] = []
    for frame in seq.frames:
        v = frame_value(frame)
        if v is not None:
            values.append(v)
            times.append(frame.timestamp)
    if not values:
        raise MissingLandmark(-1, f"no frame provides the landmarks for {item.value}/{channel.value}")
    return SignalSeries(item, channel, np.array(values), np.array(times))


def finger_taps_signal(
    seq: LandmarkSequence,
    side: Side,
    min_visibility: float = 0.0,
    plane: Plane = Plane.IMAGE_2D,
) -> SignalSeries:
    """Hand-openness angle per frame, in degrees."""

    def value(frame: LandmarkFrame) -> Optional[float]:
        hand = frame.hand(side)
        if hand is None:
            return None
        try:
            u = vector_between(hand.points, core.INDEX_TIP, core.HAND_WRIST, plane, min_visibility)
            v = vector_between(hand.points, core.THUMB_TIP, core.HAND_WRIST, plane, min_visibility)
            return angle_between(u, v)
        except (MissingLandmark, DegenerateVector):
            return None

    return _per_frame_signal(seq, UpdrsItem.FINGER_TAPS, _channel(side), value)


def hand_movement_signal(
    seq: LandmarkSequence,
    side: Side,
    min_visibility: float = 0.0,
    plane: Plane = Plane.IMAGE_2D,
    normalize_palm: bool = False,
) -> SignalSeries:
    """Mean fingertip-to-wrist distance per frame (optionally / palm length)."""
    tips = (core.INDEX_TIP, core.MIDDLE_TIP, core.RING_TIP, core.PINKY_TIP)

    def value(frame: LandmarkFrame) -> Optional[float]:
        hand = frame.hand(side)
        if hand is None:
            return None
        try:
            d = sum(distance(hand.points, t, core.HAND_WRIST, plane, min_visibility) for t in tips) / 4.0
            if normalize_palm:
                palm = distance(hand.points, core.MIDDLE_MCP, core.HAND_WRIST, plane, min_visibility)
                if palm <= 1e-12:
                    return None
                d /= palm
            return d
        except MissingLandmark:
            return None

    return _per_frame_signal(seq, UpdrsItem.HAND_MOVEMENT, _channel(side), value)


def alternating_hands_signal(
    seq: LandmarkSequence,
    side: Side,
    min_visibility: float = 0.0,
    plane: Plane = Plane.IMAGE_2D,
) -> SignalSeries:
    """Hand orientation against the image horizontal, in [0, 90] degrees."""

    def value(frame: LandmarkFrame) -> Optional[float]:
        hand = frame.hand(side)
        if hand is None:
            return None
        try:
            u = vector_between(hand.points, core.THUMB_TIP, core.PINKY_TIP, plane, min_visibility)
            return angle_to_horizontal(u)
        except (MissingLandmark, DegenerateVector):
            return None

    return _per_frame_signal(seq, UpdrsItem.ALTERNATING_HANDS, _channel(side), value)


def _body_angle_signal(
    seq: LandmarkSequence,
    item: UpdrsItem,
    side: Side,
    vertex: int,
    ray_a: int,
    ray_b: int,
    min_visibility: float,
    plane: Plane,
) -> SignalSeries:
    def value(frame: LandmarkFrame) -> Optional[float]:
        if frame.body is None:
            return None
        try:
            u = vector_between(frame.body.points, ray_a, vertex, plane, min_visibility)
            v = vector_between(frame.body.points, ray_b, vertex, plane, min_visibility)
            return angle_between(u, v)
        except (MissingLandmark, DegenerateVector):
            return None

    return _per_frame_signal(seq, item, _channel(side), value)


def leg_agility_signal(
    seq: LandmarkSequence,
    side: Side,
    min_visibility: float = 0.0,
    plane: Plane = Plane.IMAGE_2D,
) -> SignalSeries:
    """Angle at the hip between the thigh and the torso, in degrees."""
    if side is Side.RIGHT:
        vertex, knee, shoulder = core.RIGHT_HIP, core.RIGHT_KNEE, core.RIGHT_SHOULDER
    else:
        vertex, knee, shoulder = core.LEFT_HIP, core.LEFT_KNEE, core.LEFT_SHOULDER
    return _body_angle_signal(
        seq, UpdrsItem.LEG_AGILITY, side, vertex, knee, shoulder, min_visibility, plane
    )


def foot_taps_signal(
    seq: LandmarkSequence,
    side: Side,
    min_visibility: float = 0.0,
    plane: Plane = Plane.IMAGE_2D,
) -> SignalSeries:
    """Angle at the ankle between the shin and the foot, in degrees."""
    if side is Side.RIGHT:
        vertex, knee, tip = core.RIGHT_ANKLE, core.RIGHT_KNEE, core.RIGHT_FOOT_TIP
    else:
        vertex, knee, tip = core.LEFT_ANKLE, core.LEFT_KNEE, core.LEFT_FOOT_TIP
    return _body_angle_signal(
        seq, UpdrsItem.FOOT_TAPS, side, vertex, knee, tip, min_visibility, plane
    )


# ── tremor ───────────────────────────────────────────────────────────


def _landmark_tracks(seq: LandmarkSequence, min_visibility: float) -> np.ndarray:
    """Stack x/y tracks of every landmark visible in all frames: (n_frames, n_tracks, 2)."""
    n = len(seq.frames)
    tracks: list[np.ndarray] = []
    for slot in ("body", "left_hand", "right_hand"):
        poses = [getattr(f, slot) for f in seq.frames]
        if any(p is None for p in poses):
            continue
        count = len(poses[0].points)
        block = np.empty((n, count, 3))
        for i, p in enumerate(poses):
            for j, lm in enumerate(p.points):
                block[i, j, 0] = lm.x
                block[i, j, 1] = lm.y
                block[i, j, 2] = lm.visibility
        visible = (block[:, :, 2] >= min_visibility).all(axis=0)
        if visible.any():
            tracks.append(block[:, visible, :2])
    if not tracks:
        return np.empty((n, 0, 2))
    return np.concatenate(tracks, axis=1)


def tremor_signal(
    seq: LandmarkSequence,
    cfg: TremorConfig = TremorConfig(),
    min_visibility: float = 0.0,
) -> SignalSeries:
    """Windowed tremor flag series (one {0,1} value per window).

    The whole sequence is filtered once (zero-phase high-pass), then RMS is
    evaluated over sliding windows of ``cfg.window_s`` seconds with the
    configured overlap; each value sits at its window-center timestamp.
    """
    n = len(seq.frames)
    times = seq.timestamps
    if n < 2:
        raise SequenceTooShort("tremor analysis needs at least one full window")
    fs = (n - 1) / (times[-1] - times[0])
    win = max(2, int(round(cfg.window_s * fs)))
    hop = max(1, int(round(win * (1.0 - cfg.overlap))))
    if n < win:
        raise SequenceTooShort(
            f"{n} frames < one {cfg.window_s:.2f}s window ({win} frames at {fs:.1f} fps)"
        )

    tracks = _landmark_tracks(seq, min_visibility)  # (n, m, 2)
    if tracks.shape[1] == 0:
        raise MissingLandmark(-1, "no landmark visible across the whole sequence")

    nyquist = fs / 2.0
    cut = cfg.highpass_cutoff_hz / nyquist
    if cut >= 1.0:
        raise ValueError(
            f"highpass cutoff {cfg.highpass_cutoff_hz} Hz not below Nyquist {nyquist:.2f} Hz"
        )
    # Second-order Butterworth high-pass, |H(jw)|^2 = (w/wc)^4 / (1 + (w/wc)^4),
    # discretized by the bilinear transform at the normalized cutoff; filtfilt
    # applies it forward and backward for zero phase (magnitude squared).
    b, a = butter(2, cut, btype="highpass")
    padlen = 3 * max(len(a), len(b))
    if n <= padlen:
        raise SequenceTooShort(f"zero-phase filtering needs more than {padlen} frames, got {n}")
    flat = tracks.reshape(n, -1)
    filtered = filtfilt(b, a, flat, axis=0).reshape(n, -1, 2)
    # per-frame squared displacement of each landmark
    sq = filtered[:, :, 0] ** 2 + filtered[:, :, 1] ** 2

    values: list[float] = []
    centers: list[float] = []
    start = 0
    while start + win <= n:
        rms = np.sqrt(sq[start : start + win].mean(axis=0))
        values.append(1.0 if float(rms.max()) > cfg.rms_threshold else 0.0)
        centers.append(0.5 * (times[start] + times[start + win - 1]))
        start += hop

    return SignalSeries(UpdrsItem.TREMOR_AT_REST, Channel.GLOBAL, np.array(values), np.array(centers))


# ── dispatch ─────────────────────────────────────────────────────────


def build_all(
    seq: LandmarkSequence,
    tremor_cfg: TremorConfig = TremorConfig(),
    min_visibility: float = 0.0,
    plane: Plane = Plane.IMAGE_2D,
    normalize_palm: bool = False,
) -> list[SignalSeries]:
    """Build every channel the tagged item defines.

    Bilateral items yield Left and Right series; hand items skip a side
    whose hand never appears; tremor yields a single Global series.
    """
    if seq.item is None:
        raise ValueError("sequence has no item tag")

    if seq.item is UpdrsItem.TREMOR_AT_REST:
        return [tremor_signal(seq, tremor_cfg, min_visibility)]

    out: list[SignalSeries] = []
    if seq.item in (UpdrsItem.FINGER_TAPS, UpdrsItem.HAND_MOVEMENT, UpdrsItem.ALTERNATING_HANDS):
        for side in (Side.LEFT, Side.RIGHT):
            if not any(f.hand(side) is not None for f in seq.frames):
                continue
            if seq.item is UpdrsItem.FINGER_TAPS:
                out.append(finger_taps_signal(seq, side, min_visibility, plane))
            elif seq.item is UpdrsItem.HAND_MOVEMENT:
                out.append(hand_movement_signal(seq, side, min_visibility, plane, normalize_palm))
            else:
                out.append(alternating_hands_signal(seq, side, min_visibility, plane))
        return out

    builder = leg_agility_signal if seq.item is UpdrsItem.LEG_AGILITY else foot_taps_signal
    for side in (Side.LEFT, Side.RIGHT):
        out.append(builder(seq, side, min_visibility, plane))
    return out


def signal_csv(series: SignalSeries) -> str:
    """Per-channel CSV export: one t,value row per sample."""
    lines = ["t,value"]
    for t, v in zip(series.timestamps, series.values):
        lines.append(f"{float(t)!r},{float(v)!r}")
    return "\n".join(lines) + "\n"
