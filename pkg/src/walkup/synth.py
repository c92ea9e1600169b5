"""Deterministic synthetic landmark sequences with closed-form signal targets.

Each generator drives exactly the landmarks its item's signal reads, using
constructions that make the derived signal equal the analytic target up to
float rounding (plus optional seeded noise): angle targets are realized by
rotating one ray of a landmark pair, distance targets by radial placement.
Remaining landmarks sit at anatomically plausible constants.

Cycle k of the repetition waveform lasts ``1/frequency_hz + k * growth``
seconds and swings over ``base_amplitude - k * decrement``, so inter-peak
intervals form an exact arithmetic progression and per-cycle amplitudes an
exact arithmetic decrement: the scenario parameters double as oracles for
cadence statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core
from .core import (
    BodyPose,
    HandPose,
    Landmark,
    LandmarkFrame,
    LandmarkSequence,
    Side,
    UpdrsItem,
)
from .errors import UnsupportedItem

__all__ = ["MotionScenario", "generate", "DEFAULT_AMPLITUDE"]


@dataclass(frozen=True)
class MotionScenario:
    """Parameters of one synthetic recording."""

    item: UpdrsItem
    duration_s: float = 10.0
    fps: float = 30.0
    base_amplitude: float = 40.0  # degrees for angle items, normalized units for hand movement
    frequency_hz: float = 1.0
    amplitude_decrement_per_cycle: float = 0.0
    interval_growth_s_per_cycle: float = 0.0
    tremor_amplitude: float = 0.0
    tremor_freq_hz: float = 5.0
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.duration_s > 0 or not self.fps > 0 or not self.frequency_hz > 0:
            raise ValueError("duration_s, fps and frequency_hz must be positive")
        if self.amplitude_decrement_per_cycle < 0 or self.interval_growth_s_per_cycle < 0:
            raise ValueError("decrement and growth must be non-negative")
        limit = _AMPLITUDE_LIMIT.get(self.item)
        if limit is not None and self.base_amplitude > limit:
            raise ValueError(
                f"{self.item.value} amplitude must not exceed {limit} (got {self.base_amplitude})"
            )


# Swing ranges the geometric constructions can realize exactly.
_AMPLITUDE_LIMIT = {
    UpdrsItem.FINGER_TAPS: 180.0,
    UpdrsItem.ALTERNATING_HANDS: 90.0,
    UpdrsItem.LEG_AGILITY: 180.0,
    UpdrsItem.FOOT_TAPS: 90.0,
}

# Sensible per-item defaults for callers that only pick an item (e.g. the CLI).
DEFAULT_AMPLITUDE = {
    UpdrsItem.FINGER_TAPS: 40.0,
    UpdrsItem.HAND_MOVEMENT: 0.15,
    UpdrsItem.ALTERNATING_HANDS: 60.0,
    UpdrsItem.TREMOR_AT_REST: 0.0,
    UpdrsItem.LEG_AGILITY: 30.0,
    UpdrsItem.FOOT_TAPS: 20.0,
}


def _timestamps(sc: MotionScenario) -> np.ndarray:
    n = int(round(sc.duration_s * sc.fps))
    return np.arange(n, dtype=float) / sc.fps


def _wave(sc: MotionScenario, times: np.ndarray) -> np.ndarray:
    """Repetition waveform: amp_k * (1 - cos(phase)) / 2, zero at cycle edges."""
    bounds = [0.0]
    periods = []
    k = 0
    base_period = 1.0 / sc.frequency_hz
    while bounds[-1] <= times[-1]:
        period = base_period + k * sc.interval_growth_s_per_cycle
        periods.append(period)
        bounds.append(bounds[-1] + period)
        k += 1
    bounds_arr = np.array(bounds)
    periods_arr = np.array(periods)
    cyc = np.clip(np.searchsorted(bounds_arr, times, side="right") - 1, 0, len(periods) - 1)
    phase = 2.0 * math.pi * (times - bounds_arr[cyc]) / periods_arr[cyc]
    amp = np.clip(sc.base_amplitude - cyc * sc.amplitude_decrement_per_cycle, 0.0, None)
    return amp * (1.0 - np.cos(phase)) / 2.0


def _rot(u: np.ndarray, degrees: float) -> np.ndarray:
    rad = math.radians(degrees)
    c, s = math.cos(rad), math.sin(rad)
    return np.array([c * u[0] - s * u[1], s * u[0] + c * u[1]])


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


# Standing figure in normalized image coordinates (y grows downward).
_BODY_TEMPLATE: dict[int, tuple[float, float]] = {
    0: (0.50, 0.14),
    1: (0.52, 0.12), 2: (0.53, 0.12), 3: (0.54, 0.12),
    4: (0.48, 0.12), 5: (0.47, 0.12), 6: (0.46, 0.12),
    7: (0.56, 0.14), 8: (0.44, 0.14),
    9: (0.52, 0.17), 10: (0.48, 0.17),
    core.LEFT_SHOULDER: (0.42, 0.30), core.RIGHT_SHOULDER: (0.58, 0.30),
    13: (0.38, 0.42), 14: (0.62, 0.42),
    core.LEFT_WRIST: (0.36, 0.53), core.RIGHT_WRIST: (0.64, 0.53),
    17: (0.35, 0.56), 18: (0.65, 0.56),
    19: (0.34, 0.57), 20: (0.66, 0.57),
    21: (0.35, 0.55), 22: (0.65, 0.55),
    core.LEFT_HIP: (0.45, 0.55), core.RIGHT_HIP: (0.55, 0.55),
    core.LEFT_KNEE: (0.45, 0.72), core.RIGHT_KNEE: (0.55, 0.72),
    core.LEFT_ANKLE: (0.45, 0.88), core.RIGHT_ANKLE: (0.55, 0.88),
    29: (0.43, 0.91), 30: (0.57, 0.91),
    core.LEFT_FOOT_TIP: (0.48, 0.92), core.RIGHT_FOOT_TIP: (0.52, 0.92),
}

_THIGH_LEN = 0.17
_FOOT_LEN = 0.06


def _body_points(overrides: dict[int, np.ndarray]) -> tuple[Landmark, ...]:
    pts = []
    for i in range(core.BODY_POINT_COUNT):
        xy = overrides.get(i)
        if xy is None:
            xy = _BODY_TEMPLATE[i]
        pts.append(Landmark(float(xy[0]), float(xy[1]), 0.0, 1.0))
    return tuple(pts)


def _mirror_hand(points: tuple[Landmark, ...]) -> tuple[Landmark, ...]:
    return tuple(Landmark(1.0 - lm.x, lm.y, lm.z, lm.visibility) for lm in points)


def _hand_points(wrist: np.ndarray, tip_dirs: dict[int, np.ndarray], tip_lens: dict[int, float]) -> tuple[Landmark, ...]:
    """Lay out a hand: each finger chain sits on the ray to its tip."""
    chains = {4: (1, 2, 3), 8: (5, 6, 7), 12: (9, 10, 11), 16: (13, 14, 15), 20: (17, 18, 19)}
    coords = {0: wrist}
    for tip, joints in chains.items():
        direction = tip_dirs[tip]
        length = tip_lens[tip]
        coords[tip] = wrist + length * direction
        for rank, j in enumerate(joints):
            coords[j] = wrist + length * (0.3 + 0.2 * rank) * direction
    return tuple(
        Landmark(float(coords[i][0]), float(coords[i][1]), 0.0, 1.0)
        for i in range(core.HAND_POINT_COUNT)
    )


def _finger_taps_hand(angle_deg: float) -> tuple[Landmark, ...]:
    wrist = np.array([0.62, 0.55])
    thumb_dir = _unit(np.array([1.0, -0.2]))
    index_dir = _rot(thumb_dir, -angle_deg)  # negative: opens upward in image coords
    dirs = {
        4: thumb_dir,
        8: index_dir,
        12: _rot(thumb_dir, -95.0),
        16: _rot(thumb_dir, -110.0),
        20: _rot(thumb_dir, -125.0),
    }
    lens = {4: 0.10, 8: 0.13, 12: 0.14, 16: 0.13, 20: 0.11}
    return _hand_points(wrist, dirs, lens)


def _hand_movement_hand(reach: float) -> tuple[Landmark, ...]:
    wrist = np.array([0.62, 0.55])
    base = _unit(np.array([0.15, -1.0]))
    dirs = {
        8: _rot(base, 12.0),
        12: base,
        16: _rot(base, -12.0),
        20: _rot(base, -24.0),
        4: _rot(base, 40.0),
    }
    lens = {8: reach, 12: reach, 16: reach, 20: reach, 4: 0.8 * reach + 0.02}
    pts = list(_hand_points(wrist, dirs, lens))
    # palm anchor at a fixed length so palm-normalized D2 stays well defined
    palm = wrist + 0.1 * base
    pts[core.MIDDLE_MCP] = Landmark(float(palm[0]), float(palm[1]), 0.0, 1.0)
    return tuple(pts)


def _alternating_hand(angle_deg: float) -> tuple[Landmark, ...]:
    pinky_tip = np.array([0.60, 0.50])
    rad = math.radians(angle_deg)
    span = 0.16
    thumb_tip = pinky_tip + span * np.array([math.cos(rad), -math.sin(rad)])
    wrist = pinky_tip + 0.5 * (thumb_tip - pinky_tip) + np.array([0.0, 0.05])
    axis = _unit(thumb_tip - pinky_tip)
    dirs = {
        4: _unit(thumb_tip - wrist),
        20: _unit(pinky_tip - wrist),
        8: _rot(axis, 25.0),
        12: _rot(axis, 45.0),
        16: _rot(axis, 65.0),
    }
    lens = {
        4: float(np.linalg.norm(thumb_tip - wrist)),
        20: float(np.linalg.norm(pinky_tip - wrist)),
        8: 0.12,
        12: 0.12,
        16: 0.12,
    }
    pts = list(_hand_points(wrist, dirs, lens))
    # pin the two defining tips exactly
    pts[core.THUMB_TIP] = Landmark(float(thumb_tip[0]), float(thumb_tip[1]), 0.0, 1.0)
    pts[core.PINKY_TIP] = Landmark(float(pinky_tip[0]), float(pinky_tip[1]), 0.0, 1.0)
    return tuple(pts)


def _leg_agility_body(raise_deg: float) -> tuple[Landmark, ...]:
    overrides: dict[int, np.ndarray] = {}
    for hip_i, knee_i, shoulder_i, ankle_i in (
        (core.RIGHT_HIP, core.RIGHT_KNEE, core.RIGHT_SHOULDER, core.RIGHT_ANKLE),
        (core.LEFT_HIP, core.LEFT_KNEE, core.LEFT_SHOULDER, core.LEFT_ANKLE),
    ):
        hip = np.array(_BODY_TEMPLATE[hip_i])
        shoulder = np.array(_BODY_TEMPLATE[shoulder_i])
        torso_dir = _unit(shoulder - hip)
        knee = hip + _THIGH_LEN * _rot(torso_dir, 180.0 - raise_deg)
        overrides[knee_i] = knee
        overrides[ankle_i] = knee + np.array([0.0, 0.16])
    return _body_points(overrides)


def _foot_taps_body(lift_deg: float) -> tuple[Landmark, ...]:
    overrides: dict[int, np.ndarray] = {}
    for ankle_i, knee_i, tip_i, sign in (
        (core.RIGHT_ANKLE, core.RIGHT_KNEE, core.RIGHT_FOOT_TIP, 1.0),
        (core.LEFT_ANKLE, core.LEFT_KNEE, core.LEFT_FOOT_TIP, -1.0),
    ):
        ankle = np.array(_BODY_TEMPLATE[ankle_i])
        knee = np.array(_BODY_TEMPLATE[knee_i])
        shin_dir = _unit(knee - ankle)
        overrides[tip_i] = ankle + _FOOT_LEN * _rot(shin_dir, sign * (90.0 - lift_deg))
    return _body_points(overrides)


def _tremor_body(sc: MotionScenario, t: float) -> tuple[Landmark, ...]:
    overrides: dict[int, np.ndarray] = {}
    wrist = np.array(_BODY_TEMPLATE[core.RIGHT_WRIST])
    dx = sc.tremor_amplitude * math.sin(2.0 * math.pi * sc.tremor_freq_hz * t)
    overrides[core.RIGHT_WRIST] = wrist + np.array([dx, 0.0])
    return _body_points(overrides)


def generate(scenario: MotionScenario) -> LandmarkSequence:
    """Generate the landmark sequence for a scenario (bit-reproducible per seed)."""
    times = _timestamps(scenario)
    rng = np.random.default_rng(scenario.seed)
    item = scenario.item

    frames: list[LandmarkFrame] = []
    if item in (UpdrsItem.FINGER_TAPS, UpdrsItem.HAND_MOVEMENT, UpdrsItem.ALTERNATING_HANDS):
        wave = _wave(scenario, times)
        if item is UpdrsItem.HAND_MOVEMENT:
            def make(w: float) -> tuple[Landmark, ...]:
                return _hand_movement_hand(0.05 + w)
        elif item is UpdrsItem.FINGER_TAPS:
            make = _finger_taps_hand
        else:
            make = _alternating_hand
        for t, w in zip(times, wave):
            right = make(float(w))
            left = _mirror_hand(right)
            frames.append(
                LandmarkFrame(
                    float(t),
                    left_hand=HandPose(Side.LEFT, left),
                    right_hand=HandPose(Side.RIGHT, right),
                )
            )
    elif item is UpdrsItem.LEG_AGILITY:
        wave = _wave(scenario, times)
        for t, w in zip(times, wave):
            frames.append(LandmarkFrame(float(t), body=BodyPose(_leg_agility_body(float(w)))))
    elif item is UpdrsItem.FOOT_TAPS:
        wave = _wave(scenario, times)
        for t, w in zip(times, wave):
            frames.append(LandmarkFrame(float(t), body=BodyPose(_foot_taps_body(float(w)))))
    elif item is UpdrsItem.TREMOR_AT_REST:
        for t in times:
            frames.append(LandmarkFrame(float(t), body=BodyPose(_tremor_body(scenario, float(t)))))
    else:  # pragma: no cover - all six items have generators
        raise UnsupportedItem(item.value)

    if scenario.noise_std > 0.0:
        frames = _add_noise(frames, rng, scenario.noise_std)

    return LandmarkSequence(
        tuple(frames), fps=scenario.fps, item=item, subject_id=f"synth-{scenario.seed}"
    )


def _add_noise(frames: list[LandmarkFrame], rng: np.random.Generator, std: float) -> list[LandmarkFrame]:
    noisy = []
    for frame in frames:
        kwargs = {}
        for slot in ("body", "left_hand", "right_hand"):
            pose = getattr(frame, slot)
            if pose is None:
                continue
            jitter = rng.normal(0.0, std, size=(len(pose.points), 2))
            pts = tuple(
                Landmark(lm.x + jitter[i, 0], lm.y + jitter[i, 1], lm.z, lm.visibility)
                for i, lm in enumerate(pose.points)
            )
            kwargs[slot] = BodyPose(pts) if slot == "body" else HandPose(pose.side, pts)
        noisy.append(LandmarkFrame(frame.timestamp, **kwargs))
    return noisy
