"""Landmark and signal data model.

Coordinates are normalized image units throughout (x, y in roughly [0, 1],
y pointing down, z a unitless relative depth). Angle signals are degrees,
distance signals normalized units, tremor flags {0, 1}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "Landmark",
    "BodyPose",
    "HandPose",
    "LandmarkFrame",
    "LandmarkSequence",
    "UpdrsItem",
    "Channel",
    "Side",
    "SignalSeries",
    "Violation",
    "ValidationReport",
    "validate_sequence",
    "BODY_POINT_COUNT",
    "HAND_POINT_COUNT",
    "REQUIRED_POSE",
]

BODY_POINT_COUNT = 33
HAND_POINT_COUNT = 21

# Body landmark indices used by the signal builders (full-body topology).
LEFT_SHOULDER = 11
RIGHT_SHOULDER = 12
LEFT_WRIST = 15
RIGHT_WRIST = 16
LEFT_HIP = 23
RIGHT_HIP = 24
LEFT_KNEE = 25
RIGHT_KNEE = 26
LEFT_ANKLE = 27
RIGHT_ANKLE = 28
LEFT_FOOT_TIP = 31
RIGHT_FOOT_TIP = 32

# Hand landmark indices (0 = wrist, tips at 4/8/12/16/20).
HAND_WRIST = 0
THUMB_TIP = 4
INDEX_TIP = 8
MIDDLE_MCP = 9
MIDDLE_TIP = 12
RING_TIP = 16
PINKY_TIP = 20


class UpdrsItem(enum.Enum):
    """The six supported motor-examination items."""

    FINGER_TAPS = "finger_taps"
    HAND_MOVEMENT = "hand_movement"
    ALTERNATING_HANDS = "alternating_hands"
    TREMOR_AT_REST = "tremor_at_rest"
    LEG_AGILITY = "leg_agility"
    FOOT_TAPS = "foot_taps"

    @classmethod
    def from_name(cls, name: str) -> "UpdrsItem":
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(item.value for item in cls)
            raise ValueError(f"unknown item {name!r}; expected one of: {valid}") from None


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class Channel(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    GLOBAL = "global"


# Which pose each item's signal reads from.
REQUIRED_POSE = {
    UpdrsItem.FINGER_TAPS: "hand",
    UpdrsItem.HAND_MOVEMENT: "hand",
    UpdrsItem.ALTERNATING_HANDS: "hand",
    UpdrsItem.TREMOR_AT_REST: "body",
    UpdrsItem.LEG_AGILITY: "body",
    UpdrsItem.FOOT_TAPS: "body",
}


@dataclass(frozen=True)
class Landmark:
    """One keypoint: normalized image coordinates plus detector confidence."""

    x: float
    y: float
    z: float = 0.0
    visibility: float = 1.0

    def __post_init__(self):
        # keep plain floats so downstream repr/JSON stay clean
        for name in ("x", "y", "z", "visibility"):
            object.__setattr__(self, name, float(getattr(self, name)))


@dataclass(frozen=True)
class BodyPose:
    """Exactly 33 landmarks following the standard full-body topology."""

    points: tuple[Landmark, ...]

    def __post_init__(self):
        if len(self.points) != BODY_POINT_COUNT:
            raise ValueError(f"body pose needs {BODY_POINT_COUNT} points, got {len(self.points)}")
        object.__setattr__(self, "points", tuple(self.points))


@dataclass(frozen=True)
class HandPose:
    """Exactly 21 landmarks; 0 = wrist, tips at 4, 8, 12, 16, 20."""

    side: Side
    points: tuple[Landmark, ...]

    def __post_init__(self):
        if len(self.points) != HAND_POINT_COUNT:
            raise ValueError(f"hand pose needs {HAND_POINT_COUNT} points, got {len(self.points)}")
        object.__setattr__(self, "points", tuple(self.points))


@dataclass(frozen=True)
class LandmarkFrame:
    """One timestamped sample; at least one pose must be present."""

    timestamp: float
    body: Optional[BodyPose] = None
    left_hand: Optional[HandPose] = None
    right_hand: Optional[HandPose] = None

    def __post_init__(self):
        if self.body is None and self.left_hand is None and self.right_hand is None:
            raise ValueError("frame must carry at least one of body/left_hand/right_hand")
        object.__setattr__(self, "timestamp", float(self.timestamp))

    def hand(self, side: Side) -> Optional[HandPose]:
        return self.left_hand if side is Side.LEFT else self.right_hand


@dataclass(frozen=True, eq=False)
class LandmarkSequence:
    """Ordered frames plus sampling metadata; the unit of ingestion."""

    frames: tuple[LandmarkFrame, ...]
    fps: float
    item: Optional[UpdrsItem] = None
    subject_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([f.timestamp for f in self.frames], dtype=float)

    @property
    def duration_s(self) -> float:
        if len(self.frames) < 2:
            return 0.0
        return self.frames[-1].timestamp - self.frames[0].timestamp


@dataclass(frozen=True, eq=False)
class SignalSeries:
    """One scalar channel over time (angle in degrees, distance, or tremor flag)."""

    item: UpdrsItem
    channel: Channel
    values: np.ndarray
    timestamps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "timestamps", np.asarray(self.timestamps, dtype=float))
        if self.values.shape != self.timestamps.shape:
            raise ValueError("values and timestamps must have equal length")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def name(self) -> str:
        return f"{self.item.value}_{self.channel.value}"


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    frame: Optional[int] = None

    def __str__(self) -> str:
        where = f" [frame {self.frame}]" if self.frame is not None else ""
        return f"{self.code}: {self.message}{where}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, frame: Optional[int] = None) -> None:
        self.violations.append(Violation(code, message, frame))

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def _landmark_issues(lm: Landmark) -> Optional[str]:
    for name in ("x", "y", "z", "visibility"):
        if not math.isfinite(getattr(lm, name)):
            return f"non-finite {name}"
    if not 0.0 <= lm.visibility <= 1.0:
        return f"visibility {lm.visibility} outside [0, 1]"
    return None


def validate_sequence(seq: LandmarkSequence) -> ValidationReport:
    """Diagnose a sequence against the data-model invariants.

    Returns a report rather than raising: an empty report means valid.
    Checks timestamps (non-negative, strictly increasing), fps, landmark
    finiteness and visibility range, and the item/pose requirement table.
    """
    report = ValidationReport()
    if not seq.frames:
        report.add("empty", "sequence contains no frames")
        return report
    if not (seq.fps > 0):
        report.add("bad_fps", f"fps must be positive, got {seq.fps}")

    prev_t = None
    for i, frame in enumerate(seq.frames):
        if not math.isfinite(frame.timestamp):
            report.add("bad_timestamp", "non-finite timestamp", frame=i)
        elif frame.timestamp < 0:
            report.add("bad_timestamp", f"negative timestamp {frame.timestamp}", frame=i)
        if prev_t is not None and not (frame.timestamp > prev_t):
            report.add("non_monotone", "non-increasing timestamps", frame=i)
        prev_t = frame.timestamp

        for pose_name, points in _iter_poses(frame):
            for j, lm in enumerate(points):
                issue = _landmark_issues(lm)
                if issue is not None:
                    report.add("bad_landmark", f"{pose_name}[{j}]: {issue}", frame=i)

    if seq.item is not None:
        required = REQUIRED_POSE[seq.item]
        missing = [
            i
            for i, frame in enumerate(seq.frames)
            if (required == "hand" and frame.left_hand is None and frame.right_hand is None)
            or (required == "body" and frame.body is None)
        ]
        if missing:
            report.add(
                "missing_pose",
                f"item requires {required} landmarks; missing in "
                f"{len(missing)} of {len(seq.frames)} frames",
            )
    return report


def _iter_poses(frame: LandmarkFrame):
    if frame.body is not None:
        yield "body", frame.body.points
    if frame.left_hand is not None:
        yield "left_hand", frame.left_hand.points
    if frame.right_hand is not None:
        yield "right_hand", frame.right_hand.points
