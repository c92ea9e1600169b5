"""Peak/bottom detection and cadence statistics for signal series.

Detection keeps interior extrema whose topographic prominence is at least a
configurable fraction of the signal range, greedily selected by descending
prominence under a minimum time separation. An extremum must be strictly
higher (lower) than its nearest differing neighbours; a run of equal values
counts once, reported at its midpoint, and runs touching the series boundary
are never reported (their prominence is undefined). A final pass enforces
strict peak/trough alternation, keeping the more extreme of same-kind
neighbours.

Values are range-normalized before thresholding, so detection is exactly
invariant under positive affine transforms of the values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import find_peaks, peak_prominences

from .core import SignalSeries
from .errors import SeriesTooShort

__all__ = ["PeakConfig", "CadenceStats", "detect_peaks", "cadence_stats", "overlay_csv"]


@dataclass(frozen=True)
class PeakConfig:
    min_prominence: float = 0.2  # fraction of (max - min)
    min_separation_s: float = 0.15

    def __post_init__(self):
        if not 0.0 < self.min_prominence <= 1.0:
            raise ValueError("min_prominence must lie in (0, 1]")
        if self.min_separation_s < 0:
            raise ValueError("min_separation_s must be non-negative")


@dataclass(frozen=True)
class CadenceStats:
    """Summary of repetition amplitude and timing.

    ``interval_slope_s_per_cycle`` is the OLS slope of successive inter-peak
    intervals against cycle index; a positive value means the action slows
    down over the recording. Fields are None when fewer than the required
    number of peaks exist.
    """

    peak_count: int
    signal_mean: float
    mean_amplitude: Optional[float]
    mean_interval_s: Optional[float]
    interval_slope_s_per_cycle: Optional[float]
    amplitude_slope: Optional[float]


def _select(
    v: np.ndarray, t: np.ndarray, threshold: float, min_sep: float
) -> np.ndarray:
    candidates = find_peaks(v)[0]
    if len(candidates) == 0:
        return candidates
    prom = peak_prominences(v, candidates)[0]
    keep = prom >= threshold
    candidates, prom = candidates[keep], prom[keep]
    # greedy by descending prominence; ties resolved by earlier time
    order = np.lexsort((candidates, -prom))
    accepted: list[int] = []
    for idx in candidates[order]:
        if all(abs(t[idx] - t[j]) >= min_sep for j in accepted):
            accepted.append(int(idx))
    return np.array(sorted(accepted), dtype=int)


def _enforce_alternation(
    v: np.ndarray, peaks: np.ndarray, troughs: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    events = [(int(i), "peak") for i in peaks] + [(int(i), "trough") for i in troughs]
    events.sort()
    kept: list[tuple[int, str]] = []
    for idx, kind in events:
        if kept and kept[-1][1] == kind:
            prev_idx = kept[-1][0]
            better = (v[idx] > v[prev_idx]) if kind == "peak" else (v[idx] < v[prev_idx])
            if better:
                kept[-1] = (idx, kind)
        else:
            kept.append((idx, kind))
    new_peaks = np.array([i for i, k in kept if k == "peak"], dtype=int)
    new_troughs = np.array([i for i, k in kept if k == "trough"], dtype=int)
    return new_peaks, new_troughs


def detect_peaks(
    series: SignalSeries, cfg: PeakConfig = PeakConfig()
) -> tuple[np.ndarray, np.ndarray]:
    """Return (peak indices, trough indices), each sorted by time."""
    v = series.values
    t = series.timestamps
    if len(v) < 3:
        raise SeriesTooShort(f"need at least 3 samples, got {len(v)}")
    vmin = float(v.min())
    value_range = float(v.max()) - vmin
    if value_range <= 0.0:
        return np.array([], dtype=int), np.array([], dtype=int)
    w = (v - vmin) / value_range

    peaks = _select(w, t, cfg.min_prominence, cfg.min_separation_s)
    troughs = _select(-w, t, cfg.min_prominence, cfg.min_separation_s)
    return _enforce_alternation(v, peaks, troughs)


def _ols_slope(y: np.ndarray) -> Optional[float]:
    if len(y) < 2:
        return None
    x = np.arange(len(y), dtype=float)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def cadence_stats(
    series: SignalSeries, peaks: np.ndarray, troughs: np.ndarray
) -> CadenceStats:
    """Amplitude/timing statistics from a detected peak/trough set.

    Per-peak amplitude is the mean difference to the adjacent troughs (the
    preceding and following trough in the alternating event sequence).
    """
    v = series.values
    t = series.timestamps
    peaks = np.asarray(peaks, dtype=int)
    troughs = np.asarray(troughs, dtype=int)

    events = sorted([(int(i), "peak") for i in peaks] + [(int(i), "trough") for i in troughs])
    per_peak_amp: list[float] = []
    all_diffs: list[float] = []
    for pos, (idx, kind) in enumerate(events):
        if kind != "peak":
            continue
        diffs = []
        if pos > 0 and events[pos - 1][1] == "trough":
            diffs.append(float(v[idx] - v[events[pos - 1][0]]))
        if pos + 1 < len(events) and events[pos + 1][1] == "trough":
            diffs.append(float(v[idx] - v[events[pos + 1][0]]))
        if diffs:
            per_peak_amp.append(float(np.mean(diffs)))
            all_diffs.extend(diffs)

    mean_amplitude = float(np.mean(all_diffs)) if all_diffs else None
    amplitude_slope = _ols_slope(np.array(per_peak_amp)) if len(per_peak_amp) >= 2 else None

    if len(peaks) >= 2:
        intervals = np.diff(t[peaks])
        mean_interval = float(intervals.mean())
        interval_slope = _ols_slope(intervals)
    else:
        mean_interval = None
        interval_slope = None

    return CadenceStats(
        peak_count=int(len(peaks)),
        signal_mean=float(v.mean()),
        mean_amplitude=mean_amplitude,
        mean_interval_s=mean_interval,
        interval_slope_s_per_cycle=interval_slope,
        amplitude_slope=amplitude_slope,
    )


def overlay_csv(series: SignalSeries, peaks: np.ndarray, troughs: np.ndarray) -> str:
    """Peak-overlay export for plotting: t,value,kind rows sorted by time."""
    rows = [(float(series.timestamps[i]), float(series.values[i]), "peak") for i in peaks]
    rows += [(float(series.timestamps[i]), float(series.values[i]), "trough") for i in troughs]
    rows.sort()
    lines = ["t,value,kind"]
    for t, v, kind in rows:
        lines.append(f"{t!r},{v!r},{kind}")
    return "\n".join(lines) + "\n"
