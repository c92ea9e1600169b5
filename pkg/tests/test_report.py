import json
import math

import numpy as np
import pytest

from tests.conftest import hand_pose
from walkup.core import HandPose, Landmark, LandmarkFrame, LandmarkSequence, Side, UpdrsItem
from walkup.ingest import GapFill
from walkup.kinematics import Plane
from walkup.peaks import PeakConfig
from walkup.report import AnalysisConfig, analyze, plot_svg, report_json
from walkup.signals import TremorConfig
from walkup.synth import MotionScenario, generate


def test_config_hash_stable_and_sensitive():
    base = AnalysisConfig()
    assert base.config_hash == AnalysisConfig().config_hash
    for variant in (
        AnalysisConfig(min_visibility=0.6),
        AnalysisConfig(gap_fill=GapFill.HOLD_LAST),
        AnalysisConfig(resample_fps=25.0),
        AnalysisConfig(plane=Plane.FULL_3D),
        AnalysisConfig(normalize_palm=True),
        AnalysisConfig(tremor=TremorConfig(rms_threshold=0.01)),
        AnalysisConfig(peaks=PeakConfig(min_prominence=0.3)),
        AnalysisConfig(feature_set="none"),
    ):
        assert variant.config_hash != base.config_hash


def test_config_dict_round_trip():
    cfg = AnalysisConfig(resample_fps=20.0, normalize_palm=True,
                         peaks=PeakConfig(min_prominence=0.4))
    back = AnalysisConfig.from_dict(cfg.to_dict())
    assert back == cfg


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        AnalysisConfig.from_dict({"min_visability": 0.5})


def test_analyze_requires_item():
    frames = (LandmarkFrame(0.0, right_hand=hand_pose()),)
    with pytest.raises(ValueError):
        analyze(LandmarkSequence(frames, fps=30.0))


def test_analyze_full_pipeline_report_fields():
    sc = MotionScenario(item=UpdrsItem.FINGER_TAPS, duration_s=5.0, seed=8)
    report = analyze(generate(sc), AnalysisConfig(), digest="sha256:dummy")
    assert report.item is UpdrsItem.FINGER_TAPS
    assert len(report.channels) == 2
    text = report_json(report)
    payload = json.loads(text)
    assert payload["schema"] == "walkup-report/1"
    assert payload["input_digest"] == "sha256:dummy"
    assert payload["config_hash"] == AnalysisConfig().config_hash
    right = payload["channels"]["right"]
    assert right["signal"]["length"] == 150
    assert right["signal"]["min"] >= 0.0
    assert right["cadence"]["peak_count"] == 5
    assert len(right["features"]["values"]) == 43


def test_analyze_with_resample_and_gap_fill():
    sc = MotionScenario(item=UpdrsItem.FINGER_TAPS, duration_s=3.0, seed=8)
    seq = generate(sc)
    # hide one landmark in one frame; the pipeline should repair it
    frames = list(seq.frames)
    pts = list(frames[10].right_hand.points)
    pts[8] = Landmark(pts[8].x, pts[8].y, pts[8].z, 0.1)
    frames[10] = LandmarkFrame(
        frames[10].timestamp,
        left_hand=frames[10].left_hand,
        right_hand=HandPose(Side.RIGHT, tuple(pts)),
    )
    seq = LandmarkSequence(tuple(frames), fps=seq.fps, item=seq.item, subject_id=seq.subject_id)
    cfg = AnalysisConfig(resample_fps=15.0, min_visibility=0.5, gap_fill=GapFill.LINEAR_INTERP)
    report = analyze(seq, cfg)
    right = [ch for ch in report.channels if ch.series.channel.value == "right"][0]
    assert len(right.series) == 45  # 3 s at 15 fps, no gaps after repair
    assert not np.isnan(right.series.values).any()


def test_report_json_is_nan_free_and_sorted():
    # constant series produce NaN features; JSON must map them to null + reason
    frames = tuple(
        LandmarkFrame(i / 30.0, right_hand=hand_pose()) for i in range(90)
    )
    seq = LandmarkSequence(frames, fps=30.0, item=UpdrsItem.FINGER_TAPS, subject_id="s")
    payload = report_json(analyze(seq, AnalysisConfig()))
    assert "NaN" not in payload
    data = json.loads(payload)
    features = data["channels"]["right"]["features"]
    assert any(v is None for v in features["values"].values())
    for fid, value in features["values"].items():
        assert (value is None) == (fid in features["reasons"])


def test_plot_svg_elements_and_determinism():
    sc = MotionScenario(item=UpdrsItem.FINGER_TAPS, duration_s=3.0, seed=8)
    report = analyze(generate(sc), AnalysisConfig())
    ch = report.channels[0]
    svg1 = plot_svg(ch.series, ch.peaks, ch.troughs)
    svg2 = plot_svg(ch.series, ch.peaks, ch.troughs)
    assert svg1 == svg2
    assert svg1.count("<circle") == len(ch.peaks) + len(ch.troughs)
    assert "<polyline" in svg1 and "<line" in svg1
