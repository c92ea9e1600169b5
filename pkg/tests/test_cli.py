import json
from pathlib import Path

import pytest

from walkup.cli import main


def _run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def tap_fixture(tmp_path):
    path = tmp_path / "tap.jsonl"
    code = main(["synth", "--item", "finger_taps", "--out", str(path), "--seed", "3"])
    assert code == 0
    return path


def _right_only_fixture(tmp_path, tap_fixture) -> Path:
    """Strip the left hand so analysis yields a single channel."""
    out = tmp_path / "tap_right.jsonl"
    lines = tap_fixture.read_text().splitlines()
    kept = [lines[0]]
    for line in lines[1:]:
        obj = json.loads(line)
        obj.pop("left_hand", None)
        kept.append(json.dumps(obj))
    out.write_text("\n".join(kept) + "\n")
    return out


def test_synth_then_validate_ok(capsys, tap_fixture):
    code, _, err = _run(capsys, "validate", "--in", str(tap_fixture))
    assert code == 0
    assert "ok" in err


def test_validate_empty_file(capsys, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    code, _, err = _run(capsys, "validate", "--in", str(empty))
    assert code == 1
    assert "EmptySequence" in err


def test_validate_missing_file_is_io_error(capsys, tmp_path):
    code, _, err = _run(capsys, "validate", "--in", str(tmp_path / "nope.jsonl"))
    assert code == 3


def test_validate_bad_sequence(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    body = [[0.1, 0.2, 0.0, 1.0]] * 33
    bad.write_text(
        "\n".join(
            [
                json.dumps({"fps": 30, "item": "finger_taps"}),
                json.dumps({"t": 0.0, "body": body}),
            ]
        )
    )
    code, _, err = _run(capsys, "validate", "--in", str(bad))
    assert code == 1
    assert "hand" in err


def test_usage_error_exit_2(capsys):
    assert main(["frobnicate"]) == 2


def test_analyze_single_channel_report(capsys, tmp_path, tap_fixture):
    fixture = _right_only_fixture(tmp_path, tap_fixture)
    out = tmp_path / "out"
    code, _, err = _run(capsys, "analyze", "--in", str(fixture), "--out", str(out))
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["schema"] == "walkup-report/1"
    assert list(report["channels"]) == ["right"]
    assert report["channels"]["right"]["cadence"]["peak_count"] == 10
    assert report["input_digest"].startswith("sha256:")
    assert (out / "synth-3_finger_taps_right.csv").exists()
    assert (out / "synth-3_finger_taps_right_peaks.csv").exists()
    svg = (out / "synth-3_finger_taps_right.svg").read_text()
    assert "<polyline" in svg and "<circle" in svg and "<line" in svg


def test_analyze_byte_determinism(capsys, tmp_path, tap_fixture):
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert _run(capsys, "analyze", "--in", str(tap_fixture), "--out", str(out1))[0] == 0
    assert _run(capsys, "analyze", "--in", str(tap_fixture), "--out", str(out2))[0] == 0
    files1 = sorted(p.name for p in out1.iterdir())
    files2 = sorted(p.name for p in out2.iterdir())
    assert files1 == files2 and files1
    for name in files1:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_config_hash_changes_with_override(capsys, tmp_path):
    fixture = tmp_path / "hm.jsonl"
    main(["synth", "--item", "hand_movement", "--out", str(fixture), "--seed", "1"])
    out1, out2 = tmp_path / "a", tmp_path / "b"
    _run(capsys, "analyze", "--in", str(fixture), "--out", str(out1))
    _run(capsys, "analyze", "--in", str(fixture), "--out", str(out2), "--normalize-palm")
    h1 = json.loads((out1 / "report.json").read_text())["config_hash"]
    h2 = json.loads((out2 / "report.json").read_text())["config_hash"]
    assert h1 != h2


def test_config_file_round_trip(capsys, tmp_path, tap_fixture):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"peaks": {"min_prominence": 0.3}}))
    out = tmp_path / "out"
    code, _, _ = _run(capsys, "analyze", "--in", str(tap_fixture), "--out", str(out),
                      "--config", str(cfg_path))
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["peaks"]["min_prominence"] == 0.3


def test_signals_writes_per_channel_csvs(capsys, tmp_path, tap_fixture):
    out = tmp_path / "sig"
    code, _, _ = _run(capsys, "signals", "--in", str(tap_fixture), "--out", str(out))
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "synth-3_finger_taps_left.csv",
        "synth-3_finger_taps_right.csv",
    ]
    lines = (out / names[0]).read_text().splitlines()
    assert lines[0] == "t,value"
    assert len(lines) == 301


def test_features_row_count_matches_default_set(capsys, tmp_path, tap_fixture):
    out = tmp_path / "sig"
    _run(capsys, "signals", "--in", str(tap_fixture), "--out", str(out))
    code, stdout, _ = _run(
        capsys, "features", "--in", str(out / "synth-3_finger_taps_right.csv")
    )
    assert code == 0
    rows = stdout.strip().splitlines()
    assert rows[0] == "feature_id,value,reason"
    assert len(rows) - 1 == 43


def test_features_unknown_spec_usage_error(capsys, tmp_path, tap_fixture):
    out = tmp_path / "sig"
    _run(capsys, "signals", "--in", str(tap_fixture), "--out", str(out))
    code, _, err = _run(
        capsys, "features", "--in", str(out / "synth-3_finger_taps_right.csv"),
        "--spec", "everything",
    )
    assert code == 2


def test_report_merges_channels(capsys, tmp_path, tap_fixture):
    out = tmp_path / "out"
    _run(capsys, "analyze", "--in", str(tap_fixture), "--out", str(out))
    code, stdout, _ = _run(capsys, "report", "--in", str(out / "report.json"))
    assert code == 0
    lines = stdout.strip().splitlines()
    assert lines[0].startswith("subject,item,channel")
    assert len(lines) == 3  # header + left + right
    assert lines[1].split(",")[:3] == ["synth-3", "finger_taps", "left"]


def test_analyze_multiple_inputs(capsys, tmp_path):
    fixtures = []
    for item, seed in (("finger_taps", 1), ("leg_agility", 2)):
        p = tmp_path / f"{item}.jsonl"
        main(["synth", "--item", item, "--out", str(p), "--seed", str(seed)])
        fixtures.append(str(p))
    out = tmp_path / "multi"
    code, _, _ = _run(capsys, "analyze", "--in", *fixtures, "--out", str(out))
    assert code == 0
    subdirs = sorted(p.name for p in out.iterdir())
    assert subdirs == ["synth-1_finger_taps", "synth-2_leg_agility"]
    for sub in subdirs:
        assert (out / sub / "report.json").exists()
