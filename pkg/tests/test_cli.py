"""Command-line interface: behavior, exit codes and output determinism."""

import json

import pytest

from hoiseg.cli import main
from hoiseg.clips import read_clipset
from hoiseg.fusion import read_segmentation
from hoiseg.trace import HandSide, serialize_trace

from golden_scenario import EXPECTED_STEPS, GOLDEN_CONFIG, build_golden_trace
from helpers import trace_from_score_intervals


@pytest.fixture
def golden_trace_file(tmp_path):
    path = tmp_path / "golden.jsonl"
    serialize_trace(build_golden_trace(), path)
    return path


@pytest.fixture
def golden_config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(GOLDEN_CONFIG))
    return path


def _golden_args(trace_file, config_file, out_dir):
    return [
        "pipeline", str(trace_file), "--config", str(config_file),
        "--out-dir", str(out_dir),
    ]


def test_segment_scripted_single_hand(tmp_path):
    trace = trace_from_score_intervals(left_intervals=[(10, 70)], frame_count=100)
    trace_file = tmp_path / "trace.jsonl"
    serialize_trace(trace, trace_file)
    out_dir = tmp_path / "out"
    assert main(["segment", str(trace_file), "--out-dir", str(out_dir)]) == 0
    left = read_clipset(out_dir / "left_clips.json")
    right = read_clipset(out_dir / "right_clips.json")
    assert [(c.start_frame, c.end_frame) for c in left.clips] == [(12, 72)]
    assert right.clips == ()
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["config_hash"]
    assert manifest["video_id"] == "synthetic"


def test_segment_all_idle(tmp_path):
    trace = trace_from_score_intervals(frame_count=50)
    trace_file = tmp_path / "trace.jsonl"
    serialize_trace(trace, trace_file)
    out_dir = tmp_path / "out"
    assert main(["segment", str(trace_file), "--out-dir", str(out_dir)]) == 0
    assert read_clipset(out_dir / "left_clips.json").clips == ()
    assert read_clipset(out_dir / "right_clips.json").clips == ()


def test_segment_missing_trace_exits_2(tmp_path, capsys):
    code = main(["segment", str(tmp_path / "missing.jsonl"), "--out-dir", str(tmp_path / "o")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_segment_malformed_trace_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"video_id": "x", "fps": 30, "frame_count": 1}\n{"frame": }\n')
    code = main(["segment", str(bad), "--out-dir", str(tmp_path / "o")])
    assert code == 2


def test_invalid_config_exits_1_without_outputs(tmp_path, capsys):
    trace_file = tmp_path / "trace.jsonl"
    serialize_trace(trace_from_score_intervals(frame_count=10), trace_file)
    out_dir = tmp_path / "out"
    code = main(
        ["segment", str(trace_file), "--out-dir", str(out_dir), "--min-score", "3.0"]
    )
    assert code == 1
    assert not out_dir.exists()  # nothing was written
    assert "min_score" in capsys.readouterr().err


def test_pipeline_golden_six_steps(tmp_path, golden_trace_file, golden_config_file):
    out_dir = tmp_path / "run"
    assert main(_golden_args(golden_trace_file, golden_config_file, out_dir)) == 0
    steps = read_segmentation(out_dir / "steps.json")
    assert [
        (s.start_frame, s.end_frame, s.source_hand.value) for s in steps.segments
    ] == [tuple(e) for e in EXPECTED_STEPS]
    assert (out_dir / "timeline.svg").exists()


def test_pipeline_byte_identical_across_runs(tmp_path, golden_trace_file, golden_config_file):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(_golden_args(golden_trace_file, golden_config_file, out_a)) == 0
    assert main(_golden_args(golden_trace_file, golden_config_file, out_b)) == 0
    for name in ("left_clips.json", "right_clips.json", "steps.json", "timeline.svg", "manifest.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def test_fuse_command(tmp_path, golden_trace_file, golden_config_file):
    seg_dir = tmp_path / "seg"
    assert main(
        ["segment", str(golden_trace_file), "--config", str(golden_config_file),
         "--out-dir", str(seg_dir)]
    ) == 0
    steps_file = tmp_path / "steps.json"
    assert main(
        ["fuse", str(seg_dir / "left_clips.json"), str(seg_dir / "right_clips.json"),
         str(golden_trace_file), "--out", str(steps_file)]
    ) == 0
    steps = read_segmentation(steps_file)
    assert len(steps.segments) == len(EXPECTED_STEPS)


def test_eval_steps_command(tmp_path, capsys):
    from helpers import segmentation_from_intervals
    from hoiseg.fusion import write_segmentation

    seg = segmentation_from_intervals([(0, 30), (60, 100)])
    pred_file = tmp_path / "pred.json"
    truth_file = tmp_path / "truth.json"
    write_segmentation(seg, pred_file)
    write_segmentation(seg, truth_file)
    report_file = tmp_path / "report.json"
    code = main(
        ["eval", str(pred_file), str(truth_file), "--mode", "steps",
         "--out", str(report_file)]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "F1@10%" in out and "100.00%" in out
    report = json.loads(report_file.read_text())
    assert [s["f1"] for s in report["scores"]] == [1.0, 1.0, 1.0]


def test_eval_detections_command(tmp_path, capsys):
    trace_file = tmp_path / "trace.jsonl"
    serialize_trace(
        trace_from_score_intervals(left_intervals=[(0, 9)], frame_count=10), trace_file
    )
    code = main(
        ["eval", str(trace_file), str(trace_file), "--mode", "detections"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "10 AH" in out and "Precision" in out


def test_eval_metadata_mismatch_exits_1(tmp_path):
    from helpers import segmentation_from_intervals
    from hoiseg.fusion import write_segmentation

    a_file = tmp_path / "a.json"
    b_file = tmp_path / "b.json"
    write_segmentation(segmentation_from_intervals([(0, 5)], video_id="a"), a_file)
    write_segmentation(segmentation_from_intervals([(0, 5)], video_id="b"), b_file)
    assert main(["eval", str(a_file), str(b_file), "--mode", "steps"]) == 1


def test_roc_command(tmp_path, capsys):
    pairs_file = tmp_path / "pairs.csv"
    rows = ["crop_a,crop_b,same"]
    matrix_refs = []
    sims = {}
    for i, sim in enumerate([0.86, 0.88, 0.90, 0.92]):
        a, b = f"p{i}a", f"p{i}b"
        rows.append(f"{a},{b},1")
        matrix_refs += [a, b]
        sims[(a, b)] = sim
    for i, sim in enumerate([0.08, 0.10, 0.12, 0.14]):
        a, b = f"n{i}a", f"n{i}b"
        rows.append(f"{a},{b},0")
        matrix_refs += [a, b]
        sims[(a, b)] = sim
    pairs_file.write_text("\n".join(rows) + "\n")

    n = len(matrix_refs)
    matrix = [[1.0 if i == j else 0.5 for j in range(n)] for i in range(n)]
    for (a, b), sim in sims.items():
        i, j = matrix_refs.index(a), matrix_refs.index(b)
        matrix[i][j] = matrix[j][i] = sim
    matrix_file = tmp_path / "matrix.json"
    matrix_file.write_text(json.dumps({"crop_refs": matrix_refs, "matrix": matrix}))

    out_dir = tmp_path / "roc"
    code = main(
        ["roc", str(pairs_file), "--provider", f"matrix:{matrix_file}",
         "--out-dir", str(out_dir)]
    )
    assert code == 0
    selection = json.loads((out_dir / "selection.json").read_text())
    assert 0.1 < selection["threshold"] < 0.9
    assert selection["youden_j"] == 1.0
    assert selection["auc"] == pytest.approx(1.0)
    assert (out_dir / "curve.csv").read_text().startswith("threshold,tpr,fpr")
    assert (out_dir / "roc.svg").exists()


def test_roc_single_class_exits_1(tmp_path, capsys):
    pairs_file = tmp_path / "pairs.csv"
    pairs_file.write_text("crop_a,crop_b,same\nx,y,1\n")
    code = main(
        ["roc", str(pairs_file), "--provider", "constant:0.5",
         "--out-dir", str(tmp_path / "roc")]
    )
    assert code == 1


def test_render_command(tmp_path, capsys):
    from helpers import segmentation_from_intervals
    from hoiseg.fusion import write_segmentation

    seg_file = tmp_path / "steps.json"
    write_segmentation(segmentation_from_intervals([(0, 10), (20, 40)]), seg_file)
    out = tmp_path / "timeline.svg"
    assert main(["render", str(seg_file), "--out", str(out)]) == 0
    first = out.read_bytes()
    assert main(["render", str(seg_file), "--out", str(out)]) == 0
    assert out.read_bytes() == first
    assert main(["render", str(seg_file), "--ascii"]) == 0
    assert "#" in capsys.readouterr().out


def test_config_env_var(tmp_path, monkeypatch, golden_trace_file, golden_config_file):
    monkeypatch.setenv("HOISEG_CONFIG", str(golden_config_file))
    out_dir = tmp_path / "envrun"
    assert main(["pipeline", str(golden_trace_file), "--out-dir", str(out_dir)]) == 0
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["config"]["similarity_provider"] == "constant:0.9"
