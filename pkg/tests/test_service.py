import asyncio
import base64
import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest
import websockets

from moodspring.demo_assets import build_demo_model_set, demo_tone
from moodspring.dsp import resample
from moodspring.errors import (
    AsrError,
    AsrTimeout,
    ConfigError,
    FormatError,
    InvalidInput,
    SessionNotFound,
)
from moodspring.fusion import FusionModel, train_fusion, complementary_experts_dataset
from moodspring.service.asr import AsrClient
from moodspring.service.config import EngineConfig, load_engine_config
from moodspring.service.modelset import load_model_set, save_model_set
from moodspring.service.pipeline import (
    Engine,
    WarningEvent,
    evaluate_decisions,
    evaluate_manifest,
    report_json,
)
from moodspring.service.protocol import handle_frame
from moodspring.service.server import serve_async
from moodspring.service.cli import main as cli_main

from conftest import stub_command

FIXTURES = Path(__file__).parent / "fixtures"


def signals_only(events):
    return [e for e in events if not isinstance(e, WarningEvent)]


def warnings_only(events):
    return [e for e in events if isinstance(e, WarningEvent)]


class TestHandleText:
    def test_composed_example(self, saturated_text_model_set):
        # both text models emit exactly 1.0; fusion w=(1,1), b=-1 gives
        # sigma(1), then the EMA from the 0.5 prior
        engine = Engine(saturated_text_model_set)
        session = engine.open_session()
        signal = session.handle_text("sunny")
        sigma1 = 1.0 / (1.0 + math.exp(-1.0))
        assert session.latest_p == {"text-a": 1.0, "text-b": 1.0}
        assert signal.p_smoothed == pytest.approx(0.8 * 0.5 + 0.2 * sigma1, abs=1e-12)
        assert signal.valence == "pleasant"
        assert signal.seq == 0

    def test_empty_string_still_emits(self, saturated_text_model_set):
        engine = Engine(saturated_text_model_set)
        session = engine.open_session()
        signal = session.handle_text("")
        assert signal.seq == 0
        assert 0.0 <= signal.p_smoothed <= 1.0

    def test_unknown_session(self, saturated_text_model_set):
        engine = Engine(saturated_text_model_set)
        with pytest.raises(SessionNotFound):
            engine.handle_text("ghost", "hello")

    def test_no_text_models_is_config_error(self):
        model_set = build_demo_model_set()
        audio_only = type(model_set)(
            tuple(s for s in model_set.classifiers if s.modality == "audio"),
            fusion=FusionModel(np.zeros(1), 0.0),
        )
        engine = Engine(audio_only)
        session = engine.open_session()
        with pytest.raises(ConfigError):
            session.handle_text("hello")

    def test_session_requires_fusion(self):
        model_set = build_demo_model_set()
        headless = type(model_set)(model_set.classifiers, vocab=model_set.vocab)
        with pytest.raises(ConfigError):
            Engine(headless).open_session()


class TestHandleAudio:
    def test_tick_schedule_100ms_chunks(self):
        engine = Engine(build_demo_model_set())
        session = engine.open_session()
        chunk = demo_tone("happy", seconds=0.1)
        signals = []
        first_at = None
        for i in range(50):  # 5 seconds total
            got = signals_only(session.handle_audio_chunk(chunk))
            if got and first_at is None:
                first_at = (i + 1) * 0.1
            signals.extend(got)
        assert first_at == pytest.approx(3.0)
        assert len(signals) == 3  # windows ending at 3s, 4s, 5s
        assert [s.seq for s in signals] == [0, 1, 2]

    def test_one_big_chunk_emits_every_due_tick(self):
        engine = Engine(build_demo_model_set())
        session = engine.open_session()
        signals = signals_only(session.handle_audio_chunk(demo_tone("happy", seconds=5.0)))
        assert len(signals) == 3

    def test_other_rates_are_resampled(self):
        engine = Engine(build_demo_model_set())
        session = engine.open_session()
        clip = resample(demo_tone("happy", seconds=3.0), 8000)
        signals = signals_only(session.handle_audio_chunk(clip))
        assert len(signals) == 1

    def test_asr_success_feeds_text_branch(self):
        asr = AsrClient(stub_command("fixed_text.py"), timeout_s=10.0)
        engine = Engine(build_demo_model_set(), asr=asr)
        session = engine.open_session()
        events = session.handle_audio_chunk(demo_tone("happy", seconds=3.0))
        assert not warnings_only(events)
        assert all(p is not None for p in session.latest_p.values())
        assert session.fusion_inputs().shape == (3,)

    def test_asr_timeout_never_blocks_the_tick(self):
        asr = AsrClient(stub_command("sleepy.py"), timeout_s=0.2)
        engine = Engine(build_demo_model_set(), asr=asr)
        session = engine.open_session()
        events = session.handle_audio_chunk(demo_tone("happy", seconds=3.0))
        warnings = warnings_only(events)
        assert [w.code for w in warnings] == ["asr_timeout"]
        assert len(signals_only(events)) == 1
        # text slots stay at their uninformative default
        assert session.latest_p["text-nb"] is None

    def test_asr_garbage_is_a_warning(self):
        asr = AsrClient(stub_command("garbage.py"), timeout_s=10.0)
        engine = Engine(build_demo_model_set(), asr=asr)
        session = engine.open_session()
        events = session.handle_audio_chunk(demo_tone("happy", seconds=3.0))
        assert [w.code for w in warnings_only(events)] == ["asr_error"]
        assert len(signals_only(events)) == 1


class TestAsrClient:
    def test_rejects_empty_descriptor(self):
        with pytest.raises(InvalidInput):
            AsrClient("  ")

    def test_subprocess_round_trip(self):
        asr = AsrClient(stub_command("fixed_text.py"), timeout_s=10.0)
        assert asr.transcribe(demo_tone("happy", seconds=0.2)) == "what a lovely sunny day"

    def test_subprocess_timeout(self):
        asr = AsrClient(stub_command("sleepy.py"), timeout_s=0.2)
        with pytest.raises(AsrTimeout):
            asr.transcribe(demo_tone("happy", seconds=0.2))

    def test_subprocess_garbage(self):
        asr = AsrClient(stub_command("garbage.py"), timeout_s=10.0)
        with pytest.raises(AsrError):
            asr.transcribe(demo_tone("happy", seconds=0.2))

    def test_from_env(self, monkeypatch):
        monkeypatch.delenv("MOODSPRING_ASR", raising=False)
        assert AsrClient.from_env() is None
        monkeypatch.setenv("MOODSPRING_ASR", stub_command("fixed_text.py"))
        client = AsrClient.from_env(timeout_s=3.0)
        assert client is not None and client.timeout_s == 3.0


class TestEvaluate:
    def test_perfect_classifier_balanced_data(self):
        rng = np.random.default_rng(0)
        labels = rng.integers(0, 2, size=40)
        groups = np.array(["A", "B"] * 20)
        p = np.where(labels == 1, 0.9, 0.1)[:, None]
        report = evaluate_decisions(p, labels, groups, {}, ["oracle"])
        entry = report["sources"]["classifier:oracle"]
        assert entry["accuracy"] == 1.0
        assert entry["group_accuracy"] == {"A": 1.0, "B": 1.0}
        assert entry["disparity"]["point"] == 0.0

    def test_report_bytes_are_reproducible(self):
        rng = np.random.default_rng(1)
        labels = rng.integers(0, 2, size=30)
        groups = np.array(["A"] * 15 + ["B"] * 15)
        p = rng.uniform(0, 1, size=(30, 2))
        fusion = {"fair": FusionModel(np.array([1.0, 1.0]), -1.0)}
        r1 = report_json(evaluate_decisions(p, labels, groups, fusion))
        r2 = report_json(evaluate_decisions(p, labels, groups, fusion))
        assert r1 == r2

    def test_fairness_fusion_certifies_tighter_than_single_experts(self):
        rows = complementary_experts_dataset(seed=0)
        p = np.vstack([r.p for r in rows])
        labels = np.array([r.label for r in rows])
        groups = np.array([r.group for r in rows])
        fair = train_fusion(rows, fairness_weight=10.0, lr=0.5, epochs=600, seed=0)
        report = evaluate_decisions(p, labels, groups, {"fair": fair}, ["expert-a", "expert-b"])
        fused_upper = report["sources"]["fusion:fair"]["disparity"]["upper"]
        assert fused_upper < report["sources"]["classifier:expert-a"]["disparity"]["upper"]
        assert fused_upper < report["sources"]["classifier:expert-b"]["disparity"]["upper"]

    def test_empty_manifest_rejected(self):
        with pytest.raises(InvalidInput):
            evaluate_decisions(np.zeros((0, 2)), np.zeros(0), np.zeros(0), {})


class TestProtocol:
    def test_recorded_session_replays_exactly(self):
        record = json.loads((FIXTURES / "protocol_session.json").read_text(encoding="utf-8"))
        engine = Engine(build_demo_model_set(), EngineConfig(window_s=1.0, hop_s=0.5))
        session = engine.open_session()
        produced = []
        for frame in record["input"]:
            payload = frame if isinstance(frame, str) else json.dumps(frame)
            produced.append(handle_frame(session, payload))
        assert produced == record["expected"]

    def test_replay_twice_is_bitwise_identical(self):
        record = json.loads((FIXTURES / "protocol_session.json").read_text(encoding="utf-8"))

        def run():
            engine = Engine(build_demo_model_set(), EngineConfig(window_s=1.0, hop_s=0.5))
            session = engine.open_session()
            out = []
            for frame in record["input"]:
                payload = frame if isinstance(frame, str) else json.dumps(frame)
                out.extend(json.dumps(f, sort_keys=True) for f in handle_frame(session, payload))
            return out

        assert run() == run()

    def test_config_frame_changes_smoothing(self, saturated_text_model_set):
        engine = Engine(saturated_text_model_set)
        session = engine.open_session()
        assert handle_frame(session, {"type": "config", "ema_alpha": 1.0}) == []
        frames = handle_frame(session, {"type": "text", "text": "sunny"})
        assert frames[0]["p_smoothed"] == pytest.approx(1.0 / (1.0 + math.exp(-1.0)), abs=1e-12)

    def test_error_frames_keep_session_alive(self, saturated_text_model_set):
        engine = Engine(saturated_text_model_set)
        session = engine.open_session()
        assert handle_frame(session, "{{{")[0]["code"] == "bad_json"
        assert handle_frame(session, {"type": "audio", "rate": 16000, "pcm16_b64": "abc"})[0][
            "code"
        ] == "bad_audio"  # odd byte count
        assert handle_frame(session, {"type": "audio", "rate": True, "pcm16_b64": ""})[0][
            "code"
        ] == "bad_audio"  # JSON true is not a sample rate
        frames = handle_frame(session, {"type": "text", "text": "sunny"})
        assert frames[0]["type"] == "control"


class TestWebSocketServer:
    def test_text_round_trip_over_a_real_socket(self):
        async def scenario():
            engine = Engine(build_demo_model_set())
            async with websockets.serve(lambda ws: _connection(ws, engine), "127.0.0.1", 0) as server:
                port = server.sockets[0].getsockname()[1]
                async with websockets.connect(f"ws://127.0.0.1:{port}/session") as client:
                    await client.send(json.dumps({"type": "text", "text": "what a lovely day"}))
                    control = json.loads(await client.recv())
                    await client.send("broken {")
                    error = json.loads(await client.recv())
            return control, error

        from moodspring.service.server import _handle_connection as _connection

        control, error = asyncio.run(asyncio.wait_for(scenario(), timeout=30))
        assert control["type"] == "control" and control["valence"] == "pleasant"
        assert error["type"] == "error" and error["code"] == "bad_json"

    def test_unknown_path_is_rejected(self):
        async def scenario():
            engine = Engine(build_demo_model_set())
            async with websockets.serve(lambda ws: _connection(ws, engine), "127.0.0.1", 0) as server:
                port = server.sockets[0].getsockname()[1]
                async with websockets.connect(f"ws://127.0.0.1:{port}/other") as client:
                    with pytest.raises(websockets.ConnectionClosed):
                        await client.send(json.dumps({"type": "text", "text": "hi"}))
                        await client.recv()

        from moodspring.service.server import _handle_connection as _connection

        asyncio.run(asyncio.wait_for(scenario(), timeout=30))


def write_cli_fixture(tmp_path: Path) -> Path:
    from moodspring.data import write_wav

    rows = ["id,source,emotion,group,modality"]
    texts = [
        ("t1", "what a lovely sunny day", "happy", "A"),
        ("t2", "wonderful great fantastic", "happy", "B"),
        ("t3", "beautiful calm morning", "calm", "A"),
        ("t4", "peaceful gentle quiet", "calm", "B"),
        ("t5", "terrible awful horrible", "angry", "A"),
        ("t6", "miserable rotten mess", "angry", "B"),
        ("t7", "sad gloomy hopeless", "sad", "A"),
        ("t8", "dreadful storm ruined", "sad", "B"),
    ]
    for rid, text, emotion, group in texts:
        rows.append(f"{rid},{text},{emotion},{group},text")
    for i, (emotion, group) in enumerate(
        [("happy", "A"), ("calm", "B"), ("sad", "A"), ("angry", "B")] * 2
    ):
        name = f"clip{i}.wav"
        write_wav(tmp_path / name, demo_tone(emotion, seed=i, seconds=0.6))
        rows.append(f"a{i},{name},{emotion},{group},audio")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return manifest


class TestCli:
    def test_full_train_evaluate_flow(self, tmp_path, capsys):
        manifest = write_cli_fixture(tmp_path)
        models_dir = tmp_path / "models"

        assert cli_main([
            "train", "--manifest", str(manifest), "--modality", "text",
            "--model", "gaussian-nb", "--out", str(tmp_path / "text-nb.json"),
            "--register", str(models_dir), "--name", "text-nb",
        ]) == 0
        assert cli_main([
            "train", "--manifest", str(manifest), "--modality", "audio",
            "--model", "knn", "--knn-k", "3", "--out", str(tmp_path / "audio-knn.json"),
            "--register", str(models_dir), "--name", "audio-knn",
        ]) == 0
        assert cli_main([
            "train-fusion", "--manifest", str(manifest), "--models", str(models_dir),
            "--out", str(tmp_path / "fusion.json"), "--fairness-weight", "1.0",
            "--register-as", "fair",
        ]) == 0
        out_json = tmp_path / "report.json"
        assert cli_main([
            "evaluate", "--manifest", str(manifest), "--models", str(models_dir),
            "--json-out", str(out_json),
        ]) == 0
        report = json.loads(out_json.read_text(encoding="utf-8"))
        assert "fusion:fair" in report["sources"]
        assert report["n_rows"] == 16

        model_set = load_model_set(models_dir)
        assert [s.name for s in model_set.classifiers] == ["text-nb", "audio-knn"]
        assert model_set.fusion is not None

    def test_cli_reports_errors_cleanly(self, tmp_path, capsys):
        missing = tmp_path / "nope.csv"
        code = cli_main([
            "evaluate", "--manifest", str(missing), "--models", str(tmp_path),
        ])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestEngineConfigFile:
    def test_toml_round_trip(self, tmp_path):
        config_path = tmp_path / "engine.toml"
        config_path.write_text(
            """
[control]
ema_alpha = 0.4
tick_interval_ms = 250

[valence]
pleasant = ["happy", "calm"]

[audio]
window_s = 2.0
hop_s = 0.5

[asr]
timeout_s = 0.7
""",
            encoding="utf-8",
        )
        config = load_engine_config(config_path)
        assert config.control.ema_alpha == 0.4
        assert config.control.tick_interval_ms == 250
        assert config.mapping.pleasant == {"happy", "calm"}
        assert config.window_s == 2.0
        assert config.asr_timeout_s == 0.7

    def test_defaults_without_file(self):
        config = load_engine_config(None)
        assert config.control.ema_alpha == 0.2
        assert config.sample_rate == 16000

    def test_bad_toml(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("[control\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_engine_config(path)


class TestModelSetPersistence:
    def test_save_load_round_trip(self, tmp_path):
        model_set = build_demo_model_set()
        save_model_set(model_set, tmp_path / "ms")
        again = load_model_set(tmp_path / "ms")
        assert [s.name for s in again.classifiers] == [s.name for s in model_set.classifiers]
        assert np.array_equal(again.fusion.w, model_set.fusion.w)
        assert again.vocab == model_set.vocab

    def test_missing_index(self, tmp_path):
        with pytest.raises(ConfigError):
            load_model_set(tmp_path)

    def test_fusion_width_must_match(self, tmp_path):
        model_set = build_demo_model_set()
        with pytest.raises(ConfigError):
            type(model_set)(model_set.classifiers, vocab=model_set.vocab,
                            fusion=FusionModel(np.zeros(7), 0.0))
