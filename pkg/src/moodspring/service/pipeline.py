"""Live pipeline: sessions, the two modality branches, and evaluation.

A session owns the smoothing state, the audio ring buffer, and the
freshest per-classifier valence values. Text input updates the text
slots immediately; audio is buffered and processed one window per hop,
with the window also forwarded to the (optional) ASR client so the
transcription can refresh the text slots. Fusion always sees one value
per classifier slot: the freshest observation, or 0.5 for a slot whose
modality has produced nothing yet.
"""

import itertools
import json
from dataclasses import dataclass

import numpy as np

from ..control import make_control
from ..control import step as ema_step
from ..data import Manifest, read_wav
from ..dsp import AudioClip, FeatureVector, audio_features, resample
from ..errors import AsrError, AsrTimeout, ConfigError, InvalidInput, SessionNotFound
from ..fusion import FusionModel, bernstein_disparity, fuse, majority_vote
from ..models import predict_proba
from ..textfeat import tokenize, vectorize
from ..valence import to_valence, valence_class
from .config import EngineConfig
from .modelset import ModelSet


@dataclass(frozen=True)
class WarningEvent:
    code: str
    message: str


class Session:
    """Single ordered input stream; not shared across threads."""

    def __init__(self, session_id: str, model_set: ModelSet, config: EngineConfig, asr=None):
        if model_set.fusion is None:
            raise ConfigError("model set has no fusion layer")
        self.id = session_id
        self.models = model_set
        self.config = config
        self.asr = asr
        self.p_smoothed = 0.5  # EMA state before the first observation
        self.last_signal = None
        self.latest_p = {slot.name: None for slot in model_set.classifiers}
        self.window_n = int(round(config.window_s * config.sample_rate))
        self.hop_n = int(round(config.hop_s * config.sample_rate))
        self._buffer = np.zeros(0)
        self._buffer_start = 0  # absolute index of _buffer[0]
        self._received = 0
        self._next_window_start = 0

    # -- text branch ---------------------------------------------------

    def handle_text(self, text: str):
        """Run the text branch and emit one control signal."""
        self._run_text_branch(text)
        return self._emit()

    def _run_text_branch(self, text: str) -> None:
        slots = self.models.slots("text")
        if not slots:
            raise ConfigError("model set has no text classifiers")
        vector = vectorize(tokenize(text), self.models.vocab, self.config.vector_mode)
        for slot in slots:
            dist = predict_proba(slot.model, vector)
            self.latest_p[slot.name] = to_valence(dist, slot.model.classes, self.config.mapping)

    # -- audio branch --------------------------------------------------

    def handle_audio_chunk(self, chunk, rate: int | None = None):
        """Buffer PCM and emit zero or more events (warnings + signals).

        Each time a full hop beyond the current window is available, the
        trailing window runs the MFCC branch, the ASR branch refreshes
        the text slots when it succeeds, and one signal is emitted.
        """
        clip = chunk if isinstance(chunk, AudioClip) else AudioClip(np.asarray(chunk), rate or self.config.sample_rate)
        if clip.sample_rate != self.config.sample_rate:
            clip = resample(clip, self.config.sample_rate)
        if clip.samples.size:
            self._buffer = np.concatenate([self._buffer, clip.samples])
            self._received += clip.samples.size

        events = []
        while self._received >= self._next_window_start + self.window_n:
            start = self._next_window_start - self._buffer_start
            window = AudioClip(self._buffer[start : start + self.window_n], self.config.sample_rate)
            self._next_window_start += self.hop_n
            events.extend(self._tick(window))
        # drop samples no future window can touch
        keep_from = self._next_window_start - self._buffer_start
        if keep_from > 0:
            self._buffer = self._buffer[keep_from:]
            self._buffer_start = self._next_window_start
        return events

    def _tick(self, window: AudioClip):
        events = []
        audio_slots = self.models.slots("audio")
        if audio_slots:
            features = audio_features(window, self.config.mfcc)
            for slot in audio_slots:
                dist = predict_proba(slot.model, features)
                self.latest_p[slot.name] = to_valence(dist, slot.model.classes, self.config.mapping)
        if self.asr is not None and self.models.slots("text"):
            try:
                self._run_text_branch(self.asr.transcribe(window))
            except AsrTimeout as exc:
                events.append(WarningEvent("asr_timeout", str(exc)))
            except AsrError as exc:
                events.append(WarningEvent("asr_error", str(exc)))
        events.append(self._emit())
        return events

    # -- fusion + control ----------------------------------------------

    def fusion_inputs(self) -> np.ndarray:
        """Freshest per-classifier p_pleasant, 0.5 for silent slots."""
        return np.array(
            [0.5 if self.latest_p[s.name] is None else self.latest_p[s.name] for s in self.models.classifiers]
        )

    def _emit(self):
        fused = fuse(self.models.fusion, self.fusion_inputs())
        self.p_smoothed = ema_step(self.p_smoothed, fused, self.config.control)
        signal = make_control(self.p_smoothed, self.config.control, prev=self.last_signal)
        self.last_signal = signal
        return signal


class Engine:
    """Session registry; sessions are independent and individually ordered."""

    def __init__(self, model_set: ModelSet, config: EngineConfig | None = None, asr=None):
        self.model_set = model_set
        self.config = config or EngineConfig()
        self.asr = asr
        self._sessions: dict[str, Session] = {}
        self._counter = itertools.count(1)

    def open_session(self, session_id: str | None = None) -> Session:
        if session_id is None:
            session_id = f"session-{next(self._counter)}"
        if session_id in self._sessions:
            raise InvalidInput(f"session id {session_id!r} already open")
        session = Session(session_id, self.model_set, self.config, asr=self.asr)
        self._sessions[session_id] = session
        return session

    def session(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionNotFound(f"unknown session id {session_id!r}") from None

    def close_session(self, session_id: str) -> None:
        self._sessions.pop(session_id, None)

    def handle_text(self, session_id: str, text: str):
        return self.session(session_id).handle_text(text)

    def handle_audio_chunk(self, session_id: str, chunk, rate: int | None = None):
        return self.session(session_id).handle_audio_chunk(chunk, rate)


# -- evaluation ---------------------------------------------------------


def manifest_decision_table(manifest: Manifest, model_set: ModelSet, config: EngineConfig | None = None):
    """Per-row fusion inputs, binary labels, and groups for a manifest.

    Classifier slots whose modality differs from a row's modality
    contribute the uninformative 0.5, mirroring the live pipeline's
    missing-modality rule.
    """
    config = config or EngineConfig()
    if len(manifest) == 0:
        raise InvalidInput("empty manifest")
    p_rows, labels, groups = [], [], []
    for row in manifest.rows:
        if row.modality == "audio":
            clip = resample(read_wav(manifest.audio_path(row)), config.sample_rate)
            features = audio_features(clip, config.mfcc)
        elif row.modality == "text":
            if model_set.vocab is None:
                raise ConfigError("manifest has text rows but the model set has no vocabulary")
            features = vectorize(tokenize(row.source), model_set.vocab, config.vector_mode)
        else:
            if model_set.embeddings is None:
                raise ConfigError("manifest has embedding rows but no embedding table is loaded")
            features = model_set.embeddings.lookup(row.source or row.id)
        p_row = []
        for slot in model_set.classifiers:
            if slot.modality == row.modality:
                dist = predict_proba(slot.model, features)
                p_row.append(to_valence(dist, slot.model.classes, config.mapping))
            else:
                p_row.append(0.5)
        p_rows.append(p_row)
        labels.append(1 if config.mapping.is_pleasant(row.emotion) else 0)
        groups.append(row.group)
    return np.array(p_rows), np.array(labels), np.array(groups)


def evaluate_decisions(p_matrix, labels, groups, fusion_models: dict[str, FusionModel],
                       classifier_names=None, delta: float = 0.05) -> dict:
    """Accuracy, per-group accuracy, and a disparity certificate for every
    decision source: each classifier alone, majority vote, and each given
    fusion model."""
    p_matrix = np.asarray(p_matrix, dtype=np.float64)
    labels = np.asarray(labels)
    groups = np.asarray(groups)
    if p_matrix.ndim != 2 or p_matrix.shape[0] == 0:
        raise InvalidInput("evaluation needs a non-empty (n, M) probability matrix")
    n, n_classifiers = p_matrix.shape
    if classifier_names is None:
        classifier_names = [f"classifier-{i}" for i in range(n_classifiers)]

    tags = sorted(set(groups.tolist()))
    sources = {}

    def add_source(name, predicted):
        correct = (predicted == labels).astype(np.float64)
        entry = {
            "accuracy": float(correct.mean()),
            "group_accuracy": {},
            "disparity": None,
        }
        per_group = {tag: correct[groups == tag] for tag in tags}
        for tag, values in per_group.items():
            entry["group_accuracy"][tag] = float(values.mean()) if values.size else None
        if len(tags) == 2 and all(v.size >= 2 for v in per_group.values()):
            report = bernstein_disparity(per_group[tags[0]], per_group[tags[1]], delta)
            entry["disparity"] = report.to_dict()
        sources[name] = entry

    for i, name in enumerate(classifier_names):
        add_source(f"classifier:{name}", (p_matrix[:, i] >= 0.5).astype(labels.dtype))

    votes = []
    for row in p_matrix:
        decisions = [valence_class(float(p)) for p in row]
        votes.append(1 if majority_vote(decisions, list(row)) == "pleasant" else 0)
    add_source("majority_vote", np.asarray(votes, dtype=labels.dtype))

    for name, model in fusion_models.items():
        fused = np.array([1 if fuse(model, row) >= 0.5 else 0 for row in p_matrix], dtype=labels.dtype)
        add_source(f"fusion:{name}", fused)

    return {
        "delta": delta,
        "n_rows": int(n),
        "groups": {tag: int((groups == tag).sum()) for tag in tags},
        "sources": sources,
    }


def evaluate_manifest(manifest: Manifest, model_set: ModelSet,
                      delta: float = 0.05, config: EngineConfig | None = None) -> dict:
    """Evaluate every decision source of a model set against a labeled manifest."""
    p_matrix, labels, groups = manifest_decision_table(manifest, model_set, config)
    fusion_models = {}
    if model_set.fusion_baseline is not None:
        fusion_models["baseline"] = model_set.fusion_baseline
    if model_set.fusion is not None:
        fusion_models["fair"] = model_set.fusion
    names = [slot.name for slot in model_set.classifiers]
    return evaluate_decisions(p_matrix, labels, groups, fusion_models, names, delta)


def report_json(report: dict) -> bytes:
    """Canonical JSON encoding; identical reports serialize identically."""
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode("utf-8")
