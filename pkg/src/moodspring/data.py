"""Dataset ingestion: manifests, WAV decoding, embedding tables, splits.

Everything on disk is either CSV (UTF-8, comma-separated, header line,
LF or CRLF) or 16-bit PCM WAV. Demographic group tags are explicit
metadata columns, never inferred from content.
"""

import csv
import io
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dsp import AudioClip, FeatureVector
from .errors import FormatError, InvalidInput
from .valence import EMOTIONS

GROUPS = ("A", "B")
MODALITIES = ("audio", "text", "embedding")

MANIFEST_COLUMNS = ("id", "source", "emotion", "group", "modality")

#: RAVDESS-style filename emotion codes (third dash-separated field)
RAVDESS_EMOTIONS = {
    "01": "neutral",
    "02": "calm",
    "03": "happy",
    "04": "sad",
    "05": "angry",
    "06": "fearful",
    "07": "disgust",
    "08": "surprised",
}


@dataclass(frozen=True)
class ManifestRow:
    id: str
    source: str  # file path for audio rows, raw text for text rows,
    # lookup key into an embedding table for embedding rows
    emotion: str
    group: str
    modality: str


@dataclass(frozen=True)
class Manifest:
    rows: tuple[ManifestRow, ...]
    base_dir: Path | None = None

    def __len__(self):
        return len(self.rows)

    def audio_path(self, row: ManifestRow) -> Path:
        path = Path(row.source)
        if not path.is_absolute() and self.base_dir is not None:
            path = self.base_dir / path
        return path


def load_manifest(path) -> Manifest:
    """Read and validate a dataset manifest CSV.

    Columns: id,source,emotion,group,modality. Unknown emotion/group/
    modality tokens, duplicate ids, missing columns, and missing audio
    files are all format errors that name the offending line.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty manifest") from None
        header = [h.strip() for h in header]
        for column in MANIFEST_COLUMNS:
            if column not in header:
                raise FormatError(f"{path}: line 1: missing column {column!r}")
        positions = {c: header.index(c) for c in MANIFEST_COLUMNS}

        rows = []
        seen_ids = set()
        for line_no, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) < len(header):
                raise FormatError(f"{path}: line {line_no}: expected {len(header)} fields, got {len(record)}")
            row = ManifestRow(
                id=record[positions["id"]].strip(),
                source=record[positions["source"]],
                emotion=record[positions["emotion"]].strip(),
                group=record[positions["group"]].strip(),
                modality=record[positions["modality"]].strip(),
            )
            if row.emotion not in EMOTIONS:
                raise FormatError(f"{path}: line {line_no}: unknown emotion {row.emotion!r}")
            if row.group not in GROUPS:
                raise FormatError(f"{path}: line {line_no}: unknown group {row.group!r}")
            if row.modality not in MODALITIES:
                raise FormatError(f"{path}: line {line_no}: unknown modality {row.modality!r}")
            if row.id in seen_ids:
                raise FormatError(f"{path}: line {line_no}: duplicate id {row.id!r}")
            seen_ids.add(row.id)
            rows.append(row)

    manifest = Manifest(tuple(rows), base_dir=path.parent)
    for row in manifest.rows:
        if row.modality == "audio" and not manifest.audio_path(row).exists():
            raise FormatError(f"{path}: audio file not found for id {row.id!r}: {row.source}")
    return manifest


def save_manifest(manifest: Manifest, path) -> None:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_COLUMNS)
        for row in manifest.rows:
            writer.writerow([row.id, row.source, row.emotion, row.group, row.modality])


def parse_ravdess_filename(name: str):
    """(emotion, actor_id, group) from a RAVDESS-coded WAV filename.

    Seven dash-separated two-digit fields; field 3 encodes the emotion
    and field 7 the actor, odd actors being male (group A) and even
    female (group B) per the dataset's filename convention.
    """
    stem = name[:-4] if name.endswith(".wav") else None
    if stem is None:
        raise FormatError(f"not a .wav filename: {name!r}")
    fields = stem.split("-")
    if len(fields) != 7 or any(len(f) != 2 or not f.isdigit() for f in fields):
        raise FormatError(f"expected 7 dash-separated 2-digit fields: {name!r}")
    emotion = RAVDESS_EMOTIONS.get(fields[2])
    if emotion is None:
        raise FormatError(f"unknown emotion code {fields[2]!r} in {name!r}")
    actor = int(fields[6])
    if actor == 0:
        raise FormatError(f"actor id 00 is not valid: {name!r}")
    group = "A" if actor % 2 == 1 else "B"
    return emotion, actor, group


@dataclass(frozen=True)
class EmbeddingTable:
    """Externally computed feature vectors keyed by id (uniform dimension)."""

    dim: int
    ids: tuple[str, ...]
    vectors: np.ndarray

    def lookup(self, key: str) -> FeatureVector:
        try:
            i = self.ids.index(key)
        except ValueError:
            raise InvalidInput(f"no embedding for id {key!r}") from None
        return FeatureVector(self.vectors[i], kind="external-embedding")


def load_embedding_table(path) -> EmbeddingTable:
    """Read a precomputed embedding CSV: header id,dim,v0..v{dim-1}."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise FormatError(f"{path}: empty embedding table") from None
        if len(header) < 3 or header[0] != "id" or header[1] != "dim":
            raise FormatError(f"{path}: line 1: expected header id,dim,v0..")
        dim = len(header) - 2
        expected = [f"v{i}" for i in range(dim)]
        if header[2:] != expected:
            raise FormatError(f"{path}: line 1: value columns must be v0..v{dim - 1}")

        ids, vectors = [], []
        seen = set()
        for line_no, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != dim + 2:
                raise FormatError(f"{path}: line {line_no}: expected {dim + 2} fields, got {len(record)}")
            row_id = record[0].strip()
            if row_id in seen:
                raise FormatError(f"{path}: line {line_no}: duplicate id {row_id!r}")
            seen.add(row_id)
            if record[1].strip() != str(dim):
                raise FormatError(f"{path}: line {line_no}: dim {record[1]!r} disagrees with header ({dim})")
            try:
                values = np.array([float(v) for v in record[2:]], dtype=np.float64)
            except ValueError as exc:
                raise FormatError(f"{path}: line {line_no}: {exc}") from exc
            if not np.isfinite(values).all():
                raise FormatError(f"{path}: line {line_no}: non-finite embedding value")
            ids.append(row_id)
            vectors.append(values)

    if not ids:
        raise FormatError(f"{path}: embedding table has no rows")
    return EmbeddingTable(dim=dim, ids=tuple(ids), vectors=np.vstack(vectors))


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def split(manifest: Manifest, test_fraction: float, seed: int = 0):
    """Deterministic (train, test) split stratified jointly by (emotion, group).

    Per-stratum test counts are round-half-up of fraction * stratum size,
    clamped so strata of 2+ rows reach both sides, then adjusted so the
    global test size is round-half-up of fraction * total.
    """
    if not 0.0 < test_fraction < 1.0:
        raise InvalidInput(f"test fraction must lie in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)

    strata: dict[tuple[str, str], list[ManifestRow]] = {}
    for row in manifest.rows:
        strata.setdefault((row.emotion, row.group), []).append(row)

    keys = sorted(strata.keys())
    counts = {}
    for key in keys:
        n = len(strata[key])
        t = _round_half_up(n * test_fraction)
        if n >= 2:
            t = min(max(t, 1), n - 1)
        else:
            t = min(t, n)
        counts[key] = t

    target = _round_half_up(len(manifest) * test_fraction)
    total = sum(counts.values())
    # trade single rows between sides, most-overshooting stratum first
    while total != target:
        if total > target:
            candidates = [k for k in keys if counts[k] > (1 if len(strata[k]) >= 2 else 0)]
            if not candidates:
                break
            key = max(candidates, key=lambda k: (counts[k] - len(strata[k]) * test_fraction, k))
            counts[key] -= 1
            total -= 1
        else:
            candidates = [
                k for k in keys
                if counts[k] < (len(strata[k]) - 1 if len(strata[k]) >= 2 else len(strata[k]))
            ]
            if not candidates:
                break
            key = min(candidates, key=lambda k: (counts[k] - len(strata[k]) * test_fraction, k))
            counts[key] += 1
            total += 1

    train_rows, test_rows = [], []
    for key in keys:
        rows = strata[key]
        order = rng.permutation(len(rows))
        picked = set(order[: counts[key]].tolist())
        for i, row in enumerate(rows):
            (test_rows if i in picked else train_rows).append(row)

    return (
        Manifest(tuple(train_rows), base_dir=manifest.base_dir),
        Manifest(tuple(test_rows), base_dir=manifest.base_dir),
    )


def read_wav(path) -> AudioClip:
    """Decode a PCM-16 WAV file (first channel of stereo), samples / 32768."""
    path = Path(path)
    try:
        with wave.open(str(path), "rb") as wav:
            return _decode_wav(wav, str(path))
    except wave.Error as exc:
        raise FormatError(f"{path}: not a readable WAV file: {exc}") from exc


def read_wav_bytes(data: bytes) -> AudioClip:
    try:
        with wave.open(io.BytesIO(data), "rb") as wav:
            return _decode_wav(wav, "<bytes>")
    except wave.Error as exc:
        raise FormatError(f"not a readable WAV payload: {exc}") from exc


def _decode_wav(wav, what: str) -> AudioClip:
    if wav.getcomptype() != "NONE":
        raise FormatError(f"{what}: only uncompressed PCM WAV is supported")
    if wav.getsampwidth() != 2:
        raise FormatError(f"{what}: only 16-bit PCM WAV is supported, got {8 * wav.getsampwidth()}-bit")
    channels = wav.getnchannels()
    raw = wav.readframes(wav.getnframes())
    data = np.frombuffer(raw, dtype="<i2")
    if channels > 1:
        data = data[::channels]
    return AudioClip(data.astype(np.float64) / 32768.0, wav.getframerate())


def write_wav(path_or_buffer, clip: AudioClip) -> None:
    """Encode a clip as mono PCM-16 WAV."""
    scaled = np.clip(np.round(clip.samples * 32767.0), -32768, 32767).astype("<i2")
    target = str(path_or_buffer) if isinstance(path_or_buffer, (str, Path)) else path_or_buffer
    with wave.open(target, "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(clip.sample_rate)
        wav.writeframes(scaled.tobytes())


def wav_bytes(clip: AudioClip) -> bytes:
    buffer = io.BytesIO()
    write_wav(buffer, clip)
    return buffer.getvalue()
