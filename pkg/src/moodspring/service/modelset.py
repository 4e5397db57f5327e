"""Model-set directory: the classifiers, vocabulary, and fusion layer a
serving engine loads together.

Layout: one directory holding a ``modelset.json`` index plus the
referenced artifacts. The index pins the classifier order, which is also
the fusion layer's input order.
"""

import json
from dataclasses import dataclass
from pathlib import Path

from ..data import EmbeddingTable, load_embedding_table
from ..errors import ConfigError, FormatError
from ..fusion import FusionModel, load_fusion, save_fusion
from ..models import TrainedModel, load as load_model, save as save_model
from ..textfeat import Vocabulary, load_vocab, save_vocab

MODELSET_SCHEMA_VERSION = 1
INDEX_NAME = "modelset.json"


@dataclass(frozen=True)
class ClassifierSlot:
    name: str
    modality: str  # audio | text | embedding
    model: TrainedModel


@dataclass(frozen=True)
class ModelSet:
    classifiers: tuple[ClassifierSlot, ...]
    vocab: Vocabulary | None = None
    embeddings: EmbeddingTable | None = None
    fusion: FusionModel | None = None
    fusion_baseline: FusionModel | None = None

    def __post_init__(self):
        names = [slot.name for slot in self.classifiers]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate classifier names: {names}")
        if any(s.modality == "text" for s in self.classifiers) and self.vocab is None:
            raise ConfigError("model set has text classifiers but no vocabulary")
        for fusion in (self.fusion, self.fusion_baseline):
            if fusion is not None and fusion.n_inputs != len(self.classifiers):
                raise ConfigError(
                    f"fusion layer expects {fusion.n_inputs} inputs "
                    f"but the set has {len(self.classifiers)} classifiers"
                )

    def slots(self, modality: str):
        return [s for s in self.classifiers if s.modality == modality]


def save_model_set(model_set: ModelSet, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    index = {
        "schema_version": MODELSET_SCHEMA_VERSION,
        "classifiers": [],
        "vocab": None,
        "embeddings": None,
        "fusion": None,
        "fusion_baseline": None,
    }
    for slot in model_set.classifiers:
        filename = f"{slot.name}.json"
        (directory / filename).write_bytes(save_model(slot.model))
        index["classifiers"].append({"name": slot.name, "modality": slot.modality, "path": filename})
    if model_set.vocab is not None:
        (directory / "vocab.json").write_bytes(save_vocab(model_set.vocab))
        index["vocab"] = "vocab.json"
    if model_set.fusion is not None:
        (directory / "fusion.json").write_bytes(save_fusion(model_set.fusion))
        index["fusion"] = "fusion.json"
    if model_set.fusion_baseline is not None:
        (directory / "fusion-baseline.json").write_bytes(save_fusion(model_set.fusion_baseline))
        index["fusion_baseline"] = "fusion-baseline.json"
    (directory / INDEX_NAME).write_text(json.dumps(index, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_model_set(directory, embeddings_path=None) -> ModelSet:
    directory = Path(directory)
    index_path = directory / INDEX_NAME
    if not index_path.exists():
        raise ConfigError(f"no {INDEX_NAME} in {directory}")
    try:
        index = json.loads(index_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"corrupt model-set index {index_path}: {exc}") from exc
    version = index.get("schema_version")
    if version != MODELSET_SCHEMA_VERSION:
        raise FormatError(
            f"unsupported model-set schema version {version!r}; this build reads {MODELSET_SCHEMA_VERSION}"
        )

    slots = []
    for entry in index.get("classifiers", []):
        model = load_model((directory / entry["path"]).read_bytes())
        slots.append(ClassifierSlot(name=entry["name"], modality=entry["modality"], model=model))
    vocab = None
    if index.get("vocab"):
        vocab = load_vocab((directory / index["vocab"]).read_bytes())
    fusion = None
    if index.get("fusion"):
        fusion = load_fusion((directory / index["fusion"]).read_bytes())
    fusion_baseline = None
    if index.get("fusion_baseline"):
        fusion_baseline = load_fusion((directory / index["fusion_baseline"]).read_bytes())
    embeddings = None
    table_ref = embeddings_path or index.get("embeddings")
    if table_ref:
        table_path = Path(table_ref)
        if not table_path.is_absolute():
            table_path = directory / table_path
        embeddings = load_embedding_table(table_path)
    return ModelSet(tuple(slots), vocab=vocab, embeddings=embeddings,
                    fusion=fusion, fusion_baseline=fusion_baseline)
