"""Command-line entry points: train, train-fusion, evaluate, serve."""

import argparse
import json
import sys
from pathlib import Path

from ..data import load_embedding_table, load_manifest, read_wav
from ..dsp import audio_features, resample
from ..errors import ConfigError, MoodspringError
from ..fusion import FusionInput, save_fusion, train_fusion
from ..models import save as save_model
from ..models import train as train_model
from ..textfeat import build_vocab, load_vocab, save_vocab, tokenize, vectorize
from .asr import AsrClient
from .config import load_engine_config
from .modelset import INDEX_NAME, MODELSET_SCHEMA_VERSION, load_model_set
from .pipeline import Engine, evaluate_manifest, manifest_decision_table, report_json
from .server import serve


def _features_for_rows(rows, modality, config, vocab=None, embeddings=None):
    features = []
    for row in rows:
        if modality == "audio":
            clip = resample(read_wav(row["path"]), config.sample_rate)
            features.append(audio_features(clip, config.mfcc))
        elif modality == "text":
            features.append(vectorize(tokenize(row["source"]), vocab, config.vector_mode))
        else:
            features.append(embeddings.lookup(row["source"]))
    return features


def _cmd_train(args) -> int:
    config = load_engine_config(args.config)
    manifest = load_manifest(args.manifest)
    rows = [r for r in manifest.rows if r.modality == args.modality]
    if not rows:
        raise ConfigError(f"manifest has no {args.modality!r} rows")

    vocab = None
    embeddings = None
    if args.modality == "text":
        if args.vocab:
            vocab = load_vocab(Path(args.vocab).read_bytes())
        else:
            vocab = build_vocab([tokenize(r.source) for r in rows], min_df=args.min_df)
    elif args.modality == "embedding":
        if not args.embeddings:
            raise ConfigError("--embeddings is required for embedding rows")
        embeddings = load_embedding_table(args.embeddings)

    plain = [{"path": manifest.audio_path(r), "source": r.source or r.id} for r in rows]
    features = _features_for_rows(plain, args.modality, config, vocab, embeddings)
    labels = [r.emotion for r in rows]
    model = train_model(
        args.model, features, labels, seed=args.seed,
        knn_k=args.knn_k, svm_reg=args.svm_reg, svm_epochs=args.svm_epochs,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(save_model(model))
    print(f"wrote {out}")
    if args.modality == "text" and not args.vocab:
        vocab_out = Path(args.vocab_out) if args.vocab_out else out.parent / "vocab.json"
        vocab_out.write_bytes(save_vocab(vocab))
        print(f"wrote {vocab_out}")
    if args.register:
        _register(Path(args.register), args.name or out.stem, args.modality, out)
    return 0


def _register(directory: Path, name: str, modality: str, artifact: Path) -> None:
    """Add or replace a classifier entry in a model-set index."""
    directory.mkdir(parents=True, exist_ok=True)
    index_path = directory / INDEX_NAME
    if index_path.exists():
        index = json.loads(index_path.read_text(encoding="utf-8"))
    else:
        index = {
            "schema_version": MODELSET_SCHEMA_VERSION,
            "classifiers": [],
            "vocab": None,
            "embeddings": None,
            "fusion": None,
            "fusion_baseline": None,
        }
    target = directory / artifact.name
    if target.resolve() != artifact.resolve():
        target.write_bytes(artifact.read_bytes())
    entries = [e for e in index["classifiers"] if e["name"] != name]
    entries.append({"name": name, "modality": modality, "path": artifact.name})
    index["classifiers"] = entries
    if modality == "text" and not index.get("vocab"):
        vocab_src = artifact.parent / "vocab.json"
        if vocab_src.exists():
            if (directory / "vocab.json").resolve() != vocab_src.resolve():
                (directory / "vocab.json").write_bytes(vocab_src.read_bytes())
            index["vocab"] = "vocab.json"
    index_path.write_text(json.dumps(index, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"registered {name} in {index_path}")


def _cmd_train_fusion(args) -> int:
    config = load_engine_config(args.config)
    model_set = load_model_set(args.models, embeddings_path=args.embeddings)
    manifest = load_manifest(args.manifest)
    p_matrix, labels, groups = manifest_decision_table(manifest, model_set, config)
    inputs = [FusionInput(p=p, group=g, label=int(y)) for p, g, y in zip(p_matrix, groups, labels)]
    model = train_fusion(
        inputs, fairness_weight=args.fairness_weight, lr=args.lr,
        epochs=args.epochs, delta=args.delta, seed=args.seed,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(save_fusion(model))
    print(f"wrote {out}")
    if args.register_as:
        index_path = Path(args.models) / INDEX_NAME
        index = json.loads(index_path.read_text(encoding="utf-8"))
        key = "fusion" if args.register_as == "fair" else "fusion_baseline"
        index[key] = out.name
        target = Path(args.models) / out.name
        if target.resolve() != out.resolve():
            target.write_bytes(out.read_bytes())
        index_path.write_text(json.dumps(index, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        print(f"registered as {key} in {index_path}")
    return 0


def _cmd_evaluate(args) -> int:
    config = load_engine_config(args.config)
    model_set = load_model_set(args.models, embeddings_path=args.embeddings)
    manifest = load_manifest(args.manifest)
    report = evaluate_manifest(manifest, model_set, delta=args.delta, config=config)
    payload = report_json(report)
    if args.json_out:
        Path(args.json_out).write_bytes(payload)
        print(f"wrote {args.json_out}")
    else:
        sys.stdout.write(payload.decode("utf-8"))
    return 0


def _cmd_serve(args) -> int:
    config = load_engine_config(args.config)
    model_set = load_model_set(args.models)
    asr = AsrClient.from_env(timeout_s=config.asr_timeout_s)
    engine = Engine(model_set, config, asr=asr)
    banner = f"listening on ws://{args.host}:{args.port}/session"
    serve(engine, host=args.host, port=args.port, on_ready=lambda: print(banner, flush=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moodspring", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one per-modality classifier")
    p_train.add_argument("--manifest", required=True)
    p_train.add_argument("--modality", required=True, choices=["text", "audio", "embedding"])
    p_train.add_argument("--model", required=True,
                         choices=["gaussian-nb", "multinomial-nb", "knn", "linear-svm"])
    p_train.add_argument("--out", required=True)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--config", default=None)
    p_train.add_argument("--min-df", type=int, default=1)
    p_train.add_argument("--vocab", default=None, help="reuse an existing vocabulary artifact")
    p_train.add_argument("--vocab-out", default=None)
    p_train.add_argument("--embeddings", default=None)
    p_train.add_argument("--knn-k", type=int, default=5)
    p_train.add_argument("--svm-reg", type=float, default=1e-4)
    p_train.add_argument("--svm-epochs", type=int, default=20)
    p_train.add_argument("--register", default=None, help="model-set directory to register into")
    p_train.add_argument("--name", default=None, help="classifier name inside the model set")
    p_train.set_defaults(func=_cmd_train)

    p_fusion = sub.add_parser("train-fusion", help="train the fusion layer over a model set")
    p_fusion.add_argument("--manifest", required=True)
    p_fusion.add_argument("--models", required=True, help="model-set directory")
    p_fusion.add_argument("--out", required=True)
    p_fusion.add_argument("--fairness-weight", "--lambda", dest="fairness_weight",
                          type=float, default=1.0)
    p_fusion.add_argument("--lr", type=float, default=0.1)
    p_fusion.add_argument("--epochs", type=int, default=500)
    p_fusion.add_argument("--delta", type=float, default=0.05)
    p_fusion.add_argument("--seed", type=int, default=0)
    p_fusion.add_argument("--config", default=None)
    p_fusion.add_argument("--embeddings", default=None)
    p_fusion.add_argument("--register-as", choices=["fair", "baseline"], default=None)
    p_fusion.set_defaults(func=_cmd_train_fusion)

    p_eval = sub.add_parser("evaluate", help="report accuracy and disparity certificates")
    p_eval.add_argument("--manifest", required=True)
    p_eval.add_argument("--models", required=True)
    p_eval.add_argument("--delta", type=float, default=0.05)
    p_eval.add_argument("--json-out", default=None)
    p_eval.add_argument("--config", default=None)
    p_eval.add_argument("--embeddings", default=None)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_serve = sub.add_parser("serve", help="host the /session WebSocket endpoint")
    p_serve.add_argument("--models", required=True)
    p_serve.add_argument("--config", default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MoodspringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
