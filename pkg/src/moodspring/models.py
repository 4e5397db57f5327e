"""Lightweight classifiers with calibrated probability outputs.

Four model kinds share one training/prediction/persistence surface:

* gaussian-nb    -- Gaussian naive Bayes, exact posteriors
* multinomial-nb -- multinomial naive Bayes with Laplace smoothing
* knn            -- exhaustive k-nearest-neighbors, smoothed vote fractions
* linear-svm     -- one-vs-rest linear SVM trained by Pegasos-style SGD,
                    margins calibrated through a softmax

All kinds except multinomial-nb z-score features with statistics stored
inside the model, so a saved artifact is self-contained. Trained models
are immutable; training is deterministic for a fixed seed.
"""

import json
from dataclasses import dataclass

import numpy as np

from .dsp import FeatureVector
from .errors import FormatError, InsufficientData, InvalidInput
from .valence import EMOTIONS

MODEL_KINDS = ("gaussian-nb", "multinomial-nb", "knn", "linear-svm")
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Standardizer:
    """Per-feature z-scoring fitted on training data; zero-variance features pass through."""

    mean: np.ndarray
    std: np.ndarray

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.std


def fit_standardizer(x: np.ndarray) -> Standardizer:
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std > 0.0, std, 1.0)
    return Standardizer(mean, std)


@dataclass(frozen=True)
class TrainedModel:
    kind: str
    classes: tuple[str, ...]
    standardizer: Standardizer | None
    params: dict
    hyper: dict

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def dim(self) -> int:
        if self.kind == "gaussian-nb":
            return self.params["mean"].shape[1]
        if self.kind == "multinomial-nb":
            return self.params["feature_log_prob"].shape[1]
        if self.kind == "knn":
            return self.params["points"].shape[1]
        return self.params["weights"].shape[1]


def _as_matrix(features, labels):
    if len(features) == 0:
        raise InsufficientData("training set is empty")
    if len(features) != len(labels):
        raise InvalidInput("features and labels lengths differ")
    rows = []
    for f in features:
        rows.append(f.values if isinstance(f, FeatureVector) else np.asarray(f, dtype=np.float64))
    dims = {r.shape for r in rows}
    if len(dims) != 1 or rows[0].ndim != 1:
        raise InvalidInput(f"inconsistent feature dimensions: {sorted(dims)}")
    return np.vstack(rows), list(labels)


def _resolve_classes(labels, declared):
    present = set(labels)
    if declared is None:
        if present <= set(EMOTIONS):
            return tuple(e for e in EMOTIONS if e in present)
        return tuple(sorted(present))
    declared = tuple(declared)
    unknown = present - set(declared)
    if unknown:
        raise InvalidInput(f"labels outside the declared class set: {sorted(unknown)}")
    missing = [c for c in declared if c not in present]
    if missing:
        raise InsufficientData(f"no training examples for declared classes: {missing}")
    return declared


def train(kind: str, features, labels, classes=None, seed: int = 0,
          knn_k: int = 5, svm_reg: float = 1e-4, svm_epochs: int = 20,
          smoothing_alpha: float = 1.0) -> TrainedModel:
    """Fit a model of the given kind on (feature, label) pairs.

    `classes` optionally declares the class set (every declared class
    needs at least one example); by default it is inferred from the
    labels, ordered by the emotion taxonomy when applicable.
    """
    if kind not in MODEL_KINDS:
        raise InvalidInput(f"unknown model kind {kind!r}")
    x, y = _as_matrix(features, labels)
    class_tuple = _resolve_classes(y, classes)
    y_idx = np.array([class_tuple.index(label) for label in y], dtype=np.int64)
    n_classes = len(class_tuple)

    standardizer = None
    if kind != "multinomial-nb":
        standardizer = fit_standardizer(x)
        x = standardizer.transform(x)

    if kind == "gaussian-nb":
        params = _fit_gaussian_nb(x, y_idx, n_classes)
        hyper = {"seed": seed}
    elif kind == "multinomial-nb":
        if np.any(x < 0.0):
            raise InvalidInput("multinomial-nb requires non-negative features")
        params = _fit_multinomial_nb(x, y_idx, n_classes, smoothing_alpha)
        hyper = {"seed": seed, "smoothing_alpha": smoothing_alpha}
    elif kind == "knn":
        if knn_k < 1:
            raise InvalidInput(f"knn needs k >= 1, got {knn_k}")
        params = {"points": x.copy(), "point_class": y_idx.copy(), "k": int(knn_k)}
        hyper = {"seed": seed, "knn_k": int(knn_k)}
    else:
        params = _fit_linear_svm(x, y_idx, n_classes, svm_reg, svm_epochs, seed)
        hyper = {"seed": seed, "svm_reg": svm_reg, "svm_epochs": svm_epochs}

    return TrainedModel(kind, class_tuple, standardizer, params, hyper)


def _fit_gaussian_nb(x, y_idx, n_classes):
    n, d = x.shape
    means = np.zeros((n_classes, d))
    variances = np.zeros((n_classes, d))
    priors = np.zeros(n_classes)
    for c in range(n_classes):
        rows = x[y_idx == c]
        priors[c] = rows.shape[0] / n
        means[c] = rows.mean(axis=0)
        variances[c] = rows.var(axis=0)
    # smooth with a fraction of the largest overall feature variance so
    # every stored variance stays strictly positive
    eps = 1e-9 * float(x.var(axis=0).max())
    if eps <= 0.0:
        eps = 1e-9
    variances += eps
    return {"log_prior": np.log(priors), "mean": means, "var": variances}


def _fit_multinomial_nb(x, y_idx, n_classes, alpha):
    n, d = x.shape
    priors = np.zeros(n_classes)
    feature_log_prob = np.zeros((n_classes, d))
    for c in range(n_classes):
        rows = x[y_idx == c]
        priors[c] = rows.shape[0] / n
        counts = rows.sum(axis=0) + alpha
        feature_log_prob[c] = np.log(counts) - np.log(counts.sum())
    return {"log_prior": np.log(priors), "feature_log_prob": feature_log_prob}


def _fit_linear_svm(x, y_idx, n_classes, reg, epochs, seed):
    # Pegasos subgradient descent, one-vs-rest; the bias rides along as an
    # extra always-one coordinate so the step size schedule stays valid
    n, d = x.shape
    augmented = np.hstack([x, np.ones((n, 1))])
    weights = np.zeros((n_classes, d))
    bias = np.zeros(n_classes)
    for c in range(n_classes):
        targets = np.where(y_idx == c, 1.0, -1.0)
        w = np.zeros(d + 1)
        rng = np.random.default_rng([seed, c])
        t = 0
        for _ in range(epochs):
            for i in rng.permutation(n):
                t += 1
                step = 1.0 / (reg * t)
                margin = targets[i] * (w @ augmented[i])
                w *= 1.0 - step * reg
                if margin < 1.0:
                    w += step * targets[i] * augmented[i]
        weights[c] = w[:d]
        bias[c] = w[d]
    return {"weights": weights, "bias": bias}


def predict_proba(model: TrainedModel, x) -> np.ndarray:
    """Probability distribution over model.classes for one feature vector."""
    values = x.values if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64)
    if values.ndim != 1 or values.size != model.dim:
        raise InvalidInput(f"expected a {model.dim}-dimensional input, got shape {values.shape}")
    if model.standardizer is not None:
        values = model.standardizer.transform(values)

    if model.kind == "gaussian-nb":
        mean, var = model.params["mean"], model.params["var"]
        log_joint = model.params["log_prior"] + np.sum(
            -0.5 * np.log(2.0 * np.pi * var) - (values - mean) ** 2 / (2.0 * var), axis=1
        )
        return _normalize_log(log_joint)

    if model.kind == "multinomial-nb":
        log_joint = model.params["log_prior"] + model.params["feature_log_prob"] @ values
        return _normalize_log(log_joint)

    if model.kind == "knn":
        points, point_class = model.params["points"], model.params["point_class"]
        k = min(model.params["k"], points.shape[0])
        distances = np.sqrt(((points - values) ** 2).sum(axis=1))
        # stable sort: distance ties resolve to the lowest training index
        nearest = np.argsort(distances, kind="stable")[:k]
        votes = np.bincount(point_class[nearest], minlength=model.n_classes)
        return (votes + 1.0) / (k + model.n_classes)

    margins = model.params["weights"] @ values + model.params["bias"]
    return _normalize_log(margins)


def _normalize_log(scores: np.ndarray) -> np.ndarray:
    shifted = np.exp(scores - scores.max())
    return shifted / shifted.sum()


def predict_label(model: TrainedModel, x) -> str:
    """Argmax class; ties resolve to the lowest class index."""
    return model.classes[int(np.argmax(predict_proba(model, x)))]


def gaussian_class_stats(model: TrainedModel):
    """Per-class (means, variances) of a gaussian-nb model in original feature units."""
    if model.kind != "gaussian-nb":
        raise InvalidInput("class stats only apply to gaussian-nb models")
    s = model.standardizer
    means = model.params["mean"] * s.std + s.mean
    variances = model.params["var"] * s.std**2
    return means, variances


def save(model: TrainedModel) -> bytes:
    """Versioned, self-describing JSON artifact."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": model.kind,
        "classes": list(model.classes),
        "standardizer": None
        if model.standardizer is None
        else {"mean": model.standardizer.mean.tolist(), "std": model.standardizer.std.tolist()},
        "params": {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in model.params.items()},
        "hyper": model.hyper,
    }
    return json.dumps(doc, sort_keys=True).encode("utf-8")


_PARAM_SHAPES = {
    "gaussian-nb": {"log_prior": 1, "mean": 2, "var": 2},
    "multinomial-nb": {"log_prior": 1, "feature_log_prob": 2},
    "knn": {"points": 2, "point_class": 1, "k": 0},
    "linear-svm": {"weights": 2, "bias": 1},
}


def load(payload: bytes) -> TrainedModel:
    """Inverse of save; rejects corrupt payloads and unknown schema versions."""
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"corrupt model payload: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("model payload must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise FormatError(
            f"unsupported model schema version {version!r}; this build reads version {SCHEMA_VERSION}"
        )
    kind = doc.get("kind")
    if kind not in MODEL_KINDS:
        raise FormatError(f"unknown model kind {kind!r}")
    try:
        classes = tuple(doc["classes"])
        standardizer = None
        if doc["standardizer"] is not None:
            standardizer = Standardizer(
                np.asarray(doc["standardizer"]["mean"], dtype=np.float64),
                np.asarray(doc["standardizer"]["std"], dtype=np.float64),
            )
        params = {}
        for name, ndim in _PARAM_SHAPES[kind].items():
            raw = doc["params"][name]
            if ndim == 0:
                params[name] = int(raw)
            else:
                dtype = np.int64 if name == "point_class" else np.float64
                arr = np.asarray(raw, dtype=dtype)
                if arr.ndim != ndim:
                    raise FormatError(f"parameter {name!r} has wrong rank")
                params[name] = arr
        hyper = dict(doc.get("hyper", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model payload: {exc}") from exc
    model = TrainedModel(kind, classes, standardizer, params, hyper)
    _validate_shapes(model)
    return model


def _validate_shapes(model: TrainedModel) -> None:
    c, d = model.n_classes, model.dim
    p = model.params
    ok = True
    if model.kind == "gaussian-nb":
        ok = p["log_prior"].shape == (c,) and p["mean"].shape == p["var"].shape == (c, d)
        ok = ok and bool(np.all(p["var"] > 0.0))
    elif model.kind == "multinomial-nb":
        ok = p["log_prior"].shape == (c,) and p["feature_log_prob"].shape == (c, d)
    elif model.kind == "knn":
        ok = p["points"].shape[0] == p["point_class"].shape[0] and p["k"] >= 1
        ok = ok and (p["point_class"] < c).all() and (p["point_class"] >= 0).all()
    else:
        ok = p["weights"].shape == (c, d) and p["bias"].shape == (c,)
    if model.standardizer is not None and model.standardizer.mean.shape != (d,):
        ok = False
    if not ok:
        raise FormatError("model parameter shapes do not match class count / feature dim")
