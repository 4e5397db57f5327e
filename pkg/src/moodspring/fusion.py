"""Decision fusion across per-modality classifiers.

Three ways to combine the per-classifier pleasant probabilities:
majority voting, a weighted sigmoid layer (``fuse``), and training of
that layer with a fairness-aware loss. The training loss is mean binary
cross-entropy plus ``fairness_weight`` times a differentiable disparity
surrogate built from the gap between per-group mean losses and
variance-based concentration terms, so gradient descent is pushed
toward weights whose errors concentrate equally on both demographic
groups. The non-differentiable certified metric lives in
``bernstein_disparity`` and is what evaluation reports.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import (
    FormatError,
    InsufficientData,
    InsufficientGroups,
    InvalidInput,
    NumericalError,
)
from .valence import PLEASANT, UNPLEASANT, valence_class

FUSION_SCHEMA_VERSION = 1

# soft absolute value epsilon: keeps the group-gap term differentiable at 0
_SOFTABS_EPS = 1e-8
# below this, a group's loss variance is treated as exactly zero
_VAR_FLOOR = 1e-12


@dataclass(frozen=True)
class FusionInput:
    """One fusion training/evaluation row: per-classifier p_pleasant values,
    a demographic tag, and (for training) the true binary valence."""

    p: np.ndarray
    group: str
    label: int | None = None

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise InvalidInput("fusion input needs a non-empty 1-D probability vector")
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise InvalidInput("per-classifier probabilities must lie in [0, 1]")
        if self.label is not None and self.label not in (0, 1):
            raise InvalidInput(f"label must be 0, 1, or None, got {self.label!r}")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class FusionModel:
    """Weights and bias of the fusion layer plus its training metadata."""

    w: np.ndarray
    b: float
    fairness_weight: float = 0.0
    delta: float = 0.05
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or not np.isfinite(w).all() or not math.isfinite(self.b):
            raise InvalidInput("fusion parameters must be a finite 1-D weight vector and scalar bias")
        if self.fairness_weight < 0.0:
            raise InvalidInput("fairness weight must be >= 0")
        if not 0.0 < self.delta < 1.0:
            raise InvalidInput("confidence level delta must lie in (0, 1)")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", float(self.b))

    @property
    def n_inputs(self) -> int:
        return self.w.size


@dataclass(frozen=True)
class DisparityReport:
    """Group accuracies with a certified band around their gap."""

    acc_a: float
    acc_b: float
    point: float
    upper: float
    lower: float
    n_a: int
    n_b: int
    delta: float

    def to_dict(self) -> dict:
        return {
            "acc_a": self.acc_a,
            "acc_b": self.acc_b,
            "point": self.point,
            "upper": self.upper,
            "lower": self.lower,
            "n_a": self.n_a,
            "n_b": self.n_b,
            "delta": self.delta,
        }


def majority_vote(decisions: list[str], probs: list[float]) -> str:
    """Strict majority of valence classes; ties fall back to the mean probability."""
    if not decisions or len(decisions) != len(probs):
        raise InvalidInput("need equally long, non-empty decision and probability lists")
    for d in decisions:
        if d not in (PLEASANT, UNPLEASANT):
            raise InvalidInput(f"unknown valence class {d!r}")
    pleasant = sum(1 for d in decisions if d == PLEASANT)
    unpleasant = len(decisions) - pleasant
    if pleasant > unpleasant:
        return PLEASANT
    if unpleasant > pleasant:
        return UNPLEASANT
    return valence_class(float(np.mean(probs)))


def fuse(model: FusionModel, p) -> float:
    """sigmoid(w . p + b), clamped to the open interval (0, 1)."""
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (model.n_inputs,):
        raise InvalidInput(f"expected {model.n_inputs} classifier probabilities, got shape {p.shape}")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise InvalidInput("classifier probabilities must lie in [0, 1]")
    return float(np.clip(expit(model.w @ p + model.b), 1e-12, 1.0 - 1e-12))


def _batch_arrays(inputs, require_labels=True):
    if not inputs:
        raise InvalidInput("empty fusion batch")
    dims = {row.p.size for row in inputs}
    if len(dims) != 1:
        raise InvalidInput(f"fusion inputs disagree on classifier count: {sorted(dims)}")
    p = np.vstack([row.p for row in inputs])
    groups = np.array([row.group for row in inputs])
    labels = None
    if require_labels:
        if any(row.label is None for row in inputs):
            raise InvalidInput("every fusion training row needs a label")
        labels = np.array([row.label for row in inputs], dtype=np.float64)
    return p, labels, groups


def _group_masks(groups, fairness_weight):
    tags = sorted(set(groups.tolist()))
    if fairness_weight > 0.0:
        if len(tags) != 2:
            raise InsufficientGroups(
                f"fairness-weighted training needs exactly two groups, got {tags}"
            )
        masks = [groups == t for t in tags]
        if any(int(m.sum()) < 2 for m in masks):
            raise InsufficientGroups("each group needs at least 2 rows")
        return masks
    return None


def _loss_and_grad(w, b, p, labels, masks, fairness_weight, delta):
    """Exact value and analytic gradient of CE + fairness_weight * surrogate.

    Overflow in a diverging run is deliberate: the caller turns the
    resulting non-finite loss into NumericalError.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _loss_and_grad_inner(w, b, p, labels, masks, fairness_weight, delta)


def _loss_and_grad_inner(w, b, p, labels, masks, fairness_weight, delta):
    z = p @ w + b
    q = expit(z)
    # numerically stable per-example cross-entropy: softplus(z) - y*z
    losses = np.logaddexp(0.0, z) - labels * z
    dlosses_dz = q - labels

    n = p.shape[0]
    loss = losses.mean()
    grad_w = (dlosses_dz @ p) / n
    grad_b = dlosses_dz.mean()

    if fairness_weight > 0.0:
        confidence_scale = math.log(2.0 / delta)
        group_means = []
        group_mean_grads = []
        penalty = 0.0
        penalty_gw = np.zeros_like(w)
        penalty_gb = 0.0
        for mask in masks:
            n_g = int(mask.sum())
            l_g = losses[mask]
            d_g = dlosses_dz[mask]
            p_g = p[mask]
            mean_g = l_g.mean()
            mean_gw = (d_g @ p_g) / n_g
            mean_gb = d_g.mean()
            group_means.append((mean_g, mean_gw, mean_gb))
            var_g = l_g.var()  # biased sample variance
            term = math.sqrt(2.0 * var_g * confidence_scale / n_g)
            penalty += term
            if var_g > _VAR_FLOOR:
                centered = l_g - mean_g
                dvar_gw = (2.0 / n_g) * (centered * d_g) @ p_g
                dvar_gb = (2.0 / n_g) * float(centered @ d_g)
                scale = (confidence_scale / n_g) / term
                penalty_gw += scale * dvar_gw
                penalty_gb += scale * dvar_gb
        (mean_a, mean_a_gw, mean_a_gb), (mean_b, mean_b_gw, mean_b_gb) = group_means
        gap = mean_a - mean_b
        softabs = math.sqrt(gap * gap + _SOFTABS_EPS)
        penalty += softabs
        penalty_gw += (gap / softabs) * (mean_a_gw - mean_b_gw)
        penalty_gb += (gap / softabs) * (mean_a_gb - mean_b_gb)
        loss += fairness_weight * penalty
        grad_w = grad_w + fairness_weight * penalty_gw
        grad_b = grad_b + fairness_weight * penalty_gb

    return loss, grad_w, grad_b


def gradient(model: FusionModel, batch, fairness_weight: float | None = None):
    """Analytic (d loss/d w, d loss/d b) of the training loss on a batch."""
    lam = model.fairness_weight if fairness_weight is None else fairness_weight
    p, labels, groups = _batch_arrays(batch)
    if p.shape[1] != model.n_inputs:
        raise InvalidInput("batch classifier count does not match the model")
    masks = _group_masks(groups, lam)
    _, grad_w, grad_b = _loss_and_grad(model.w, model.b, p, labels, masks, lam, model.delta)
    return grad_w, float(grad_b)


def disparity_surrogate(model: FusionModel, batch) -> float:
    """Value of the differentiable fairness penalty at the model's parameters:
    softabs of the group mean-loss gap plus both variance terms."""
    p, labels, groups = _batch_arrays(batch)
    masks = _group_masks(groups, 1.0)
    z = p @ model.w + model.b
    losses = np.logaddexp(0.0, z) - labels * z
    confidence_scale = math.log(2.0 / model.delta)
    means = []
    penalty = 0.0
    for mask in masks:
        group_losses = losses[mask]
        means.append(group_losses.mean())
        penalty += math.sqrt(2.0 * group_losses.var() * confidence_scale / int(mask.sum()))
    gap = means[0] - means[1]
    return penalty + math.sqrt(gap * gap + _SOFTABS_EPS)


def training_loss(model: FusionModel, batch, fairness_weight: float | None = None) -> float:
    """The exact loss value train_fusion descends on."""
    lam = model.fairness_weight if fairness_weight is None else fairness_weight
    p, labels, groups = _batch_arrays(batch)
    masks = _group_masks(groups, lam)
    loss, _, _ = _loss_and_grad(model.w, model.b, p, labels, masks, lam, model.delta)
    return float(loss)


def train_fusion(inputs, fairness_weight: float = 1.0, lr: float = 0.1,
                 epochs: int = 500, delta: float = 0.05, seed: int = 0) -> FusionModel:
    """Full-batch gradient descent from w=0, b=0.

    Returns the parameters with the lowest loss observed over the run
    (the loss is evaluated before every step and once after the last).
    Deterministic for fixed inputs; the seed is recorded as metadata.
    """
    if not 0.0 < delta < 1.0:
        raise InvalidInput("confidence level delta must lie in (0, 1)")
    if fairness_weight < 0.0:
        raise InvalidInput("fairness weight must be >= 0")
    p, labels, groups = _batch_arrays(inputs)
    masks = _group_masks(groups, fairness_weight)

    w = np.zeros(p.shape[1])
    b = 0.0
    best_loss = math.inf
    best_w, best_b = w.copy(), b
    for _ in range(epochs):
        loss, grad_w, grad_b = _loss_and_grad(w, b, p, labels, masks, fairness_weight, delta)
        if not math.isfinite(loss):
            raise NumericalError(f"training loss became non-finite: {loss}")
        if loss < best_loss:
            best_loss, best_w, best_b = loss, w.copy(), b
        w = w - lr * grad_w
        b = b - lr * grad_b
    loss, _, _ = _loss_and_grad(w, b, p, labels, masks, fairness_weight, delta)
    if not math.isfinite(loss):
        raise NumericalError(f"training loss became non-finite: {loss}")
    if loss < best_loss:
        best_loss, best_w, best_b = loss, w.copy(), b

    return FusionModel(
        best_w,
        best_b,
        fairness_weight=fairness_weight,
        delta=delta,
        metadata={"lr": lr, "epochs": epochs, "seed": seed, "best_loss": float(best_loss)},
    )


def epoch_losses(inputs, fairness_weight: float = 1.0, lr: float = 0.1,
                 epochs: int = 500, delta: float = 0.05):
    """Loss trajectory of the same descent train_fusion runs; for diagnostics."""
    p, labels, groups = _batch_arrays(inputs)
    masks = _group_masks(groups, fairness_weight)
    w = np.zeros(p.shape[1])
    b = 0.0
    trajectory = []
    for _ in range(epochs):
        loss, grad_w, grad_b = _loss_and_grad(w, b, p, labels, masks, fairness_weight, delta)
        trajectory.append(float(loss))
        w = w - lr * grad_w
        b = b - lr * grad_b
    loss, _, _ = _loss_and_grad(w, b, p, labels, masks, fairness_weight, delta)
    trajectory.append(float(loss))
    return trajectory


def bernstein_disparity(correct_a, correct_b, delta: float = 0.05) -> DisparityReport:
    """Certified band on the accuracy gap between two groups.

    Each group's accuracy estimate gets an empirical Bernstein radius
    B = sqrt(2*V*ln(2/delta)/n) + 7*ln(2/delta)/(3*(n-1)) with V the
    unbiased sample variance of the 0/1 correctness values (range 1).
    """
    if not 0.0 < delta < 1.0:
        raise InvalidInput("confidence level delta must lie in (0, 1)")
    radius_a, acc_a, n_a = _bernstein_radius(correct_a, delta)
    radius_b, acc_b, n_b = _bernstein_radius(correct_b, delta)
    point = abs(acc_a - acc_b)
    return DisparityReport(
        acc_a=acc_a,
        acc_b=acc_b,
        point=point,
        upper=point + radius_a + radius_b,
        lower=max(0.0, point - radius_a - radius_b),
        n_a=n_a,
        n_b=n_b,
        delta=delta,
    )


def _bernstein_radius(correct, delta):
    values = np.asarray(correct, dtype=np.float64)
    if values.ndim != 1 or values.size < 2:
        raise InsufficientData("each group needs at least 2 correctness values")
    if np.any((values != 0.0) & (values != 1.0)):
        raise InvalidInput("correctness values must be 0 or 1")
    n = values.size
    variance = values.var(ddof=1)
    scale = math.log(2.0 / delta)
    radius = math.sqrt(2.0 * variance * scale / n) + 7.0 * scale / (3.0 * (n - 1))
    return radius, float(values.mean()), n


def complementary_experts_dataset(n_group_a: int = 16000, n_group_b: int = 4000,
                                  seed: int = 0, signal: float = 0.9):
    """Synthetic fusion benchmark with one reliable expert per group.

    Expert 0 assigns the true label probability ``signal`` on group A and
    uniform noise on group B; expert 1 is the mirror image. With group A
    in the majority, plain cross-entropy training leans on expert 0 and
    underserves group B, which is exactly the failure mode the fairness
    loss is meant to remove. The default group sizes are large enough
    that the variance terms of the fairness surrogate leave the accurate,
    balanced solution as the lowest-loss one.
    """
    if n_group_a < 2 or n_group_b < 2:
        raise InvalidInput("each group needs at least 2 rows")
    rng = np.random.default_rng(seed)
    rows = []
    for group, count, informed in (("A", n_group_a, 0), ("B", n_group_b, 1)):
        labels = rng.integers(0, 2, size=count)
        noise = rng.uniform(0.0, 1.0, size=count)
        for y, u in zip(labels, noise):
            p = np.empty(2)
            p[informed] = signal if y == 1 else 1.0 - signal
            p[1 - informed] = u
            rows.append(FusionInput(p=p, group=group, label=int(y)))
    return rows


def save_fusion(model: FusionModel) -> bytes:
    """Versioned JSON artifact, same family as the classifier artifacts."""
    doc = {
        "schema_version": FUSION_SCHEMA_VERSION,
        "kind": "fusion-layer",
        "w": model.w.tolist(),
        "b": model.b,
        "fairness_weight": model.fairness_weight,
        "delta": model.delta,
        "metadata": model.metadata,
    }
    return json.dumps(doc, sort_keys=True).encode("utf-8")


def load_fusion(payload: bytes) -> FusionModel:
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"corrupt fusion payload: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("kind") != "fusion-layer":
        raise FormatError("payload is not a fusion-layer artifact")
    version = doc.get("schema_version")
    if version != FUSION_SCHEMA_VERSION:
        raise FormatError(
            f"unsupported fusion schema version {version!r}; this build reads version {FUSION_SCHEMA_VERSION}"
        )
    try:
        return FusionModel(
            np.asarray(doc["w"], dtype=np.float64),
            float(doc["b"]),
            fairness_weight=float(doc["fairness_weight"]),
            delta=float(doc["delta"]),
            metadata=dict(doc.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed fusion payload: {exc}") from exc
