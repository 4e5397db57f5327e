"""The four lightweight classifier kinds on one toy problem.

Two well-separated Gaussian blobs labeled with emotions; every kind
trains on the same data, emits calibrated distributions, and survives a
save/load round trip byte-for-byte.
"""

import numpy as np

from moodspring import load, predict_proba, save, train

rng = np.random.default_rng(0)
happy = rng.normal(loc=(+2.0, +1.0), scale=0.6, size=(30, 2))
sad = rng.normal(loc=(-2.0, -1.0), scale=0.6, size=(30, 2))
features = np.vstack([happy, sad])
labels = ["happy"] * 30 + ["sad"] * 30

query = np.array([1.5, 0.5])
print(f"query point {query} (drawn from the happy side)\n")

for kind in ("gaussian-nb", "multinomial-nb", "knn", "linear-svm"):
    x = np.abs(features) if kind == "multinomial-nb" else features
    model = train(kind, list(x), labels, seed=0)
    q = np.abs(query) if kind == "multinomial-nb" else query
    probs = predict_proba(model, q)
    restored = load(save(model))
    same = bool(np.array_equal(probs, predict_proba(restored, q)))
    dist = ", ".join(f"p({c})={p:.3f}" for c, p in zip(model.classes, probs))
    print(f"{kind:15s} {dist}   round-trip identical: {same}")

print("\nartifacts are versioned JSON; here is the start of one:")
print(save(train("gaussian-nb", list(features), labels))[:120].decode(), "...")
