"""Fairness-aware decision fusion on the complementary-experts benchmark.

Two classifiers, two demographic groups: each classifier is reliable on
one group and pure noise on the other, and group A outnumbers group B
four to one. Plain cross-entropy fusion happily rides the majority
expert and leaves group B near chance. The same layer trained with the
Bernstein-style fairness penalty spends a little overall accuracy to
serve both groups equally, and the certified disparity band shows it.
"""

import numpy as np
from scipy.special import expit

from moodspring import complementary_experts_dataset, train_fusion
from moodspring.service.pipeline import evaluate_decisions

rows = complementary_experts_dataset(seed=0)
p = np.vstack([r.p for r in rows])
labels = np.array([r.label for r in rows])
groups = np.array([r.group for r in rows])
print(f"{len(rows)} rows: {int((groups == 'A').sum())} in group A, {int((groups == 'B').sum())} in group B")

plain = train_fusion(rows, fairness_weight=0.0, lr=0.5, epochs=600, seed=0)
fair = train_fusion(rows, fairness_weight=10.0, lr=0.5, epochs=600, seed=0)
print(f"plain weights  w={np.round(plain.w, 2)} b={plain.b:+.2f}")
print(f"fair weights   w={np.round(fair.w, 2)} b={fair.b:+.2f}")

report = evaluate_decisions(
    p, labels, groups,
    {"plain": plain, "fair": fair},
    classifier_names=["expert-A", "expert-B"],
)

print(f"\n{'decision source':22s} {'acc':>6s} {'acc A':>6s} {'acc B':>6s} {'gap':>6s} {'certified ≤':>12s}")
for name, entry in report["sources"].items():
    d = entry["disparity"]
    print(
        f"{name:22s} {entry['accuracy']:6.3f} {entry['group_accuracy']['A']:6.3f} "
        f"{entry['group_accuracy']['B']:6.3f} {d['point']:6.3f} {d['upper']:12.3f}"
    )

print("\nthe fairness-trained row keeps overall accuracy close to the plain")
print("fusion while shrinking the group gap (and its certified upper bound)")
print("by an order of magnitude.")
