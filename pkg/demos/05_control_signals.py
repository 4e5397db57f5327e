"""From fused probabilities to animation control.

A scripted conversation swings from neutral to pleasant to hostile; the
EMA smooths the per-tick probabilities, entropy-confidence drives
brightness, and the season phase advances at a tempo set by the winning
side's probability mass.
"""

from moodspring import ControlConfig, make_control, step

cfg = ControlConfig(ema_alpha=0.3, base_tempo=8.0)  # fast seasons for the demo

scripted = [0.5, 0.65, 0.8, 0.9, 0.95, 0.9, 0.6, 0.3, 0.1, 0.05, 0.05, 0.4, 0.7]

print(f"{'tick':>4s} {'raw p':>6s} {'smooth':>7s} {'valence':>10s} {'conf':>6s} {'bright':>7s} {'tempo':>6s} {'phase':>6s}")
smoothed = 0.5
signal = None
for tick, raw in enumerate(scripted):
    smoothed = step(smoothed, raw, cfg)
    signal = make_control(smoothed, cfg, prev=signal)
    print(
        f"{tick:4d} {raw:6.2f} {signal.p_smoothed:7.3f} {signal.valence:>10s} "
        f"{signal.confidence:6.3f} {signal.brightness:7.3f} {signal.tempo:6.2f} {signal.season_phase:6.3f}"
    )

print("\nnote the valence flips lag the raw swings (EMA), brightness dips to its")
print("0.3 floor whenever the engine is unsure, and the phase keeps advancing")
print("even in unpleasant weather: storms have tempo too.")
