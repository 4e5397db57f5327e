"""Audio front end: resampling, MFCC frames, and clip-level pooling.

A synthetic 1 kHz tone stands in for speech. The interesting part is the
shape bookkeeping: a 1 s clip at 16 kHz becomes 98 frames of 13
coefficients, and pooling (means + stds of coefficients and their
deltas) collapses those to a single 52-dimensional vector.
"""

import numpy as np

from moodspring import AudioClip, MfccConfig, compute_mfcc, pool, resample
from moodspring.dsp import filter_centers_hz, mel_energies

rate = 8000
t = np.arange(rate) / rate
clip = AudioClip(0.5 * np.sin(2 * np.pi * 1000.0 * t), rate)
print(f"source clip: {clip.samples.size} samples @ {clip.sample_rate} Hz")

clip16 = resample(clip, 16000)
print(f"resampled:   {clip16.samples.size} samples @ {clip16.sample_rate} Hz")

cfg = MfccConfig()
frames = compute_mfcc(clip16, cfg)
print(f"mfcc matrix: {frames.shape[0]} frames x {frames.shape[1]} coefficients")

energies = mel_energies(clip16, cfg)
centers = filter_centers_hz(cfg.n_mels, clip16.sample_rate)
peak = int(np.argmax(energies[0]))
print(f"first frame peaks in mel filter {peak} (center {centers[peak]:.0f} Hz) for a 1000 Hz tone")

features = pool(frames)
print(f"pooled feature vector: dim={features.dim}, kind={features.kind}")
print("first five values:", np.round(features.values[:5], 3))
