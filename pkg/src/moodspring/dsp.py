"""Audio resampling and clip-level MFCC feature extraction.

The audio front end turns a mono PCM clip into a single fixed-length
feature vector: frame the signal, take mel-filterbank log energies per
frame, decorrelate with a DCT, then pool the per-frame coefficients
(plus their first-order deltas) into per-dimension mean and standard
deviation. Everything here is a pure function on immutable inputs.
"""

from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from .errors import InvalidInput, TooShort

#: feature vector provenance tags understood by the rest of the pipeline
FEATURE_KINDS = ("mfcc-pooled", "tfidf", "external-embedding")


@dataclass(frozen=True)
class AudioClip:
    """Decoded mono PCM: float samples in [-1, 1] at a fixed sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidInput("audio samples must be a 1-D array")
        if samples.size and not np.isfinite(samples).all():
            raise InvalidInput("audio samples must be finite")
        if int(self.sample_rate) <= 0:
            raise InvalidInput(f"sample rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class FeatureVector:
    """Fixed-length real vector with a provenance tag."""

    values: np.ndarray
    kind: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise InvalidInput("feature vector must be 1-D and non-empty")
        if not np.isfinite(values).all():
            raise InvalidInput("feature vector must be finite")
        if self.kind not in FEATURE_KINDS:
            raise InvalidInput(f"unknown feature kind {self.kind!r}")
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class MfccConfig:
    """MFCC analysis parameters (defaults assume a 16 kHz pipeline rate).

    frame_len/hop are in samples: 400/160 at 16 kHz give the usual
    25 ms windows with 10 ms steps. fmax=None means sample_rate/2.
    """

    frame_len: int = 400
    hop: int = 160
    n_fft: int = 512
    n_mels: int = 26
    n_mfcc: int = 13
    pre_emphasis: float = 0.97
    fmin: float = 0.0
    fmax: float | None = None
    log_floor: float = 1e-10

    def validate(self, sample_rate: int) -> None:
        if not (0 < self.hop <= self.frame_len <= self.n_fft):
            raise InvalidInput(
                f"need 0 < hop <= frame_len <= n_fft, got {self.hop}/{self.frame_len}/{self.n_fft}"
            )
        if not (0 < self.n_mfcc <= self.n_mels):
            raise InvalidInput(f"need 0 < n_mfcc <= n_mels, got {self.n_mfcc}/{self.n_mels}")
        if self.fmin >= self.effective_fmax(sample_rate):
            raise InvalidInput("fmin must be below fmax")
        if self.log_floor <= 0:
            raise InvalidInput("log floor must be positive")

    def effective_fmax(self, sample_rate: int) -> float:
        return sample_rate / 2 if self.fmax is None else self.fmax


def resample(clip: AudioClip, dst_rate: int) -> AudioClip:
    """Linear-interpolation resample to dst_rate.

    Output length is round(len * dst_rate / src_rate); a clip already at
    dst_rate is returned with identical samples.
    """
    if clip.samples.size == 0:
        raise InvalidInput("cannot resample an empty clip")
    if dst_rate <= 0:
        raise InvalidInput(f"destination rate must be positive, got {dst_rate}")
    if dst_rate == clip.sample_rate:
        return clip
    n_src = clip.samples.size
    n_dst = int(round(n_src * dst_rate / clip.sample_rate))
    # sample instants of the output grid, expressed in source index units
    positions = np.arange(n_dst) * (clip.sample_rate / dst_rate)
    out = np.interp(positions, np.arange(n_src), clip.samples)
    return AudioClip(out, dst_rate)


def frame_count(n_samples: int, frame_len: int, hop: int) -> int:
    """Number of full analysis frames; the trailing partial frame is dropped."""
    if n_samples < frame_len:
        return 0
    return 1 + (n_samples - frame_len) // hop


def hz_to_mel(freq_hz):
    return 2595.0 * np.log10(1.0 + np.asarray(freq_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int,
                   fmin: float = 0.0, fmax: float | None = None) -> np.ndarray:
    """Triangular filterbank, (n_mels, n_fft//2 + 1).

    Filter edges are spaced uniformly on the mel scale; each triangle is
    linear in Hz between its edges, so a pure tone loads most heavily on
    the filter whose center frequency (in Hz) it sits closest to.
    """
    if fmax is None:
        fmax = sample_rate / 2
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    freqs = np.arange(n_fft // 2 + 1) * (sample_rate / n_fft)
    bank = np.zeros((n_mels, freqs.size))
    for i in range(n_mels):
        lo, center, hi = edges[i], edges[i + 1], edges[i + 2]
        rising = (freqs - lo) / (center - lo)
        falling = (hi - freqs) / (hi - center)
        bank[i] = np.maximum(0.0, np.minimum(rising, falling))
    return bank


def filter_centers_hz(n_mels: int, sample_rate: int,
                      fmin: float = 0.0, fmax: float | None = None) -> np.ndarray:
    """Center frequency (Hz) of each filterbank triangle."""
    if fmax is None:
        fmax = sample_rate / 2
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    return edges[1:-1]


def mel_energies(clip: AudioClip, cfg: MfccConfig | None = None) -> np.ndarray:
    """Per-frame mel filterbank magnitudes, (T, n_mels), before the log.

    Pipeline: pre-emphasis y[t] = x[t] - coef*x[t-1] (y[0] = x[0]),
    Hamming-windowed frames of frame_len every hop samples, magnitude
    FFT zero-padded to n_fft, triangular mel filterbank.
    """
    cfg = cfg or MfccConfig()
    cfg.validate(clip.sample_rate)
    x = clip.samples
    if x.size == 0:
        raise InvalidInput("cannot analyze an empty clip")
    if x.size < cfg.frame_len:
        raise TooShort(f"clip of {x.size} samples is shorter than one {cfg.frame_len}-sample frame")

    emphasized = np.empty_like(x)
    emphasized[0] = x[0]
    emphasized[1:] = x[1:] - cfg.pre_emphasis * x[:-1]

    n_frames = frame_count(x.size, cfg.frame_len, cfg.hop)
    index = cfg.hop * np.arange(n_frames)[:, None] + np.arange(cfg.frame_len)[None, :]
    frames = emphasized[index] * np.hamming(cfg.frame_len)

    magnitudes = np.abs(np.fft.rfft(frames, n=cfg.n_fft, axis=1))
    bank = mel_filterbank(cfg.n_mels, cfg.n_fft, clip.sample_rate,
                          cfg.fmin, cfg.effective_fmax(clip.sample_rate))
    return magnitudes @ bank.T


def compute_mfcc(clip: AudioClip, cfg: MfccConfig | None = None) -> np.ndarray:
    """MFCC matrix of shape (T, n_mfcc), T = 1 + (len - frame_len) // hop.

    Log of the mel energies (floored at cfg.log_floor so silence stays
    finite), then an orthonormal type-II DCT per frame, keeping the
    first n_mfcc coefficients.
    """
    cfg = cfg or MfccConfig()
    energies = mel_energies(clip, cfg)
    log_energies = np.log(np.maximum(energies, cfg.log_floor))
    return dct(log_energies, type=2, norm="ortho", axis=1)[:, : cfg.n_mfcc]


def pool(frames: np.ndarray, include_deltas: bool = True) -> FeatureVector:
    """Pool a (T, n_mfcc) matrix into one clip-level feature vector.

    Layout: [mean, std] per coefficient column, followed by [mean, std]
    of the first-order deltas (delta[0] = 0) when include_deltas is set.
    Standard deviations are population (divide by T). Result dim is
    4*n_mfcc with deltas, 2*n_mfcc without.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim == 1:
        frames = frames[None, :]
    if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
        raise InvalidInput("pool needs a non-empty (T, n_mfcc) matrix")
    parts = [frames.mean(axis=0), frames.std(axis=0)]
    if include_deltas:
        deltas = np.diff(frames, axis=0, prepend=frames[:1])
        parts += [deltas.mean(axis=0), deltas.std(axis=0)]
    return FeatureVector(np.concatenate(parts), kind="mfcc-pooled")


def audio_features(clip: AudioClip, cfg: MfccConfig | None = None) -> FeatureVector:
    """Convenience: compute_mfcc then pool."""
    return pool(compute_mfcc(clip, cfg))
