// Microphone capture: Float32 chunks from the audio graph are linearly
// resampled to the engine rate and quantized to PCM-16. The math lives
// in pure functions; only MicCapture touches browser APIs.

export const ENGINE_RATE = 16000;

/** Linear-interpolation resample; output length is round(n * dst / src). */
export function downsampleTo(samples: Float32Array, srcRate: number, dstRate = ENGINE_RATE): Float32Array {
    if (srcRate <= 0 || dstRate <= 0) throw new Error("rates must be positive");
    if (srcRate === dstRate) return samples.slice();
    const outLength = Math.round((samples.length * dstRate) / srcRate);
    const out = new Float32Array(outLength);
    const step = srcRate / dstRate;
    for (let i = 0; i < outLength; i++) {
        const position = i * step;
        const left = Math.floor(position);
        const right = Math.min(left + 1, samples.length - 1);
        const frac = position - left;
        out[i] = samples[left] * (1 - frac) + samples[right] * frac;
    }
    return out;
}

/** Clamp to [-1, 1] and quantize, matching the engine's WAV writer. */
export function floatToPcm16(samples: Float32Array): Int16Array {
    const out = new Int16Array(samples.length);
    for (let i = 0; i < samples.length; i++) {
        const clamped = Math.max(-1, Math.min(1, samples[i]));
        out[i] = Math.max(-32768, Math.min(32767, Math.round(clamped * 32767)));
    }
    return out;
}

export type ChunkHandler = (pcm: Int16Array, rate: number) => void;

/** getUserMedia capture; chunks are delivered in order. Permission
 * denial rejects start() and the page falls back to text-only mode. */
export class MicCapture {
    private context: AudioContext | null = null;
    private stream: MediaStream | null = null;
    private node: ScriptProcessorNode | null = null;

    get active(): boolean {
        return this.context !== null;
    }

    async start(onChunk: ChunkHandler): Promise<void> {
        if (this.active) return;
        this.stream = await navigator.mediaDevices.getUserMedia({ audio: true });
        this.context = new AudioContext();
        const source = this.context.createMediaStreamSource(this.stream);
        // 4096-sample buffers ~ 93 ms at 44.1 kHz; fine for a 1 s hop
        this.node = this.context.createScriptProcessor(4096, 1, 1);
        const srcRate = this.context.sampleRate;
        this.node.onaudioprocess = (event) => {
            const chunk = downsampleTo(event.inputBuffer.getChannelData(0), srcRate);
            onChunk(floatToPcm16(chunk), ENGINE_RATE);
        };
        source.connect(this.node);
        this.node.connect(this.context.destination);
    }

    stop(): void {
        this.node?.disconnect();
        this.stream?.getTracks().forEach((track) => track.stop());
        void this.context?.close();
        this.node = null;
        this.stream = null;
        this.context = null;
    }
}
