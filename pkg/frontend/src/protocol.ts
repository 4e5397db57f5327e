// Wire protocol of the engine's /session WebSocket endpoint.
// Every frame in both directions is a flat JSON object with a "type".

export interface ControlFrame {
    type: "control";
    valence: "pleasant" | "unpleasant";
    p_smoothed: number;
    confidence: number;
    tempo: number;
    brightness: number;
    season_phase: number;
    seq: number;
    timestamp: number;
}

export interface WarningFrame {
    type: "warning";
    code: string;
    message: string;
}

export interface ErrorFrame {
    type: "error";
    code: string;
    message: string;
}

export type ServerFrame = ControlFrame | WarningFrame | ErrorFrame;

export class ProtocolError extends Error {}

function isFiniteNumber(v: unknown): v is number {
    return typeof v === "number" && Number.isFinite(v);
}

function inUnit(v: unknown): v is number {
    return isFiniteNumber(v) && v >= 0 && v <= 1;
}

/** Strict validation of one server frame; throws ProtocolError on anything off-schema. */
export function parseServerFrame(raw: string): ServerFrame {
    let obj: unknown;
    try {
        obj = JSON.parse(raw);
    } catch {
        throw new ProtocolError(`server frame is not JSON: ${raw.slice(0, 80)}`);
    }
    if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
        throw new ProtocolError("server frame must be a JSON object");
    }
    const frame = obj as Record<string, unknown>;
    switch (frame.type) {
        case "control":
            return validateControl(frame);
        case "warning":
        case "error":
            if (typeof frame.code !== "string" || typeof frame.message !== "string") {
                throw new ProtocolError(`${frame.type} frame needs string code and message`);
            }
            return frame as unknown as WarningFrame | ErrorFrame;
        default:
            throw new ProtocolError(`unknown server frame type ${String(frame.type)}`);
    }
}

function validateControl(frame: Record<string, unknown>): ControlFrame {
    if (frame.valence !== "pleasant" && frame.valence !== "unpleasant") {
        throw new ProtocolError(`bad valence ${String(frame.valence)}`);
    }
    if (!inUnit(frame.p_smoothed)) throw new ProtocolError("p_smoothed must lie in [0,1]");
    if (!inUnit(frame.confidence)) throw new ProtocolError("confidence must lie in [0,1]");
    if (!isFiniteNumber(frame.brightness) || frame.brightness < 0 || frame.brightness > 1) {
        throw new ProtocolError("brightness must lie in [0,1]");
    }
    if (!isFiniteNumber(frame.tempo) || frame.tempo < 0) throw new ProtocolError("tempo must be >= 0");
    if (!isFiniteNumber(frame.season_phase) || frame.season_phase < 0 || frame.season_phase >= 1) {
        throw new ProtocolError("season_phase must lie in [0,1)");
    }
    if (!Number.isInteger(frame.seq) || (frame.seq as number) < 0) {
        throw new ProtocolError("seq must be a non-negative integer");
    }
    if (!isFiniteNumber(frame.timestamp)) throw new ProtocolError("timestamp must be a number");
    return frame as unknown as ControlFrame;
}

// -- client -> server frames ------------------------------------------------

export function textFrame(text: string): string {
    return JSON.stringify({ type: "text", text });
}

export function audioFrame(rate: number, pcm: Int16Array): string {
    return JSON.stringify({ type: "audio", rate, pcm16_b64: pcm16ToBase64(pcm) });
}

export function configFrame(settings: Record<string, unknown>): string {
    return JSON.stringify({ type: "config", ...settings });
}

const B64 = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

/** Little-endian PCM-16 bytes to base64 (no runtime btoa dependency). */
export function pcm16ToBase64(pcm: Int16Array): string {
    const bytes = new Uint8Array(pcm.length * 2);
    for (let i = 0; i < pcm.length; i++) {
        bytes[2 * i] = pcm[i] & 0xff;
        bytes[2 * i + 1] = (pcm[i] >> 8) & 0xff;
    }
    let out = "";
    for (let i = 0; i < bytes.length; i += 3) {
        const b0 = bytes[i];
        const b1 = i + 1 < bytes.length ? bytes[i + 1] : 0;
        const b2 = i + 2 < bytes.length ? bytes[i + 2] : 0;
        const triple = (b0 << 16) | (b1 << 8) | b2;
        out += B64[(triple >> 18) & 63];
        out += B64[(triple >> 12) & 63];
        out += i + 1 < bytes.length ? B64[(triple >> 6) & 63] : "=";
        out += i + 2 < bytes.length ? B64[triple & 63] : "=";
    }
    return out;
}
