// WebSocket session client with capped-backoff reconnection.
// The socket implementation is injected so tests can pass the `ws`
// package while the browser uses the native WebSocket.

import { audioFrame, configFrame, parseServerFrame, ProtocolError, ServerFrame, textFrame } from "./protocol.js";
import { ConnectionStatus } from "./view.js";

export interface SocketLike {
    send(data: string): void;
    close(): void;
    onopen: ((ev?: unknown) => void) | null;
    onmessage: ((ev: { data: unknown }) => void) | null;
    onclose: ((ev?: unknown) => void) | null;
    onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface EngineClientEvents {
    onFrame?: (frame: ServerFrame) => void;
    onStatus?: (status: ConnectionStatus) => void;
    onProtocolError?: (error: ProtocolError) => void;
}

export interface EngineClientOptions {
    socketFactory?: SocketFactory;
    initialBackoffMs?: number;
    maxBackoffMs?: number;
    reconnect?: boolean;
}

const defaultFactory: SocketFactory = (url) =>
    new (globalThis as { WebSocket: new (url: string) => SocketLike }).WebSocket(url);

export class EngineClient {
    private socket: SocketLike | null = null;
    private backoffMs: number;
    private closed = false;
    private timer: ReturnType<typeof setTimeout> | null = null;

    constructor(
        readonly url: string,
        private readonly events: EngineClientEvents = {},
        private readonly options: EngineClientOptions = {},
    ) {
        this.backoffMs = options.initialBackoffMs ?? 500;
    }

    connect(): void {
        this.closed = false;
        this.open();
    }

    private open(): void {
        this.events.onStatus?.("connecting");
        let socket: SocketLike;
        try {
            socket = (this.options.socketFactory ?? defaultFactory)(this.url);
        } catch {
            this.scheduleReconnect();
            return;
        }
        this.socket = socket;
        socket.onopen = () => {
            this.backoffMs = this.options.initialBackoffMs ?? 500;
            this.events.onStatus?.("connected");
        };
        socket.onmessage = (ev) => {
            try {
                this.events.onFrame?.(parseServerFrame(String(ev.data)));
            } catch (error) {
                if (error instanceof ProtocolError) {
                    // a malformed server frame is surfaced, never fatal
                    this.events.onProtocolError?.(error);
                } else {
                    throw error;
                }
            }
        };
        socket.onclose = () => {
            this.socket = null;
            this.events.onStatus?.("disconnected");
            this.scheduleReconnect();
        };
        socket.onerror = () => {
            // the close handler owns reconnection
        };
    }

    private scheduleReconnect(): void {
        if (this.closed || this.options.reconnect === false || this.timer !== null) return;
        this.timer = setTimeout(() => {
            this.timer = null;
            if (!this.closed) this.open();
        }, this.backoffMs);
        this.backoffMs = Math.min(this.backoffMs * 2, this.options.maxBackoffMs ?? 10_000);
    }

    close(): void {
        this.closed = true;
        if (this.timer !== null) {
            clearTimeout(this.timer);
            this.timer = null;
        }
        this.socket?.close();
        this.socket = null;
    }

    get connected(): boolean {
        return this.socket !== null;
    }

    sendText(text: string): boolean {
        return this.sendRaw(textFrame(text));
    }

    sendAudio(rate: number, pcm: Int16Array): boolean {
        return this.sendRaw(audioFrame(rate, pcm));
    }

    sendConfig(settings: Record<string, unknown>): boolean {
        return this.sendRaw(configFrame(settings));
    }

    private sendRaw(payload: string): boolean {
        if (this.socket === null) return false;
        try {
            this.socket.send(payload);
            return true;
        } catch {
            return false;
        }
    }
}
