// Round-trip against a live engine: typed pleasant text must advance an
// idealized season within two ticks. The engine is the real served
// process, loaded with the bundled stub models.

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { EngineClient } from "../src/client.js";
import { ControlFrame, ServerFrame } from "../src/protocol.js";
import { visualParameters } from "../src/view.js";

const PYTHON = process.env.MOODSPRING_PYTHON ?? "python3";
const REPO_ROOT = fileURLToPath(new URL("../..", import.meta.url));

let server: ChildProcess | null = null;
let modelsDir = "";
let port = 0;

beforeAll(async () => {
    modelsDir = mkdtempSync(join(tmpdir(), "moodspring-models-"));
    execFileSync(
        PYTHON,
        ["-c", `from moodspring.demo_assets import write_demo_model_set; write_demo_model_set(${JSON.stringify(modelsDir)})`],
        { cwd: REPO_ROOT, stdio: "pipe" },
    );
    port = 18000 + Math.floor(Math.random() * 2000);
    server = spawn(
        PYTHON,
        ["-m", "moodspring.service.cli", "serve", "--models", modelsDir, "--port", String(port)],
        { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
    );
    await new Promise<void>((resolve, reject) => {
        const timer = setTimeout(() => reject(new Error("engine did not start in time")), 30_000);
        let banner = "";
        server!.stdout!.on("data", (chunk: Buffer) => {
            banner += chunk.toString();
            if (banner.includes("listening")) {
                clearTimeout(timer);
                resolve();
            }
        });
        let stderr = "";
        server!.stderr!.on("data", (chunk: Buffer) => {
            stderr += chunk.toString();
        });
        server!.on("exit", (code) => {
            clearTimeout(timer);
            reject(new Error(`engine exited early (${code}): ${stderr}`));
        });
    });
}, 60_000);

afterAll(() => {
    server?.kill();
    if (modelsDir) rmSync(modelsDir, { recursive: true, force: true });
});

describe("live round trip", () => {
    it("pleasant text advances an idealized season within 2 ticks", async () => {
        const controls: ControlFrame[] = [];
        let resolveEnough: (() => void) | null = null;
        const enough = new Promise<void>((resolve, reject) => {
            resolveEnough = resolve;
            setTimeout(() => reject(new Error(`only ${controls.length} control frames arrived`)), 20_000);
        });
        const client = new EngineClient(
            `ws://127.0.0.1:${port}/session`,
            {
                onFrame: (frame: ServerFrame) => {
                    if (frame.type === "control") {
                        controls.push(frame);
                        if (controls.length >= 2) resolveEnough?.();
                    }
                },
                onStatus: (status) => {
                    if (status === "connected") {
                        client.sendText("what a lovely sunny day");
                        client.sendText("i love this wonderful weather");
                    }
                },
                onProtocolError: (error) => {
                    throw error;
                },
            },
            {
                socketFactory: (url) => new WebSocket(url) as never,
                initialBackoffMs: 200,
                maxBackoffMs: 1000,
            },
        );
        client.connect();
        await enough;
        client.close();

        const [first, second] = controls.slice(0, 2).map((c) => ({ signal: c, visual: visualParameters(c) }));
        // within two ticks the scene is an idealized (pleasant) season...
        expect(second.visual.palette).toBe("idealized");
        expect([first.visual.palette, second.visual.palette]).toContain("idealized");
        // ...and the season phase has advanced, twice
        expect(first.signal.season_phase).toBeGreaterThan(0);
        expect(second.signal.season_phase).toBeGreaterThan(first.signal.season_phase);
        expect(second.signal.seq).toBe(first.signal.seq + 1);
    }, 40_000);

    it("malformed client frames get error frames, session survives", async () => {
        const received: ServerFrame[] = [];
        let done: (() => void) | null = null;
        const client = new EngineClient(
            `ws://127.0.0.1:${port}/session`,
            {
                onFrame: (frame) => {
                    received.push(frame);
                    if (received.length >= 2) done?.();
                },
                onStatus: (status) => {
                    if (status === "connected") {
                        (client as unknown as { socket: { send(d: string): void } })["socket"].send("broken {");
                        client.sendText("still here");
                    }
                },
            },
            { socketFactory: (url) => new WebSocket(url) as never, reconnect: false },
        );
        client.connect();
        await new Promise<void>((resolve, reject) => {
            done = resolve;
            setTimeout(() => reject(new Error("frames did not arrive")), 20_000);
        });
        client.close();
        expect(received[0]).toMatchObject({ type: "error", code: "bad_json" });
        expect(received[1].type).toBe("control");
    }, 40_000);
});
