// Page wiring: connect to the engine, forward typed text and microphone
// audio, render every control signal.

import { MicCapture } from "./audio.js";
import { EngineClient } from "./client.js";
import { ControlFrame } from "./protocol.js";
import { SceneRenderer } from "./scene.js";
import { drawSparkline } from "./sparkline.js";
import { ViewState, VisualParameters, visualParameters } from "./view.js";

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
}

const scene = new SceneRenderer(el<HTMLCanvasElement>("scene"));
const sparkline = el<HTMLCanvasElement>("sparkline");
const statusBadge = el<HTMLSpanElement>("status");
const noticeLine = el<HTMLDivElement>("notice");
const readout = el<HTMLDivElement>("readout");
const textInput = el<HTMLInputElement>("text-input");
const micButton = el<HTMLButtonElement>("mic-button");

const view = new ViewState();
let visual: VisualParameters | null = null;

const defaultUrl = `ws://${location.hostname || "127.0.0.1"}:8765/session`;
const url = new URLSearchParams(location.search).get("engine") ?? defaultUrl;

const client = new EngineClient(url, {
    onFrame: (frame) => {
        if (frame.type === "control") {
            visual = view.apply(frame);
            updateReadout(frame);
            drawSparkline(sparkline, view.history);
        } else {
            notify(`${frame.type}: ${frame.code} ${frame.message}`);
        }
    },
    onStatus: (status) => {
        view.status = status;
        statusBadge.textContent = status;
        statusBadge.className = `badge ${status}`;
    },
    onProtocolError: (error) => notify(`malformed server frame: ${error.message}`),
});
client.connect();

function notify(message: string): void {
    noticeLine.textContent = message;
    noticeLine.classList.add("visible");
    setTimeout(() => noticeLine.classList.remove("visible"), 4000);
}

function updateReadout(signal: ControlFrame): void {
    const v = visualParameters(signal);
    readout.textContent =
        `${v.palette === "idealized" ? "idealized" : "stormy"} ${v.season}` +
        ` · p ${signal.p_smoothed.toFixed(3)} · confidence ${signal.confidence.toFixed(2)}` +
        ` · tempo ${signal.tempo.toFixed(2)} · brightness ${signal.brightness.toFixed(2)}`;
}

textInput.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && textInput.value.trim()) {
        if (!client.sendText(textInput.value.trim())) notify("not connected yet");
        textInput.value = "";
    }
});

const mic = new MicCapture();
micButton.addEventListener("click", async () => {
    if (mic.active) {
        mic.stop();
        micButton.textContent = "start mic";
        return;
    }
    try {
        await mic.start((pcm, rate) => client.sendAudio(rate, pcm));
        micButton.textContent = "stop mic";
    } catch {
        notify("microphone unavailable or denied; staying in text-only mode");
    }
});

function frame(timeMs: number): void {
    scene.render(visual, timeMs);
    requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
