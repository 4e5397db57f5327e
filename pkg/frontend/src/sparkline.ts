// Tiny sparkline of the recent smoothed probability, colored by valence.

import { ControlFrame } from "./protocol.js";

export function drawSparkline(canvas: HTMLCanvasElement, history: ControlFrame[]): void {
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "rgba(255,255,255,0.06)";
    ctx.fillRect(0, 0, width, height);
    ctx.strokeStyle = "rgba(255,255,255,0.25)";
    ctx.beginPath();
    ctx.moveTo(0, height / 2);
    ctx.lineTo(width, height / 2);
    ctx.stroke();
    if (history.length < 2) return;
    const step = width / (history.length - 1);
    for (let i = 1; i < history.length; i++) {
        const a = history[i - 1];
        const b = history[i];
        ctx.strokeStyle = b.valence === "pleasant" ? "#7ccf74" : "#e25822";
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo((i - 1) * step, height * (1 - a.p_smoothed));
        ctx.lineTo(i * step, height * (1 - b.p_smoothed));
        ctx.stroke();
    }
}
