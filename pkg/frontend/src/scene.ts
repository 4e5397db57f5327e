// Stylized 2D season scene. Deliberately simple: flat shapes on a
// canvas, one palette pair (idealized / storm) per season, scene opacity
// from brightness, motion speed from tempo.

import { VisualParameters, Season } from "./view.js";

interface SkyPalette {
    top: string;
    bottom: string;
    ground: string;
    accent: string;
}

const IDEALIZED: Record<Season, SkyPalette> = {
    spring: { top: "#8fd3ff", bottom: "#eafff2", ground: "#7ccf74", accent: "#ff9ad5" },
    summer: { top: "#3f9fff", bottom: "#fff4c2", ground: "#58b356", accent: "#ffd94d" },
    autumn: { top: "#ffb36b", bottom: "#ffe8c9", ground: "#c98a3d", accent: "#e25822" },
    winter: { top: "#bcd8f0", bottom: "#ffffff", ground: "#e8f2fb", accent: "#9fc3e8" },
};

const STORM: Record<Season, SkyPalette> = {
    spring: { top: "#4a5a6a", bottom: "#7a8a94", ground: "#3f5a3d", accent: "#2e3d48" },
    summer: { top: "#37414d", bottom: "#6e6a58", ground: "#3d4f3a", accent: "#f5e34d" },
    autumn: { top: "#503f33", bottom: "#80685a", ground: "#5a4426", accent: "#33281f" },
    winter: { top: "#2e3642", bottom: "#5d6876", ground: "#aebecd", accent: "#cfd9e4" },
};

export class SceneRenderer {
    private drift = 0; // cloud/particle travel, advanced by speed * dt
    private lastTime: number | null = null;
    private readonly particles: { x: number; y: number; jitter: number }[] = [];

    constructor(private readonly canvas: HTMLCanvasElement) {
        for (let i = 0; i < 90; i++) {
            this.particles.push({ x: Math.random(), y: Math.random(), jitter: Math.random() });
        }
    }

    /** Draw one animation frame; timeMs is the rAF clock. */
    render(params: VisualParameters | null, timeMs: number): void {
        const ctx = this.canvas.getContext("2d");
        if (!ctx) return;
        const { width, height } = this.canvas;
        ctx.clearRect(0, 0, width, height);
        if (!params) {
            ctx.fillStyle = "#10141a";
            ctx.fillRect(0, 0, width, height);
            return;
        }
        const dt = this.lastTime === null ? 0 : (timeMs - this.lastTime) / 1000;
        this.lastTime = timeMs;
        // tempo is cycles/minute; scale to a gentle on-screen drift
        this.drift = (this.drift + dt * (0.02 + params.speed * 0.05)) % 1;

        const palette = (params.palette === "idealized" ? IDEALIZED : STORM)[params.season];
        ctx.save();
        ctx.globalAlpha = params.opacity;

        const sky = ctx.createLinearGradient(0, 0, 0, height);
        sky.addColorStop(0, palette.top);
        sky.addColorStop(1, palette.bottom);
        ctx.fillStyle = sky;
        ctx.fillRect(0, 0, width, height);

        this.drawGround(ctx, palette, width, height);
        if (params.palette === "idealized") {
            this.drawSun(ctx, palette, params, width, height);
            if (params.season === "spring") this.drawBlossoms(ctx, palette, width, height);
        } else {
            this.drawStormClouds(ctx, palette, width, height);
            this.drawPrecipitation(ctx, params.season, width, height);
            if (params.season === "summer" && (timeMs / 700) % 8 < 0.25) {
                ctx.fillStyle = "rgba(255, 244, 150, 0.35)"; // lightning flash
                ctx.fillRect(0, 0, width, height);
            }
        }
        this.drawTree(ctx, params, palette, width, height);
        ctx.restore();
    }

    private drawGround(ctx: CanvasRenderingContext2D, palette: SkyPalette, w: number, h: number): void {
        ctx.fillStyle = palette.ground;
        ctx.beginPath();
        ctx.moveTo(0, h * 0.78);
        ctx.quadraticCurveTo(w * 0.5, h * 0.7, w, h * 0.8);
        ctx.lineTo(w, h);
        ctx.lineTo(0, h);
        ctx.closePath();
        ctx.fill();
    }

    private drawSun(
        ctx: CanvasRenderingContext2D,
        palette: SkyPalette,
        params: VisualParameters,
        w: number,
        h: number,
    ): void {
        // the sun tracks progress through the season quadrant
        const x = w * (0.15 + 0.7 * params.seasonProgress);
        const y = h * (0.3 - 0.12 * Math.sin(Math.PI * params.seasonProgress));
        ctx.fillStyle = palette.accent;
        ctx.beginPath();
        ctx.arc(x, y, h * 0.07, 0, 2 * Math.PI);
        ctx.fill();
        for (const cloud of [0.25, 0.6, 0.85]) {
            const cx = ((cloud + this.drift) % 1.2) * w;
            ctx.fillStyle = "rgba(255,255,255,0.85)";
            ctx.beginPath();
            ctx.ellipse(cx, h * (0.18 + 0.1 * cloud), w * 0.08, h * 0.03, 0, 0, 2 * Math.PI);
            ctx.fill();
        }
    }

    private drawStormClouds(ctx: CanvasRenderingContext2D, palette: SkyPalette, w: number, h: number): void {
        for (let i = 0; i < 5; i++) {
            const cx = (((i * 0.22 + this.drift * 2) % 1.3) - 0.15) * w;
            ctx.fillStyle = i % 2 ? "rgba(30,34,42,0.8)" : "rgba(52,58,70,0.8)";
            ctx.beginPath();
            ctx.ellipse(cx, h * (0.12 + 0.06 * i), w * 0.14, h * 0.05, 0, 0, 2 * Math.PI);
            ctx.fill();
        }
    }

    private drawPrecipitation(ctx: CanvasRenderingContext2D, season: Season, w: number, h: number): void {
        const snow = season === "winter";
        ctx.strokeStyle = "rgba(210, 225, 240, 0.7)";
        ctx.fillStyle = "rgba(255, 255, 255, 0.9)";
        ctx.lineWidth = 1.5;
        for (const particle of this.particles) {
            const fall = (particle.y + this.drift * (snow ? 2 : 6)) % 1;
            const x = ((particle.x + (snow ? Math.sin(fall * 6 + particle.jitter * 7) * 0.02 : 0.01 * particle.jitter)) % 1) * w;
            const y = fall * h * 0.78;
            if (snow) {
                ctx.beginPath();
                ctx.arc(x, y, 2.2, 0, 2 * Math.PI);
                ctx.fill();
            } else {
                ctx.beginPath();
                ctx.moveTo(x, y);
                ctx.lineTo(x - 2, y + 10);
                ctx.stroke();
            }
        }
    }

    private drawBlossoms(ctx: CanvasRenderingContext2D, palette: SkyPalette, w: number, h: number): void {
        ctx.fillStyle = palette.accent;
        for (let i = 0; i < 24; i++) {
            const x = ((i * 0.381 + this.drift * 0.5) % 1) * w;
            const y = h * (0.8 + 0.15 * ((i * 0.618) % 1));
            ctx.beginPath();
            ctx.arc(x, y, 3, 0, 2 * Math.PI);
            ctx.fill();
        }
    }

    private drawTree(
        ctx: CanvasRenderingContext2D,
        params: VisualParameters,
        palette: SkyPalette,
        w: number,
        h: number,
    ): void {
        const baseX = w * 0.78;
        const baseY = h * 0.8;
        ctx.strokeStyle = "#4a3526";
        ctx.lineWidth = 10;
        ctx.beginPath();
        ctx.moveTo(baseX, baseY);
        ctx.lineTo(baseX, baseY - h * 0.18);
        ctx.stroke();
        const crowns: Record<Season, string> = {
            spring: "#9fe08f",
            summer: "#3c8a3a",
            autumn: "#d97a2a",
            winter: "#ffffff",
        };
        ctx.fillStyle = params.palette === "storm" ? palette.accent : crowns[params.season];
        ctx.beginPath();
        ctx.arc(baseX, baseY - h * 0.24, h * 0.1, 0, 2 * Math.PI);
        ctx.arc(baseX - w * 0.04, baseY - h * 0.19, h * 0.07, 0, 2 * Math.PI);
        ctx.arc(baseX + w * 0.04, baseY - h * 0.19, h * 0.07, 0, 2 * Math.PI);
        ctx.fill();
    }
}
