// Pure mapping from control signals to visual parameters, plus the tiny
// bit of state the page keeps (latest signal, history, connection).

import { ControlFrame } from "./protocol.js";

export const SEASONS = ["spring", "summer", "autumn", "winter"] as const;
export type Season = (typeof SEASONS)[number];
export type Palette = "idealized" | "storm";

export interface VisualParameters {
    season: Season;
    palette: Palette;
    opacity: number; // scene opacity, straight from brightness
    speed: number; // animation speed, straight from tempo (cycles/minute)
    seasonProgress: number; // 0..1 position inside the current season quadrant
}

/** The render rule: four equal season quadrants of the phase circle,
 * idealized palette when pleasant, the same season's storm palette when
 * not; brightness scales opacity and tempo scales animation speed. */
export function visualParameters(signal: ControlFrame): VisualParameters {
    const quadrant = Math.min(3, Math.floor(signal.season_phase * 4));
    return {
        season: SEASONS[quadrant],
        palette: signal.valence === "pleasant" ? "idealized" : "storm",
        opacity: signal.brightness,
        speed: signal.tempo,
        seasonProgress: signal.season_phase * 4 - quadrant,
    };
}

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export class ViewState {
    latest: ControlFrame | null = null;
    history: ControlFrame[] = [];
    status: ConnectionStatus = "disconnected";
    notice = "";

    constructor(readonly historyLimit = 120) {}

    apply(signal: ControlFrame): VisualParameters {
        this.latest = signal;
        this.history.push(signal);
        if (this.history.length > this.historyLimit) {
            this.history.splice(0, this.history.length - this.historyLimit);
        }
        return visualParameters(signal);
    }
}
