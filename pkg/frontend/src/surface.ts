/**
 * Exploration surface logic: turns raw pointer samples into protocol
 * pointer frames. Pure (no DOM) so the emission rules are testable:
 * frames only while pressed inside the canvas, coordinates normalized
 * to [0,1]^2, timestamps monotone, rate capped at the target maximum.
 * Stopping emission is the whole "pen up" story - the engine's
 * staleness gate does the silencing.
 */

import type { PointerMsg } from "./protocol.js";

export type PointerSample = {
	timeMs: number;
	xPx: number;
	yPx: number;
	widthPx: number;
	heightPx: number;
	down: boolean;
	inside: boolean;
	pressure?: number;
};

export class ExplorationSurface {
	private lastEmitMs = Number.NEGATIVE_INFINITY;
	private lastTimeMs = Number.NEGATIVE_INFINITY;

	constructor(private readonly maxRateHz: number = 120) {}

	sample(s: PointerSample): PointerMsg | null {
		if (!s.down || !s.inside) return null;
		if (s.timeMs <= this.lastTimeMs) return null; // duplicate/garbled event
		const minInterval = 1000 / this.maxRateHz;
		if (s.timeMs - this.lastEmitMs < minInterval) return null;
		if (s.widthPx <= 0 || s.heightPx <= 0) return null;

		this.lastEmitMs = s.timeMs;
		this.lastTimeMs = s.timeMs;
		const clamp = (v: number) => Math.min(1, Math.max(0, v));
		const frame: PointerMsg = {
			type: "pointer",
			t_s: s.timeMs / 1000,
			x: clamp(s.xPx / s.widthPx),
			y: clamp(s.yPx / s.heightPx),
		};
		if (s.pressure !== undefined && s.pressure > 0) {
			frame.pressure = Math.min(1, Math.max(0, s.pressure));
		}
		return frame;
	}

	reset(): void {
		this.lastEmitMs = Number.NEGATIVE_INFINITY;
		this.lastTimeMs = Number.NEGATIVE_INFINITY;
	}
}
