/**
 * UI state: a plain snapshot updated from engine replies. The server is
 * the source of truth - the displayed alpha is the last acknowledged
 * value, and a diagnostics reply refreshes everything (which is what
 * makes reconnection stateless).
 */

import type { EngineReply } from "./protocol.js";

export type ConnectionState = "disconnected" | "connecting" | "connected";

export type UiState = {
	connection: ConnectionState;
	alpha: number;
	material: string;
	audioOn: boolean;
	tactileOn: boolean;
	peakAudio: number;
	peakTactile: number;
	velocity: number;
	gate: string;
	underruns: number;
	blockIndex: number;
	statusLine: string;
};

export function initialState(): UiState {
	return {
		connection: "disconnected",
		alpha: 0,
		material: "",
		audioOn: true,
		tactileOn: true,
		peakAudio: 0,
		peakTactile: 0,
		velocity: 0,
		gate: "silent",
		underruns: 0,
		blockIndex: 0,
		statusLine: "",
	};
}

export function applyReply(state: UiState, reply: EngineReply): UiState {
	switch (reply.type) {
		case "ack": {
			const next = { ...state };
			if (reply.of === "set_alpha" && typeof reply.alpha === "number") {
				next.alpha = reply.alpha;
				next.statusLine = reply.saturated
					? `alpha clamped to ${reply.alpha}`
					: state.statusLine;
			}
			if (reply.of === "set_material" && typeof reply.name === "string") {
				next.material = reply.name;
			}
			if (reply.of === "set_modality") {
				if (typeof reply.audio_on === "boolean") next.audioOn = reply.audio_on;
				if (typeof reply.tactile_on === "boolean")
					next.tactileOn = reply.tactile_on;
			}
			return next;
		}
		case "error":
			return { ...state, statusLine: `engine error: ${reply.reason}` };
		case "diagnostics":
			return {
				...state,
				alpha: reply.alpha,
				material: reply.material,
				audioOn: reply.audio_on,
				tactileOn: reply.tactile_on,
				peakAudio: reply.peak_audio,
				peakTactile: reply.peak_tactile,
				velocity: reply.velocity_norm,
				gate: reply.gate,
				underruns: reply.underruns,
				blockIndex: reply.block_index,
			};
	}
}
