import { describe, expect, it } from "vitest";

import { applyReply, initialState } from "../src/state.js";
import type { DiagnosticsReply } from "../src/protocol.js";

const diagnostics: DiagnosticsReply = {
	type: "diagnostics",
	alpha: 0.4,
	velocity_norm: 1.7,
	gate: "open",
	material: "metal",
	audio_on: true,
	tactile_on: false,
	underruns: 2,
	peak_audio: 0.3,
	peak_tactile: 0.1,
	block_index: 99,
	dropped_frames: 0,
};

describe("applyReply", () => {
	it("an alpha ack becomes the displayed alpha", () => {
		const next = applyReply(initialState(),
			{ type: "ack", of: "set_alpha", alpha: 0.8, saturated: false });
		expect(next.alpha).toBe(0.8);
	});

	it("a clamped ack snaps the display and mentions it", () => {
		const next = applyReply(initialState(),
			{ type: "ack", of: "set_alpha", alpha: 1.0, saturated: true });
		expect(next.alpha).toBe(1.0);
		expect(next.statusLine).toContain("clamped");
	});

	it("errors land in the status line", () => {
		const next = applyReply(initialState(),
			{ type: "error", reason: "unknown material 'granite'" });
		expect(next.statusLine).toContain("granite");
	});

	it("diagnostics refresh the whole view", () => {
		const next = applyReply(initialState(), diagnostics);
		expect(next.alpha).toBe(0.4);
		expect(next.material).toBe("metal");
		expect(next.audioOn).toBe(true);
		expect(next.tactileOn).toBe(false);
		expect(next.peakAudio).toBe(0.3);
		expect(next.peakTactile).toBe(0.1);
		expect(next.velocity).toBe(1.7);
		expect(next.gate).toBe("open");
		expect(next.underruns).toBe(2);
	});

	it("does not mutate the previous state", () => {
		const before = initialState();
		applyReply(before, diagnostics);
		expect(before).toEqual(initialState());
	});
});
