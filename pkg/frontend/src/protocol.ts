/**
 * Wire protocol with the engine: single JSON objects both ways.
 *
 * Every message the UI emits must validate against this schema; the
 * test suite runs validateControlMessage over the output of every
 * emitter, so the client cannot drift from what the engine accepts.
 */

export type PointerMsg = {
	type: "pointer";
	t_s: number;
	x: number;
	y: number;
	pressure?: number;
};

export type SetAlphaMsg = { type: "set_alpha"; alpha: number };
export type SetMaterialMsg = { type: "set_material"; name: string };
export type SetModalityMsg = {
	type: "set_modality";
	audio_on: boolean;
	tactile_on: boolean;
};
export type PingMsg = { type: "ping" };
export type DiagnosticsRequest = { type: "diagnostics" };

export type ControlMessage =
	| PointerMsg
	| SetAlphaMsg
	| SetMaterialMsg
	| SetModalityMsg
	| PingMsg
	| DiagnosticsRequest;

export type AckReply = {
	type: "ack";
	of: string;
	alpha?: number;
	saturated?: boolean;
	name?: string;
	audio_on?: boolean;
	tactile_on?: boolean;
};

export type ErrorReply = { type: "error"; reason: string };

export type DiagnosticsReply = {
	type: "diagnostics";
	alpha: number;
	velocity_norm: number;
	gate: string;
	material: string;
	audio_on: boolean;
	tactile_on: boolean;
	underruns: number;
	peak_audio: number;
	peak_tactile: number;
	block_index: number;
	dropped_frames: number;
};

export type EngineReply = AckReply | ErrorReply | DiagnosticsReply;

const MESSAGE_FIELDS: Record<string, Record<string, "number" | "string" | "boolean" | "number?">> = {
	pointer: { t_s: "number", x: "number", y: "number", pressure: "number?" },
	set_alpha: { alpha: "number" },
	set_material: { name: "string" },
	set_modality: { audio_on: "boolean", tactile_on: "boolean" },
	ping: {},
	diagnostics: {},
};

/** Returns a list of schema violations; empty means the message is valid. */
export function validateControlMessage(msg: unknown): string[] {
	const errors: string[] = [];
	if (typeof msg !== "object" || msg === null || Array.isArray(msg)) {
		return ["message must be a JSON object"];
	}
	const obj = msg as Record<string, unknown>;
	const type = obj["type"];
	if (typeof type !== "string" || !(type in MESSAGE_FIELDS)) {
		return [`unknown message type ${JSON.stringify(type)}`];
	}
	const fields = MESSAGE_FIELDS[type]!;
	for (const [field, kind] of Object.entries(fields)) {
		const value = obj[field];
		const optional = kind.endsWith("?");
		if (value === undefined) {
			if (!optional) errors.push(`${type}: missing field '${field}'`);
			continue;
		}
		const base = optional ? kind.slice(0, -1) : kind;
		if (base === "number") {
			if (typeof value !== "number" || !Number.isFinite(value)) {
				errors.push(`${type}: '${field}' must be a finite number`);
			}
		} else if (typeof value !== base) {
			errors.push(`${type}: '${field}' must be a ${base}`);
		}
	}
	for (const key of Object.keys(obj)) {
		if (key !== "type" && !(key in fields)) {
			errors.push(`${type}: unexpected field '${key}'`);
		}
	}
	return errors;
}

/** Parse an engine reply; null for anything unintelligible. */
export function parseReply(raw: string): EngineReply | null {
	let doc: unknown;
	try {
		doc = JSON.parse(raw);
	} catch {
		return null;
	}
	if (typeof doc !== "object" || doc === null) return null;
	const type = (doc as Record<string, unknown>)["type"];
	if (type === "ack" || type === "error" || type === "diagnostics") {
		return doc as EngineReply;
	}
	return null;
}
