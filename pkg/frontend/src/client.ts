/**
 * Engine client: one WebSocket, typed emitters, reconnect with state
 * restoration via a diagnostics query. The socket is injected so tests
 * can run against a fake and the integration test against node's `ws`.
 */

import {
	ControlMessage,
	parseReply,
	validateControlMessage,
} from "./protocol.js";
import { applyReply, initialState, UiState } from "./state.js";
import { Timers, TrailingThrottle } from "./throttle.js";

// Structural subset of both the DOM WebSocket and node's `ws`; event
// parameters stay loose so either implementation is assignable.
export type SocketLike = {
	send(data: string): void;
	close(): void;
	// eslint-disable-next-line @typescript-eslint/no-explicit-any
	onopen: ((ev: any) => void) | null;
	onmessage: ((ev: any) => void) | null;
	onclose: ((ev: any) => void) | null;
	onerror: ((ev: any) => void) | null;
};

export type SocketFactory = (url: string) => SocketLike;

export type EngineClientOptions = {
	url: string;
	socketFactory: SocketFactory;
	onState?: (state: UiState) => void;
	/** <= 30 msg/s for the action slider */
	alphaThrottleMs?: number;
	/** >= 10 Hz meter refresh */
	diagnosticsIntervalMs?: number;
	reconnectDelayMs?: number;
	timers?: Timers;
	setInterval?: (fn: () => void, ms: number) => unknown;
	clearInterval?: (handle: unknown) => void;
};

export class EngineClient {
	state: UiState = initialState();

	private socket: SocketLike | null = null;
	private readonly alphaThrottle: TrailingThrottle<number>;
	private pollHandle: unknown = null;
	private reconnectHandle: unknown = null;
	private closed = false;
	private readonly timers: Timers;
	private readonly setIntervalFn: (fn: () => void, ms: number) => unknown;
	private readonly clearIntervalFn: (handle: unknown) => void;

	constructor(private readonly opts: EngineClientOptions) {
		this.timers = opts.timers ?? {
			now: () => Date.now(),
			setTimeout: (fn, ms) => setTimeout(fn, ms),
			clearTimeout: (h) => clearTimeout(h as Parameters<typeof clearTimeout>[0]),
		};
		this.setIntervalFn = opts.setInterval ?? ((fn, ms) => setInterval(fn, ms));
		this.clearIntervalFn =
			opts.clearInterval ??
			((h) => clearInterval(h as Parameters<typeof clearInterval>[0]));
		this.alphaThrottle = new TrailingThrottle<number>(
			opts.alphaThrottleMs ?? 34,
			(alpha) => this.send({ type: "set_alpha", alpha }),
			this.timers,
		);
	}

	connect(): void {
		this.closed = false;
		this.setConnection("connecting");
		const socket = this.opts.socketFactory(this.opts.url);
		this.socket = socket;
		socket.onopen = () => {
			this.setConnection("connected");
			// stateless client: the engine's diagnostics restore the view
			this.requestDiagnostics();
			this.startPolling();
		};
		socket.onmessage = (ev: { data: unknown }) => {
			const reply = parseReply(String(ev.data));
			if (reply !== null) this.update(applyReply(this.state, reply));
		};
		socket.onerror = () => {
			// onclose follows; nothing to do here
		};
		socket.onclose = () => {
			this.stopPolling();
			this.socket = null;
			if (!this.closed) {
				this.setConnection("disconnected");
				this.reconnectHandle = this.timers.setTimeout(
					() => this.connect(),
					this.opts.reconnectDelayMs ?? 1000,
				);
			}
		};
	}

	close(): void {
		this.closed = true;
		this.stopPolling();
		this.alphaThrottle.cancel();
		if (this.reconnectHandle !== null) {
			this.timers.clearTimeout(this.reconnectHandle);
			this.reconnectHandle = null;
		}
		this.socket?.close();
		this.socket = null;
		this.setConnection("disconnected");
	}

	get connected(): boolean {
		return this.state.connection === "connected";
	}

	// ----- emitters (all wire output funnels through send) -----

	sendPointer(frame: { t_s: number; x: number; y: number; pressure?: number }): void {
		this.send({ type: "pointer", ...frame });
	}

	/** Throttled; the latest value always reaches the engine. */
	setAlpha(alpha: number): void {
		this.alphaThrottle.set(alpha);
	}

	/** Force out a pending slider value (pointer released). */
	flushAlpha(): void {
		this.alphaThrottle.flush();
	}

	setMaterial(name: string): void {
		this.send({ type: "set_material", name });
	}

	setModality(audioOn: boolean, tactileOn: boolean): void {
		this.send({ type: "set_modality", audio_on: audioOn, tactile_on: tactileOn });
	}

	ping(): void {
		this.send({ type: "ping" });
	}

	requestDiagnostics(): void {
		this.send({ type: "diagnostics" });
	}

	private send(msg: ControlMessage): void {
		if (this.socket === null || this.state.connection !== "connected") {
			return; // dropped; the connection indicator already shows why
		}
		const errors = validateControlMessage(msg);
		if (errors.length > 0) {
			// a schema violation is a client bug; surface it loudly
			throw new Error(`refusing to send invalid message: ${errors.join("; ")}`);
		}
		this.socket.send(JSON.stringify(msg));
	}

	private startPolling(): void {
		this.stopPolling();
		this.pollHandle = this.setIntervalFn(
			() => this.requestDiagnostics(),
			this.opts.diagnosticsIntervalMs ?? 66,
		);
	}

	private stopPolling(): void {
		if (this.pollHandle !== null) {
			this.clearIntervalFn(this.pollHandle);
			this.pollHandle = null;
		}
	}

	private setConnection(connection: UiState["connection"]): void {
		this.update({ ...this.state, connection });
	}

	private update(state: UiState): void {
		this.state = state;
		this.opts.onState?.(state);
	}
}
