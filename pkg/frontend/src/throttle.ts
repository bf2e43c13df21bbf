/**
 * Trailing-edge rate limiter: emits immediately when idle, otherwise
 * schedules one trailing emission carrying the latest value, so the
 * final position of a fast-moving control always reaches the wire.
 */

export type Timers = {
	now(): number;
	setTimeout(fn: () => void, ms: number): unknown;
	clearTimeout(handle: unknown): void;
};

const defaultTimers: Timers = {
	now: () => Date.now(),
	setTimeout: (fn, ms) => setTimeout(fn, ms),
	clearTimeout: (handle) => clearTimeout(handle as Parameters<typeof clearTimeout>[0]),
};

export class TrailingThrottle<T> {
	private lastEmit = Number.NEGATIVE_INFINITY;
	private pending: { value: T } | null = null;
	private handle: unknown = null;

	constructor(
		private readonly intervalMs: number,
		private readonly emit: (value: T) => void,
		private readonly timers: Timers = defaultTimers,
	) {}

	set(value: T): void {
		const now = this.timers.now();
		if (this.pending === null && now - this.lastEmit >= this.intervalMs) {
			this.lastEmit = now;
			this.emit(value);
			return;
		}
		// coalesce: keep only the newest value for the trailing emission
		if (this.pending === null) {
			this.pending = { value };
			const wait = Math.max(0, this.lastEmit + this.intervalMs - now);
			this.handle = this.timers.setTimeout(() => this.fire(), wait);
		} else {
			this.pending.value = value;
		}
	}

	/** Emit any pending value right away (e.g. on control release). */
	flush(): void {
		if (this.pending !== null) this.fire();
	}

	cancel(): void {
		if (this.handle !== null) this.timers.clearTimeout(this.handle);
		this.pending = null;
		this.handle = null;
	}

	private fire(): void {
		if (this.handle !== null) this.timers.clearTimeout(this.handle);
		const value = this.pending!.value;
		this.pending = null;
		this.handle = null;
		this.lastEmit = this.timers.now();
		this.emit(value);
	}
}
