import type { SocketLike } from "../src/client.js";
import type { Timers } from "../src/throttle.js";

/** Deterministic clock with manually-run timer queue. */
export class FakeClock implements Timers {
	t = 0;
	private tasks: { at: number; fn: () => void; id: number }[] = [];
	private nextId = 1;

	now(): number {
		return this.t;
	}

	setTimeout(fn: () => void, ms: number): unknown {
		const id = this.nextId++;
		this.tasks.push({ at: this.t + ms, fn, id });
		return id;
	}

	clearTimeout(handle: unknown): void {
		this.tasks = this.tasks.filter((task) => task.id !== handle);
	}

	/** Advance time, firing due tasks in order. */
	advance(ms: number): void {
		const target = this.t + ms;
		for (;;) {
			const due = this.tasks
				.filter((task) => task.at <= target)
				.sort((a, b) => a.at - b.at)[0];
			if (!due) break;
			this.tasks = this.tasks.filter((task) => task.id !== due.id);
			this.t = due.at;
			due.fn();
		}
		this.t = target;
	}
}

/** Scripted in-memory socket capturing everything the client sends. */
export class FakeSocket implements SocketLike {
	sent: string[] = [];
	closedByClient = false;
	onopen: ((ev?: unknown) => void) | null = null;
	onmessage: ((ev: { data: unknown }) => void) | null = null;
	onclose: ((ev?: unknown) => void) | null = null;
	onerror: ((ev?: unknown) => void) | null = null;

	send(data: string): void {
		this.sent.push(data);
	}

	close(): void {
		this.closedByClient = true;
		this.onclose?.();
	}

	open(): void {
		this.onopen?.();
	}

	receive(reply: unknown): void {
		this.onmessage?.({ data: JSON.stringify(reply) });
	}

	dropConnection(): void {
		this.onclose?.();
	}
}
