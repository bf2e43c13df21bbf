/**
 * Control surface wiring: exploration canvas (stands in for the graphic
 * tablet), continuous rub-scratch slider, material and modality
 * selectors, meters fed by the diagnostics poll. Engine host/port come
 * from the URL query (?host=...&port=...).
 */

import { EngineClient } from "./client.js";
import { ExplorationSurface } from "./surface.js";
import type { UiState } from "./state.js";

const query = new URLSearchParams(window.location.search);
const host = query.get("host") ?? "127.0.0.1";
const port = query.get("port") ?? "8765";
const url = `ws://${host}:${port}`;

const $ = <T extends HTMLElement>(id: string): T => {
	const el = document.getElementById(id);
	if (!el) throw new Error(`missing element #${id}`);
	return el as T;
};

const canvas = $<HTMLCanvasElement>("surface");
const ctx = canvas.getContext("2d")!;
const alphaSlider = $<HTMLInputElement>("alpha");
const alphaReadout = $<HTMLSpanElement>("alpha-readout");
const materialSelect = $<HTMLSelectElement>("material");
const audioToggle = $<HTMLInputElement>("audio-on");
const tactileToggle = $<HTMLInputElement>("tactile-on");
const connectionEl = $<HTMLSpanElement>("connection");
const statusEl = $<HTMLDivElement>("status");
const meterAudio = $<HTMLDivElement>("meter-audio");
const meterTactile = $<HTMLDivElement>("meter-tactile");
const velocityEl = $<HTMLSpanElement>("velocity");
const gateEl = $<HTMLSpanElement>("gate");
const underrunsEl = $<HTMLSpanElement>("underruns");

let sliderActive = false;
let pointerDown = false;
let lastPointer: { x: number; y: number } | null = null;

function render(state: UiState): void {
	connectionEl.textContent = state.connection;
	connectionEl.className = `badge ${state.connection}`;

	// controls are disabled while not connected
	const disabled = state.connection !== "connected";
	alphaSlider.disabled = disabled;
	materialSelect.disabled = disabled;
	audioToggle.disabled = disabled;
	tactileToggle.disabled = disabled;

	// the engine's acknowledged alpha is the displayed alpha; while the
	// user drags we leave the thumb alone and let the next ack settle it
	if (!sliderActive) {
		alphaSlider.value = String(state.alpha);
	}
	alphaReadout.textContent = state.alpha.toFixed(2);
	if (materialSelect.value !== state.material && state.material) {
		materialSelect.value = state.material;
	}
	audioToggle.checked = state.audioOn;
	tactileToggle.checked = state.tactileOn;

	meterAudio.style.width = `${Math.min(100, state.peakAudio * 100)}%`;
	meterTactile.style.width = `${Math.min(100, state.peakTactile * 100)}%`;
	velocityEl.textContent = state.velocity.toFixed(2);
	gateEl.textContent = state.gate;
	gateEl.className = `badge ${state.gate === "open" ? "open" : "silent"}`;
	underrunsEl.textContent = String(state.underruns);
	statusEl.textContent = state.statusLine;

	drawSurface(state);
}

function drawSurface(state: UiState): void {
	const { width, height } = canvas;
	ctx.clearRect(0, 0, width, height);
	ctx.fillStyle = "#14161a";
	ctx.fillRect(0, 0, width, height);
	ctx.strokeStyle = "#2a2e36";
	for (let i = 1; i < 4; i++) {
		ctx.beginPath();
		ctx.moveTo((width * i) / 4, 0);
		ctx.lineTo((width * i) / 4, height);
		ctx.stroke();
		ctx.beginPath();
		ctx.moveTo(0, (height * i) / 4);
		ctx.lineTo(width, (height * i) / 4);
		ctx.stroke();
	}
	if (lastPointer) {
		ctx.beginPath();
		ctx.arc(lastPointer.x * width, lastPointer.y * height,
			pointerDown ? 14 : 8, 0, 2 * Math.PI);
		ctx.fillStyle = state.gate === "open" ? "#6fd18c" : "#5a5f6a";
		ctx.fill();
	}
}

const client = new EngineClient({
	url,
	socketFactory: (u) => new WebSocket(u),
	onState: render,
});

const surface = new ExplorationSurface(120);

function handlePointer(ev: PointerEvent): void {
	const rect = canvas.getBoundingClientRect();
	const inside =
		ev.clientX >= rect.left && ev.clientX < rect.right &&
		ev.clientY >= rect.top && ev.clientY < rect.bottom;
	lastPointer = {
		x: (ev.clientX - rect.left) / rect.width,
		y: (ev.clientY - rect.top) / rect.height,
	};
	const frame = surface.sample({
		timeMs: ev.timeStamp,
		xPx: ev.clientX - rect.left,
		yPx: ev.clientY - rect.top,
		widthPx: rect.width,
		heightPx: rect.height,
		down: pointerDown,
		inside,
		pressure: ev.pressure,
	});
	if (frame !== null && client.connected) {
		client.sendPointer({ t_s: frame.t_s, x: frame.x, y: frame.y,
			...(frame.pressure !== undefined ? { pressure: frame.pressure } : {}) });
	}
	drawSurface(client.state);
}

canvas.addEventListener("pointerdown", (ev) => {
	pointerDown = true;
	canvas.setPointerCapture(ev.pointerId);
	handlePointer(ev);
});
canvas.addEventListener("pointermove", handlePointer);
const stopPointer = (ev: PointerEvent) => {
	pointerDown = false;
	surface.reset(); // emission stops; the engine's staleness gate silences
	handlePointer(ev);
};
canvas.addEventListener("pointerup", stopPointer);
canvas.addEventListener("pointercancel", stopPointer);
canvas.addEventListener("pointerleave", stopPointer);

alphaSlider.addEventListener("pointerdown", () => (sliderActive = true));
alphaSlider.addEventListener("input", () => {
	client.setAlpha(Number(alphaSlider.value));
	alphaReadout.textContent = Number(alphaSlider.value).toFixed(2);
});
alphaSlider.addEventListener("change", () => {
	sliderActive = false;
	client.setAlpha(Number(alphaSlider.value));
	client.flushAlpha(); // final-value flush
});

materialSelect.addEventListener("change", () =>
	client.setMaterial(materialSelect.value));
audioToggle.addEventListener("change", () =>
	client.setModality(audioToggle.checked, tactileToggle.checked));
tactileToggle.addEventListener("change", () =>
	client.setModality(audioToggle.checked, tactileToggle.checked));

render(client.state);
client.connect();
