"""Block engine: deterministic render core, offline session rendering,
trace replay, and the paced live loop.

Determinism contract: the rendered output is a pure function of
(config, seed, control trace), where a trace entry is a control message
plus the index of the block boundary at which it was applied. The live
loop assigns arriving messages to the next boundary and records them, so
a captured session replays bit-identically offline.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .config import EngineConfig
from .control import InstalledParams, SmoothedState, VelocityEstimator, \
    ControlFrame, apply_control_at_block_boundary
from .impacts import ImpactEvent, ImpactSeriesParams, _CompensatedClock, \
    clamp_alpha
from .render import ModalFilterBank, TactileShaper, limit_samples, \
    raised_cosine_kernel
from .wavio import write_wav

__all__ = [
    "EngineError",
    "ImpactStream",
    "FrictionEngine",
    "TraceEntry",
    "render_session",
    "run_live",
    "LiveStats",
    "WavFileSink",
    "NullSink",
    "DeviceSink",
    "load_trace",
    "save_trace",
]


class EngineError(RuntimeError):
    """Engine startup or runtime failure."""


class ImpactStream:
    """Continuous impact-event source rendered block by block.

    The pending next-event time carries over across blocks, so the event
    sequence is independent of block size. Parameters may change between
    blocks; draws made after a change use the new statistics. A
    compensated clock keeps zero-variance trains on the exact time grid.
    """

    def __init__(self, params: ImpactSeriesParams, seed) -> None:
        self._rng = np.random.default_rng(seed)
        self._params = params
        self._clock = _CompensatedClock(0.0)

    @property
    def params(self) -> ImpactSeriesParams:
        return self._params

    def set_params(self, params: ImpactSeriesParams) -> None:
        self._params = params

    def skip_to(self, t_s: float) -> None:
        """Re-anchor the next event at t_s (fresh surface contact)."""
        self._clock.reset(t_s)

    def events_until(self, t_end_s: float) -> list[ImpactEvent]:
        """Emit all events with time < t_end_s, advancing the stream."""
        p = self._params
        rng = self._rng
        events: list[ImpactEvent] = []
        while True:
            t = self._clock.time
            if t >= t_end_s:
                return events
            amp = rng.normal(p.mu_amp, p.sigma_amp)
            events.append(ImpactEvent(t, min(1.0, max(0.0, amp))))
            while True:
                dt = rng.normal(p.mu_interval_s, p.sigma_interval_s)
                if dt >= p.min_interval_s:
                    break
            self._clock.advance(dt)
            p = self._params


@dataclass(frozen=True)
class TraceEntry:
    block: int
    msg: dict


class FrictionEngine:
    """Deterministic two-channel block renderer with message control.

    submit() validates a control message, replies immediately, and queues
    state changes; render_block() drains the queue at the block boundary
    and renders the next block. submit() is safe to call from another
    thread while render_block() runs.
    """

    def __init__(self, config: EngineConfig, seed: Optional[int] = None) -> None:
        self.config = config
        self.seed = config.master_seed if seed is None else int(seed)
        rc = config.render
        self._fs = rc.sample_rate_hz
        self._block = rc.block_size
        self._kernel = raised_cosine_kernel(rc.kernel_width_samples)
        self._w = len(self._kernel)

        ss = np.random.SeedSequence(self.seed)
        audio_ss, tactile_ss = ss.spawn(2)

        mapping = config.mapping
        self.installed = InstalledParams(
            audio=mapping.rub_audio,
            tactile=mapping.rub_tactile,
            gate="silent",
            material_id=config.default_material_name,
            alpha=0.0,
            velocity_norm=0.0,
        )
        self._audio_stream = ImpactStream(mapping.rub_audio, audio_ss)
        self._tactile_stream = ImpactStream(mapping.rub_tactile, tactile_ss)

        self._banks = {m.name: ModalFilterBank(m, self._fs)
                       for m in config.materials}
        self._shaper = TactileShaper(rc)

        # Excitation assembly buffers: block plus kernel spill.
        self._exc_audio = np.zeros(self._block + self._w)
        self._exc_tactile = np.zeros(self._block + self._w)

        # Control state, guarded by _lock for cross-thread submits.
        self._lock = threading.Lock()
        self._pending: list[dict] = []
        self._alpha = 0.0
        self._material = config.default_material_name
        self._audio_on = True
        self._tactile_on = True
        self._velocity = VelocityEstimator(
            config.control.velocity_time_constant_s,
            config.control.v_ref,
            config.control.staleness_s)
        self._last_pointer_block: Optional[int] = None
        self._last_state: Optional[SmoothedState] = None

        self.block_index = 0
        self.underruns = 0
        self.peak_audio = 0.0
        self.peak_tactile = 0.0
        self.trace: list[TraceEntry] = []

    # ----- control ----------------------------------------------------

    def submit(self, msg: dict) -> dict:
        """Validate one control message; queue its state change for the
        next block boundary and return the protocol reply."""
        mtype = msg.get("type")
        if mtype == "ping":
            return {"type": "ack", "of": "ping"}
        if mtype == "diagnostics":
            return self.diagnostics()
        if mtype == "pointer":
            reply = self._validate_pointer(msg)
        elif mtype == "set_alpha":
            reply = self._validate_alpha(msg)
        elif mtype == "set_material":
            reply = self._validate_material(msg)
        elif mtype == "set_modality":
            reply = self._validate_modality(msg)
        else:
            return {"type": "error",
                    "reason": f"unknown message type {mtype!r}"}
        if reply["type"] == "ack":
            with self._lock:
                self._pending.append(reply.pop("_validated"))
        return reply

    def _validate_pointer(self, msg: dict) -> dict:
        try:
            frame = ControlFrame(
                t_s=float(msg["t_s"]), x=float(msg["x"]), y=float(msg["y"]),
                pressure=None if msg.get("pressure") is None
                else float(msg["pressure"]))
        except (KeyError, TypeError, ValueError) as e:
            return {"type": "error", "reason": f"bad pointer frame: {e}"}
        return {"type": "ack", "of": "pointer",
                "_validated": {"type": "pointer", "frame": frame, "raw": msg}}

    def _validate_alpha(self, msg: dict) -> dict:
        try:
            alpha, saturated = clamp_alpha(float(msg["alpha"]))
        except (KeyError, TypeError, ValueError) as e:
            return {"type": "error", "reason": f"bad set_alpha: {e}"}
        return {"type": "ack", "of": "set_alpha", "alpha": alpha,
                "saturated": saturated,
                "_validated": {"type": "set_alpha", "alpha": alpha, "raw": msg}}

    def _validate_material(self, msg: dict) -> dict:
        name = msg.get("name")
        if name not in self._banks:
            return {"type": "error",
                    "reason": f"unknown material {name!r}; have "
                              f"{sorted(self._banks)}"}
        return {"type": "ack", "of": "set_material", "name": name,
                "_validated": {"type": "set_material", "name": name, "raw": msg}}

    def _validate_modality(self, msg: dict) -> dict:
        audio_on = msg.get("audio_on", self._audio_on)
        tactile_on = msg.get("tactile_on", self._tactile_on)
        if not isinstance(audio_on, bool) or not isinstance(tactile_on, bool):
            return {"type": "error",
                    "reason": "set_modality flags must be booleans"}
        return {"type": "ack", "of": "set_modality",
                "audio_on": audio_on, "tactile_on": tactile_on,
                "_validated": {"type": "set_modality", "audio_on": audio_on,
                               "tactile_on": tactile_on, "raw": msg}}

    def diagnostics(self) -> dict:
        inst = self.installed
        return {
            "type": "diagnostics",
            "alpha": inst.alpha,
            "velocity_norm": inst.velocity_norm,
            "gate": inst.gate,
            "material": inst.material_id,
            "audio_on": self._audio_on,
            "tactile_on": self._tactile_on,
            "underruns": self.underruns,
            "peak_audio": self.peak_audio,
            "peak_tactile": self.peak_tactile,
            "block_index": self.block_index,
            "dropped_frames": self._velocity.dropped_frames,
        }

    # ----- rendering --------------------------------------------------

    def _apply_pending(self) -> None:
        with self._lock:
            drained = self._pending
            self._pending = []
        for item in drained:
            self.trace.append(TraceEntry(self.block_index, item["raw"]))
            kind = item["type"]
            if kind == "pointer":
                self._velocity.push(item["frame"])
                self._last_pointer_block = self.block_index
            elif kind == "set_alpha":
                self._alpha = item["alpha"]
            elif kind == "set_material":
                self._material = item["name"]
            elif kind == "set_modality":
                self._audio_on = item["audio_on"]
                self._tactile_on = item["tactile_on"]

    def _current_velocity(self) -> float:
        fixed = self.config.control.fixed_velocity
        if fixed is not None:
            return float(fixed)
        if self._last_pointer_block is None:
            return 0.0
        age_s = (self.block_index - self._last_pointer_block) \
            * self._block / self._fs
        if age_s > self.config.control.staleness_s:
            return 0.0
        return self._velocity.value()

    def render_block(self) -> tuple[np.ndarray, np.ndarray]:
        """Render the next block; returns (audio, tactile) arrays that
        stay valid until the next call."""
        self._apply_pending()

        velocity = self._current_velocity()
        state = SmoothedState(
            velocity_norm=velocity,
            alpha=self._alpha,
            material_id=self._material,
            gate="open" if velocity >= self.config.control.v_floor else "silent",
        )
        if state != self._last_state:
            was_open = self.installed.gate == "open"
            self.installed = apply_control_at_block_boundary(
                state, self.installed, self.config.mapping,
                self.config.control.v_floor)
            self._last_state = state
            if self.installed.gate == "open":
                self._audio_stream.set_params(self.installed.audio)
                self._tactile_stream.set_params(self.installed.tactile)
                if not was_open:
                    # Fresh contact: anchor the next impact at the block start.
                    t0 = self.block_index * self._block / self._fs
                    self._audio_stream.skip_to(t0)
                    self._tactile_stream.skip_to(t0)

        b, w, fs = self._block, self._w, self._fs
        n0 = self.block_index * b
        t1 = (n0 + b) / fs
        open_gate = self.installed.gate == "open"

        for exc, stream in ((self._exc_audio, self._audio_stream),
                            (self._exc_tactile, self._tactile_stream)):
            exc[:w] = exc[b:b + w]
            exc[w:] = 0.0
            if open_gate:
                events = stream.events_until(t1)
                self._add_events(exc, events, n0)

        audio = self._banks[self.installed.material_id].process(
            self._exc_audio[:b])
        tactile = self._shaper.process(self._exc_tactile[:b])
        ceiling = self.config.render.limiter_ceiling
        audio = limit_samples(audio, ceiling)
        tactile = limit_samples(tactile, ceiling)

        # Hard gate: a silent block is exactly zero; the filters above
        # still consumed the (zero) excitation so their tails decay.
        if not open_gate or not self._audio_on:
            audio[:] = 0.0
        if not open_gate or not self._tactile_on:
            tactile[:] = 0.0

        self.peak_audio = float(np.max(np.abs(audio)))
        self.peak_tactile = float(np.max(np.abs(tactile)))
        self.block_index += 1
        return audio, tactile

    def _add_events(self, exc: np.ndarray, events: list[ImpactEvent],
                    n0: int) -> None:
        kernel = self._kernel
        w = self._w
        fs = self._fs
        n = len(exc)
        for ev in events:
            s = int(round(ev.time_s * fs)) - n0
            if s < 0 or s >= n:
                continue
            hi = min(s + w, n)
            exc[s:hi] += ev.amplitude * kernel[:hi - s]


# ----- traces ----------------------------------------------------------


def save_trace(path: str | Path, trace: list[TraceEntry]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for entry in trace:
            f.write(json.dumps({"block": entry.block, "msg": entry.msg}) + "\n")


def load_trace(path: str | Path) -> list[TraceEntry]:
    entries = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            entries.append(TraceEntry(int(doc["block"]), doc["msg"]))
    return entries


# ----- offline rendering ------------------------------------------------


def render_session(config: EngineConfig, duration_s: float,
                   seed: Optional[int] = None,
                   trace: Optional[list[TraceEntry]] = None) -> np.ndarray:
    """Render duration_s of engine output offline; returns (n, 2) floats.

    With a trace, messages are applied at their recorded block
    boundaries (deterministic replay). Without one, the engine runs on
    its configured control defaults (a fixed-velocity config renders an
    audible session; otherwise the gate stays silent).
    """
    engine = FrictionEngine(config, seed)
    rc = config.render
    n_samples = int(round(duration_s * rc.sample_rate_hz))
    n_blocks = -(-n_samples // rc.block_size)
    by_block: dict[int, list[dict]] = {}
    for entry in trace or []:
        by_block.setdefault(entry.block, []).append(entry.msg)

    out = np.zeros((n_blocks * rc.block_size, 2))
    for k in range(n_blocks):
        for msg in by_block.get(k, []):
            engine.submit(msg)
        audio, tactile = engine.render_block()
        out[k * rc.block_size:(k + 1) * rc.block_size, 0] = audio
        out[k * rc.block_size:(k + 1) * rc.block_size, 1] = tactile
    return out[:n_samples]


# ----- sinks and the live loop -------------------------------------------


class NullSink:
    """Discards blocks; used for paced runs that only measure timing."""

    def write(self, audio: np.ndarray, tactile: np.ndarray) -> None:
        pass

    def close(self) -> None:
        pass


class WavFileSink:
    """Accumulates blocks and writes one WAV on close."""

    def __init__(self, path: str | Path, sample_rate_hz: int,
                 bit_depth: int = 16) -> None:
        self.path = Path(path)
        self.sample_rate_hz = sample_rate_hz
        self.bit_depth = bit_depth
        self._chunks: list[np.ndarray] = []

    def write(self, audio: np.ndarray, tactile: np.ndarray) -> None:
        self._chunks.append(np.column_stack((audio, tactile)))

    def close(self) -> None:
        data = np.concatenate(self._chunks) if self._chunks \
            else np.zeros((0, 2))
        write_wav(data, self.sample_rate_hz, self.path, self.bit_depth)


class DeviceSink:
    """Writes blocks to a live audio device (requires the optional
    sounddevice package and >= 2 output channels)."""

    def __init__(self, device: str, sample_rate_hz: int, block_size: int) -> None:
        try:
            import sounddevice
        except ImportError as e:
            raise EngineError(
                "audio device output requires the 'sounddevice' package, "
                "which is not installed; use a file sink instead") from e
        try:
            self._stream = sounddevice.OutputStream(
                samplerate=sample_rate_hz, blocksize=block_size, channels=2,
                device=None if device in ("", "default") else device)
            self._stream.start()
        except Exception as e:
            raise EngineError(f"cannot open audio device {device!r}: {e}") from e

    def write(self, audio: np.ndarray, tactile: np.ndarray) -> None:
        self._stream.write(
            np.column_stack((audio, tactile)).astype(np.float32))

    def close(self) -> None:
        self._stream.stop()
        self._stream.close()


@dataclass
class LiveStats:
    blocks: int
    underruns: int
    elapsed_s: float


def run_live(engine: FrictionEngine, sink, duration_s: Optional[float] = None,
             stop: Optional[threading.Event] = None,
             pace: bool = True,
             lookahead_blocks: int = 2,
             on_block: Optional[Callable[[int], None]] = None) -> LiveStats:
    """Paced render loop against a monotonic presentation clock.

    Production is allowed to run up to lookahead_blocks ahead of real
    time (the double-buffering every device sink implies), absorbing OS
    wakeup jitter; an underrun is counted when production falls behind
    the presentation clock. The loop degrades by lateness, never by
    blocking control.
    """
    if lookahead_blocks < 1:
        raise ValueError("lookahead_blocks must be >= 1")
    rc = engine.config.render
    block_dur = rc.block_size / rc.sample_rate_hz
    n_blocks = None if duration_s is None \
        else -(-int(round(duration_s * rc.sample_rate_hz)) // rc.block_size)
    slack = (lookahead_blocks - 1) * block_dur

    start = time.monotonic()
    k = 0
    while n_blocks is None or k < n_blocks:
        if stop is not None and stop.is_set():
            break
        audio, tactile = engine.render_block()
        sink.write(audio, tactile)
        if on_block is not None:
            on_block(k)
        k += 1
        if pace:
            lead = start + k * block_dur - time.monotonic()
            if lead < 0.0:
                engine.underruns += 1
            elif lead > slack:
                time.sleep(lead - slack)
    elapsed = time.monotonic() - start
    sink.close()
    return LiveStats(blocks=k, underruns=engine.underruns, elapsed_s=elapsed)
