"""Local real-time bridge: cursor/lens commands in, PCM and pluck events out.

Three contexts cooperate: the socket I/O loop (asyncio), the session state
machine, and the audio render thread. Socket messages land in an ordered
command deque; the render thread drains it at every block tick, drives the
session, and fans out audio and feedback frames through a bounded queue
where the network side may drop (audio sequence numbers make gaps visible)
but the render side never blocks.

Protocol (one interactive session per server):
  client -> server, JSON text:
    {"type":"cursor","t":<s>,"x":<f>,"y":<f>}
    {"type":"lens","enabled":<b>,"center":[x,y],"radius":<f>,"threshold":<f>}
    {"type":"playback"}
    {"type":"config", <MappingConfig or playback_spacing fields>}
  server -> client, JSON text:
    {"type":"hello","dataset":{...},"sample_rate":<hz>,"block_frames":<n>}
    {"type":"pluck", ...}   {"type":"stats", ...}   {"type":"error", ...}
  server -> client, binary: 8-byte LE sequence number + float32 mono PCM.
"""

from __future__ import annotations

import asyncio
import dataclasses
import json
import struct
import threading
from collections import deque
from contextlib import asynccontextmanager
from typing import Optional

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response

from .audio_io import StreamHandle, stream_realtime
from .geometry import Lens
from .mapping import MappingConfig
from .mixer import ActiveNoteBuffer
from .model import LineSet, Point2, save_lineset
from .session import Session

OUTBOUND_QUEUE_BLOCKS = 256
STATS_INTERVAL_BLOCKS = 128  # ~0.75 s at defaults


class _Connection:
    def __init__(self, loop: asyncio.AbstractEventLoop):
        self.loop = loop
        self.queue: asyncio.Queue = asyncio.Queue(maxsize=OUTBOUND_QUEUE_BLOCKS)
        self.audio_frames_dropped = 0
        self.epoch: float = 0.0

    def push_threadsafe(self, item) -> None:
        # called from the render thread; drops instead of blocking
        def _put():
            try:
                self.queue.put_nowait(item)
            except asyncio.QueueFull:
                if isinstance(item, (bytes, bytearray)):
                    self.audio_frames_dropped += 1

        self.loop.call_soon_threadsafe(_put)


class Engine:
    """Audio render loop plus single-session command processing."""

    def __init__(
        self,
        lineset: LineSet,
        cfg: MappingConfig,
        sample_rate: int = 44100,
        block_frames: int = 256,
        master_gain: Optional[float] = None,
    ):
        self.lineset = lineset
        self.cfg = cfg
        self.sample_rate = sample_rate
        self.block_frames = block_frames
        self.master_gain = master_gain
        self.mixer = self._new_mixer()
        self.session = Session(lineset, cfg, self.mixer)
        self.commands: deque = deque()  # (kind, payload) from the socket context
        self.connection: Optional[_Connection] = None
        self._conn_lock = threading.Lock()
        self.audio_seq = 0
        self.handle: Optional[StreamHandle] = None

    def _new_mixer(self) -> ActiveNoteBuffer:
        kwargs = {} if self.master_gain is None else {"master_gain": self.master_gain}
        return ActiveNoteBuffer(self.sample_rate, self.cfg, **kwargs)

    def start(self) -> None:
        self.handle = stream_realtime(
            self._on_block, self.mixer, block_frames=self.block_frames, realtime=True
        )

    def stop(self) -> None:
        if self.handle is not None:
            self.handle.stop()
            self.handle = None

    # -- connection lifecycle (socket context) ------------------------------

    def attach(self, conn: _Connection) -> bool:
        with self._conn_lock:
            if self.connection is not None:
                return False
            conn.epoch = self.mixer.time()
            self.connection = conn
            return True

    def detach(self, conn: _Connection) -> None:
        with self._conn_lock:
            if self.connection is conn:
                self.connection = None
                self.commands.append(("reset", None))

    def submit(self, kind: str, payload) -> None:
        self.commands.append((kind, payload))

    # -- render tick (audio context) ----------------------------------------

    def _apply_command(self, kind: str, payload, conn: Optional[_Connection]) -> None:
        if kind == "reset":
            self.session = Session(self.lineset, self.cfg, self.mixer)
            return
        if kind == "cursor":
            feedback = self.session.on_cursor_move(
                Point2(payload["x"], payload["y"]), payload["t"]
            )
            if conn is not None:
                for fb in feedback:
                    conn.push_threadsafe(json.dumps(fb.to_dict()))
        elif kind == "lens":
            self.session.set_lens(payload)
        elif kind == "playback":
            t = self.session.cursor_t if self.session.cursor_t is not None else 0.0
            try:
                self.session.start_lens_playback(t)
            except ValueError as e:
                if conn is not None:
                    conn.push_threadsafe(json.dumps({"type": "error", "message": str(e)}))
        elif kind == "config":
            cfg_fields = {f.name for f in dataclasses.fields(MappingConfig)}
            updates = {k: v for k, v in payload.items() if k in cfg_fields}
            if updates:
                self.cfg = dataclasses.replace(self.cfg, **updates)
                self.session.cfg = self.cfg
                self.mixer.cfg = self.cfg
            if "playback_spacing" in payload:
                self.session.playback_spacing = float(payload["playback_spacing"])

    def _on_block(self, block: np.ndarray) -> None:
        conn = self.connection
        while self.commands:
            kind, payload = self.commands.popleft()
            self._apply_command(kind, payload, conn)
        if conn is not None:
            fired = self.session.advance_to(self.mixer.time() - conn.epoch)
            for fb in fired:
                conn.push_threadsafe(json.dumps(fb.to_dict()))
        seq = self.audio_seq
        self.audio_seq += 1
        if conn is not None:
            frame = struct.pack("<Q", seq) + block.astype("<f4").tobytes()
            conn.push_threadsafe(frame)
            if seq % STATS_INTERVAL_BLOCKS == 0:
                conn.push_threadsafe(json.dumps({"type": "stats", **self.stats()}))

    def stats(self) -> dict:
        out = dict(self.mixer.stats())
        out["audio_seq"] = self.audio_seq
        out["underruns"] = self.handle.underruns if self.handle else 0
        conn = self.connection
        out["audio_frames_dropped"] = conn.audio_frames_dropped if conn else 0
        out["connected"] = conn is not None
        out["out_of_order_events"] = self.session.out_of_order_events
        return out


def _parse_client_message(raw: str):
    msg = json.loads(raw)
    kind = msg.get("type")
    if kind == "cursor":
        return "cursor", {"t": float(msg["t"]), "x": float(msg["x"]), "y": float(msg["y"])}
    if kind == "lens":
        lens = Lens(
            center=Point2(float(msg["center"][0]), float(msg["center"][1])),
            radius=float(msg["radius"]),
            threshold=float(msg["threshold"]),
            enabled=bool(msg.get("enabled", True)),
        )
        return "lens", lens
    if kind == "playback":
        return "playback", None
    if kind == "config":
        return "config", msg
    raise ValueError(f"unknown message type {kind!r}")


def create_app(
    lineset: LineSet,
    cfg: MappingConfig = MappingConfig(),
    sample_rate: int = 44100,
    block_frames: int = 256,
    master_gain: Optional[float] = None,
    static_dir: Optional[str] = None,
) -> FastAPI:
    engine = Engine(lineset, cfg, sample_rate, block_frames, master_gain)

    @asynccontextmanager
    async def lifespan(_app):
        engine.start()
        yield
        engine.stop()

    app = FastAPI(title="lineharp service", lifespan=lifespan)
    app.state.engine = engine

    @app.get("/stats")
    async def get_stats():
        return JSONResponse(engine.stats())

    @app.get("/dataset")
    async def get_dataset():
        return Response(content=save_lineset(engine.lineset), media_type="application/json")

    @app.websocket("/session")
    async def ws_session(ws: WebSocket):
        await ws.accept()
        conn = _Connection(asyncio.get_running_loop())
        if not engine.attach(conn):
            await ws.send_text(json.dumps({"type": "busy"}))
            await ws.close()
            return
        await ws.send_text(
            json.dumps(
                {
                    "type": "hello",
                    "dataset": {
                        "lines": len(engine.lineset),
                        "metadata": engine.lineset.metadata,
                    },
                    "sample_rate": engine.sample_rate,
                    "block_frames": engine.block_frames,
                }
            )
        )

        async def writer():
            while True:
                item = await conn.queue.get()
                if isinstance(item, (bytes, bytearray)):
                    await ws.send_bytes(item)
                else:
                    await ws.send_text(item)

        writer_task = asyncio.create_task(writer())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    kind, payload = _parse_client_message(raw)
                except (ValueError, KeyError, TypeError, json.JSONDecodeError) as e:
                    await ws.send_text(json.dumps({"type": "error", "message": str(e)}))
                    continue
                engine.submit(kind, payload)
        except WebSocketDisconnect:
            pass
        finally:
            writer_task.cancel()
            engine.detach(conn)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
