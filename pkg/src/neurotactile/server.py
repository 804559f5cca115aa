"""Line-delimited JSON streaming endpoint for live tapping sessions.

One TCP connection is one session with its own pipeline engine; sessions
share nothing. Inbound messages are newline-delimited JSON objects:

    {"press": <cell>, "pressure_kpa": <kPa>, "t": <ms>}
    {"release": <cell>, "t": <ms>}
    {"advance": <ms>}            advance simulated time (accelerated mode)
    {"report": true}             request an efficiency snapshot

Outbound messages mirror the pipeline events: {"kind": "window", ...} for
every active 400 ms window (idle windows are suppressed, the link is event
driven), {"kind": "segment"|"morse"|"symbol"|"efficiency"|"error"|"hello"}.

In real-time mode a background ticker advances the engine along the wall
clock and inbound timestamps are ignored; in accelerated mode (the default
here and in tests) time only moves via message timestamps and "advance".
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading
import time

from . import mlp as mlp_mod
from .errors import SimulationError
from .pipeline import PipelineEngine, ScenarioConfig

PROTOCOL_VERSION = 1
TICK_INTERVAL_S = 0.05


def _iter_lines(rfile):
    """Yield lines until EOF; an abrupt client reset just ends the session."""
    while True:
        try:
            raw = rfile.readline()
        except (ConnectionResetError, BrokenPipeError, OSError):
            return
        if not raw:
            return
        yield raw


class _SessionHandler(socketserver.StreamRequestHandler):
    def handle(self):
        server: StreamServer = self.server  # type: ignore[assignment]
        engine = PipelineEngine(server.scenario, server.model)
        lock = threading.Lock()
        write_lock = threading.Lock()
        stop = threading.Event()

        def send(obj: dict) -> None:
            try:
                with write_lock:
                    self.wfile.write((json.dumps(obj) + "\n").encode())
                    self.wfile.flush()
            except (BrokenPipeError, ConnectionResetError, OSError):
                stop.set()

        def emit(events: list[dict]) -> None:
            for ev in events:
                if ev["kind"] == "window" and not ev.get("active", False):
                    continue  # event-driven link: idle windows stay silent
                send(ev)

        send({"kind": "hello", "protocol": PROTOCOL_VERSION,
              "window_ms": server.scenario.codec.window_ms,
              "real_time": server.real_time})

        ticker = None
        if server.real_time:
            t0 = time.monotonic()

            def tick():
                while not stop.is_set():
                    time.sleep(TICK_INTERVAL_S)
                    with lock:
                        if stop.is_set():
                            break
                        emit(engine.advance((time.monotonic() - t0) * 1000.0))

            ticker = threading.Thread(target=tick, daemon=True)
            ticker.start()

        try:
            for raw in _iter_lines(self.rfile):
                line = raw.decode(errors="replace").strip()
                if not line:
                    continue
                try:
                    msg = json.loads(line)
                    if not isinstance(msg, dict):
                        raise ValueError("message must be a JSON object")
                except ValueError as exc:
                    send({"kind": "error", "message": f"bad message: {exc}"})
                    continue
                try:
                    with lock:
                        emit(self._apply(engine, server, msg, send))
                except SimulationError as exc:
                    send({"kind": "error", "message": str(exc)})
        finally:
            stop.set()
            if ticker is not None:
                ticker.join()
            with lock:
                if not engine.finished:
                    engine.finish()

    @staticmethod
    def _apply(engine: PipelineEngine, server: "StreamServer", msg: dict, send) -> list[dict]:
        events: list[dict] = []

        def advance_to(t_ms: float) -> None:
            if not server.real_time:
                events.extend(engine.advance(float(t_ms)))

        if "press" in msg:
            advance_to(msg.get("t", engine.now_ms))
            engine.set_cell_pressure(int(msg["press"]),
                                     float(msg.get("pressure_kpa", 60.0)))
        elif "release" in msg:
            advance_to(msg.get("t", engine.now_ms))
            engine.set_cell_pressure(int(msg["release"]), 0.0)
        elif "advance" in msg:
            advance_to(msg["advance"])
        elif "report" in msg:
            events.append({"kind": "efficiency", **engine.efficiency().to_dict()})
        else:
            send({"kind": "error", "message": f"unknown message keys {sorted(msg)}"})
        return events


class StreamServer:
    """TCP server hosting live pipeline sessions; start()/stop() for embedding."""

    def __init__(
        self,
        port: int,
        scenario: ScenarioConfig | None = None,
        model: mlp_mod.MlpModel | None = None,
        real_time: bool = False,
        host: str = "127.0.0.1",
    ):
        self.scenario = scenario or ScenarioConfig()
        self.model = model
        self.real_time = real_time

        class _Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = _Server((host, port), _SessionHandler)
        self._server.scenario = self.scenario  # type: ignore[attr-defined]
        self._server.model = self.model  # type: ignore[attr-defined]
        self._server.real_time = self.real_time  # type: ignore[attr-defined]
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    def start(self) -> None:
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join()

    def serve_forever(self) -> None:
        self._server.serve_forever()


def serve_stream(
    port: int,
    scenario: ScenarioConfig | None = None,
    model: mlp_mod.MlpModel | None = None,
    real_time: bool = True,
    host: str = "127.0.0.1",
) -> None:
    """Blocking entry point used by the CLI."""
    server = StreamServer(port, scenario, model, real_time=real_time, host=host)
    print(f"serving stream on {host}:{server.port} "
          f"({'real-time' if real_time else 'accelerated'} mode)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()
