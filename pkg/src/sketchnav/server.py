"""Session service: one mode machine shared over two transports.

Plain TCP clients exchange newline-delimited UTF-8 JSON records; browser
clients connect over WebSocket and exchange the same records one per frame.
All incoming messages funnel through a single queue, so every client observes
one total order of session mutations. The first connected client is the
authoritative drawing client; later clients are observers and their commands
are rejected. Telemetry from a confirmed SEND is paced out at the telemetry
period in wall time.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import logging
from typing import Optional

from websockets.asyncio.server import serve as ws_serve

from .evaluator import Scenario
from .pure_pursuit import ControllerParams
from .session import TELEMETRY_PERIOD, Session, SessionConfig
from .simulator import OccupancyGrid
from .store import PathStore

log = logging.getLogger(__name__)

MUTATING_TYPES = {"set_mode", "pinch", "cursor", "confirm", "select_path"}


def _encode(msg: dict) -> str:
    return json.dumps(msg, separators=(",", ":"))


class _Client:
    def __init__(self, client_id: int, send):
        self.id = client_id
        self.send = send  # async callable(text)
        self.alive = True


class SessionServer:
    """Serves one Session over TCP and WebSocket endpoints."""

    def __init__(
        self,
        session: Session,
        host: str = "127.0.0.1",
        port: int = 8765,
        ws_port: Optional[int] = None,
        pace: bool = True,
    ):
        if not session.defer_playback:
            raise ValueError("the server needs a session with defer_playback=True")
        self.session = session
        self.host = host
        self.port = port
        self.ws_port = ws_port if ws_port is not None else port + 1
        self.pace = pace

        self._ids = itertools.count(1)
        self._clients: dict[int, _Client] = {}
        self._queue: asyncio.Queue = asyncio.Queue()
        self._tcp_server = None
        self._ws_server = None
        self._consumer: Optional[asyncio.Task] = None
        self._stream_task: Optional[asyncio.Task] = None

    # -- lifecycle -------------------------------------------------------------

    async def start(self) -> None:
        self._consumer = asyncio.create_task(self._consume())
        self._tcp_server = await asyncio.start_server(self._handle_tcp, self.host, self.port)
        self._ws_server = await ws_serve(self._handle_ws, self.host, self.ws_port)
        self.port = self._tcp_server.sockets[0].getsockname()[1]
        self.ws_port = self._ws_server.sockets[0].getsockname()[1]
        log.info("listening on tcp://%s:%d and ws://%s:%d", self.host, self.port, self.host, self.ws_port)

    async def stop(self) -> None:
        for task in (self._stream_task, self._consumer):
            if task is not None:
                task.cancel()
                try:
                    await task
                except asyncio.CancelledError:
                    pass
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._ws_server is not None:
            self._ws_server.close()
            await self._ws_server.wait_closed()

    async def serve_forever(self) -> None:
        await self.start()
        try:
            await asyncio.Event().wait()
        finally:
            await self.stop()

    # -- client bookkeeping ------------------------------------------------------

    def _authoritative_id(self) -> Optional[int]:
        return min(self._clients) if self._clients else None

    async def _register(self, send) -> _Client:
        client = _Client(next(self._ids), send)
        self._clients[client.id] = client
        for msg in self.session.snapshot_messages():
            await self._send_safe(client, msg)
        return client

    def _unregister(self, client: _Client) -> None:
        client.alive = False
        self._clients.pop(client.id, None)

    async def _send_safe(self, client: _Client, msg: dict) -> None:
        try:
            await client.send(_encode(msg))
        except Exception:
            self._unregister(client)

    async def _broadcast(self, msg: dict) -> None:
        for client in list(self._clients.values()):
            await self._send_safe(client, msg)

    # -- message pump -----------------------------------------------------------

    async def _consume(self) -> None:
        while True:
            client, msg = await self._queue.get()
            if not client.alive:
                continue
            if (
                isinstance(msg, dict)
                and msg.get("type") in MUTATING_TYPES
                and client.id != self._authoritative_id()
            ):
                await self._send_safe(
                    client,
                    {
                        "type": "error",
                        "code": "not-authoritative",
                        "message": "another client owns this drawing session",
                    },
                )
                continue
            try:
                replies = self.session.handle_message(msg)
            except Exception:
                log.exception("message handling failed")
                await self._send_safe(
                    client,
                    {"type": "error", "code": "internal-error", "message": "message handling failed"},
                )
                continue
            for reply in replies:
                if reply.get("type") == "error":
                    await self._send_safe(client, reply)
                else:
                    await self._broadcast(reply)
            playback = self.session.take_playback()
            if playback:
                # flag before the task runs: a SEND confirm arriving in the
                # gap must see the run as active
                self.session.run_active = True
                self._stream_task = asyncio.create_task(self._stream(playback))

    async def _stream(self, frames: list[dict]) -> None:
        try:
            for frame in frames:
                await self._broadcast(frame)
                if self.pace and frame.get("type") == "robot_state":
                    await asyncio.sleep(TELEMETRY_PERIOD)
        finally:
            self.session.run_active = False

    # -- transports ---------------------------------------------------------------

    async def _handle_tcp(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        async def send(text: str) -> None:
            writer.write(text.encode("utf-8") + b"\n")
            await writer.drain()

        client = await self._register(send)
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                await self._enqueue_raw(client, line.decode("utf-8", errors="replace"))
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            self._unregister(client)
            writer.close()

    async def _handle_ws(self, websocket) -> None:
        client = await self._register(websocket.send)
        try:
            async for raw in websocket:
                if isinstance(raw, bytes):
                    raw = raw.decode("utf-8", errors="replace")
                await self._enqueue_raw(client, raw)
        except Exception:
            pass
        finally:
            self._unregister(client)

    async def _enqueue_raw(self, client: _Client, raw: str) -> None:
        raw = raw.strip()
        if not raw:
            return
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as exc:
            await self._send_safe(
                client,
                {"type": "error", "code": "bad-message", "message": f"invalid JSON: {exc.msg}"},
            )
            return
        await self._queue.put((client, msg))


def serve_forever(
    db_file,
    host: str = "127.0.0.1",
    port: int = 8765,
    ws_port: Optional[int] = None,
    grid: Optional[OccupancyGrid] = None,
    scenario: Optional[Scenario] = None,
    params: Optional[ControllerParams] = None,
    dt: float = 0.05,
) -> None:
    """Blocking entry point used by the CLI."""
    store = PathStore(db_file)
    config = SessionConfig(controller=params or ControllerParams(), dt=dt)
    session = Session(
        store, grid=grid, scenario=scenario, config=config, defer_playback=True
    )
    server = SessionServer(session, host=host, port=port, ws_port=ws_port)
    asyncio.run(server.serve_forever())
