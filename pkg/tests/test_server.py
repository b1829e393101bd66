import asyncio
import json
import math

from websockets.asyncio.client import connect as ws_connect

from sketchnav.server import SessionServer
from sketchnav.session import Session, SessionConfig
from sketchnav.store import PathStore


def make_server(tmp_path):
    store = PathStore(tmp_path / "db.json")
    session = Session(store, config=SessionConfig(), defer_playback=True)
    # port 0 binds an ephemeral port; pace=False streams telemetry instantly
    return SessionServer(session, port=0, ws_port=0, pace=False)


class TcpClient:
    def __init__(self, reader, writer):
        self.reader = reader
        self.writer = writer

    @classmethod
    async def open(cls, port):
        reader, writer = await asyncio.open_connection("127.0.0.1", port)
        return cls(reader, writer)

    async def send(self, msg):
        self.writer.write(json.dumps(msg).encode() + b"\n")
        await self.writer.drain()

    async def send_raw(self, raw):
        self.writer.write(raw)
        await self.writer.drain()

    async def recv(self, timeout=5.0):
        line = await asyncio.wait_for(self.reader.readline(), timeout)
        return json.loads(line)

    async def recv_until(self, predicate, timeout=5.0, limit=500):
        for _ in range(limit):
            msg = await self.recv(timeout)
            if predicate(msg):
                return msg
        raise AssertionError("predicate never satisfied")

    def close(self):
        self.writer.close()


def drag_messages(x0, x1, y, step=0.05):
    msgs = [{"type": "pinch", "state": "down"}]
    n = int(round((x1 - x0) / step))
    msgs += [{"type": "cursor", "x": x0 + i * step, "y": y} for i in range(n + 1)]
    msgs.append({"type": "pinch", "state": "up"})
    return msgs


def test_tcp_snapshot_and_add_flow(tmp_path):
    async def scenario():
        server = make_server(tmp_path)
        await server.start()
        try:
            client = await TcpClient.open(server.port)
            # snapshot on connect: mode then paths
            assert (await client.recv())["type"] == "mode"
            snapshot = await client.recv()
            assert snapshot == {"type": "paths", "paths": []}

            await client.send({"type": "set_mode", "mode": "ADD"})
            mode = await client.recv_until(lambda m: m["type"] == "mode")
            assert mode["mode"] == "ADD"
            for msg in drag_messages(0.0, 1.0, 0.0):
                await client.send(msg)
            paths = await client.recv_until(lambda m: m["type"] == "paths")
            assert len(paths["paths"]) == 1
            client.close()
        finally:
            await server.stop()

    asyncio.run(scenario())


def test_broadcasts_reach_observers_and_errors_do_not(tmp_path):
    async def scenario():
        server = make_server(tmp_path)
        await server.start()
        try:
            drawer = await TcpClient.open(server.port)
            observer = await TcpClient.open(server.port)
            for c in (drawer, observer):
                await c.recv()
                await c.recv()

            await drawer.send({"type": "set_mode", "mode": "ADD"})
            assert (await drawer.recv_until(lambda m: m["type"] == "mode"))["mode"] == "ADD"
            assert (await observer.recv_until(lambda m: m["type"] == "mode"))["mode"] == "ADD"

            # a protocol violation by the drawer is answered privately
            await drawer.send({"type": "confirm", "value": True})
            err = await drawer.recv_until(lambda m: m["type"] == "error")
            assert err["code"] == "protocol-violation"

            # the observer saw no error; prove the stream position by a mode flip
            await drawer.send({"type": "set_mode", "mode": "OFF"})
            nxt = await observer.recv(timeout=5.0)
            assert nxt == {"type": "mode", "mode": "OFF", "confirm_required": False}
            drawer.close()
            observer.close()
        finally:
            await server.stop()

    asyncio.run(scenario())


def test_observer_commands_are_rejected(tmp_path):
    async def scenario():
        server = make_server(tmp_path)
        await server.start()
        try:
            drawer = await TcpClient.open(server.port)
            await drawer.recv()
            await drawer.recv()
            observer = await TcpClient.open(server.port)
            await observer.recv()
            await observer.recv()

            await observer.send({"type": "set_mode", "mode": "ADD"})
            err = await observer.recv_until(lambda m: m["type"] == "error")
            assert err["code"] == "not-authoritative"
            drawer.close()
            observer.close()
        finally:
            await server.stop()

    asyncio.run(scenario())


def test_websocket_shares_the_tcp_schema_and_session(tmp_path):
    async def scenario():
        server = make_server(tmp_path)
        await server.start()
        try:
            async with ws_connect(f"ws://127.0.0.1:{server.ws_port}") as ws:
                assert json.loads(await ws.recv())["type"] == "mode"
                assert json.loads(await ws.recv())["type"] == "paths"

                await ws.send(json.dumps({"type": "set_mode", "mode": "ADD"}))
                msg = json.loads(await ws.recv())
                assert msg == {"type": "mode", "mode": "ADD", "confirm_required": False}
                for m in drag_messages(0.0, 1.0, 0.0):
                    await ws.send(json.dumps(m))
                paths = json.loads(await ws.recv())
                assert paths["type"] == "paths" and len(paths["paths"]) == 1

                # a TCP observer sees the same stored path on connect
                tcp = await TcpClient.open(server.port)
                await tcp.recv()
                snapshot = await tcp.recv()
                assert len(snapshot["paths"]) == 1
                tcp.close()
        finally:
            await server.stop()

    asyncio.run(scenario())


def test_send_streams_robot_state_and_result(tmp_path):
    async def scenario():
        server = make_server(tmp_path)
        await server.start()
        try:
            client = await TcpClient.open(server.port)
            await client.recv()
            await client.recv()
            await client.send({"type": "set_mode", "mode": "ADD"})
            for msg in drag_messages(0.0, 2.0, 0.0):
                await client.send(msg)
            paths = await client.recv_until(lambda m: m["type"] == "paths")
            goal = paths["paths"][0]["goal"]
            await client.send({"type": "set_mode", "mode": "SEND"})
            await client.send({"type": "confirm", "value": True})
            frames = []
            result = None
            while result is None:
                msg = await client.recv()
                if msg["type"] == "robot_state":
                    frames.append(msg)
                elif msg["type"] == "result":
                    result = msg
            assert result["outcome"] == "reached_goal"
            assert len(frames) > 10
            last = frames[-1]
            assert math.hypot(last["x"] - goal[0], last["y"] - goal[1]) <= 0.1
            client.close()
        finally:
            await server.stop()

    asyncio.run(scenario())


def test_invalid_json_line_gets_bad_message_reply(tmp_path):
    async def scenario():
        server = make_server(tmp_path)
        await server.start()
        try:
            client = await TcpClient.open(server.port)
            await client.recv()
            await client.recv()
            await client.send_raw(b"this is not json\n")
            err = await client.recv_until(lambda m: m["type"] == "error")
            assert err["code"] == "bad-message"
            client.close()
        finally:
            await server.stop()

    asyncio.run(scenario())


def test_restart_restores_paths_from_db(tmp_path):
    async def scenario():
        server = make_server(tmp_path)
        await server.start()
        try:
            client = await TcpClient.open(server.port)
            await client.recv()
            await client.recv()
            await client.send({"type": "set_mode", "mode": "ADD"})
            for msg in drag_messages(0.0, 1.0, 0.0):
                await client.send(msg)
            await client.recv_until(lambda m: m["type"] == "paths")
            client.close()
        finally:
            await server.stop()

        # a fresh server against the same db restores the drawn path
        restarted = make_server(tmp_path)
        await restarted.start()
        try:
            client = await TcpClient.open(restarted.port)
            await client.recv()
            snapshot = await client.recv()
            assert len(snapshot["paths"]) == 1
            client.close()
        finally:
            await restarted.stop()

    asyncio.run(scenario())


def test_second_send_during_live_stream_is_rejected(tmp_path):
    async def scenario():
        # paced server: the first run streams slowly enough to overlap
        store = PathStore(tmp_path / "db.json")
        session = Session(store, config=SessionConfig(), defer_playback=True)
        server = SessionServer(session, port=0, ws_port=0, pace=True)
        await server.start()
        try:
            client = await TcpClient.open(server.port)
            await client.recv()
            await client.recv()
            await client.send({"type": "set_mode", "mode": "ADD"})
            for msg in drag_messages(0.0, 2.0, 0.0):
                await client.send(msg)
            await client.recv_until(lambda m: m["type"] == "paths")
            await client.send({"type": "set_mode", "mode": "SEND"})
            await client.send({"type": "confirm", "value": True})
            await client.recv_until(lambda m: m["type"] == "robot_state")
            # the first run is streaming; a second confirmed SEND must bounce
            await client.send({"type": "set_mode", "mode": "SEND"})
            await client.send({"type": "confirm", "value": True})
            err = await client.recv_until(
                lambda m: m["type"] == "error", timeout=10.0, limit=5000
            )
            assert err["code"] == "run-active"
            client.close()
        finally:
            await server.stop()

    asyncio.run(scenario())
