"""Interactive session host: the tick loop plus the websocket wire protocol.

One simulation loop owns all world state. Network I/O only touches the
bounded command queue (in) and the snapshot broadcast (out). The first
connection becomes the operator; later connections are read-only. At most
one command frame applies per tick so a recorded session replays onto the
same tick grid.
"""

from __future__ import annotations

import asyncio
from pathlib import Path

from websockets.asyncio.server import broadcast, serve

from .errors import ProtocolError
from .scenario import Scenario
from .service import MetricsLog, SessionConfig, snapshot_from_engine
from .task_engine import TaskEngine
from .teleop import write_trace
from .wire import command_from_message, decode_message, encode_error, encode_snapshot

COMMAND_QUEUE_LIMIT = 256


def parse_listen(listen: str) -> tuple[str, int]:
    host, _, port = listen.rpartition(":")
    if not host or not port:
        raise ValueError(f"listen address must be host:port, got {listen!r}")
    return host, int(port)


class InteractiveServer:
    def __init__(
        self,
        scenario: Scenario,
        listen: str = "127.0.0.1:8765",
        record: str | Path | None = None,
        tick_rate: float | None = None,
    ):
        self.engine = TaskEngine(scenario)
        self.host, self.port = parse_listen(listen)
        self.record = Path(record) if record else None
        self.tick_rate = tick_rate or scenario.service.interactive_tick_rate
        self.recorded = []
        self.metrics = MetricsLog()
        self._pending = []
        self._operator = None
        self._clients = set()
        self._stop = asyncio.Event()
        self._loop = None

    # -- connection side -------------------------------------------------------

    async def _handler(self, ws):
        if self._operator is None:
            self._operator = ws
        self._clients.add(ws)
        try:
            async for text in ws:
                await self._on_message(ws, text)
        finally:
            self._clients.discard(ws)
            if ws is self._operator:
                self._operator = None
                # dead-man behavior: the arm holds where it is
                self.engine.workspace_map.disengage()

    async def _on_message(self, ws, text):
        try:
            msg = decode_message(text)
        except ProtocolError as exc:
            await ws.send(encode_error(str(exc)))
            return
        if ws is not self._operator:
            await ws.send(encode_error("read-only connection: an operator is already attached"))
            return
        if msg["type"] == "control":
            if msg["action"] == "reset":
                self.engine.reset()
                self.recorded.clear()
                self._pending.clear()
                self.metrics = MetricsLog()
            return
        if len(self._pending) >= COMMAND_QUEUE_LIMIT:
            self._pending.pop(0)
        self._pending.append(msg)

    # -- simulation side ---------------------------------------------------------

    def _tick_once(self):
        commands = ()
        if self._pending:
            msg = self._pending.pop(0)
            cmd = command_from_message(msg, self.engine.tick + 1)
            if self.record is not None:
                self.recorded.append(cmd)
            commands = (cmd,)
        self.engine.step(commands)
        self.metrics.append(self.engine)
        broadcast(self._clients, encode_snapshot(snapshot_from_engine(self.engine)))

    async def _tick_forever(self):
        dt = 1.0 / self.tick_rate
        clock = asyncio.get_running_loop().time
        next_tick = clock() + dt
        while not self._stop.is_set():
            self._tick_once()
            delay = next_tick - clock()
            next_tick = (next_tick if delay > 0 else clock()) + dt
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                await asyncio.sleep(0)

    async def run(self, ready=None):
        """Serve until stop() is called; `ready(port)` fires once bound."""
        self._loop = asyncio.get_running_loop()
        async with serve(self._handler, self.host, self.port) as server:
            port = server.sockets[0].getsockname()[1]
            if ready is not None:
                ready(port)
            try:
                await self._tick_forever()
            finally:
                if self.record is not None and self.recorded:
                    write_trace(self.record, self.recorded)

    def stop(self):
        """Signal the session to end; safe to call from another thread."""
        if self._loop is not None:
            self._loop.call_soon_threadsafe(self._stop.set)
        else:
            self._stop.set()


def serve_interactive(config: SessionConfig):
    """CLI entry point: host one interactive session until interrupted."""
    from .scenario import load_scenario

    scenario = load_scenario(config.scenario_path, config.left_arm, config.right_arm)
    server = InteractiveServer(
        scenario,
        listen=config.listen,
        record=config.record,
        tick_rate=config.tick_rate,
    )

    def announce(port):
        print(f"listening on ws://{server.host}:{port} (tick rate {server.tick_rate} Hz)")

    try:
        asyncio.run(server.run(ready=announce))
    except KeyboardInterrupt:
        pass
    return 0
