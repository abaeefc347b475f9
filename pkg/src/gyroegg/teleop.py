"""Live teleoperation service: WebSocket protocol v1 over a paced sim loop.

Wire format: JSON objects, one per message, `"type"` in {hello,
claim_driver, command, frame, error}. The server greets with a `hello`
carrying `"v": 1`; a client that wants the controls sends
`claim_driver` and either gets a `hello` back with role driver or an
`error` with reason `driver-taken`. Commands are accepted from the
driver only; everyone receives `frame` broadcasts.

The physics loop never waits for a client. Frames are fanned out into
bounded per-client queues, dropping the oldest entry when a reader
falls behind. Command staleness runs on sim time: each accepted command
is stamped with the loop clock, so a vanished driver stops steering
half a second later without any special disconnect handling.
"""

import asyncio
import json
import time

from websockets.asyncio.server import serve
from websockets.exceptions import ConnectionClosed

from .control import DriveCommand
from .harness import ScenarioStepper
from .scenario import ScenarioConfig

PROTOCOL_VERSION = 1
CLIENT_QUEUE_LIMIT = 8

_COMPACT = {"sort_keys": True, "separators": (",", ":")}


class TeleopServer:
    """One scenario served live on a WebSocket port."""

    def __init__(self, config: ScenarioConfig, port: int = 0, host: str = "127.0.0.1"):
        self.config = config
        self.stepper = ScenarioStepper(config)
        self.requested_port = port
        self.host = host
        self.port = None  # known after start()
        self.driver = None
        self.queues = {}
        self.broadcast_wall = []  # monotonic stamps, one per frame fan-out
        self._server = None
        self._loop_task = None

    async def start(self):
        self._server = await serve(self._handler, self.host, self.requested_port)
        self.port = self._server.sockets[0].getsockname()[1]
        self._loop_task = asyncio.create_task(self._run_loop())

    async def stop(self):
        if self._loop_task is not None:
            self._loop_task.cancel()
            try:
                await self._loop_task
            except asyncio.CancelledError:
                pass
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    async def serve_until_done(self):
        await self.start()
        try:
            await self._loop_task
        finally:
            await self.stop()

    async def _run_loop(self):
        # One wakeup per telemetry frame: compute the whole batch first,
        # sleep until the frame's own wall deadline, then broadcast.
        # Batch compute lands inside the idle slack, so cadence jitter is
        # just scheduler overshoot; the absolute schedule (origin + frame
        # sim time) keeps overshoot from accumulating, and physics is
        # never skipped when the loop falls behind.
        frames_seen = len(self.stepper.frames)
        origin = time.monotonic() - self.stepper.time
        while not self.stepper.done:
            while not self.stepper.done and len(self.stepper.frames) == frames_seen:
                self.stepper.tick()
                ahead = origin + self.stepper.time - time.monotonic()
                if ahead > 0.05:
                    # coarse telemetry leaves long tick batches; yield anyway
                    await asyncio.sleep(ahead)
            if len(self.stepper.frames) > frames_seen:
                frames_seen = len(self.stepper.frames)
                frame = self.stepper.frames[-1]
                delay = origin + frame.time_s - time.monotonic()
                if delay > 0.0:
                    await asyncio.sleep(delay)
                self._broadcast(frame)

    def _broadcast(self, frame):
        payload = json.dumps(
            {"type": "frame", "v": PROTOCOL_VERSION, **frame.as_dict()}, **_COMPACT
        )
        self.broadcast_wall.append(time.monotonic())
        for queue in self.queues.values():
            if queue.full():
                queue.get_nowait()
            queue.put_nowait(payload)

    async def _handler(self, ws):
        queue = asyncio.Queue(maxsize=CLIENT_QUEUE_LIMIT)
        self.queues[ws] = queue
        writer = asyncio.create_task(self._writer(ws, queue))
        try:
            await self._send(
                ws,
                {
                    "type": "hello",
                    "v": PROTOCOL_VERSION,
                    "role": "observer",
                    "telemetry_hz": self.config.telemetry_hz,
                    "dt_s": self.config.dt_s,
                },
            )
            async for raw in ws:
                await self._on_message(ws, raw)
        except ConnectionClosed:
            pass
        finally:
            writer.cancel()
            self.queues.pop(ws, None)
            if self.driver is ws:
                # watchdog takes over: no fresh commands, targets decay
                # to zero on sim-time staleness
                self.driver = None

    async def _writer(self, ws, queue):
        try:
            while True:
                await ws.send(await queue.get())
        except ConnectionClosed:
            pass

    async def _on_message(self, ws, raw):
        try:
            msg = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError):
            await self._error(ws, "malformed-json")
            return
        if not isinstance(msg, dict) or "type" not in msg:
            await self._error(ws, "malformed-message")
            return
        kind = msg["type"]

        if kind == "hello":
            if msg.get("v") != PROTOCOL_VERSION:
                await self._error(ws, "version-mismatch")
            return
        if kind == "claim_driver":
            if self.driver is None or self.driver is ws:
                self.driver = ws
                await self._send(
                    ws, {"type": "hello", "v": PROTOCOL_VERSION, "role": "driver"}
                )
            else:
                await self._error(ws, "driver-taken")
            return
        if kind == "command":
            if ws is not self.driver:
                await self._error(ws, "not-driver")
                return
            try:
                cmd = DriveCommand(
                    forward=float(msg.get("forward", 0.0)),
                    turn=float(msg.get("turn", 0.0)),
                    timestamp=self.stepper.time,
                )
            except (TypeError, ValueError):
                await self._error(ws, "bad-command")
                return
            self.stepper.inject_command(cmd)
            return
        await self._error(ws, f"unknown-type:{kind}")

    async def _send(self, ws, obj):
        try:
            await ws.send(json.dumps(obj, **_COMPACT))
        except ConnectionClosed:
            pass

    async def _error(self, ws, reason):
        await self._send(ws, {"type": "error", "v": PROTOCOL_VERSION, "reason": reason})


async def serve_teleop(config: ScenarioConfig, port: int):
    """Run the service until the scenario duration elapses."""
    server = TeleopServer(config, port=port, host="0.0.0.0")
    await server.serve_until_done()
