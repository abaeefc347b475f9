// Browser entry point. Query parameters: ?ws=ws://host:port picks the
// server (default ws://localhost:8765), &observe=1 skips the driver
// claim. Drag orbits the camera, wheel zooms, W/S/A/D drives.

import { CommandEmitter, CommandSource } from "./input.js";
import { RenderLoop, paint } from "./render.js";
import { buildScene, defaultView } from "./scene.js";
import { Session } from "./session.js";

const params = new URLSearchParams(window.location.search);
const url = params.get("ws") ?? "ws://localhost:8765";

const canvas = document.getElementById("cockpit") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const view = defaultView(window.innerWidth, window.innerHeight);

function resize(): void {
  canvas.width = window.innerWidth;
  canvas.height = window.innerHeight;
  view.width = canvas.width;
  view.height = canvas.height;
}
resize();
window.addEventListener("resize", resize);

const session = new Session(url, {
  transport: (u) => new WebSocket(u),
  claimDriver: params.get("observe") === null,
});
session.connect();

const source = new CommandSource();
window.addEventListener("keydown", (ev) => {
  source.keys.down(ev.code);
  if (ev.code.startsWith("Arrow")) ev.preventDefault();
});
window.addEventListener("keyup", (ev) => source.keys.up(ev.code));
window.addEventListener("blur", () => source.keys.clear());

const emitter = new CommandEmitter(source, (axes) => {
  const pads = navigator.getGamepads?.() ?? [];
  const pad = pads.find((p) => p !== null);
  if (pad !== undefined && pad !== null) {
    source.setGamepadAxes(-(pad.axes[1] ?? 0), -(pad.axes[0] ?? 0));
  }
  session.sendCommand(axes.forward, axes.turn);
});
emitter.start();

let dragging = false;
canvas.addEventListener("mousedown", () => { dragging = true; });
window.addEventListener("mouseup", () => { dragging = false; });
window.addEventListener("mousemove", (ev) => {
  if (!dragging) return;
  view.yawRad -= ev.movementX * 0.008;
  view.pitchRad = Math.min(1.45, Math.max(0.05, view.pitchRad + ev.movementY * 0.008));
});
canvas.addEventListener("wheel", (ev) => {
  view.distanceM = Math.min(8, Math.max(0.5, view.distanceM * Math.exp(ev.deltaY * 0.001)));
  ev.preventDefault();
});

const loop = new RenderLoop();
loop.start((nowMs) => {
  const items = buildScene(session.state, nowMs, view);
  items.push({
    kind: "text",
    text: `render ${loop.fps.toFixed(0)} fps`,
    x: 20,
    y: view.height - 16,
    color: "#58656f",
    size: 12,
  });
  paint(ctx, items, view.width, view.height);
});
