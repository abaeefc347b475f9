// Pure scene builder: cockpit state in, flat display list out. Keeping
// this free of canvas calls means the fuzz and replay perf tests can run
// it headless, and the painter stays a dumb loop over primitives.

import type { Vec3, Mat3 } from "./quat.js";
import {
  add,
  cross,
  dot,
  matMul,
  matVec,
  normalize,
  quatToMatrix,
  rotX,
  rotY,
  scale,
  sub,
} from "./quat.js";
import type { CockpitState } from "./state.js";

export type SceneItem =
  | { kind: "line"; pts: Array<[number, number]>; color: string; width: number }
  | { kind: "text"; text: string; x: number; y: number; color: string; size: number }
  | { kind: "bar"; x: number; y: number; w: number; h: number; fraction: number; color: string };

export interface ViewConfig {
  width: number;
  height: number;
  yawRad: number;
  pitchRad: number;
  distanceM: number;
  semiAxesM: Vec3;
}

export function defaultView(width: number, height: number): ViewConfig {
  return {
    width,
    height,
    yawRad: 0.7,
    pitchRad: 0.45,
    distanceM: 1.6,
    semiAxesM: [0.2, 0.2, 0.2],
  };
}

interface Camera {
  eye: Vec3;
  right: Vec3;
  up: Vec3;
  forward: Vec3;
  focal: number;
  cx: number;
  cy: number;
}

function makeCamera(target: Vec3, view: ViewConfig): Camera {
  const cp = Math.cos(view.pitchRad), sp = Math.sin(view.pitchRad);
  const cy = Math.cos(view.yawRad), sy = Math.sin(view.yawRad);
  const offset: Vec3 = [
    view.distanceM * cp * cy,
    view.distanceM * cp * sy,
    view.distanceM * sp,
  ];
  const eye = add(target, offset);
  const forward = normalize(sub(target, eye));
  const right = normalize(cross(forward, [0, 0, 1]));
  const up = cross(right, forward);
  return {
    eye,
    right,
    up,
    forward,
    focal: 0.9 * view.height,
    cx: view.width / 2,
    cy: view.height / 2,
  };
}

const NEAR_M = 0.05;

function project(cam: Camera, p: Vec3): [number, number] | null {
  const rel = sub(p, cam.eye);
  const depth = dot(rel, cam.forward);
  if (depth < NEAR_M) return null;
  const sx = cam.cx + (cam.focal * dot(rel, cam.right)) / depth;
  const sy = cam.cy - (cam.focal * dot(rel, cam.up)) / depth;
  if (!Number.isFinite(sx) || !Number.isFinite(sy)) return null;
  return [sx, sy];
}

function polyline(
  cam: Camera,
  points: Vec3[],
  color: string,
  width: number,
  out: SceneItem[],
): void {
  // split at points that fall behind the near plane
  let run: Array<[number, number]> = [];
  for (const p of points) {
    const s = project(cam, p);
    if (s === null) {
      if (run.length > 1) out.push({ kind: "line", pts: run, color, width });
      run = [];
    } else {
      run.push(s);
    }
  }
  if (run.length > 1) out.push({ kind: "line", pts: run, color, width });
}

function circlePoints(center: Vec3, u: Vec3, v: Vec3, radius: number, n = 40): Vec3[] {
  const pts: Vec3[] = [];
  for (let i = 0; i <= n; i++) {
    const a = (2 * Math.PI * i) / n;
    pts.push(add(center, add(scale(u, radius * Math.cos(a)), scale(v, radius * Math.sin(a)))));
  }
  return pts;
}

function groundGrid(cam: Camera, target: Vec3, out: SceneItem[]): void {
  const step = 0.5;
  const half = 6;
  const x0 = Math.round(target[0] / step) * step;
  const y0 = Math.round(target[1] / step) * step;
  for (let i = -half; i <= half; i++) {
    polyline(cam, [
      [x0 + i * step, y0 - half * step, 0],
      [x0 + i * step, y0 + half * step, 0],
    ], "#2a3442", 1, out);
    polyline(cam, [
      [x0 - half * step, y0 + i * step, 0],
      [x0 + half * step, y0 + i * step, 0],
    ], "#2a3442", 1, out);
  }
}

function robotBody(
  cam: Camera,
  position: Vec3,
  rotation: Mat3,
  alphaRad: number,
  betaRad: number,
  view: ViewConfig,
  out: SceneItem[],
): void {
  const [a, b, c] = view.semiAxesM;
  const world = (p: Vec3): Vec3 => add(position, matVec(rotation, p));

  // three principal cross sections of the shell
  const n = 36;
  const ring = (f: (t: number) => Vec3): Vec3[] => {
    const pts: Vec3[] = [];
    for (let i = 0; i <= n; i++) pts.push(world(f((2 * Math.PI * i) / n)));
    return pts;
  };
  polyline(cam, ring((t) => [a * Math.cos(t), b * Math.sin(t), 0]), "#6fa8dc", 1.5, out);
  polyline(cam, ring((t) => [a * Math.cos(t), 0, c * Math.sin(t)]), "#6fa8dc", 1.5, out);
  polyline(cam, ring((t) => [0, b * Math.cos(t), c * Math.sin(t)]), "#6fa8dc", 1.5, out);

  // heading tick along body +x
  polyline(cam, [world([0, 0, 0]), world([a * 1.15, 0, 0])], "#e9c558", 2, out);

  const rMin = Math.min(a, b, c);

  // outer gimbal ring: rotates about body x by alpha
  const outerRot = rotX(alphaRad);
  const outerPts: Vec3[] = [];
  for (let i = 0; i <= n; i++) {
    const t = (2 * Math.PI * i) / n;
    outerPts.push(world(matVec(outerRot, [0, 0.78 * rMin * Math.cos(t), 0.78 * rMin * Math.sin(t)])));
  }
  polyline(cam, outerPts, "#9fd39f", 1.5, out);

  // inner gimbal ring: about the alpha-rotated y axis by beta
  const innerRot = matMul(outerRot, rotY(betaRad));
  const innerPts: Vec3[] = [];
  for (let i = 0; i <= n; i++) {
    const t = (2 * Math.PI * i) / n;
    innerPts.push(world(matVec(innerRot, [0.62 * rMin * Math.cos(t), 0, 0.62 * rMin * Math.sin(t)])));
  }
  polyline(cam, innerPts, "#d39fd3", 1.5, out);

  // rotor axis arrow
  const axis = matVec(rotation, matVec(innerRot, [0, 0, 1]));
  const tip = add(position, scale(axis, 1.45 * rMin));
  const tail = add(position, scale(axis, -1.45 * rMin));
  polyline(cam, [tail, tip], "#ef6a6a", 2.5, out);
  const side = normalize(cross(axis, [0, 0, 1]));
  const headBase = add(position, scale(axis, 1.2 * rMin));
  polyline(cam, [tip, add(headBase, scale(side, 0.12 * rMin))], "#ef6a6a", 2.5, out);
  polyline(cam, [tip, add(headBase, scale(side, -0.12 * rMin))], "#ef6a6a", 2.5, out);
}

function gaugePanel(state: CockpitState, nowMs: number, view: ViewConfig, out: SceneItem[]): void {
  const x = view.width - 230;
  let y = 40;
  const line = (text: string, color = "#c8d2dc", size = 13) => {
    out.push({ kind: "text", text, x, y, color, size });
    y += size + 7;
  };
  const bar = (fraction: number, color: string) => {
    out.push({ kind: "bar", x, y: y - 4, w: 200, h: 10, fraction, color });
    y += 16;
  };

  const frame = state.frame;
  line(`${state.status}  |  ${state.role}`, "#8aa0b4");
  line(`telemetry ${state.telemetryFps.toFixed(1)} Hz`, "#8aa0b4");
  y += 6;

  if (frame === null) {
    line("waiting for first frame", "#8aa0b4");
    return;
  }

  line(`reservoir ${(100 * frame.gauge_fraction).toFixed(1)} %`);
  bar(clamp01(frame.gauge_fraction), frame.gauge_fraction > 0.25 ? "#5fae5f" : "#d98a3c");
  if (frame.gauge_fraction <= 0.005) {
    line("RESERVOIR EMPTY", "#ef6a6a", 15);
    line("respin the rotor, or roll broadside", "#ef9a6a", 12);
    line("to recover the axis with gravity", "#ef9a6a", 12);
  }

  const rpm = (frame.rotor_speed_radps * 60) / (2 * Math.PI);
  line(frame.rotor_stopped ? "rotor stopped" : `rotor ${rpm.toFixed(0)} rpm`);
  line(`battery ${(100 * frame.battery_soc).toFixed(0) } %  (${frame.battery_v.toFixed(1)} V)`);
  bar(clamp01(frame.battery_soc), "#5f8fae");

  const deg = 180 / Math.PI;
  line(`alpha ${(frame.alpha_rad * deg).toFixed(1)} deg  (${frame.alpha_rate_radps.toFixed(2)} rad/s)`);
  line(`beta  ${(frame.beta_rad * deg).toFixed(1)} deg  (${frame.beta_rate_radps.toFixed(2)} rad/s)`);
  line(frame.in_contact ? `contact ${frame.normal_force_n.toFixed(1)} N` : "airborne");
  y += 6;

  line(`cmd sent  fwd ${state.commandForward.toFixed(2)}  turn ${state.commandTurn.toFixed(2)}`, "#8aa0b4");
  line(`cmd applied fwd ${frame.command_forward.toFixed(2)}  turn ${frame.command_turn.toFixed(2)}`);
  bar(0.5 + 0.5 * clampSigned(frame.command_forward), "#5fae5f");
  bar(0.5 + 0.5 * clampSigned(frame.command_turn), "#ae8f5f");
  line(`sim t ${frame.time_s.toFixed(2)} s   tick ${frame.tick}`, "#8aa0b4", 12);
}

function clamp01(x: number): number {
  return Math.min(1, Math.max(0, x));
}

function clampSigned(x: number): number {
  return Math.min(1, Math.max(-1, x));
}

export function buildScene(state: CockpitState, nowMs: number, view: ViewConfig): SceneItem[] {
  const out: SceneItem[] = [];
  const frame = state.frame;
  const target: Vec3 = frame === null ? [0, 0, 0.2] : frame.position_m;
  const cam = makeCamera(target, view);

  groundGrid(cam, target, out);
  if (state.trail.length > 1) {
    polyline(cam, state.trail.map(([px, py]): Vec3 => [px, py, 0.002]), "#4f7a9f", 1.5, out);
  }
  if (frame !== null) {
    robotBody(
      cam,
      frame.position_m,
      quatToMatrix(frame.orientation_wxyz),
      frame.alpha_rad,
      frame.beta_rad,
      view,
      out,
    );
  }

  gaugePanel(state, nowMs, view, out);

  if (state.banner !== null) {
    out.push({
      kind: "text",
      text: state.banner,
      x: 20,
      y: 28,
      color: state.status === "version-mismatch" ? "#ef6a6a" : "#e9c558",
      size: 15,
    });
  }
  if (state.stale(nowMs)) {
    out.push({
      kind: "text",
      text: "TELEMETRY STALE",
      x: view.width / 2 - 90,
      y: 60,
      color: "#ef6a6a",
      size: 20,
    });
  }
  return out;
}
