// All cockpit-visible state in one mutable object owned by the event
// loop. Network receipt writes it, the render loop reads it; the frame
// field is a latest-wins slot, so rendering never works through a
// backlog no matter how far the painter falls behind the telemetry.

import type { FrameMsg, Role, ServerMsg } from "./protocol.js";
import { PROTOCOL_VERSION } from "./protocol.js";

export type ConnectionStatus =
  | "connecting"
  | "connected"
  | "reconnecting"
  | "version-mismatch"
  | "closed";

export const STALE_AFTER_MS = 500;
const TRAIL_LIMIT = 300;
const TRAIL_MIN_STEP_M = 0.01;

export class CockpitState {
  status: ConnectionStatus = "connecting";
  role: Role = "observer";
  banner: string | null = null;

  frame: FrameMsg | null = null;
  frameSeq = 0;
  lastFrameWallMs: number | null = null;
  telemetryFps = 0;

  // local command intent, for the on-screen echo next to the server's
  commandForward = 0;
  commandTurn = 0;

  trail: Array<[number, number]> = [];

  onServerMessage(msg: ServerMsg, nowMs: number): void {
    if (msg.type === "frame") {
      this.onFrame(msg, nowMs);
      return;
    }
    if (msg.type === "hello") {
      if (msg.v !== PROTOCOL_VERSION) {
        this.status = "version-mismatch";
        this.banner = `server speaks protocol v${msg.v}, this cockpit speaks v${PROTOCOL_VERSION}`;
        return;
      }
      this.role = msg.role;
      if (msg.role === "driver") this.banner = null;
      return;
    }
    // error
    if (msg.reason === "version-mismatch") {
      this.status = "version-mismatch";
      this.banner = "protocol version rejected by server";
    } else if (msg.reason === "driver-taken") {
      this.banner = "driver slot taken, observing";
    } else {
      this.banner = `server error: ${msg.reason}`;
    }
  }

  private onFrame(frame: FrameMsg, nowMs: number): void {
    if (this.lastFrameWallMs !== null) {
      const dtMs = Math.max(nowMs - this.lastFrameWallMs, 1);
      this.telemetryFps = 0.9 * this.telemetryFps + 0.1 * (1000 / dtMs);
    }
    this.lastFrameWallMs = nowMs;
    this.frame = frame;
    this.frameSeq += 1;

    if (frame.in_contact) {
      const point: [number, number] = [frame.position_m[0], frame.position_m[1]];
      const last = this.trail[this.trail.length - 1];
      if (last === undefined || Math.hypot(point[0] - last[0], point[1] - last[1]) > TRAIL_MIN_STEP_M) {
        this.trail.push(point);
        if (this.trail.length > TRAIL_LIMIT) this.trail.shift();
      }
    }
  }

  stale(nowMs: number): boolean {
    return this.lastFrameWallMs !== null && nowMs - this.lastFrameWallMs > STALE_AFTER_MS;
  }
}
