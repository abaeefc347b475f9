// Wire protocol v1, mirroring the simulator's WebSocket server. Decoding
// is total by design: any parseable JSON comes back as a typed message or
// null, never as an exception, and numeric fields are sanitized to finite
// values so downstream rendering cannot blow up on a hostile frame.

export const PROTOCOL_VERSION = 1;

export type Role = "observer" | "driver";

export interface HelloMsg {
  type: "hello";
  v: number;
  role: Role;
  telemetry_hz?: number;
  dt_s?: number;
}

export interface ErrorMsg {
  type: "error";
  v: number;
  reason: string;
}

export interface FrameMsg {
  type: "frame";
  v: number;
  tick: number;
  time_s: number;
  position_m: [number, number, number];
  orientation_wxyz: [number, number, number, number];
  velocity_mps: [number, number, number];
  omega_world_radps: [number, number, number];
  alpha_rad: number;
  beta_rad: number;
  alpha_rate_radps: number;
  beta_rate_radps: number;
  rotor_speed_radps: number;
  in_contact: boolean;
  normal_force_n: number;
  slip_speed_mps: number;
  gauge_fraction: number;
  gauge_angle_rad: number;
  rotor_stopped: boolean;
  battery_v: number;
  battery_soc: number;
  battery_ah: number;
  command_forward: number;
  command_turn: number;
  command_age_s: number;
}

export type ServerMsg = HelloMsg | FrameMsg | ErrorMsg;

export interface CommandMsg {
  type: "command";
  v: number;
  forward: number;
  turn: number;
  timestamp_s: number;
}

function num(value: unknown, fallback = 0): number {
  const n = Number(value);
  return Number.isFinite(n) ? n : fallback;
}

function vec<N extends number>(value: unknown, length: N, fill = 0): number[] {
  const out = new Array<number>(length).fill(fill);
  if (Array.isArray(value)) {
    for (let i = 0; i < length; i++) out[i] = num(value[i], fill);
  }
  return out;
}

function decodeFrame(raw: Record<string, unknown>): FrameMsg {
  return {
    type: "frame",
    v: num(raw.v, PROTOCOL_VERSION),
    tick: num(raw.tick),
    time_s: num(raw.time_s),
    position_m: vec(raw.position_m, 3) as [number, number, number],
    orientation_wxyz: vec(raw.orientation_wxyz, 4) as [number, number, number, number],
    velocity_mps: vec(raw.velocity_mps, 3) as [number, number, number],
    omega_world_radps: vec(raw.omega_world_radps, 3) as [number, number, number],
    alpha_rad: num(raw.alpha_rad),
    beta_rad: num(raw.beta_rad),
    alpha_rate_radps: num(raw.alpha_rate_radps),
    beta_rate_radps: num(raw.beta_rate_radps),
    rotor_speed_radps: num(raw.rotor_speed_radps),
    in_contact: Boolean(raw.in_contact),
    normal_force_n: num(raw.normal_force_n),
    slip_speed_mps: num(raw.slip_speed_mps),
    gauge_fraction: num(raw.gauge_fraction),
    gauge_angle_rad: num(raw.gauge_angle_rad),
    rotor_stopped: Boolean(raw.rotor_stopped),
    battery_v: num(raw.battery_v),
    battery_soc: num(raw.battery_soc),
    battery_ah: num(raw.battery_ah),
    command_forward: num(raw.command_forward),
    command_turn: num(raw.command_turn),
    command_age_s: num(raw.command_age_s),
  };
}

export function decodeServerMessage(text: string): ServerMsg | null {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) return null;
  const raw = parsed as Record<string, unknown>;
  switch (raw.type) {
    case "frame":
      return decodeFrame(raw);
    case "hello": {
      const role: Role = raw.role === "driver" ? "driver" : "observer";
      const msg: HelloMsg = { type: "hello", v: num(raw.v, -1), role };
      if (raw.telemetry_hz !== undefined) msg.telemetry_hz = num(raw.telemetry_hz);
      if (raw.dt_s !== undefined) msg.dt_s = num(raw.dt_s);
      return msg;
    }
    case "error":
      return { type: "error", v: num(raw.v, -1), reason: String(raw.reason ?? "unknown") };
    default:
      return null;
  }
}

export function encodeHello(): string {
  return JSON.stringify({ type: "hello", v: PROTOCOL_VERSION });
}

export function encodeClaimDriver(): string {
  return JSON.stringify({ type: "claim_driver", v: PROTOCOL_VERSION });
}

export function encodeCommand(forward: number, turn: number, timestampS: number): string {
  const msg: CommandMsg = {
    type: "command",
    v: PROTOCOL_VERSION,
    forward,
    turn,
    timestamp_s: timestampS,
  };
  return JSON.stringify(msg);
}
