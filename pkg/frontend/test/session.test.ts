import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { Session } from "../src/session.js";
import type { TransportLike } from "../src/session.js";

class FakeTransport implements TransportLike {
  sent: string[] = [];
  closed = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }

  // server-side events
  open(): void {
    this.onopen?.();
  }

  receive(text: string): void {
    this.onmessage?.({ data: text });
  }

  drop(): void {
    this.onclose?.();
  }
}

function harness(opts: { claimDriver?: boolean; reconnect?: boolean } = {}) {
  const transports: FakeTransport[] = [];
  const session = new Session("ws://fake", {
    transport: () => {
      const t = new FakeTransport();
      transports.push(t);
      return t;
    },
    ...opts,
  });
  return { session, transports };
}

const sampleFrame = (timeS: number): string =>
  JSON.stringify({
    type: "frame",
    v: 1,
    tick: Math.round(timeS * 500),
    time_s: timeS,
    position_m: [0, 0, 0.1986],
    orientation_wxyz: [1, 0, 0, 0],
    velocity_mps: [0, 0, 0],
    omega_world_radps: [0, 0, 0],
    alpha_rad: 0,
    beta_rad: 0,
    alpha_rate_radps: 0,
    beta_rate_radps: 0,
    rotor_speed_radps: 314,
    in_contact: true,
    normal_force_n: 68.7,
    slip_speed_mps: 0,
    gauge_fraction: 1,
    gauge_angle_rad: 1.57,
    rotor_stopped: false,
    battery_v: 29.4,
    battery_soc: 1,
    battery_ah: 2.6,
    command_forward: 0,
    command_turn: 0,
    command_age_s: 1e6,
  });

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("handshake", () => {
  it("sends hello then the driver claim on open", () => {
    const { session, transports } = harness({ claimDriver: true });
    session.connect();
    const t = transports[0]!;
    t.open();
    expect(t.sent.map((s) => JSON.parse(s).type)).toEqual(["hello", "claim_driver"]);
    expect(JSON.parse(t.sent[0]!)).toEqual({ type: "hello", v: 1 });
    expect(session.state.status).toBe("connected");

    t.receive('{"type":"hello","v":1,"role":"observer","telemetry_hz":50.0,"dt_s":0.005}');
    expect(session.state.role).toBe("observer");
    t.receive('{"type":"hello","v":1,"role":"driver"}');
    expect(session.state.role).toBe("driver");
  });

  it("holds hello until asked when not claiming", () => {
    const { session, transports } = harness();
    session.connect();
    const t = transports[0]!;
    t.open();
    expect(t.sent.map((s) => JSON.parse(s).type)).toEqual(["hello"]);
    session.claimDriver();
    expect(t.sent.map((s) => JSON.parse(s).type)).toEqual(["hello", "claim_driver"]);
  });
});

describe("command gating", () => {
  it("refuses to send while observing, sends stamped commands as driver", () => {
    const { session, transports } = harness({ claimDriver: true });
    session.connect();
    const t = transports[0]!;
    t.open();
    const handshakeCount = t.sent.length;

    expect(session.sendCommand(1, 0)).toBe(false);
    expect(t.sent.length).toBe(handshakeCount);

    t.receive('{"type":"hello","v":1,"role":"driver"}');
    t.receive(sampleFrame(1.25));
    expect(session.sendCommand(1, -0.5)).toBe(true);
    const cmd = JSON.parse(t.sent[t.sent.length - 1]!);
    expect(cmd).toEqual({ type: "command", v: 1, forward: 1, turn: -0.5, timestamp_s: 1.25 });
    expect(session.state.commandForward).toBe(1);
    expect(session.state.commandTurn).toBe(-0.5);
  });
});

describe("version mismatch", () => {
  it("stops for good with the banner up, never retrying quietly", () => {
    const { session, transports } = harness();
    session.connect();
    const t = transports[0]!;
    t.open();
    t.receive('{"type":"hello","v":2,"role":"observer"}');
    expect(session.state.status).toBe("version-mismatch");
    expect(session.state.banner).toContain("protocol v2");
    expect(t.closed).toBe(true);

    vi.advanceTimersByTime(60_000);
    expect(transports.length).toBe(1);
    expect(session.state.status).toBe("version-mismatch");
  });

  it("treats a version-mismatch error message the same way", () => {
    const { session, transports } = harness();
    session.connect();
    const t = transports[0]!;
    t.open();
    t.receive('{"type":"error","v":1,"reason":"version-mismatch"}');
    expect(session.state.status).toBe("version-mismatch");
    vi.advanceTimersByTime(60_000);
    expect(transports.length).toBe(1);
  });
});

describe("reconnect", () => {
  it("retries with doubling backoff and resets after a good connection", () => {
    const { session, transports } = harness();
    session.connect();
    transports[0]!.open();
    transports[0]!.drop();

    expect(session.state.status).toBe("reconnecting");
    expect(session.state.banner).toBe("reconnecting in 0.5 s");
    vi.advanceTimersByTime(499);
    expect(transports.length).toBe(1);
    vi.advanceTimersByTime(1);
    expect(transports.length).toBe(2);

    transports[1]!.drop();
    expect(session.state.banner).toBe("reconnecting in 1.0 s");
    vi.advanceTimersByTime(1000);
    expect(transports.length).toBe(3);

    transports[2]!.drop();
    expect(session.state.banner).toBe("reconnecting in 2.0 s");
    vi.advanceTimersByTime(2000);
    expect(transports.length).toBe(4);

    transports[3]!.open();
    expect(session.state.status).toBe("connected");
    expect(session.state.banner).toBeNull();

    // backoff is back at the floor for the next outage
    transports[3]!.drop();
    expect(session.state.banner).toBe("reconnecting in 0.5 s");
  });

  it("caps the delay at five seconds", () => {
    const { session, transports } = harness();
    session.connect();
    transports[0]!.open();
    let i = 0;
    for (const _ of Array(8)) {
      transports[i]!.drop();
      vi.advanceTimersByTime(10_000);
      i++;
    }
    expect(session.state.banner).toBe("reconnecting in 5.0 s");
  });

  it("stays closed when reconnect is disabled", () => {
    const { session, transports } = harness({ reconnect: false });
    session.connect();
    transports[0]!.open();
    transports[0]!.drop();
    expect(session.state.status).toBe("closed");
    vi.advanceTimersByTime(60_000);
    expect(transports.length).toBe(1);
  });

  it("keeps retrying when the very first dial fails", () => {
    let calls = 0;
    const session = new Session("ws://fake", {
      transport: () => {
        calls++;
        throw new Error("refused");
      },
    });
    session.connect();
    expect(calls).toBe(1);
    vi.advanceTimersByTime(500);
    expect(calls).toBe(2);
    vi.advanceTimersByTime(1000);
    expect(calls).toBe(3);
    session.close();
    vi.advanceTimersByTime(60_000);
    expect(calls).toBe(3);
  });
});

describe("close", () => {
  it("drops the driver role with the connection", () => {
    const { session, transports } = harness({ claimDriver: true });
    session.connect();
    const t = transports[0]!;
    t.open();
    t.receive('{"type":"hello","v":1,"role":"driver"}');
    expect(session.state.role).toBe("driver");
    session.close();
    expect(session.state.role).toBe("observer");
    expect(session.state.status).toBe("closed");
  });
});
