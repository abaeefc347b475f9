// End-to-end against the real simulator: spawn `gyroegg serve`, connect
// through the same Session the browser uses (the ws package stands in
// for window.WebSocket), hold W, and watch the robot move. Asserts the
// advertised interaction budgets: command echo under 250 ms, correct
// displacement sign within 2 s, rendering at 20 fps or better, and the
// half-second watchdog zeroing the gimbal targets once the driver drops.

import { spawn } from "node:child_process";
import path from "node:path";
import { fileURLToPath } from "node:url";
import WebSocket from "ws";
import { describe, expect, it } from "vitest";
import { CommandEmitter, CommandSource } from "../src/input.js";
import { buildScene, defaultView } from "../src/scene.js";
import { Session } from "../src/session.js";
import type { TransportLike } from "../src/session.js";

const TEST_DIR = fileURLToPath(new URL(".", import.meta.url));
const FIXTURE = path.join(TEST_DIR, "fixtures", "bench.yaml");

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

const wsTransport = (url: string): TransportLike => new WebSocket(url);

describe("cockpit against a live server", () => {
  it("connects, drives, renders, and survives a driver drop", { timeout: 90_000 }, async () => {
    const port = 9100 + (process.pid % 500);
    const url = `ws://127.0.0.1:${port}`;
    const server = spawn("gyroegg", ["serve", FIXTURE, "--port", String(port)], {
      stdio: ["ignore", "pipe", "pipe"],
    });
    let serverLog = "";
    server.stdout?.on("data", (chunk) => (serverLog += chunk));
    server.stderr?.on("data", (chunk) => (serverLog += chunk));
    let serverExited = false;
    server.on("exit", () => (serverExited = true));

    const waitFor = async (label: string, timeoutMs: number, ready: () => boolean) => {
      const deadline = Date.now() + timeoutMs;
      while (Date.now() < deadline) {
        if (serverExited) throw new Error(`server died waiting for ${label}:\n${serverLog}`);
        if (ready()) return;
        await sleep(5);
      }
      throw new Error(`timed out after ${timeoutMs} ms waiting for ${label}\nserver log:\n${serverLog}`);
    };

    const driver = new Session(url, {
      transport: wsTransport,
      claimDriver: true,
      initialBackoffMs: 250,
      maxBackoffMs: 1000,
    });
    const observer = new Session(url, {
      transport: wsTransport,
      initialBackoffMs: 250,
      maxBackoffMs: 1000,
    });

    try {
      driver.connect();
      await waitFor("driver role and first frame", 30_000, () => {
        return driver.state.role === "driver" && driver.state.frame !== null;
      });
      observer.connect();
      await waitFor("observer frames", 10_000, () => observer.state.frame !== null);
      expect(observer.state.role).toBe("observer");

      const x0 = driver.state.frame!.position_m[0];
      const simStart = driver.state.frame!.time_s;

      // hold W through the fixed-rate emitter, exactly as the browser does
      const source = new CommandSource();
      source.keys.down("KeyW");
      let firstSendWall: number | null = null;
      const emitter = new CommandEmitter(source, (axes) => {
        const sent = driver.sendCommand(axes.forward, axes.turn);
        if (sent && firstSendWall === null) firstSendWall = Date.now();
      });
      emitter.start();

      await waitFor("command echo in telemetry", 5_000, () => {
        return driver.state.frame!.command_forward === 1;
      });
      const echoMs = Date.now() - (firstSendWall ?? Number.NaN);
      expect(echoMs).toBeLessThan(250);

      // render every fresh frame while two sim seconds of driving elapse
      const view = defaultView(1280, 720);
      let lastSeq = driver.state.frameSeq;
      let builds = 0;
      let worstBuildMs = 0;
      let gimbalRateSeen = 0;
      const renderStart = Date.now();
      while (driver.state.frame!.time_s < simStart + 2.0) {
        if (driver.state.frameSeq !== lastSeq) {
          lastSeq = driver.state.frameSeq;
          const t0 = performance.now();
          buildScene(driver.state, Date.now(), view);
          worstBuildMs = Math.max(worstBuildMs, performance.now() - t0);
          builds += 1;
          const f = driver.state.frame!;
          gimbalRateSeen = Math.max(
            gimbalRateSeen,
            Math.abs(f.alpha_rate_radps),
            Math.abs(f.beta_rate_radps),
          );
        }
        if (Date.now() - renderStart > 30_000) throw new Error("sim time stalled");
        await sleep(2);
      }
      emitter.stop();
      const fps = builds / ((Date.now() - renderStart) / 1000);
      const dx = driver.state.frame!.position_m[0] - x0;

      expect(dx).toBeGreaterThan(0.02); // forward command rolls toward +x
      expect(fps).toBeGreaterThanOrEqual(20);
      expect(worstBuildMs).toBeLessThan(50);
      expect(gimbalRateSeen).toBeGreaterThan(1e-6); // gimbal was really precessing

      // driver vanishes mid-drive; on sim-time staleness the watchdog
      // must zero the gimbal rate targets, visible to any observer
      const dropSim = observer.state.frame!.time_s;
      driver.close();
      await waitFor("watchdog window to lapse", 15_000, () => {
        const f = observer.state.frame;
        return f !== null && f.time_s > dropSim + 0.7 && f.command_age_s > 0.5;
      });
      const settled = observer.state.frame!;
      expect(Math.abs(settled.alpha_rate_radps)).toBeLessThanOrEqual(1e-12);
      expect(Math.abs(settled.beta_rate_radps)).toBeLessThanOrEqual(1e-12);

      console.log(
        `[ACCEPTANCE] cockpit integration: PASS (echo ${echoMs} ms, dx +${dx.toFixed(3)} m, ` +
          `render ${fps.toFixed(1)} fps, worst build ${worstBuildMs.toFixed(2)} ms, ` +
          `gimbal zeroed with command age ${settled.command_age_s.toFixed(2)} s)`,
      );
    } finally {
      driver.close();
      observer.close();
      server.kill("SIGTERM");
      await sleep(300);
      if (!serverExited) server.kill("SIGKILL");
    }
  });
});
