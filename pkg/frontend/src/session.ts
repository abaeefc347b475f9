// Connection lifecycle: handshake, driver claim, command egress, and
// reconnect with doubling backoff. The transport is injected so the
// browser hands in window.WebSocket and the tests hand in the ws
// package; both satisfy the same structural slice of the API.

import {
  decodeServerMessage,
  encodeClaimDriver,
  encodeCommand,
  encodeHello,
} from "./protocol.js";
import { CockpitState } from "./state.js";

export interface TransportLike {
  send(data: string): void;
  close(): void;
  // event payloads are `any` because window.WebSocket and the ws package
  // disagree on their shape; the session only ever stringifies `data`
  onopen: ((ev?: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  onclose: ((ev?: any) => void) | null;
  onerror: ((ev?: any) => void) | null;
}

export type TransportFactory = (url: string) => TransportLike;

export interface SessionOptions {
  transport: TransportFactory;
  claimDriver?: boolean;
  reconnect?: boolean;
  initialBackoffMs?: number;
  maxBackoffMs?: number;
  now?: () => number;
}

export class Session {
  readonly state = new CockpitState();

  private sock: TransportLike | null = null;
  private backoffMs: number;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;
  private everConnected = false;

  constructor(private readonly url: string, private readonly opts: SessionOptions) {
    this.backoffMs = opts.initialBackoffMs ?? 500;
  }

  private now(): number {
    return this.opts.now?.() ?? Date.now();
  }

  connect(): void {
    if (this.stopped) return;
    this.state.status = this.everConnected ? "reconnecting" : "connecting";
    let sock: TransportLike;
    try {
      sock = this.opts.transport(this.url);
    } catch {
      this.scheduleRetry();
      return;
    }
    this.sock = sock;
    sock.onopen = () => this.handleOpen();
    sock.onmessage = (ev) => this.handleMessage(String(ev.data));
    sock.onclose = () => this.handleClose();
    sock.onerror = () => {};
  }

  private handleOpen(): void {
    this.everConnected = true;
    this.backoffMs = this.opts.initialBackoffMs ?? 500;
    this.state.status = "connected";
    if (this.state.banner?.startsWith("reconnecting")) this.state.banner = null;
    this.sock?.send(encodeHello());
    if (this.opts.claimDriver) this.sock?.send(encodeClaimDriver());
  }

  private handleMessage(text: string): void {
    const msg = decodeServerMessage(text);
    if (msg === null) return;
    this.state.onServerMessage(msg, this.now());
    if (this.state.status === "version-mismatch") {
      // no silent fallback: stop talking and stay on the error banner
      this.stopped = true;
      this.sock?.close();
    }
  }

  private handleClose(): void {
    this.sock = null;
    if (this.state.role === "driver") this.state.role = "observer";
    if (this.stopped) {
      if (this.state.status !== "version-mismatch") this.state.status = "closed";
      return;
    }
    if (this.opts.reconnect === false) {
      this.state.status = "closed";
      return;
    }
    this.scheduleRetry();
  }

  private scheduleRetry(): void {
    this.state.status = "reconnecting";
    this.state.banner = `reconnecting in ${(this.backoffMs / 1000).toFixed(1)} s`;
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, this.opts.maxBackoffMs ?? 5000);
    this.retryTimer = setTimeout(() => {
      this.retryTimer = null;
      this.connect();
    }, delay);
  }

  claimDriver(): void {
    this.sock?.send(encodeClaimDriver());
  }

  sendCommand(forward: number, turn: number): boolean {
    // commands only ever leave in the driver role
    if (this.state.role !== "driver" || this.sock === null) return false;
    this.state.commandForward = forward;
    this.state.commandTurn = turn;
    this.sock.send(encodeCommand(forward, turn, this.state.frame?.time_s ?? 0));
    return true;
  }

  close(): void {
    this.stopped = true;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    this.sock?.close();
    this.sock = null;
    this.state.status = "closed";
  }
}
