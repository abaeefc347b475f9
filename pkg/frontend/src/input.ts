// Keyboard and gamepad to drive commands at a fixed 20 Hz.
//
// Sign convention: W is forward +1, S is reverse -1; A turns left
// (turn +1, counterclockwise yaw seen from above), D turns right
// (turn -1). Keys act as steps, so a released key reads 0 at the next
// emission, i.e. decays within one period. Analog axes pass through
// clamped and are only used while no steering key is held.

export const COMMAND_PERIOD_MS = 50;

export interface Axes {
  forward: number;
  turn: number;
}

const KEY_MAP: Record<string, keyof typeof KEY_AXES> = {
  KeyW: "forward",
  KeyS: "back",
  KeyA: "left",
  KeyD: "right",
  ArrowUp: "forward",
  ArrowDown: "back",
  ArrowLeft: "left",
  ArrowRight: "right",
};

const KEY_AXES = { forward: 0, back: 0, left: 0, right: 0 };

export function clampAxis(value: number): number {
  if (!Number.isFinite(value)) return 0;
  return Math.min(1, Math.max(-1, value));
}

export class KeyTracker {
  private held = new Set<string>();

  down(code: string): void {
    if (code in KEY_MAP) this.held.add(code);
  }

  up(code: string): void {
    this.held.delete(code);
  }

  clear(): void {
    this.held.clear();
  }

  anyHeld(): boolean {
    return this.held.size > 0;
  }

  axes(): Axes {
    let forward = 0;
    let turn = 0;
    for (const code of this.held) {
      switch (KEY_MAP[code]) {
        case "forward": forward += 1; break;
        case "back": forward -= 1; break;
        case "left": turn += 1; break;
        case "right": turn -= 1; break;
      }
    }
    return { forward: clampAxis(forward), turn: clampAxis(turn) };
  }
}

export class CommandSource {
  readonly keys = new KeyTracker();
  private padAxes: Axes = { forward: 0, turn: 0 };

  setGamepadAxes(forward: number, turn: number): void {
    this.padAxes = { forward: clampAxis(forward), turn: clampAxis(turn) };
  }

  sample(): Axes {
    if (this.keys.anyHeld()) return this.keys.axes();
    return this.padAxes;
  }
}

export class CommandEmitter {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly source: CommandSource,
    private readonly emit: (axes: Axes) => void,
    private readonly periodMs: number = COMMAND_PERIOD_MS,
  ) {}

  tickOnce(): Axes {
    const axes = this.source.sample();
    this.emit(axes);
    return axes;
  }

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => this.tickOnce(), this.periodMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
