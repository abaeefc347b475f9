// Canvas painter and the requestAnimationFrame loop. Everything visual
// was already decided by buildScene; this file just replays primitives.

import type { SceneItem } from "./scene.js";

export function paint(ctx: CanvasRenderingContext2D, items: SceneItem[], width: number, height: number): void {
  ctx.fillStyle = "#11161c";
  ctx.fillRect(0, 0, width, height);
  for (const item of items) {
    if (item.kind === "line") {
      ctx.strokeStyle = item.color;
      ctx.lineWidth = item.width;
      ctx.beginPath();
      const first = item.pts[0];
      if (first === undefined) continue;
      ctx.moveTo(first[0], first[1]);
      for (let i = 1; i < item.pts.length; i++) {
        const p = item.pts[i]!;
        ctx.lineTo(p[0], p[1]);
      }
      ctx.stroke();
    } else if (item.kind === "text") {
      ctx.fillStyle = item.color;
      ctx.font = `${item.size}px ui-monospace, monospace`;
      ctx.fillText(item.text, item.x, item.y);
    } else {
      ctx.strokeStyle = "#3a4654";
      ctx.strokeRect(item.x, item.y, item.w, item.h);
      ctx.fillStyle = item.color;
      ctx.fillRect(item.x, item.y, item.w * Math.min(1, Math.max(0, item.fraction)), item.h);
    }
  }
}

export class RenderLoop {
  fps = 0;
  private lastTs: number | null = null;
  private running = false;

  start(draw: (nowMs: number) => void): void {
    this.running = true;
    const step = (ts: number) => {
      if (!this.running) return;
      if (this.lastTs !== null) {
        const dt = Math.max(ts - this.lastTs, 1);
        this.fps = 0.9 * this.fps + 0.1 * (1000 / dt);
      }
      this.lastTs = ts;
      draw(ts);
      requestAnimationFrame(step);
    };
    requestAnimationFrame(step);
  }

  stop(): void {
    this.running = false;
  }
}
