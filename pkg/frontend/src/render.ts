import { knownRobot, linkagePoints } from "./linkage.js";
import type { StateMsg, Vec3 } from "./schema.js";
import type { ViewState } from "./state.js";
import { dragToWrench } from "./drag.js";

export interface Camera {
  w: number;
  h: number;
  pxPerM: number;
}

export interface BasePose {
  x: number;
  y: number;
  th: number;
}

export const HANDLE_R = 26; // rotation handle radius, px

/** Top-down view: camera follows the base; world +x right, +y up. */
export function topDownPx(p: Vec3, base: { x: number; y: number }, cam: Camera): [number, number] {
  return [
    cam.w / 2 + (p[0] - base.x) * cam.pxPerM,
    cam.h / 2 - (p[1] - base.y) * cam.pxPerM,
  ];
}

/** Side elevation in the base's sagittal plane: abscissa is the forward
 * distance from the base along its heading, ordinate is world z. */
export function sideViewPx(p: Vec3, base: BasePose, cam: Camera, groundY: number): [number, number] {
  const s = (p[0] - base.x) * Math.cos(base.th) + (p[1] - base.y) * Math.sin(base.th);
  return [cam.w / 2 + s * cam.pxPerM, groundY - p[2] * cam.pxPerM];
}

export function basePoseOf(state: StateMsg): BasePose {
  return { x: state.q[0], y: state.q[1], th: state.q[2] };
}

function norm3(v: readonly number[]): number {
  return Math.hypot(v[0], v[1], v[2]);
}

const COLORS = {
  bg: "#11151a",
  frame: "#2a3340",
  grid: "#1c232c",
  base: "#4f6884",
  arm: "#9fb6cc",
  joint: "#d5e2ee",
  ee: "#ffd166",
  trace: "#5c8d67",
  human: "#7bd88f",
  contact: "#e8945a",
  wall: "#b0632f",
  payload: "#c9a227",
  text: "#8fa3b8",
  banner: "rgba(180, 40, 40, 0.85)",
};

const CONTACT_GLYPH_N = 2.0; // draw the wall glyph above this contact force

export class SceneRenderer {
  private top: CanvasRenderingContext2D;
  private side: CanvasRenderingContext2D;

  constructor(topCanvas: HTMLCanvasElement, sideCanvas: HTMLCanvasElement) {
    const t = topCanvas.getContext("2d");
    const s = sideCanvas.getContext("2d");
    if (!t || !s) throw new Error("canvas 2d context unavailable");
    this.top = t;
    this.side = s;
  }

  draw(view: ViewState): void {
    this.drawTop(view);
    this.drawSide(view);
  }

  private camera(ctx: CanvasRenderingContext2D, viewportM: number): Camera {
    const w = ctx.canvas.width;
    const h = ctx.canvas.height;
    return { w, h, pxPerM: w / viewportM };
  }

  private clear(ctx: CanvasRenderingContext2D): void {
    ctx.fillStyle = COLORS.bg;
    ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  }

  private drawTop(view: ViewState): void {
    const ctx = this.top;
    const cam = this.camera(ctx, 4.0);
    this.clear(ctx);
    const state = view.lastState;
    if (state) {
      const base = basePoseOf(state);
      this.gridTop(ctx, cam, base);
      const px = (p: Vec3) => topDownPx(p, base, cam);

      // base footprint with a heading arrow
      ctx.save();
      ctx.translate(cam.w / 2, cam.h / 2);
      ctx.rotate(-base.th);
      ctx.fillStyle = COLORS.base;
      const L = 0.52 * cam.pxPerM;
      const W = 0.4 * cam.pxPerM;
      ctx.fillRect(-L / 2, -W / 2, L, W);
      ctx.strokeStyle = COLORS.joint;
      ctx.beginPath();
      ctx.moveTo(0, 0);
      ctx.lineTo(L * 0.45, 0);
      ctx.stroke();
      ctx.restore();

      this.tracePath(ctx, view, px);
      this.linkagePath(ctx, state, px);
      this.wallGlyph(ctx, state, px);
      this.payloadGlyph(ctx, state, px);
      this.forceArrow(ctx, state.ee.p, state.f_human, COLORS.human, px, cam);
      this.forceArrow(ctx, state.ee.p, state.f_ext, COLORS.contact, px, cam);
      this.dragArrow(ctx, view, state, px, cam);
      this.rotationHandle(ctx, view, cam);
      ctx.fillStyle = COLORS.text;
      ctx.font = "11px sans-serif";
      ctx.fillText("top-down", 6, 13);
    }
    this.dim(ctx, view);
    this.banner(ctx, state);
  }

  private drawSide(view: ViewState): void {
    const ctx = this.side;
    const cam = this.camera(ctx, 3.0);
    this.clear(ctx);
    const state = view.lastState;
    if (state) {
      const base = basePoseOf(state);
      const groundY = cam.h - 16;
      const px = (p: Vec3) => sideViewPx(p, base, cam, groundY);

      // ground line and half-meter ticks
      ctx.strokeStyle = COLORS.grid;
      ctx.beginPath();
      for (let z = 0.5; z < 2.0; z += 0.5) {
        ctx.moveTo(0, groundY - z * cam.pxPerM);
        ctx.lineTo(cam.w, groundY - z * cam.pxPerM);
      }
      ctx.stroke();
      ctx.strokeStyle = COLORS.frame;
      ctx.beginPath();
      ctx.moveTo(0, groundY);
      ctx.lineTo(cam.w, groundY);
      ctx.stroke();

      // base box in its own sagittal plane
      ctx.fillStyle = COLORS.base;
      const L = 0.52 * cam.pxPerM;
      const H = 0.3 * cam.pxPerM;
      ctx.fillRect(cam.w / 2 - L / 2, groundY - H, L, H);

      this.tracePath(ctx, view, px);
      this.linkagePath(ctx, state, px);
      this.payloadGlyph(ctx, state, px);
      ctx.fillStyle = COLORS.text;
      ctx.font = "11px sans-serif";
      ctx.fillText("side elevation", 6, 13);
    }
    this.dim(ctx, view);
    this.banner(ctx, state);
  }

  private gridTop(ctx: CanvasRenderingContext2D, cam: Camera, base: BasePose): void {
    // world-aligned lines every 0.5 m so base motion is visible
    const halfM = cam.w / cam.pxPerM / 2;
    ctx.strokeStyle = COLORS.grid;
    ctx.beginPath();
    const step = 0.5;
    const x0 = Math.floor((base.x - halfM) / step) * step;
    for (let x = x0; x < base.x + halfM + step; x += step) {
      const [sx] = topDownPx([x, 0, 0], base, cam);
      ctx.moveTo(sx, 0);
      ctx.lineTo(sx, cam.h);
    }
    const y0 = Math.floor((base.y - halfM) / step) * step;
    for (let y = y0; y < base.y + halfM + step; y += step) {
      const [, sy] = topDownPx([0, y, 0], base, cam);
      ctx.moveTo(0, sy);
      ctx.lineTo(cam.w, sy);
    }
    ctx.stroke();
  }

  private linkagePath(
    ctx: CanvasRenderingContext2D,
    state: StateMsg,
    px: (p: Vec3) => [number, number],
  ): void {
    const pts = linkagePoints(state.robot, state.q);
    ctx.strokeStyle = COLORS.arm;
    ctx.lineWidth = 2;
    ctx.beginPath();
    const [x0, y0] = px(pts[0]);
    ctx.moveTo(x0, y0);
    for (let i = 1; i < pts.length; i++) {
      const [x, y] = px(pts[i]);
      ctx.lineTo(x, y);
    }
    // with an unknown robot the chain is just the mount: close the gap to
    // the reported end effector so something sensible still shows
    if (!knownRobot(state.robot)) {
      const [x, y] = px(state.ee.p);
      ctx.lineTo(x, y);
    }
    ctx.stroke();
    ctx.lineWidth = 1;
    ctx.fillStyle = COLORS.joint;
    for (const p of pts) {
      const [x, y] = px(p);
      ctx.fillRect(x - 1.5, y - 1.5, 3, 3);
    }
    const [ex, ey] = px(state.ee.p);
    ctx.strokeStyle = COLORS.ee;
    ctx.beginPath();
    ctx.arc(ex, ey, 4, 0, 2 * Math.PI);
    ctx.stroke();
  }

  private tracePath(
    ctx: CanvasRenderingContext2D,
    view: ViewState,
    px: (p: Vec3) => [number, number],
  ): void {
    if (view.trace.length < 2) return;
    ctx.strokeStyle = COLORS.trace;
    ctx.beginPath();
    const [x0, y0] = px(view.trace[0].p);
    ctx.moveTo(x0, y0);
    for (let i = 1; i < view.trace.length; i++) {
      const [x, y] = px(view.trace[i].p);
      ctx.lineTo(x, y);
    }
    ctx.stroke();
  }

  /** Contact glyph: a short hatched wall face at the end effector, normal
   * to the measured contact force. Only drawn while force is present. */
  private wallGlyph(
    ctx: CanvasRenderingContext2D,
    state: StateMsg,
    px: (p: Vec3) => [number, number],
  ): void {
    const f = state.f_ext;
    if (norm3(f) < CONTACT_GLYPH_N) return;
    const [ex, ey] = px(state.ee.p);
    // screen direction of the force (y flipped)
    const ang = Math.atan2(-f[1], f[0]);
    ctx.save();
    ctx.translate(ex, ey);
    ctx.rotate(ang);
    ctx.strokeStyle = COLORS.wall;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(-6, -18);
    ctx.lineTo(-6, 18);
    for (let y = -18; y <= 18; y += 6) {
      ctx.moveTo(-6, y);
      ctx.lineTo(-12, y + 5);
    }
    ctx.stroke();
    ctx.restore();
    ctx.lineWidth = 1;
  }

  private payloadGlyph(
    ctx: CanvasRenderingContext2D,
    state: StateMsg,
    px: (p: Vec3) => [number, number],
  ): void {
    if (!state.mode.g) return;
    const [ex, ey] = px(state.ee.p);
    ctx.fillStyle = COLORS.payload;
    ctx.fillRect(ex - 5, ey - 5, 10, 10);
  }

  private forceArrow(
    ctx: CanvasRenderingContext2D,
    at: Vec3,
    wrench6: readonly number[],
    color: string,
    px: (p: Vec3) => [number, number],
    cam: Camera,
  ): void {
    const f: Vec3 = [wrench6[0], wrench6[1], wrench6[2]];
    const mag = norm3(f);
    if (mag < 0.5) return;
    const [x, y] = px(at);
    const scale = 0.012 * cam.pxPerM; // px per newton
    const dx = f[0] * scale;
    const dy = -f[1] * scale;
    ctx.strokeStyle = color;
    ctx.beginPath();
    ctx.moveTo(x, y);
    ctx.lineTo(x + dx, y + dy);
    ctx.stroke();
  }

  private dragArrow(
    ctx: CanvasRenderingContext2D,
    view: ViewState,
    state: StateMsg,
    px: (p: Vec3) => [number, number],
    cam: Camera,
  ): void {
    if (!view.drag.active) return;
    const { f } = dragToWrench(view.drag, view.axisSet, state.mode.m);
    const [x, y] = px(state.ee.p);
    const scale = 0.012 * cam.pxPerM;
    ctx.setLineDash([4, 3]);
    ctx.strokeStyle = COLORS.ee;
    ctx.beginPath();
    ctx.moveTo(x, y);
    ctx.lineTo(x + f[0] * scale, y - (view.axisSet === "xy" ? f[1] : f[2]) * scale);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  /** Spin widget for the torque part in roto-translation mode. */
  private rotationHandle(ctx: CanvasRenderingContext2D, view: ViewState, cam: Camera): void {
    const translationOnly = view.lastState?.mode.m ?? false;
    const [hx, hy] = handleCenter(cam);
    ctx.strokeStyle = translationOnly ? COLORS.grid : COLORS.arm;
    ctx.beginPath();
    ctx.arc(hx, hy, HANDLE_R, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(hx, hy);
    ctx.lineTo(
      hx + HANDLE_R * Math.cos(-view.drag.spin - Math.PI / 2),
      hy + HANDLE_R * Math.sin(-view.drag.spin - Math.PI / 2),
    );
    ctx.stroke();
    ctx.fillStyle = COLORS.text;
    ctx.font = "10px sans-serif";
    ctx.fillText("spin", hx - 10, hy + HANDLE_R + 12);
  }

  private dim(ctx: CanvasRenderingContext2D, view: ViewState): void {
    if (view.status === "open") return;
    ctx.fillStyle = "rgba(90, 95, 100, 0.55)";
    ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);
    ctx.fillStyle = "#d8dde2";
    ctx.font = "13px sans-serif";
    ctx.fillText(view.status === "connecting" ? "connecting..." : "disconnected", 10, 30);
  }

  private banner(ctx: CanvasRenderingContext2D, state: StateMsg | null): void {
    if (!state || !state.safety_stop) return;
    ctx.fillStyle = COLORS.banner;
    ctx.fillRect(0, 0, ctx.canvas.width, 22);
    ctx.fillStyle = "#ffffff";
    ctx.font = "bold 12px sans-serif";
    ctx.fillText("SAFETY STOP - send reset to clear", 8, 15);
  }
}

export function handleCenter(cam: Camera): [number, number] {
  return [cam.w - HANDLE_R - 14, cam.h - HANDLE_R - 14];
}
