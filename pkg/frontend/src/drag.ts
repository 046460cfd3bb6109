import { wrench, type ClientMsg, type Vec3 } from "./schema.js";
import type { AxisSet, ViewState } from "./state.js";

export const NEWTONS_PER_PX = 0.5;
export const NEWTON_METERS_PER_RAD = 5.0;
export const COMMAND_HZ = 20;

/**
 * Screen-pixel drag to a commanded wrench. The top-down view maps world +x
 * right and +y up, so a rightward drag pushes along +x and an upward drag
 * (negative dy, canvas y grows downward) along +y. Holding the modifier
 * swaps the vertical axis to world z. `translationOnly` mirrors the
 * server's motion-mode flag; while it is set the torque part is zero no
 * matter what the rotation handle says.
 */
export function dragToWrench(
  drag: { dx: number; dy: number; spin: number },
  axes: AxisSet,
  translationOnly: boolean,
): { f: Vec3; tau: Vec3 } {
  // written as (0 - dy) so an idle axis stays +0, not -0
  const along = (drag.dx + 0) * NEWTONS_PER_PX;
  const up = (0 - drag.dy) * NEWTONS_PER_PX;
  const f: Vec3 = axes === "xy" ? [along, up, 0] : [along, 0, up];
  const tau: Vec3 = translationOnly
    ? [0, 0, 0]
    : [0, 0, (drag.spin + 0) * NEWTON_METERS_PER_RAD];
  return { f, tau };
}

type SendFn = (msg: ClientMsg) => boolean;

/**
 * Streams the current drag as wrench commands at a fixed 20 Hz while the
 * pointer is captured, independent of the 50 Hz state rate. Release sends
 * exactly one explicit zero wrench and stops the stream.
 */
export class DragController {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private view: ViewState,
    private send: SendFn,
  ) {}

  start(): void {
    if (this.view.drag.active) return;
    this.view.drag.active = true;
    this.timer = setInterval(() => this.emit(), 1000 / COMMAND_HZ);
  }

  move(dx: number, dy: number, modifier: boolean): void {
    this.view.drag.dx = dx;
    this.view.drag.dy = dy;
    this.view.axisSet = modifier ? "xz" : "xy";
  }

  twist(spin: number): void {
    this.view.drag.spin = spin;
  }

  release(): void {
    if (!this.view.drag.active) return;
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
    this.view.drag = { active: false, dx: 0, dy: 0, spin: 0 };
    this.send(wrench([0, 0, 0], [0, 0, 0]));
  }

  /** What the drag currently commands; also used by the overlay. */
  current(): { f: Vec3; tau: Vec3 } {
    return dragToWrench(
      this.view.drag,
      this.view.axisSet,
      this.view.lastState?.mode.m ?? false,
    );
  }

  private emit(): void {
    const { f, tau } = this.current();
    this.send(wrench(f, tau));
  }
}
