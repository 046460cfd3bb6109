import type { Vec3 } from "./schema.js";

// Kinematic tables for the two built-in robots, keyed by the `robot` field
// of the state message. Only what drawing needs: joint origins and axes.

interface ArmSpec {
  mount: Vec3;
  tool: Vec3;
  origins: Vec3[];
  axes: Vec3[];
}

const ARMS: Record<string, ArmSpec> = {
  "moca-like": {
    mount: [0, 0, 0.5],
    tool: [0, 0, 0.1],
    origins: [
      [0, 0, 0.15], [0, 0, 0.15], [0, 0, 0.2], [0, 0, 0.2],
      [0, 0, 0.2], [0, 0, 0.15], [0, 0, 0.1],
    ],
    axes: [
      [0, 0, 1], [0, 1, 0], [0, 0, 1], [0, -1, 0],
      [0, 0, 1], [0, 1, 0], [0, 0, 1],
    ],
  },
  "kairos-like": {
    mount: [0, 0, 0.5],
    tool: [0, 0, 0.12],
    origins: [
      [0, 0, 0.12], [0, 0, 0.1], [0, 0, 0.45],
      [0, 0, 0.4], [0, 0, 0.12], [0, 0, 0.1],
    ],
    axes: [
      [0, 0, 1], [0, 1, 0], [0, 1, 0],
      [0, 1, 0], [0, 0, 1], [0, 1, 0],
    ],
  },
};

type Mat3 = [Vec3, Vec3, Vec3];

const IDENTITY: Mat3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

function matVec(m: Mat3, v: Vec3): Vec3 {
  return [
    m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
    m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
    m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
  ];
}

function matMul(a: Mat3, b: Mat3): Mat3 {
  const out: Mat3 = [[0, 0, 0], [0, 0, 0], [0, 0, 0]];
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
    }
  }
  return out;
}

function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

/** Rodrigues rotation about a unit axis. */
function axisRotation(axis: Vec3, angle: number): Mat3 {
  const [x, y, z] = axis;
  const c = Math.cos(angle);
  const s = Math.sin(angle);
  const t = 1 - c;
  return [
    [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
    [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
    [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
  ];
}

function yaw(theta: number): Mat3 {
  const c = Math.cos(theta);
  const s = Math.sin(theta);
  return [[c, -s, 0], [s, c, 0], [0, 0, 1]];
}

export function knownRobot(robot: string): boolean {
  return robot in ARMS;
}

/**
 * World positions of the arm mount, every joint origin, and the tool tip,
 * given whole-body positions q = [x, y, yaw, arm...]. Unknown robots (or a
 * q of unexpected length) get just the mount point, so the scene degrades
 * to a base glyph plus the end-effector marker from the state message.
 */
export function linkagePoints(robot: string, q: readonly number[]): Vec3[] {
  const base: Vec3 = [q[0] ?? 0, q[1] ?? 0, 0];
  const Rb = yaw(q[2] ?? 0);
  const spec = ARMS[robot];
  if (!spec || q.length !== 3 + spec.origins.length) {
    return [add(base, matVec(Rb, [0, 0, 0.5]))];
  }
  const pm = add(base, matVec(Rb, spec.mount));
  const points: Vec3[] = [pm];
  let R = IDENTITY;
  let p: Vec3 = [0, 0, 0];
  for (let i = 0; i < spec.origins.length; i++) {
    p = add(p, matVec(R, spec.origins[i]));
    points.push(add(pm, matVec(Rb, p)));
    R = matMul(R, axisRotation(spec.axes[i], q[3 + i]));
  }
  points.push(add(pm, matVec(Rb, add(p, matVec(R, spec.tool)))));
  return points;
}
