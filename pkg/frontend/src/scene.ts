// Geometry for the playback view: isometric projection of endpoint-provided
// poses into screen-space drawing primitives. Pure functions, no canvas.

import type { RenderGeometry, ToolDoc } from './types';

export type Vec3 = readonly [number, number, number];
export type Point2 = readonly [number, number];

export interface Camera {
  scale: number;
  cx: number;
  cy: number;
}

const COS30 = Math.cos(Math.PI / 6);
const SIN30 = Math.sin(Math.PI / 6);

/** Isometric axes before screen placement: x right-forward, y left-forward, z up. */
export function isoAxes(p: Vec3): Point2 {
  const [x, y, z] = p;
  return [(x - y) * COS30, (x + y) * SIN30 - z];
}

export function project(p: Vec3, cam: Camera): Point2 {
  const [u, v] = isoAxes(p);
  return [cam.cx + cam.scale * u, cam.cy + cam.scale * v];
}

function asVec3(p: number[]): Vec3 {
  return [p[0] ?? 0, p[1] ?? 0, p[2] ?? 0];
}

/**
 * Camera that fits every link point of a trajectory (optionally plus extra
 * world points) into a width x height viewport with a margin.
 */
export function fitCamera(
  geometry: RenderGeometry,
  width: number,
  height: number,
  extraPoints: Vec3[] = [],
  margin = 0.12,
): Camera {
  let uMin = Infinity;
  let uMax = -Infinity;
  let vMin = Infinity;
  let vMax = -Infinity;
  const include = (p: Vec3): void => {
    const [u, v] = isoAxes(p);
    uMin = Math.min(uMin, u);
    uMax = Math.max(uMax, u);
    vMin = Math.min(vMin, v);
    vMax = Math.max(vMax, v);
  };
  for (const sample of geometry.links) {
    for (const point of sample) {
      include(asVec3(point));
    }
  }
  for (const p of extraPoints) {
    include(p);
  }
  if (!Number.isFinite(uMin)) {
    return { scale: 1, cx: width / 2, cy: height / 2 };
  }
  const span = Math.max(uMax - uMin, vMax - vMin, 1e-6);
  const scale = Math.min(width, height) * (1 - 2 * margin) / span;
  return {
    scale,
    cx: width / 2 - scale * (uMin + uMax) / 2,
    cy: height / 2 - scale * (vMin + vMax) / 2,
  };
}

export interface FramePrimitives {
  chain: Point2[];
  joints: Point2[];
  frustum: Point2[][];
  glow: { center: Point2; radius: number; intensity: number } | null;
  projectorBeam: Point2[] | null;
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
}

function norm(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

function scaled(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

function added(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

/** Screen primitives for one trajectory sample. */
export function framePrimitives(
  linkPoints: number[][],
  facing: number[],
  tool: ToolDoc,
  cam: Camera,
): FramePrimitives {
  const points = linkPoints.map((p) => asVec3(p));
  const chain = points.map((p) => project(p, cam));
  const head = points[points.length - 1] ?? ([0, 0, 0] as Vec3);
  const f = asVec3(facing);
  const fLen = norm(f) || 1;
  const dir: Vec3 = [f[0] / fLen, f[1] / fLen, f[2] / fLen];

  // head frustum: apex at the head, square rim a short way along the facing
  let side = cross(dir, [0, 0, 1]);
  if (norm(side) < 1e-9) {
    side = cross(dir, [0, 1, 0]);
  }
  side = scaled(side, 1 / (norm(side) || 1));
  const up = cross(side, dir);
  const reach = 0.16;
  const half = 0.055;
  const rimCenter = added(head, scaled(dir, reach));
  const rim: Vec3[] = [
    added(rimCenter, added(scaled(side, half), scaled(up, half))),
    added(rimCenter, added(scaled(side, -half), scaled(up, half))),
    added(rimCenter, added(scaled(side, -half), scaled(up, -half))),
    added(rimCenter, added(scaled(side, half), scaled(up, -half))),
  ];
  const apex = project(head, cam);
  const rim2 = rim.map((p) => project(p, cam));
  const frustum: Point2[][] = rim2.map((p) => [apex, p]);
  frustum.push([...rim2, rim2[0]!]);

  const glow = tool.light_on
    ? {
        center: apex,
        radius: cam.scale * (0.05 + 0.16 * tool.light_intensity),
        intensity: tool.light_intensity,
      }
    : null;

  const projectorBeam = tool.projector_on
    ? [apex, project(added(head, scaled(dir, 0.45)), cam)]
    : null;

  return { chain, joints: chain, frustum, glow, projectorBeam };
}
