// Canvas drawing for one playback panel, fed by endpoint render geometry.

import { fitCamera, framePrimitives, project, type Camera, type Vec3 } from './scene';
import type { RenderGeometry, WorldDoc } from './types';

export class PlaybackView {
  private readonly canvas: HTMLCanvasElement;
  private readonly ctx: CanvasRenderingContext2D;
  private readonly accent: string;
  private geometry: RenderGeometry | null = null;
  private world: WorldDoc | null = null;
  private camera: Camera | null = null;

  constructor(canvas: HTMLCanvasElement, accent: string) {
    this.canvas = canvas;
    const ctx = canvas.getContext('2d');
    if (ctx === null) {
      throw new Error('canvas 2d context unavailable');
    }
    this.ctx = ctx;
    this.accent = accent;
  }

  setTrajectory(geometry: RenderGeometry, world: WorldDoc): void {
    this.geometry = geometry;
    this.world = world;
    const extras: Vec3[] = [[0, 0, 0]];
    for (const p of Object.values(world.objects)) {
      extras.push([p[0] ?? 0, p[1] ?? 0, p[2] ?? 0]);
    }
    this.camera = fitCamera(geometry, this.canvas.width, this.canvas.height, extras);
  }

  clear(message: string): void {
    this.geometry = null;
    this.world = null;
    const { ctx, canvas } = this;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = '#5a6472';
    ctx.font = '13px system-ui, sans-serif';
    ctx.textAlign = 'center';
    ctx.fillText(message, canvas.width / 2, canvas.height / 2);
  }

  drawFrame(frame: number): void {
    const { ctx, canvas } = this;
    const geometry = this.geometry;
    const cam = this.camera;
    if (geometry === null || cam === null) {
      return;
    }
    const index = Math.min(Math.max(frame, 0), geometry.links.length - 1);
    const links = geometry.links[index];
    const facing = geometry.facings[index];
    const tool = geometry.tools[index];
    if (links === undefined || facing === undefined || tool === undefined) {
      this.clear('pose data missing for this frame');
      return;
    }

    ctx.clearRect(0, 0, canvas.width, canvas.height);
    this.drawGround(cam);
    const prims = framePrimitives(links, facing, tool, cam);

    if (prims.glow !== null) {
      const [gx, gy] = prims.glow.center;
      const gradient = ctx.createRadialGradient(gx, gy, 1, gx, gy, prims.glow.radius);
      gradient.addColorStop(0, `rgba(255, 214, 110, ${0.25 + 0.55 * prims.glow.intensity})`);
      gradient.addColorStop(1, 'rgba(255, 214, 110, 0)');
      ctx.fillStyle = gradient;
      ctx.beginPath();
      ctx.arc(gx, gy, prims.glow.radius, 0, 2 * Math.PI);
      ctx.fill();
    }

    if (prims.projectorBeam !== null) {
      ctx.strokeStyle = 'rgba(140, 190, 255, 0.7)';
      ctx.lineWidth = 5;
      ctx.lineCap = 'round';
      ctx.beginPath();
      ctx.moveTo(...prims.projectorBeam[0]!);
      ctx.lineTo(...prims.projectorBeam[1]!);
      ctx.stroke();
    }

    ctx.strokeStyle = this.accent;
    ctx.lineWidth = 3.5;
    ctx.lineCap = 'round';
    ctx.lineJoin = 'round';
    ctx.beginPath();
    prims.chain.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
    ctx.stroke();

    ctx.fillStyle = this.accent;
    for (const [x, y] of prims.joints) {
      ctx.beginPath();
      ctx.arc(x, y, 2.5, 0, 2 * Math.PI);
      ctx.fill();
    }

    ctx.strokeStyle = 'rgba(230, 238, 248, 0.8)';
    ctx.lineWidth = 1;
    for (const line of prims.frustum) {
      ctx.beginPath();
      line.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
      ctx.stroke();
    }
  }

  private drawGround(cam: Camera): void {
    const { ctx } = this;
    const world = this.world;
    ctx.strokeStyle = 'rgba(90, 100, 114, 0.35)';
    ctx.lineWidth = 1;
    for (let i = -2; i <= 4; i++) {
      const step = i * 0.25;
      this.line(project([step, -1.0, 0], cam), project([step, 1.0, 0], cam));
      this.line(project([-0.5, step, 0], cam), project([1.0, step, 0], cam));
    }
    if (world === null) {
      return;
    }
    ctx.fillStyle = '#8fa3bd';
    ctx.font = '11px system-ui, sans-serif';
    ctx.textAlign = 'center';
    const user = world.user_position;
    const [ux, uy] = project([user[0] ?? 0, user[1] ?? 0, user[2] ?? 0], cam);
    ctx.beginPath();
    ctx.arc(ux, uy, 4, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillText('user', ux, uy - 8);
    for (const [name, p] of Object.entries(world.objects)) {
      const [ox, oy] = project([p[0] ?? 0, p[1] ?? 0, p[2] ?? 0], cam);
      ctx.fillRect(ox - 3, oy - 3, 6, 6);
      ctx.fillText(name, ox, oy - 8);
    }
  }

  private line(a: readonly [number, number], b: readonly [number, number]): void {
    this.ctx.beginPath();
    this.ctx.moveTo(a[0], a[1]);
    this.ctx.lineTo(b[0], b[1]);
    this.ctx.stroke();
  }
}
