import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { spawn, type ChildProcess } from 'node:child_process';
import net from 'node:net';
import path from 'node:path';
import { fileURLToPath } from 'node:url';

import { StudioClient, type PlanResult } from '../src/api';
import { diffMetrics } from '../src/diff';
import type { PlanRequest } from '../src/types';

const ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), '..', '..');

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = net.createServer();
    srv.listen(0, () => {
      const addr = srv.address();
      if (addr === null || typeof addr === 'string') {
        srv.close();
        reject(new Error('could not allocate a port'));
        return;
      }
      const port = addr.port;
      srv.close(() => resolve(port));
    });
    srv.on('error', reject);
  });
}

let server: ChildProcess | null = null;
let client: StudioClient;

beforeAll(async () => {
  const port = await freePort();
  server = spawn('python3', ['-m', 'lampbot', 'serve', '--port', String(port)], {
    cwd: ROOT,
    env: { ...process.env, PYTHONPATH: path.join(ROOT, 'src') },
    stdio: 'ignore',
  });
  client = new StudioClient(`http://127.0.0.1:${port}`);
  const deadline = Date.now() + 15_000;
  while (Date.now() < deadline) {
    if (await client.health()) return;
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error('planning endpoint never became healthy');
}, 20_000);

afterAll(() => {
  server?.kill();
});

async function timed(request: PlanRequest): Promise<{ result: PlanResult; ms: number }> {
  const start = performance.now();
  const result = await client.plan(request);
  return { result, ms: performance.now() - start };
}

describe('studio round trip', () => {
  it(
    'plans, toggles variant, and replans each scenario in under two seconds per request',
    async () => {
      const scenarios = await client.scenarios();
      expect(scenarios.length).toBeGreaterThanOrEqual(6);
      for (const scenario of scenarios) {
        const base: PlanRequest = {
          scenario: scenario.id,
          variant: 'E',
          gamma: 1,
          seed: 0,
          mode: 'scripted',
          search: 'beam',
          overrides: [],
        };
        const e1 = await timed(base);
        const f1 = await timed({ ...base, variant: 'F' });
        const e2 = await timed({ ...base, gamma: 0.5 });
        for (const { ms } of [e1, f1, e2]) {
          expect(ms).toBeLessThan(2000);
        }

        const diff = diffMetrics(f1.result.response.metrics, e1.result.response.metrics);
        expect(diff.dE).toBeGreaterThan(0);

        const fFrames = f1.result.response.render.links;
        const eFrames = e1.result.response.render.links;
        expect(eFrames[eFrames.length - 1]).toEqual(fFrames[fFrames.length - 1]);

        expect(e2.result.response.metrics.report.gamma).toBeCloseTo(0.5, 12);
      }
    },
    60_000,
  );

  it('serves a repeated request from the client cache with the same digest', async () => {
    const request: PlanRequest = {
      scenario: 'photograph_light',
      variant: 'E',
      gamma: 1,
      seed: 0,
      mode: 'scripted',
      search: 'beam',
      overrides: [],
    };
    const first = await client.plan(request);
    const second = await client.plan(request);
    expect(second.fromCache).toBe(true);
    expect(second.requestDigest).toBe(first.requestDigest);
    expect(second.response.digest).toBe(first.response.digest);
  }, 10_000);

  it(
    'raising gamma from 0 to 1 with search strictly increases expressive score',
    async () => {
      const base: PlanRequest = {
        scenario: 'play_music',
        variant: 'E',
        gamma: 0,
        seed: 0,
        mode: 'searched',
        search: 'beam',
        overrides: [],
      };
      const low = await client.plan(base);
      const high = await client.plan({ ...base, gamma: 1 });
      const diff = diffMetrics(low.response.metrics, high.response.metrics);
      expect(diff.dE).toBeGreaterThan(0);
      expect(high.response.metrics.report.F).toBeCloseTo(low.response.metrics.report.F, 12);
    },
    60_000,
  );
});
