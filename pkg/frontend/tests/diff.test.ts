import { describe, expect, it } from 'vitest';

import { diffMetrics, formatSigned } from '../src/diff';
import type { MetricsDoc } from '../src/types';

function metrics(F: number, E: number, duration: number): MetricsDoc {
  return {
    format: 'metrics',
    version: '1.0',
    scenario: 'remind_water',
    variant: 'E',
    gamma: 1,
    seed: 0,
    mode: 'scripted',
    search: 'beam',
    plan: [],
    report: { F, E, gamma: 1, total: F + E, per_category: {}, scores: {} },
    goal_reached: true,
    trajectory_digest: 'x'.repeat(64),
    duration,
    timing_ms: 10,
  };
}

describe('diffMetrics', () => {
  it('reports deltas from the first to the second document', () => {
    const d = diffMetrics(metrics(1, 0.5, 2.0), metrics(1, 3.25, 5.5));
    expect(d.dF).toBe(0);
    expect(d.dE).toBeCloseTo(2.75, 12);
    expect(d.dTotal).toBeCloseTo(2.75, 12);
    expect(d.dDuration).toBeCloseTo(3.5, 12);
  });

  it('is antisymmetric', () => {
    const a = metrics(1, 0.5, 2.0);
    const b = metrics(0, 4.0, 1.0);
    const forward = diffMetrics(a, b);
    const backward = diffMetrics(b, a);
    expect(forward.dE).toBe(-backward.dE);
    expect(forward.dF).toBe(-backward.dF);
    expect(forward.dDuration).toBe(-backward.dDuration);
  });
});

describe('formatSigned', () => {
  it('prefixes positives and keeps negative signs', () => {
    expect(formatSigned(1.23456)).toBe('+1.235');
    expect(formatSigned(-0.5)).toBe('-0.500');
    expect(formatSigned(0)).toBe('0.000');
    expect(formatSigned(2.5, 1)).toBe('+2.5');
  });
});
