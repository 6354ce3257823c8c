// Differences between two fetched metrics documents. Pure display
// arithmetic over endpoint numbers: the studio never scores trajectories.

import type { MetricsDoc } from './types';

export interface MetricsDiff {
  dF: number;
  dE: number;
  dTotal: number;
  dDuration: number;
}

export function diffMetrics(from: MetricsDoc, to: MetricsDoc): MetricsDiff {
  return {
    dF: to.report.F - from.report.F,
    dE: to.report.E - from.report.E,
    dTotal: to.report.total - from.report.total,
    dDuration: to.duration - from.duration,
  };
}

export function formatSigned(value: number, digits = 3): string {
  const rounded = value.toFixed(digits);
  return value > 0 ? `+${rounded}` : rounded;
}
