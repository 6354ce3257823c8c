import { describe, expect, it } from 'vitest';

import { parseParamValue, validateOverrides } from '../src/catalog';
import type { Catalog, PlanStep } from '../src/types';

const catalog: Catalog = {
  anchors: ['pre', 'mid', 'post', 'terminal-'],
  kinds: {
    Nod: {
      amplitude: { type: 'float', default: 0.25, low: 0, high: 1.2, required: false },
      cycles: { type: 'int', default: 2, low: 1, high: 8, required: false },
    },
    OrientToward: {
      target: { type: 'str', default: null, low: null, high: null, required: true },
      duration: { type: 'float', default: 1, low: 0.1, high: 6, required: false },
    },
  },
};

const plan: PlanStep[] = [
  { kind: 'Nod', anchor: 'mid', params: { amplitude: 0.3, cycles: 2 } },
  { kind: 'OrientToward', anchor: 'terminal-', params: { target: 'user', duration: 1 } },
];

describe('validateOverrides', () => {
  it('accepts in-range typed values', () => {
    const issues = validateOverrides(catalog, plan, [
      { index: 0, params: { amplitude: 0.5, cycles: 3 } },
      { index: 1, params: { target: 'window' } },
    ]);
    expect(issues).toEqual([]);
  });

  it('rejects out-of-range amplitude before any request is made', () => {
    const issues = validateOverrides(catalog, plan, [{ index: 0, params: { amplitude: 5 } }]);
    expect(issues).toHaveLength(1);
    expect(issues[0]!.message).toContain('above maximum');
  });

  it('rejects a non-integer cycle count', () => {
    const issues = validateOverrides(catalog, plan, [{ index: 0, params: { cycles: 2.5 } }]);
    expect(issues[0]!.message).toContain('integer');
  });

  it('rejects unknown parameters and bad indices', () => {
    const issues = validateOverrides(catalog, plan, [
      { index: 0, params: { wobble: 1 } },
      { index: 7, params: { amplitude: 0.1 } },
    ]);
    expect(issues).toHaveLength(2);
    expect(issues[0]!.message).toContain('no parameter');
    expect(issues[1]!.message).toContain('outside plan');
  });

  it('rejects a numeric value for a string parameter', () => {
    const issues = validateOverrides(catalog, plan, [{ index: 1, params: { target: 3 } }]);
    expect(issues[0]!.message).toContain('string');
  });
});

describe('parseParamValue', () => {
  const float = catalog.kinds['Nod']!['amplitude']!;
  const int = catalog.kinds['Nod']!['cycles']!;
  const str = catalog.kinds['OrientToward']!['target']!;

  it('parses numbers by schema type', () => {
    expect(parseParamValue(float, '0.4')).toEqual({ value: 0.4 });
    expect(parseParamValue(int, '3')).toEqual({ value: 3 });
    expect(parseParamValue(str, 'cup')).toEqual({ value: 'cup' });
  });

  it('flags unparseable input', () => {
    expect(parseParamValue(float, 'abc')).toHaveProperty('error');
    expect(parseParamValue(float, '')).toHaveProperty('error');
    expect(parseParamValue(int, '2.5')).toHaveProperty('error');
    expect(parseParamValue(str, '')).toHaveProperty('error');
  });
});
