// Client-side validation of primitive-parameter overrides against the
// catalog schema, so malformed values never reach the endpoint.

import type { Catalog, Override, ParamSchema, PlanStep } from './types';

export interface OverrideIssue {
  index: number;
  param: string | null;
  message: string;
}

function checkValue(name: string, schema: ParamSchema, value: number | string): string | null {
  if (schema.type === 'str') {
    return typeof value === 'string' ? null : `${name} must be a string`;
  }
  if (typeof value !== 'number' || !Number.isFinite(value)) {
    return `${name} must be a finite number`;
  }
  if (schema.type === 'int' && !Number.isInteger(value)) {
    return `${name} must be an integer`;
  }
  if (schema.low !== null && value < schema.low) {
    return `${name} below minimum ${schema.low}`;
  }
  if (schema.high !== null && value > schema.high) {
    return `${name} above maximum ${schema.high}`;
  }
  return null;
}

/** Validate overrides against the plan they apply to. Empty result = valid. */
export function validateOverrides(
  catalog: Catalog,
  plan: PlanStep[],
  overrides: Override[],
): OverrideIssue[] {
  const issues: OverrideIssue[] = [];
  for (const override of overrides) {
    if (!Number.isInteger(override.index) || override.index < 0 || override.index >= plan.length) {
      issues.push({
        index: override.index,
        param: null,
        message: `step index ${override.index} outside plan of ${plan.length} steps`,
      });
      continue;
    }
    const step = plan[override.index]!;
    const schemas = catalog.kinds[step.kind];
    if (schemas === undefined) {
      issues.push({ index: override.index, param: null, message: `unknown step kind ${step.kind}` });
      continue;
    }
    for (const [name, value] of Object.entries(override.params)) {
      const schema = schemas[name];
      if (schema === undefined) {
        issues.push({ index: override.index, param: name, message: `${step.kind} has no parameter ${name}` });
        continue;
      }
      const problem = checkValue(name, schema, value);
      if (problem !== null) {
        issues.push({ index: override.index, param: name, message: problem });
      }
    }
  }
  return issues;
}

/** Parse one input-field string into the schema's value type, or an error message. */
export function parseParamValue(
  schema: ParamSchema,
  raw: string,
): { value: number | string } | { error: string } {
  if (schema.type === 'str') {
    return raw.length > 0 ? { value: raw } : { error: 'must not be empty' };
  }
  const value = Number(raw);
  if (raw.trim() === '' || !Number.isFinite(value)) {
    return { error: 'must be a finite number' };
  }
  if (schema.type === 'int' && !Number.isInteger(value)) {
    return { error: 'must be an integer' };
  }
  return { value };
}
